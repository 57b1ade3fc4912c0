import realrootfinder as rrf
from realrootfinder.modules.structures import SuiteConfig, Family, Algo


# Run a small benchmark grid and export it next to this script
if __name__ == "__main__":
    suite = SuiteConfig(
        name="hybrid_type_iv",
        family=Family.TYPE_IV,
        algo=Algo.HYBRID,
        n=[32, 64],
        r=[60, 80],
        trials=1,
        use_r_hint=True,
    )
    with rrf.RealRootFinder(verbose=True, disable_logs=True) as finder:
        records, (csv_path, json_path) = finder.bench(suite, dest=".")
        for record in records:
            print(record)
        print(f"Wrote {csv_path}")
