import realrootfinder as rrf
from realrootfinder.modules import bench
from realrootfinder.modules.structures import Family, Algo


# Real roots of T_8 * (x^56 - 1) with every flow
if __name__ == "__main__":
    p = bench.gen_type(Family.TYPE_I, 64, 8)

    with rrf.RealRootFinder(disable_logs=True) as finder:
        for algo in (Algo.SIGN, Algo.STABILIZED, Algo.MODULAR, Algo.ORACLE):
            report = finder.solve(p, algo)
            print(report)
