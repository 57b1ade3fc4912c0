import sys
import json
import argparse

from ..realrootfinder import RealRootFinder
from .exceptions import InputError, AlgorithmFailure, PolynomialFormatError
from .structures import CliConfig, Algo, Status

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FAILURE = 3
EXIT_IO = 4


def _complex_arg(text):
    """'re' or 're,im'"""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're' or 're,im', got '{text}'")


def parseargs(argv=None):
    parser = argparse.ArgumentParser(
        prog="realrootfinder",
        description="real roots of polynomials by modified matrix sign iterations",
    )
    parser.add_argument("command", choices=CliConfig.COMMANDS, help="what to run")
    parser.add_argument(
        "-a",
        "--algo",
        default=Algo.STABILIZED,
        choices=Algo.all(),
        help="root finder for 'solve'",
    )
    parser.add_argument(
        "-i", "--input", default=None, type=str, help="polynomial file (json or text), or a report for 'verify'"
    )
    parser.add_argument("--r", default=None, type=int, help="number of real roots if known")
    parser.add_argument("--alpha", default=None, type=float, help="stabilizer offset alpha")
    parser.add_argument("--tol", default=None, type=float, help="agcd acceptance tolerance")
    parser.add_argument("--max-iter", default=None, type=int, help="iteration cap")
    parser.add_argument("--check-period", default=None, type=int, help="iterations between rank checks")
    parser.add_argument("--seed", default=None, type=int, help="master random seed")
    parser.add_argument(
        "-o", "--output", default="text", choices=CliConfig.OUTPUTS, help="output format"
    )
    parser.add_argument("--trials", default=None, type=int, help="trials per (n, r) for 'bench'")
    parser.add_argument("--suite", default=None, type=str, help="suite name from suites.yaml for 'bench'")
    parser.add_argument("--n", nargs="+", default=[], type=int, help="degrees to run for 'bench'")
    parser.add_argument("--center", default=0j, type=_complex_arg, help="disc center 're,im' for 'count'")
    parser.add_argument("--radius", default=1.0, type=float, help="disc radius for 'count'")
    parser.add_argument("--squarings", default=0, type=int, help="root squarings before counting")
    parser.add_argument("--refine", default=0, type=int, help="root squarings for 'radii'")
    parser.add_argument("-v", "--verbose", action="store_true", help="print progress")
    parser.add_argument("--config", default=None, type=str, help="yaml file overriding the default configuration")
    parser.add_argument("--dest", default=None, type=str, help="output folder for 'bench' tables")
    parser.add_argument(
        "-dl",
        "--disable-logs",
        action="store_true",
        help="actions done within the current session will not be logged",
    )
    return parser.parse_args(argv)


def _error(e):
    print(f"{e.__class__.__name__}: {e}", file=sys.stderr)


def run_solve(finder: RealRootFinder, cfg: CliConfig) -> int:
    p = finder.read_polynomial(cfg.input)
    report = finder.solve(p, cfg.algo, cfg.r, **cfg.flow_overrides())
    if cfg.output == "json":
        data = {"algo": cfg.algo, "polynomial": p.to_dict(), **report.to_dict()}
        print(json.dumps(data, indent=4))
    elif cfg.output == "csv":
        print("root,residual")
        for x, res in zip(report.roots, report.residuals):
            print(f"{float(x)!r},{float(res)!r}")
    else:
        print(report)
        for x, res in zip(report.roots, report.residuals):
            print(f"{float(x): .16e}  residual {float(res):.3e}")
    return EXIT_FAILURE if report.status == Status.FAILURE else EXIT_OK


def run_count(finder: RealRootFinder, cfg: CliConfig) -> int:
    p = finder.read_polynomial(cfg.input)
    count = finder.count(p, cfg.center, cfg.radius, cfg.squarings)
    if cfg.output == "json":
        print(json.dumps({"center": [cfg.center.real, cfg.center.imag], "radius": cfg.radius, "count": count}))
    elif cfg.output == "csv":
        print("count")
        print(count)
    else:
        print(count)
    return EXIT_OK


def run_radii(finder: RealRootFinder, cfg: CliConfig) -> int:
    p = finder.read_polynomial(cfg.input)
    lower, upper = finder.radii(p, cfg.refine)
    if cfg.output == "json":
        print(json.dumps({"lower": lower.tolist(), "upper": upper.tolist()}, indent=4))
    else:
        sep = "," if cfg.output == "csv" else " "
        print(sep.join(["lower", "upper"]))
        for lo, hi in zip(lower, upper):
            print(f"{lo:.6e}{sep}{hi:.6e}")
    return EXIT_OK


def run_verify(finder: RealRootFinder, cfg: CliConfig) -> int:
    result = finder.verify(finder.filehandler.read_report(cfg.input))
    if cfg.output == "json":
        print(json.dumps(result, indent=4))
    else:
        state = "ok" if result["ok"] else "mismatch"
        print(f"{state}: {len(result['roots'])} roots, max residual deviation {result['max_deviation']:.3e}")
    return EXIT_OK if result["ok"] else EXIT_FAILURE


def run_bench(finder: RealRootFinder, cfg: CliConfig) -> int:
    records, (csv_path, json_path) = finder.bench(cfg.suite, cfg.trials, cfg.n, cfg.seed, cfg.dest)
    if cfg.output == "json":
        with open(json_path, "r", encoding="utf-8") as f:
            print(f.read(), end="")
    elif cfg.output == "csv":
        with open(csv_path, "r", encoding="utf-8") as f:
            print(f.read(), end="")
    else:
        for record in records:
            print(record)
        print(f"Wrote {csv_path} and {json_path}")
    return EXIT_OK


COMMANDS = {
    "solve": run_solve,
    "count": run_count,
    "radii": run_radii,
    "verify": run_verify,
    "bench": run_bench,
}


def main(argv=None) -> int:
    """Exit codes: 0 success, 2 usage or input error, 3 algorithm failure,
    4 file error."""

    try:
        args = parseargs(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        cfg = CliConfig(**vars(args)).validate()
    except InputError as e:
        _error(e)
        return EXIT_USAGE

    try:
        with RealRootFinder(
            verbose=cfg.verbose,
            disable_logs=cfg.disable_logs,
            config_path=cfg.config,
            seed=cfg.seed or 0,
        ) as finder:
            return COMMANDS[cfg.command](finder, cfg)
    except InputError as e:
        _error(e)
        return EXIT_USAGE
    except PolynomialFormatError as e:
        _error(e)
        return EXIT_IO
    except AlgorithmFailure as e:
        _error(e)
        return EXIT_FAILURE
    except (OSError, RuntimeError) as e:
        _error(e)
        return EXIT_IO
    except Exception as e:
        _error(e)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
