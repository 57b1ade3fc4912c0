import dataclasses

import numpy as np

from .modules import (
    loggersetup,
    filehandler,
    structures,
    bench,
    planegeometry,
)
from .modules.signiter import SignFlow
from .modules.modularflow import ModularFlow
from .modules.refine import oracle_roots, root_residuals
from .modules.exceptions import InvalidConfig
from .modules.structures import (
    Polynomial,
    SignFlowConfig,
    SignFlowReport,
    SuiteConfig,
    DiscQuery,
    Algo,
    Variant,
)

DEFAULT_STORAGE_PATH = structures.DefaultStoragePath.get_path()
VERIFY_TOLERANCE = 1e-12


class RealRootFinder:
    """Finds the real roots of real polynomials and the real eigenvalues
    of matrices by modified matrix sign iterations.

    Args:
        verbose (bool, optional): Print progress to console. Defaults to False.

        disable_logs (bool, optional): Disable logging. Log files are
            written under `storage_path`/Logs otherwise. Defaults to False.

        keep_logs (bool, optional): Do not delete old logs. See
            `log_duration`. Defaults to False.

        log_duration (int, optional): Log files older than this many days
            are deleted unless `keep_logs` is set. Defaults to 15.

        storage_path (str, optional): Folder for logs and exported tables.
            Defaults to DEFAULT_STORAGE_PATH.

        config_path (str|None, optional): YAML file whose sections override
            the packaged `default_config.yaml`. Defaults to None.

        seed (int, optional): Master seed of every randomized step.
            Defaults to 0.
    """

    def __init__(
        self,
        verbose=False,
        disable_logs=False,
        keep_logs=False,
        log_duration=15,
        storage_path=DEFAULT_STORAGE_PATH,
        config_path=None,
        seed=0,
    ):
        self.verbose = verbose
        self.seed = seed
        self.filehandler = filehandler.FileHandler(storage_path=storage_path, disable_logs=disable_logs)
        self.log_path = None if disable_logs else self.filehandler.log_path
        self.logger = loggersetup.create_logger(__file__, self.log_path)
        self.config = self.filehandler.read_config(config_path)
        self.disable_logs = disable_logs or bool(self.config["logging"].get("disable"))
        if self.disable_logs:
            self._disable_logs()

        if not keep_logs and self.log_path:
            self.filehandler._delete_old_files(self.log_path, self.config["logging"].get("log_duration", log_duration))
        self.logger.info(f"{'='*20} SESSION START {'='*20}")
        self.logger.debug(f"verbose={verbose}")
        self.logger.debug(f"disable_logs={disable_logs}")
        self.logger.debug(f"storage_path={storage_path}")
        self.logger.debug(f"config_path={config_path}")
        self.logger.debug(f"seed={seed}")

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_value, tb):
        if exc_type is not None:
            self.logger.error(f"Session ended with {exc_type.__name__}: {exc_value}")

    def _disable_logs(self):
        self.logger.disabled = True
        self.filehandler.logger.disabled = True

    def _attach(self, worker):
        worker.logger.disabled = self.disable_logs
        return worker

    def flow_config(self, algo=Algo.STABILIZED, **overrides) -> SignFlowConfig:
        """The configured flow settings for an algorithm, with `overrides`
        (None values skipped) laid over them."""

        settings = dict(self.config["flow"])
        settings.update({k: v for k, v in overrides.items() if v is not None})
        if "variant" not in overrides:
            keep = algo == Algo.HYBRID and settings.get("variant") in (Variant.CUBIC, Variant.QUINTIC)
            if not keep:
                settings["variant"] = bench.ALGO_VARIANTS[algo]
        return SignFlowConfig.from_dict(settings)

    def read_polynomial(self, path) -> Polynomial:
        return self.filehandler.read_polynomial(path)

    def solve(self, p: Polynomial, algo=Algo.STABILIZED, r=None, **overrides) -> SignFlowReport:
        """Real roots of p, sorted, with their residuals.

        Args:
            p (Polynomial): Real polynomial of degree at least 2.
            algo (str, optional): One of `Algo.all()`. Defaults to stabilized.
            r (int|None, optional): Number of real roots if known.
            **overrides: SignFlowConfig fields for this call only.
        """

        self.logger.info(f"Solving with '{algo}'")
        self.logger.debug(f"p={p.colorless_str}")
        self.logger.debug(f"r={r}")
        if algo not in Algo.all():
            msg = f"Unknown algorithm: {algo}"
            self.logger.error(msg)
            raise InvalidConfig(msg)
        if algo == Algo.ORACLE:
            return self._oracle_report(p, overrides.get("im_tol") or self.config["flow"]["im_tol"])
        cfg = self.flow_config(algo, **overrides)
        if algo == Algo.MODULAR:
            solver = self._attach(ModularFlow(cfg, log_path=self.log_path, seed=self.seed, verbose=self.verbose))
            return solver.real_roots_modular(p, r)
        solver = self._attach(SignFlow(cfg, log_path=self.log_path, seed=self.seed, verbose=self.verbose))
        return solver.solve(p, r)

    def _oracle_report(self, p: Polynomial, im_tol) -> SignFlowReport:
        roots = oracle_roots(p, seed=self.seed)
        real = np.sort(roots[np.abs(roots.imag) <= im_tol * np.maximum(1.0, np.abs(roots))].real)
        report = SignFlowReport(roots=real, iterations=0, residuals=root_residuals(p, real), variant=Algo.ORACLE)
        self.logger.info(report.colorless_str)
        return report

    def real_eigenvalues(self, A, algo=Algo.STABILIZED, r=None, **overrides) -> SignFlowReport:
        """Real eigenvalues of a square matrix by the basic ('sign') or the
        stabilized flow."""

        self.logger.info(f"Real eigenvalues with '{algo}'")
        if algo not in (Algo.SIGN, Algo.STABILIZED):
            msg = f"Matrix input runs with sign or stabilized, not '{algo}'"
            self.logger.error(msg)
            raise InvalidConfig(msg)
        cfg = self.flow_config(algo, **overrides)
        solver = self._attach(SignFlow(cfg, log_path=self.log_path, seed=self.seed, verbose=self.verbose))
        return solver.real_eigenvalues(A, r, cfg.variant)

    def count(self, p: Polynomial, center=0j, radius=1.0, squarings=0) -> int:
        """Number of roots of p in the disc D(center, radius)."""

        self.logger.info("Counting roots in a disc")
        query = DiscQuery(center, radius, squarings)
        self.logger.debug(f"query={query}")
        if squarings:
            return planegeometry.count_with_squaring(p, query)
        return planegeometry.count_roots_disc(p, query)

    def radii(self, p: Polynomial, refine=0):
        """(lower, upper) estimates of every root radius, descending."""

        self.logger.info("Estimating root radii")
        return planegeometry.root_radii_bracket(p, refine)

    def proximity(self, p: Polynomial, c, refine=0):
        self.logger.info(f"Bracketing the distance from {c} to the roots")
        return planegeometry.proximity(p, c, refine)

    def load_suite(self, name) -> SuiteConfig:
        suites = self.filehandler.read_suites()
        if name not in suites:
            msg = f"Unknown suite '{name}', expected one of {sorted(suites)}"
            self.logger.error(msg)
            raise InvalidConfig(msg)
        return suites[name]

    def bench(self, suite, trials=None, n=None, seed=None, dest=None, export=True):
        """Runs a suite (a name from suites.yaml or a SuiteConfig) and exports
        its table.

        Returns the records and the written (csv, json) paths, or None for
        the paths when `export` is False.
        """

        if not isinstance(suite, SuiteConfig):
            suite = self.load_suite(suite)
        flow = {k: v for k, v in self.config["flow"].items() if k != "variant"}
        flow.update(suite.flow)
        changes = {"flow": flow}
        if trials is not None:
            changes["trials"] = trials
        if n:
            changes["n"] = list(n)
        if seed is not None:
            changes["seed"] = seed
        suite = dataclasses.replace(suite, **changes).validate()
        self.logger.info(f"Benchmarking '{suite.name}'")
        self.logger.debug(f"suite={suite}")

        runner = self._attach(bench.Bench(log_path=self.log_path, verbose=self.verbose))
        records = runner.run_suite(suite)
        if not export:
            return records, None
        detail = self.verbose or bool(self.config["bench"].get("detail"))
        paths = self.filehandler.export_bench(records, suite.name, dest or self.config["bench"].get("dest"), detail)
        return records, paths

    def verify(self, report: dict) -> dict:
        """Recomputes the residuals of a solve report against its embedded
        polynomial.

        Returns the fresh residuals, the largest deviation from the stored
        ones and whether it stays within 1e-12.
        """

        self.logger.info("Verifying a solve report")
        p = filehandler.polynomial_from_dict(report["polynomial"])
        roots = np.asarray(report["roots"], dtype=float)
        residuals = root_residuals(p, roots)
        stored = np.asarray(report.get("residuals", []), dtype=float)
        if stored.shape != residuals.shape:
            deviation = float("inf")
        else:
            deviation = float(np.max(np.abs(residuals - stored))) if residuals.size else 0.0
        self.logger.debug(f"deviation={deviation}")
        return {
            "roots": roots.tolist(),
            "residuals": residuals.tolist(),
            "max_deviation": deviation,
            "ok": deviation <= VERIFY_TOLERANCE,
        }
