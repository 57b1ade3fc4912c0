"""Input families and the experiment runner behind the benchmark tables."""

import numpy as np

from . import utils
from . import polycore
from . import loggersetup
from .denselinalg import qr_positive, eigenvalues
from .refine import oracle_roots
from .signiter import SignFlow
from .modularflow import ModularFlow
from .exceptions import RealRootFinderError, InvalidConfig
from .structures import (
    Polynomial,
    SignFlowConfig,
    BenchRecord,
    SuiteConfig,
    Family,
    Algo,
    Variant,
    Status,
    Type3Reading,
)

# nonreal diagonal entries keep at least this much imaginary part
MIN_IMAG = 0.1

ALGO_VARIANTS = {
    Algo.SIGN: Variant.BASIC,
    Algo.STABILIZED: Variant.STABILIZED,
    Algo.HYBRID: Variant.HYBRID,
    Algo.MODULAR: Variant.MODULAR,
    Algo.ORACLE: Variant.STABILIZED,
}


def gen_mignotte(n: int) -> Polynomial:
    """x^n + (100x - 1)^3"""
    if n < 4:
        raise InvalidConfig(f"Mignotte polynomials need n >= 4, got {n}")
    c = np.zeros(n + 1)
    c[:4] = [-1.0, 300.0, -3e4, 1e6]
    c[n] += 1.0
    return Polynomial(c)


def _gaussian_poly(degree, rng) -> Polynomial:
    c = utils.gaussian(degree + 1, rng)
    if c[-1] == 0:
        c[-1] = 1.0
    return Polynomial(c)


def gen_type(t: str, n: int, r: int, seed=0, type3_reading: str = Type3Reading.IMAGINARY) -> Polynomial:
    """Test polynomial of family t.

    I, II, III and random_product multiply the Chebyshev polynomial T_r
    by a degree n - r factor: x^(n-r) - 1; 1 + 2x + ... + (n-r+1)x^(n-r);
    (x + 1)(x + a)...(x + a^(n-r-1)) with a = i/100 (or 1/100); a Gaussian
    polynomial. IV is x^n - (a x - 1)^3 with a = r. V has Gaussian
    coefficients.
    """
    rng = utils.make_rng(*utils.seed_key(seed))
    if t == Family.MIGNOTTE:
        return gen_mignotte(n)
    if t == Family.TYPE_IV:
        cube = polycore.poly_mul(polycore.poly_mul(Polynomial([-1.0, r]), Polynomial([-1.0, r])), Polynomial([-1.0, r]))
        return polycore.poly_add(Polynomial(np.eye(n + 1)[n]), cube, 1.0, -1.0)
    if t == Family.TYPE_V:
        return _gaussian_poly(n, rng)
    if not 0 <= r <= n:
        raise InvalidConfig(f"r={r} does not fit n={n}")
    m = n - r
    if t == Family.TYPE_I:
        other = Polynomial(np.concatenate(([-1.0], np.zeros(m - 1), [1.0]))) if m else Polynomial([1.0])
    elif t == Family.TYPE_II:
        other = Polynomial(np.arange(1, m + 2, dtype=float))
    elif t == Family.TYPE_III:
        a = 0.01j if type3_reading == Type3Reading.IMAGINARY else 0.01
        other = polycore.from_roots([-(a**j) for j in range(m)])
    elif t == Family.RANDOM_PRODUCT:
        other = _gaussian_poly(m, rng)
    else:
        raise InvalidConfig(f"Unknown polynomial family: {t}")
    return polycore.poly_mul(polycore.chebyshev(r), other)


def _spectrum(n, r, rng) -> np.ndarray:
    real = utils.gaussian(r, rng)
    nonreal = utils.complex_gaussian(n - r, rng)
    nonreal = nonreal.real + 1j * np.sign(nonreal.imag) * (np.abs(nonreal.imag) + MIN_IMAG)
    return np.concatenate((real.astype(complex), nonreal))


def gen_matrix(t: str, n: int, r: int, seed=0) -> np.ndarray:
    """Test matrix of family t.

    tridiag is Gaussian tridiagonal. rotated_diag is Q^T S Q with Q the
    orthogonal factor of a real Gaussian matrix and S diagonal with r real
    and n - r nonreal Gaussian entries; complex_symmetric is the same
    product made exactly symmetric.
    """
    if not 0 <= r <= n:
        raise InvalidConfig(f"r={r} does not fit n={n}")
    rng = utils.make_rng(*utils.seed_key(seed))
    if t == Family.TRIDIAG:
        return (
            np.diag(utils.gaussian(n, rng))
            + np.diag(utils.gaussian(n - 1, rng), 1)
            + np.diag(utils.gaussian(n - 1, rng), -1)
        )
    if t in (Family.ROTATED_DIAG, Family.COMPLEX_SYMMETRIC):
        Q, _ = qr_positive(utils.gaussian((n, n), rng))
        A = Q.T @ np.diag(_spectrum(n, r, rng)) @ Q
        if t == Family.COMPLEX_SYMMETRIC:
            A = 0.5 * (A + A.T)
        return A
    raise InvalidConfig(f"Unknown matrix family: {t}")


class Bench:
    """Runs benchmark suites and aggregates them into BenchRecords."""

    def __init__(self, log_path=None, verbose=False):
        self.log_path = log_path
        self.verbose = verbose
        self.logger = loggersetup.create_logger(__file__, log_path)

    def flow_config(self, suite: SuiteConfig) -> SignFlowConfig:
        overrides = dict(suite.flow)
        overrides.setdefault("variant", ALGO_VARIANTS[suite.algo])
        return SignFlowConfig.from_dict(overrides)

    def run_suite(self, suite: SuiteConfig) -> list:
        """One record per (n, r), sorted by (n, r). Failed trials are counted,
        not averaged."""

        self.logger.info(f"Running suite '{suite.name}'")
        self.logger.debug(f"suite={suite}")
        suite.validate()
        cfg = self.flow_config(suite)
        if suite.algo == Algo.MODULAR:
            solver = ModularFlow(cfg, log_path=self.log_path)
        else:
            solver = SignFlow(cfg, log_path=self.log_path)
        solver.logger.disabled = self.logger.disabled
        grid = sorted((n, r) for n in suite.n for r in suite.r)
        total = len(grid) * suite.trials
        records = []
        done = 0
        if self.verbose:
            print(f"Running {suite.name}...0%", end="\r")
        for n, r in grid:
            details = []
            for trial in range(suite.trials):
                details.append(self.run_trial(suite, solver, cfg, n, r, trial))
                done += 1
                if self.verbose:
                    print(f"Running {suite.name}...{utils.percentage(done, total)}%", end="\r")
            records.append(self._aggregate(suite, n, r, details))
            self.logger.debug(records[-1].colorless_str)
        if self.verbose:
            print(f"Running {suite.name}... done")
        return records

    def run_trial(self, suite: SuiteConfig, solver, cfg: SignFlowConfig, n: int, r: int, trial: int) -> dict:
        key = (suite.seed, n, r, trial)
        detail = {"trial": trial, "iterations": None, "error": None, "found": None, "expected": None, "status": Status.OK}
        try:
            instance, truth = self._instance(suite, cfg, n, r, key)
        except RealRootFinderError as e:
            self.logger.warning(f"Trial {key} rejected: {e.__class__.__name__}: {e}")
            detail["status"] = "rejected"
            return detail
        detail["expected"] = len(truth)
        r_hint = len(truth) if suite.use_r_hint else None
        solver.seed = int(utils.make_rng(*key).integers(2**31))
        try:
            found, iterations, status = self._solve(suite, solver, instance, truth, r_hint)
        except RealRootFinderError as e:
            self.logger.warning(f"Trial {key} failed: {e.__class__.__name__}: {e}")
            detail["status"] = Status.FAILURE
            return detail
        detail.update(found=len(found), iterations=iterations, status=status)
        if status == Status.FAILURE:
            return detail
        if len(found) != len(truth):
            self.logger.warning(f"Trial {key}: {len(found)} real roots found, {len(truth)} expected")
            detail["status"] = "mismatch"
            return detail
        if len(truth):
            detail["error"] = utils.match_multisets(found, truth)
        return detail

    def _instance(self, suite, cfg, n, r, key):
        """The input and its sorted real roots (or real eigenvalues)."""
        if suite.family in Family.matrices():
            A = gen_matrix(suite.family, n, r, key)
            return A, self._real_part(eigenvalues(A), cfg.im_tol)
        p = gen_type(suite.family, n, r, key, suite.type3_reading)
        return p, self._real_part(oracle_roots(p, seed=suite.seed), cfg.im_tol)

    @staticmethod
    def _real_part(values, im_tol) -> np.ndarray:
        values = np.asarray(values)
        real = values[np.abs(values.imag) <= im_tol * np.maximum(1.0, np.abs(values))]
        return np.sort(real.real)

    def _solve(self, suite, solver, instance, truth, r_hint):
        if suite.algo == Algo.ORACLE:
            return truth, 0, Status.OK
        if suite.family in Family.matrices():
            report = solver.real_eigenvalues(instance, r_hint, solver.config.variant)
        elif suite.algo == Algo.MODULAR:
            report = solver.real_roots_modular(instance, r_hint)
        else:
            report = solver.solve(instance, r_hint)
        return np.asarray(report.roots), report.iterations, report.status

    @staticmethod
    def _aggregate(suite, n, r, details) -> BenchRecord:
        good = [d for d in details if d["status"] in (Status.OK, Status.SHIFTED)]
        iterations = [d["iterations"] for d in good]
        errors = [d["error"] for d in good if d["error"] is not None]

        def stats(values):
            if not values:
                return float("nan"), float("nan")
            return float(np.mean(values)), float(np.std(values))

        iteration_mean, iteration_std = stats(iterations)
        error_mean, error_std = stats(errors)
        return BenchRecord(
            family=suite.family,
            n=n,
            r=r,
            trials=suite.trials,
            failures=len(details) - len(good),
            iteration_mean=iteration_mean,
            iteration_std=iteration_std,
            error_mean=error_mean,
            error_std=error_std,
            seed=suite.seed,
            mismatches=sum(d["status"] == "mismatch" for d in details),
            details=details,
        )
