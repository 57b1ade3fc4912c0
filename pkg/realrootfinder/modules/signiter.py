"""Matrix sign iterations modified for real eigen-solving.

The step x <- (x - 1/x)/2 keeps real numbers real and drives every
nonreal x to sign(Im x) i. Applied to the companion matrix, the nonreal
eigenvalues go to +-i, so M^2 + I loses rank except on the eigenspace of
the real ones. That eigenspace is extracted by a randomized sketch and
the real roots are read off a small Rayleigh quotient.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import utils
from . import loggersetup
from .denselinalg import invert, cond_est, norm2_est, numerical_rank, eigenvalues
from .frobenius import companion
from .subspace import dominant_eigenspace, rayleigh_reduce
from .refine import newton, root_residuals, backward_errors
from .planegeometry import count_roots_disc
from .exceptions import (
    ZeroInput,
    RealInput,
    ZeroConstantTerm,
    IllConditioned,
    SingularMatrix,
    ScalingFailed,
    NoConvergence,
    SubspaceFailure,
    MaxIterExceeded,
    DerivativeVanished,
    InputError,
    InvalidConfig,
    RealRootFinderError,
)
from .structures import Polynomial, SignFlowConfig, SignFlowReport, DiscQuery, Variant, ShiftPolicy, Scaling, Status

COND_TARGET = 1e5
STABILIZER_EXPONENT = 7
MAX_SHIFT_EXPONENT = 40
SHIFT_FRACTION = 0.05
DIVERGENCE_GROWTH = 1e12
DISC_RADIUS = 0.5
REAL_SNAP = 1e-8
BACKWARD_LIMIT = 1e3 * np.finfo(float).eps
SCALE_RANGE = 30


def mobius_step(x):
    """(x - 1/x)/2"""
    if x == 0:
        raise ZeroInput("The sign step is undefined at 0")
    return 0.5 * (x - 1 / x)


def mobius_bound(x0, h: int) -> float:
    """Upper bound on |x_h - sign(Im x0) i| after h sign steps from x0.

    With s = sign(Im x0) and K = |(x0 - s i)/(x0 + s i)| < 1 the bound is
    2 K^(2^h) / (1 - K^(2^h)).
    """
    x0 = complex(x0)
    if x0.imag == 0:
        raise RealInput("Real points never approach +-i")
    s = 1j if x0.imag > 0 else -1j
    power = abs((x0 - s) / (x0 + s)) ** (2**h)
    return 2 * power / (1 - power)


def sign_step(M):
    """(M - M^-1)/2. Raises IllConditioned or SingularMatrix from the inversion."""
    return 0.5 * (M - invert(M))


def cubic_step(M):
    """(M^3 + 3M)/2, evaluated as M(M^2 + 3I)/2."""
    M = np.asarray(M)
    I = np.eye(M.shape[0])
    return 0.5 * (M @ (M @ M + 3 * I))


def quintic_step(M):
    """-(3M^5 + 10M^3 + 15M)/8, evaluated by Horner in M^2."""
    M = np.asarray(M)
    I = np.eye(M.shape[0])
    M2 = M @ M
    return -0.125 * (M @ (M2 @ (3 * M2 + 10 * I) + 15 * I))


def _scalar_cubic(x):
    return 0.5 * (x**3 + 3 * x)


def _scalar_quintic(x):
    return -0.125 * (3 * x**5 + 10 * x**3 + 15 * x)


def newton_schultz_sign(M, tol: float = 1e-10, max_iter: int = 100):
    """sign(M) = M (M^2)^(-1/2) with the inverse square root from the coupled
    inversion-free iteration Y <- Y(3I - ZY)/2, Z <- (3I - ZY)Z/2,
    Y_0 = (aM)^-2, Z_0 = I.

    a = 2^j is picked so that ||I - (aM)^-2|| < 1, the region where the
    iteration converges.
    """
    M = np.asarray(M)
    n = M.shape[0]
    I = np.eye(n)
    A0 = invert(M @ M)
    best = None
    for j in range(-SCALE_RANGE, SCALE_RANGE + 1):
        a = 2.0**j
        gap = norm2_est(I - A0 / a**2)
        if best is None or gap < best[1]:
            best = (a, gap)
    a, gap = best
    if not gap < 1:
        raise ScalingFailed(f"No power-of-two scaling brings ||I - (aM)^-2|| below 1 (best {gap:.3f})")
    Y = A0 / a**2
    Z = I.astype(Y.dtype)
    for _ in range(max_iter):
        if np.linalg.norm(I - Z @ Y) <= tol:
            return (a * M) @ Y
        T = 0.5 * (3 * I - Z @ Y)
        Y, Z = Y @ T, T @ Z
        if not np.all(np.isfinite(Y)):
            break
    raise NoConvergence(f"Newton-Schultz iteration did not reach {tol} in {max_iter} steps")


def determinantal_scale(p: Polynomial):
    """nu = |p_n/p_0|^(1/n) and M_0 = sign_step(nu C_p).

    nu C_p has |det| = 1, which centres the eigenvalue moduli around 1.
    """
    if p.coeffs[0] == 0:
        raise ZeroConstantTerm("Determinantal scaling needs p(0) != 0")
    n = p.degree
    nu = float(abs(p.leading / p.coeffs[0]) ** (1.0 / n))
    return nu, sign_step(nu * companion(p))


@dataclass
class _FlowState:
    """Mutable state of one run."""

    variant: str
    rng: np.random.Generator
    k: int = 0
    shifts: int = 0
    rank_history: list = field(default_factory=list)
    switched_at: Optional[int] = None
    M: Optional[np.ndarray] = None
    pair: Optional[list] = None


class SignFlow:
    """Real roots of polynomials and real eigenvalues of matrices by
    modified matrix sign iterations."""

    def __init__(self, config: SignFlowConfig = None, log_path=None, seed=0, verbose=False):
        self.config = (config or SignFlowConfig()).validate()
        self.seed = seed
        self.verbose = verbose
        self.logger = loggersetup.create_logger(__file__, log_path)
        self.logger.debug(f"config={self.config.to_dict()}")
        self.logger.debug(f"seed={seed}")

    def solve(self, p: Polynomial, r_hint: int = None) -> SignFlowReport:
        """Runs the flow named by config.variant."""

        variant = self.config.variant
        if variant == Variant.BASIC:
            return self.real_roots_sign(p, r_hint)
        if variant == Variant.STABILIZED:
            return self.real_roots_stabilized(p, r_hint)
        if variant in (Variant.HYBRID, Variant.CUBIC, Variant.QUINTIC):
            return self.real_roots_hybrid(p, r_hint)
        msg = f"Variant '{variant}' is not a matrix sign flow"
        self.logger.error(msg)
        raise InvalidConfig(msg)

    def real_roots_sign(self, p: Polynomial, r_hint: int = None) -> SignFlowReport:
        """Sign steps on C_p; every check_period steps the numerical rank
        of M^2 + I is recorded and once it settles the dominant eigenspace
        gives the real roots."""

        self.logger.info("Finding real roots by matrix sign iterations")
        self._check_polynomial(p)
        C = companion(p)
        run = _FlowState(variant=Variant.BASIC, rng=utils.make_rng(self.seed, 1))
        run.M = C
        if self.config.scale == Scaling.DETERMINANTAL:
            try:
                nu, run.M = determinantal_scale(p)
                run.k = 1
                self.logger.debug(f"nu={nu}")
            except (ZeroConstantTerm, IllConditioned, SingularMatrix) as e:
                self.logger.warning(f"Skipping determinantal scaling ({e.__class__.__name__}: {e})")
        I = np.eye(C.shape[0])

        def advance(run):
            run.M = self._guarded(sign_step, run.M, run)

        def rank_matrix(run):
            return run.M @ run.M + I

        return self._iterate(C, p, run, advance, rank_matrix, self.config.check_period, r_hint)

    def real_roots_stabilized(self, p: Polynomial, r_hint: int = None) -> SignFlowReport:
        """Two coupled flows from alpha i I + N and alpha i I - N, N = C_p + beta I.

        Eigenvalues with |Im| < alpha move to i in both flows and sum to 2i;
        all others reach opposite signs and cancel. beta = 2^(7+k) with the
        smallest k >= 1 giving cond(N) < 1e5, and checks start after 7 + k
        steps.
        """

        self.logger.info("Finding real roots by stabilized sign iterations")
        self._check_polynomial(p, real=False)
        C = companion(p)
        n = C.shape[0]
        I = np.eye(n)
        beta, k = self._stabilizer_shift(C)
        N = C + beta * I
        alpha = self.config.alpha
        self.logger.debug(f"beta={beta}, alpha={alpha}")
        run = _FlowState(variant=Variant.STABILIZED, rng=utils.make_rng(self.seed, 2))
        run.pair = [alpha * 1j * I + N, alpha * 1j * I - N]

        def advance(run):
            run.pair = [self._guarded(sign_step, Y, run) for Y in run.pair]

        def rank_matrix(run):
            return run.pair[0] + run.pair[1]

        return self._iterate(C, p, run, advance, rank_matrix, STABILIZER_EXPONENT + k, r_hint)

    def real_roots_hybrid(self, p: Polynomial, r_hint: int = None) -> SignFlowReport:
        """Sign steps until every eigenvalue of the iterate is numerically
        real or inside D(+-i, 1/2), then the last two steps of every period
        are inversion-free (cubic, or quintic for the quintic variant).

        The start is shifted by beta = 2^j when cond(C_p) >= 1e5 and at
        least log2(beta) sign steps run before the first disc test. An
        inversion-free step that blows up the norm is replaced by a sign
        step and the flow drops back to the first phase.
        """

        self.logger.info("Finding real roots by hybrid sign iterations")
        self._check_polynomial(p)
        cfg = self.config
        C = companion(p)
        n = C.shape[0]
        I = np.eye(n)
        beta = self._hybrid_shift(C)
        T = math.ceil(math.log2(beta)) if beta > 1 else 0
        first_test = max(T, 1)
        step = quintic_step if cfg.variant == Variant.QUINTIC else cubic_step
        self.logger.debug(f"beta={beta}, T={T}, step={step.__name__}")
        run = _FlowState(variant=Variant.HYBRID, rng=utils.make_rng(self.seed, 3))
        run.M = C + beta * I
        period = cfg.check_period

        def inversion_free(k):
            return period < 3 or k % period in (0, period - 1)

        def advance(run):
            k = run.k + 1
            if run.switched_at is not None and inversion_free(k):
                before = run.M
                after = step(before)
                if self._diverged(before, after):
                    self.logger.warning(f"{step.__name__} diverged at iteration {k}, back to sign steps")
                    run.switched_at = None
                else:
                    run.M = after
                    return
            run.M = self._guarded(sign_step, run.M, run)
            if run.switched_at is None and k >= first_test and (k - first_test) % period == 0:
                if self._in_sign_discs(run.M):
                    run.switched_at = k
                    self.logger.debug(f"Switched to {step.__name__} at iteration {k}")
                    if cfg.cayley_transform:
                        run.M = self._cayley_two_step(run.M, I)

        def rank_matrix(run):
            return run.M @ run.M + I

        report = self._iterate(C, p, run, advance, rank_matrix, period, r_hint)
        report.variant = cfg.variant if cfg.variant in (Variant.CUBIC, Variant.QUINTIC) else Variant.HYBRID
        return report

    def real_eigenvalues(self, A, r_hint: int = None, variant: str = Variant.BASIC) -> SignFlowReport:
        """Real eigenvalues of a square matrix A by the basic or the
        stabilized flow started from A itself.

        Residuals are ||A v - lambda v|| / (||A|| ||v||) with v from inverse
        iteration on the Rayleigh quotient.
        """

        self.logger.info("Finding real eigenvalues by matrix sign iterations")
        A = np.asarray(A)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
            msg = f"Expected a nonempty square matrix, got shape {A.shape}"
            self.logger.error(msg)
            raise InputError(msg)
        n = A.shape[0]
        I = np.eye(n)
        if variant == Variant.STABILIZED:
            beta, k = self._stabilizer_shift(A)
            N = A + beta * I
            run = _FlowState(variant=variant, rng=utils.make_rng(self.seed, 4))
            run.pair = [self.config.alpha * 1j * I + N, self.config.alpha * 1j * I - N]

            def advance(run):
                run.pair = [self._guarded(sign_step, Y, run) for Y in run.pair]

            def rank_matrix(run):
                return run.pair[0] + run.pair[1]

            first_check = STABILIZER_EXPONENT + k
        elif variant == Variant.BASIC:
            run = _FlowState(variant=variant, rng=utils.make_rng(self.seed, 4))
            run.M = A

            def advance(run):
                run.M = self._guarded(sign_step, run.M, run)

            def rank_matrix(run):
                return run.M @ run.M + I

            first_check = self.config.check_period
        else:
            msg = f"Matrix input supports the basic and stabilized flows, not '{variant}'"
            self.logger.error(msg)
            raise InvalidConfig(msg)
        return self._iterate(A, None, run, advance, rank_matrix, first_check, r_hint)

    def _check_polynomial(self, p: Polynomial, real=True):
        if not isinstance(p, Polynomial) or p.degree < 2:
            msg = "Sign flows need a polynomial of degree at least 2"
            self.logger.error(msg)
            raise InputError(msg)
        if not p.is_real and not real:
            self.logger.warning("Complex coefficients: roots with |Im| below alpha count as real")
        elif not p.is_real:
            msg = "Sign flows need a polynomial with real coefficients"
            self.logger.error(msg)
            raise InputError(msg)

    def _stabilizer_shift(self, A):
        """beta = 2^(7+k) with the smallest k >= 1 such that cond(A + beta I) < 1e5."""
        I = np.eye(A.shape[0])
        for k in range(1, MAX_SHIFT_EXPONENT + 1):
            beta = 2.0 ** (STABILIZER_EXPONENT + k)
            if self._cond(A + beta * I) < COND_TARGET:
                return beta, k
        self.logger.warning(f"No shift below 2^{STABILIZER_EXPONENT + MAX_SHIFT_EXPONENT} reaches cond < {COND_TARGET:.0e}")
        return beta, k

    def _hybrid_shift(self, A) -> float:
        """0 when cond(A) < 1e5, else the smallest 2^j that brings it below."""
        if self._cond(A) < COND_TARGET:
            return 0.0
        I = np.eye(A.shape[0])
        for j in range(MAX_SHIFT_EXPONENT + 1):
            beta = 2.0**j
            if self._cond(A + beta * I) < COND_TARGET:
                return beta
        self.logger.warning(f"No shift below 2^{MAX_SHIFT_EXPONENT} reaches cond < {COND_TARGET:.0e}")
        return beta

    @staticmethod
    def _cond(A) -> float:
        try:
            return cond_est(A)
        except SingularMatrix:
            return math.inf

    def _guarded(self, step, M, run):
        """One step; on an ill-conditioned iterate shift it by s I and retry once."""
        try:
            return self._finite(step(M))
        except (IllConditioned, SingularMatrix) as e:
            if self.config.shift_policy == ShiftPolicy.NONE or run.shifts >= self.config.max_shifts:
                self.logger.error(f"Iteration {run.k + 1}: {e.__class__.__name__}: {e}")
                raise IllConditioned(str(e)) from e
            s = SHIFT_FRACTION * max(norm2_est(M), 1.0)
            if self.config.shift_policy == ShiftPolicy.RANDOMIZED and run.rng.random() < 0.5:
                s = -s
            run.shifts += 1
            self.logger.warning(f"Iteration {run.k + 1}: {e.__class__.__name__}, shifting by {s:.3e}")
            return self._finite(step(M + s * np.eye(M.shape[0])))

    @staticmethod
    def _finite(M):
        if not np.all(np.isfinite(M)):
            raise IllConditioned("Iterate has non-finite entries")
        return M

    @staticmethod
    def _diverged(before, after) -> bool:
        if not np.all(np.isfinite(after)):
            return True
        return np.linalg.norm(after) > DIVERGENCE_GROWTH * max(1.0, np.linalg.norm(before))

    def _in_sign_discs(self, M) -> bool:
        """Every eigenvalue is numerically real or within 1/2 of sign(Im) i."""
        try:
            lam = eigenvalues(M)
        except NoConvergence:
            return False
        real = np.abs(lam.imag) <= self.config.im_tol * np.maximum(1.0, np.abs(lam))
        near = np.abs(lam - np.sign(lam.imag) * 1j) < DISC_RADIUS
        return bool(np.all(real | near))

    @staticmethod
    def _cayley_two_step(M, I):
        """P = (M/2 - iI)(M/2 + iI)^-1, then (i/3)(P - P^-1): real eigenvalues land in [-2/3, 2/3]."""
        P = (0.5 * M - 1j * I) @ invert(0.5 * M + 1j * I, check_condition=False)
        return (1j / 3) * (P - invert(P, check_condition=False))

    def _settled(self, history, r_hint) -> bool:
        """The hinted rank, or one rank over the last stable_checks checks."""
        rank = history[-1][1]
        if r_hint is not None and rank == r_hint:
            return True
        window = self.config.stable_checks
        if len(history) < window:
            return False
        return len({r for _, r in history[-window:]}) == 1

    def _iterate(self, A, p, run, advance, rank_matrix, first_check, r_hint) -> SignFlowReport:
        """Shared driver: steps, rank checks, extraction."""
        cfg = self.config
        n = A.shape[0]
        next_check = max(first_check, run.k + 1)
        failure = None
        if self.verbose:
            print(f"Iterating...0%", end="\r")
        while run.k < cfg.max_iter:
            advance(run)
            run.k += 1
            if self.verbose:
                print(f"Iterating...{utils.percentage(run.k, cfg.max_iter)}%", end="\r")
            if run.k < next_check:
                continue
            next_check = run.k + cfg.check_period
            W = rank_matrix(run)
            rank = numerical_rank(W, cfg.eps_rank)
            run.rank_history.append((run.k, rank))
            self.logger.debug(f"Iteration {run.k}: numerical rank {rank}")
            if not self._settled(run.rank_history, r_hint):
                failure = None
                continue
            if rank == 0:
                return self._report(run, np.zeros(0), np.zeros(0), r_plus=0)
            try:
                sub = dominant_eigenspace(
                    W,
                    n,
                    rank,
                    r_plus=min(rank + cfg.oversampling, n),
                    K=cfg.attempts,
                    eps=cfg.eps_rank,
                    seed=(self.seed, run.k),
                    eps_residual=cfg.eps_certificate,
                )
            except SubspaceFailure as e:
                self.logger.warning(f"Iteration {run.k}: {e}")
                failure = e
                continue
            failure = None
            # U spans the real eigenspace only if all of L's eigenvalues are real
            L = rayleigh_reduce(A, sub.U)
            candidates = self._nearly_real(L, run)
            if candidates.size != rank:
                self.logger.debug(f"Iteration {run.k}: {candidates.size} of {rank} Rayleigh eigenvalues are real")
                continue
            if self.verbose:
                print(f"Iterating... done")
            if p is None:
                return self._extract_eigenvalues(A, sub.U, L, candidates, run)
            return self._extract_roots(p, candidates, run)
        if failure is not None:
            self.logger.error(f"Subspace extraction still failing after {cfg.max_iter} iterations")
            return self._report(run, np.zeros(0), np.zeros(0), status=Status.FAILURE)
        msg = f"No numerical rank settled on a real eigenspace in {cfg.max_iter} iterations"
        self.logger.error(msg)
        raise MaxIterExceeded(msg, last=run.rank_history[-1][1] if run.rank_history else None)

    def _real_width(self, run) -> float:
        """Relative |Im| below which an eigenvalue counts as real; the
        stabilized flow also counts everything inside its alpha strip."""
        if run.variant == Variant.STABILIZED:
            return max(self.config.im_tol, self.config.alpha)
        return self.config.im_tol

    def _nearly_real(self, L, run):
        lam = eigenvalues(L)
        return lam[np.abs(lam.imag) <= self._real_width(run) * np.maximum(1.0, np.abs(lam))]

    def _polish(self, p, x):
        """Newton from x; (y, converged). A stalled polish keeps the better of x and its last iterate."""
        try:
            y, _ = newton(p, complex(x), self.config.refine_iter, self.config.refine_tol)
            return complex(y), True
        except MaxIterExceeded as e:
            y = complex(e.last)
        except DerivativeVanished:
            return complex(x), False
        if backward_errors(p, y)[0] > backward_errors(p, x)[0]:
            y = complex(x)
        return y, False

    def _extract_roots(self, p, candidates, run) -> SignFlowReport:
        """Candidates Newton-polished on p. A polish that converges must land
        within 1e-8 of the real line; one that stalls at rounding level is
        a member of a root cluster and is kept while it stays in the real
        strip. Cluster multiplicities are then restored by disc counts.

        The status is FAILURE when the roots, counted with multiplicity,
        do not account for every candidate.
        """
        width = self._real_width(run)
        limit = BACKWARD_LIMIT * (p.degree + 1)
        roots = []
        for x in candidates:
            y, converged = self._polish(p, x)
            scale = max(1.0, abs(y))
            if converged and abs(y.imag) <= REAL_SNAP * scale:
                roots.append(y.real)
            elif abs(y.imag) <= width * scale and backward_errors(p, y)[0] <= limit:
                self.logger.debug(f"Keeping {y:.6g} at rounding level as a cluster member")
                roots.append(y.real)
        roots = self._with_multiplicities(p, np.sort(np.array(roots, dtype=float)), width)
        self.logger.debug(f"{len(candidates)} nearly real candidates, {len(roots)} real roots")
        status = None
        if len(roots) != len(candidates):
            # every nearly real eigenvalue is a real root counted with multiplicity
            self.logger.warning(f"{len(roots)} real roots for a real eigenspace of dimension {len(candidates)}")
            status = Status.FAILURE
        return self._report(run, roots, root_residuals(p, roots), status=status, r_plus=len(candidates))

    def _with_multiplicities(self, p, roots, width) -> np.ndarray:
        """Groups roots closer than width max(1, |x|) and gives each group as
        many entries as p has roots in a disc around it: the group's half
        span plus width max(1, |center|).

        The count is trusted only if the disc of twice that radius agrees;
        otherwise the group is kept as found.
        """
        if roots.size == 0:
            return roots
        groups = [[roots[0]]]
        for x in roots[1:]:
            if x - groups[-1][-1] <= width * max(1.0, abs(x)):
                groups[-1].append(x)
            else:
                groups.append([x])
        out = []
        for group in groups:
            center = float(np.mean(group))
            radius = width * max(1.0, abs(center)) + 0.5 * (group[-1] - group[0])
            try:
                counts = {count_roots_disc(p, DiscQuery(center, radius * f)) for f in (1.0, 2.0)}
            except RealRootFinderError as e:
                self.logger.debug(f"No multiplicity at {center:.6g}: {e.__class__.__name__}: {e}")
                counts = set()
            m = counts.pop() if len(counts) == 1 else 0
            if m < 1:
                out.extend(group)
                continue
            if m != len(group):
                self.logger.debug(f"{len(group)} roots found near {center:.6g}, {m} counted")
            out.extend(group[:m] + [center] * (m - len(group)))
        return np.sort(np.array(out, dtype=float))

    def _extract_eigenvalues(self, A, U, L, candidates, run) -> SignFlowReport:
        values = np.sort(candidates.real)
        norm = max(norm2_est(A), np.finfo(float).tiny)
        residuals = np.array([self._eigen_residual(A, U, L, lam) / norm for lam in values])
        return self._report(run, values, residuals, r_plus=U.shape[1])

    @staticmethod
    def _eigen_residual(A, U, L, lam) -> float:
        """||A v - lam v|| / ||v|| for v = U x, x from two inverse-iteration steps on L."""
        r = L.shape[0]
        x = np.ones(r, dtype=complex) / math.sqrt(r)
        shift = lam + 1e-10 * max(1.0, abs(lam))
        try:
            inv = invert(L - shift * np.eye(r), check_condition=False)
            for _ in range(2):
                x = inv @ x
                x /= np.linalg.norm(x)
        except SingularMatrix:
            pass
        v = U @ x
        return float(np.linalg.norm(A @ v - lam * v) / np.linalg.norm(v))

    def _report(self, run, roots, residuals, status=None, r_plus=None) -> SignFlowReport:
        if status is None:
            status = Status.SHIFTED if run.shifts else Status.OK
        report = SignFlowReport(
            roots=roots,
            iterations=run.k,
            rank_history=list(run.rank_history),
            residuals=np.asarray(residuals, dtype=float),
            status=status,
            variant=run.variant,
            shifts=run.shifts,
            switched_at=run.switched_at,
            r_plus=r_plus,
        )
        self.logger.info(f"{report.colorless_str}")
        return report
