"""Functional root iterations and the reference all-roots solver.

Newton polishes one root; Ehrlich-Aberth and Weierstrass (Durand-Kerner)
move all n approximations at once with Jacobi updates. For |z| > 1 the
polynomial is evaluated through its reverse so degree 2048 does not
overflow.
"""

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import polycore, utils
from .denselinalg import eigenvalues, EPS
from .frobenius import companion
from .planegeometry import r1_bounds
from .exceptions import (
    DerivativeVanished,
    MaxIterExceeded,
    NoConvergence,
    OracleDisagreement,
    InputError,
)
from .structures import Polynomial, RefineReport

COINCIDENCE_TOL = 1e-14
JITTER = 1e-10
ROUNDING = 4 * EPS
BACKWARD_LIMIT = 1e3 * EPS
CLUSTER_SPREAD = 10.0
ORACLE_PHASE = 0.371
ORACLE_ROTATIONS = 3
ORACLE_MAX_DEGREE = 2048
ORACLE_AGREEMENT = 1e-6


def root_residuals(p: Polynomial, x) -> np.ndarray:
    """|p(x)| / (||p|| max(1, |x|)^n) for every x."""
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    if x.size == 0 or p.is_zero:
        return np.zeros(x.size)
    out = np.empty(x.size)
    inner = np.abs(x) <= 1
    out[inner] = np.abs(polycore.eval(p, x[inner]))
    rev = Polynomial(p.coeffs[::-1])
    out[~inner] = np.abs(polycore.eval(rev, 1 / x[~inner]))
    return out / p.norm


def backward_errors(p: Polynomial, x) -> np.ndarray:
    """|p(x)| / sum_i |p_i| |x|^i for every x.

    Rounding in Horner's rule alone reaches about 2n eps of this, so it
    tells a root known to working accuracy from one that is not.
    """
    x = np.atleast_1d(np.asarray(x, dtype=complex))
    if x.size == 0 or p.is_zero:
        return np.zeros(x.size)
    rev = Polynomial(p.coeffs[::-1])
    value = np.empty(x.size)
    bound = np.empty(x.size)
    inner = np.abs(x) <= 1
    w = 1 / x[~inner]
    value[inner] = np.abs(polycore.eval(p, x[inner]))
    bound[inner] = polycore.eval(Polynomial(np.abs(p.coeffs)), np.abs(x[inner]))
    value[~inner] = np.abs(polycore.eval(rev, w))
    bound[~inner] = polycore.eval(Polynomial(np.abs(rev.coeffs)), np.abs(w))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = value / bound
    out[value == 0] = 0.0
    return out


def newton(p: Polynomial, y0, max_iter: int = 50, tol: float = 1e-14):
    """Newton's iteration y <- y - p(y)/p'(y).

    Stops when |step| <= tol max(1, |y|) and returns (root, iterations).
    MaxIterExceeded carries the last iterate.
    """
    dp = polycore.derivative(p)
    y = y0
    for h in range(max_iter):
        d = polycore.eval(dp, y)
        if d == 0:
            raise DerivativeVanished(f"p'(y) = 0 at y = {y}")
        step = polycore.eval(p, y) / d
        y = y - step
        if abs(step) <= tol * max(1.0, abs(y)):
            return y, h + 1
    raise MaxIterExceeded(f"Newton did not converge in {max_iter} iterations", last=y)


def newton_steps(p: Polynomial, y0, k: int) -> np.ndarray:
    """The first k Newton iterates after y0, y0 included."""
    dp = polycore.derivative(p)
    path = [y0]
    for _ in range(k):
        y = path[-1]
        d = polycore.eval(dp, y)
        if d == 0:
            raise DerivativeVanished(f"p'(y) = 0 at y = {y}")
        path.append(y - polycore.eval(p, y) / d)
    return np.array(path)


class _Evaluator:
    """p, p' and their reversed forms, for overflow-safe evaluation."""

    def __init__(self, p: Polynomial):
        self.p = p
        self.n = p.degree
        self.dp = polycore.derivative(p)
        self.rev = Polynomial(p.coeffs[::-1])
        self.drev = polycore.derivative(self.rev)

    def log_derivative(self, z) -> np.ndarray:
        """p'(z)/p(z); inf where p(z) = 0."""
        out = np.empty(z.shape, dtype=complex)
        inner = np.abs(z) <= 1
        with np.errstate(divide="ignore", invalid="ignore"):
            zi = z[inner]
            out[inner] = polycore.eval(self.dp, zi) / polycore.eval(self.p, zi)
            w = 1 / z[~inner]
            out[~inner] = w * (self.n - w * polycore.eval(self.drev, w) / polycore.eval(self.rev, w))
        return out

    def weierstrass(self, z) -> np.ndarray:
        """p(z_i) / (p_n prod_{j != i} (z_i - z_j))."""
        out = np.empty(z.shape, dtype=complex)
        lead = self.p.leading
        for i, zi in enumerate(z):
            others = np.delete(z, i)
            if abs(zi) <= 1:
                out[i] = polycore.eval(self.p, zi) / (lead * np.prod(zi - others))
            else:
                out[i] = zi * polycore.eval(self.rev, 1 / zi) / (lead * np.prod(1 - others / zi))
        return out


def _separate(z, active):
    """Jitters iterates that coincide within COINCIDENCE_TOL. Returns how many moved."""
    moved = 0
    for i in range(1, z.size):
        if not active[i]:
            continue
        if np.min(np.abs(z[:i] - z[i])) < COINCIDENCE_TOL:
            z[i] += JITTER * np.exp(1j * i)
            moved += 1
    return moved


def _simultaneous(p: Polynomial, z0, max_iter, tol, correction) -> RefineReport:
    n = p.degree
    z = np.array(z0, dtype=complex).ravel()
    if z.size != n:
        raise InputError(f"Need {n} starting points, got {z.size}")
    converged = np.zeros(n, dtype=bool)
    floor = ROUNDING * (n + 1)
    evaluator = _Evaluator(p)
    previous = np.full(n, np.inf)
    iterations = 0
    while iterations < max_iter and not converged.all():
        _separate(z, ~converged)
        delta = correction(evaluator, z)
        delta[converged] = 0
        delta[np.isnan(delta)] = 0
        blown = ~np.isfinite(delta)
        delta[blown] = JITTER
        z = z - delta
        iterations += 1
        size = np.abs(delta)
        small = size <= tol * np.maximum(1.0, np.abs(z))
        # below the rounding floor a correction that stops shrinking is noise
        stalled = (backward_errors(p, z) <= floor) & (size >= previous)
        converged |= (small | stalled) & ~blown
        previous = np.where(converged, previous, size)
    converged |= backward_errors(p, z) <= floor
    return RefineReport(roots=z, residuals=root_residuals(p, z), iterations=iterations, converged=converged)


def _aberth_correction(evaluator: _Evaluator, z) -> np.ndarray:
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    inv = 1 / diff
    np.fill_diagonal(inv, 0.0)
    ratio = evaluator.log_derivative(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        return 1 / (ratio - inv.sum(axis=1))


def aberth(p: Polynomial, z0, max_iter: int = 100, tol: float = 1e-12) -> RefineReport:
    """Ehrlich-Aberth iteration z_i <- z_i - 1/e_i with
    e_i = p'(z_i)/p(z_i) - sum_{j != i} 1/(z_i - z_j).

    Converged approximations are frozen. An approximation converges when
    its correction drops below tol, or when its backward error is at
    rounding level and the correction has stopped shrinking, which is as
    far as members of a root cluster get.
    """
    return _simultaneous(p, z0, max_iter, tol, _aberth_correction)


def wdk(p: Polynomial, z0, max_iter: int = 100, tol: float = 1e-12) -> RefineReport:
    """Weierstrass iteration z_i <- z_i - p(z_i)/(p_n prod_{j != i}(z_i - z_j))."""
    return _simultaneous(p, z0, max_iter, tol, lambda evaluator, z: evaluator.weierstrass(z))


def oracle_roots(p: Polynomial, seed: int = 0, max_iter: int = 500) -> np.ndarray:
    """All n roots of p, sorted, as the reference the benchmarks measure against.

    Aberth from a circle of radius 2 gamma+ (phase 0.371), with up to
    three randomly rotated restarts, cross-checked against the eigenvalues
    of the companion matrix.
    """
    n = p.degree
    if p.is_zero:
        raise InputError("The zero polynomial has no finite root set")
    if n > ORACLE_MAX_DEGREE:
        raise InputError(f"Degree {n} exceeds {ORACLE_MAX_DEGREE}")
    if n == 0:
        return np.zeros(0, dtype=complex)
    zeros = int(np.flatnonzero(p.coeffs)[0])
    q = Polynomial(p.coeffs[zeros:])
    if q.degree == 0:
        return np.zeros(n, dtype=complex)
    m = q.degree
    _, upper = r1_bounds(q)
    radius = max(upper, np.finfo(float).tiny)
    rng = utils.make_rng(seed, m)
    report = None
    for rotation in range(ORACLE_ROTATIONS):
        phase = ORACLE_PHASE + (rng.uniform(0, 2 * np.pi) if rotation else 0.0)
        z0 = radius * np.exp(1j * (2 * np.pi * np.arange(m) / m + phase))
        report = aberth(q, z0, max_iter=max_iter, tol=1e-14)
        if report.all_converged:
            break
    else:
        raise NoConvergence(f"Aberth iteration did not converge after {ORACLE_ROTATIONS} starts")
    found = report.roots
    try:
        check = eigenvalues(companion(q))
    except NoConvergence:
        check = None
    if check is not None:
        _cross_check(q, found, check, ORACLE_AGREEMENT * max(1.0, upper))
    roots = np.concatenate((np.zeros(zeros, dtype=complex), found))
    if p.is_real:
        roots = _snap_real(roots)
    return np.sort_complex(roots)


def _cross_check(p: Polynomial, found, check, tol):
    """Raises OracleDisagreement unless every Aberth root is within tol of
    its eigenvalue in an optimal pairing.

    A pair may differ by more when the Aberth root is a root to working
    accuracy and either sits in a cluster at least as wide as the
    difference or its eigenvalue is the less accurate of the two.
    Cluster members are only determined to that width.
    """
    dist = np.abs(found[:, None] - check[None, :])
    rows, cols = linear_sum_assignment(dist)
    gaps = dist[rows, cols]
    if np.all(gaps <= tol):
        return
    limit = BACKWARD_LIMIT * (p.degree + 1)
    found_error = backward_errors(p, found)
    check_error = backward_errors(p, check)
    for i, j, gap in zip(rows, cols, gaps):
        if gap <= tol:
            continue
        if found_error[i] <= limit:
            others = np.abs(np.delete(found, i) - found[i])
            nearest = others.min() if others.size else np.inf
            if nearest <= CLUSTER_SPREAD * gap or check_error[j] > limit:
                continue
        raise OracleDisagreement(
            f"Aberth root {found[i]:.6g} and companion eigenvalue {check[j]:.6g} differ by {gap:.3e}"
        )


def _snap_real(roots) -> np.ndarray:
    """Real polynomials: drop rounding-level imaginary parts of isolated real roots."""
    roots = roots.copy()
    tiny = np.abs(roots.imag) <= 1e3 * EPS * np.maximum(1.0, np.abs(roots))
    roots[tiny] = roots[tiny].real
    return roots
