"""Sign iterations on residues modulo p.

y_k = (y_{k-1} - 1/y_{k-1})/2 mod p, y_0 = x, takes at every root of p the
value the matrix flow gives the matching eigenvalue. t_k = y_k^2 + 1 mod p
then nearly vanishes at the nonreal roots only, so an approximate gcd of
p and t_k splits off the nonreal factor and leaves the real roots in the
cofactor v_k.
"""

import numpy as np

from . import utils
from . import polycore
from . import loggersetup
from .denselinalg import qr_positive, eigenvalues
from .frobenius import companion, variable, frob_mul, const, frob_lincomb, frob_dual_map
from .planegeometry import r1_bounds
from .refine import newton, oracle_roots, root_residuals
from .exceptions import (
    NotInvertible,
    RankDeficient,
    MaxIterExceeded,
    DerivativeVanished,
    NoConvergence,
    OracleDisagreement,
    InputError,
    InvalidConfig,
)
from .structures import Polynomial, FrobeniusElement, AgcdResult, SignFlowConfig, SignFlowReport, Variant, Status

SHIFT_RANGE = (0.05, 0.15)
DIVISION_FACTOR = 10
MAX_MOVE = 1e-3


def sqrt_mod_step(y: FrobeniusElement) -> FrobeniusElement:
    """(y - 1/y)/2 mod p. Raises NotInvertible."""
    return frob_dual_map(y, 0.5, -0.5)


def t_polynomial(y: FrobeniusElement) -> Polynomial:
    """The residue of y^2 + 1."""
    return frob_lincomb(frob_mul(y, y), const(y.modulus, 1.0)).residue


def _convolution(c, cols, rows=None) -> np.ndarray:
    """Matrix of x -> c * x for x of length cols."""
    c = np.asarray(c)
    rows = c.size + cols - 1 if rows is None else rows
    A = np.zeros((rows, cols), dtype=c.dtype)
    for j in range(cols):
        A[j : j + c.size, j] = c
    return A


def _lstsq(A, b):
    """Least squares by QR; RankDeficient when A has dependent columns."""
    Q, R = qr_positive(A)
    rhs = Q.conj().T @ b
    n = R.shape[1]
    x = np.zeros(n, dtype=np.result_type(R, rhs))
    for i in range(n - 1, -1, -1):
        x[i] = (rhs[i] - R[i, i + 1 :] @ x[i + 1 :]) / R[i, i]
    return x


def _cofactors(p: Polynomial, t: Polynomial, d: int):
    """Solves p u = t v with deg v = n - d monic and deg u = deg t - d.

    Returns (u, v, residual), residual = ||p u - t v|| / (||p|| ||u|| + ||t|| ||v||).
    """
    n, m = p.degree, t.degree
    rows = n + m - d + 1
    A = np.hstack((_convolution(p.coeffs, m - d + 1), -_convolution(t.coeffs, n - d, rows)))
    b = np.zeros(A.shape[0], dtype=np.result_type(p.coeffs, t.coeffs))
    b[n - d : n - d + t.coeffs.size] = t.coeffs
    x = _lstsq(A, b)
    u = Polynomial(x[: m - d + 1])
    v = Polynomial(np.append(x[m - d + 1 :], 1.0))
    gap = polycore.poly_add(polycore.poly_mul(p, u), polycore.poly_mul(t, v), 1.0, -1.0)
    scale = p.norm * u.norm + t.norm * v.norm
    return u, v, gap.norm / scale


def _quotient(p: Polynomial, v: Polynomial):
    """g minimizing ||v g - p|| and the relative error of the division."""
    cols = p.degree - v.degree + 1
    g = Polynomial(_lstsq(_convolution(v.coeffs, cols), np.asarray(p.coeffs)))
    error = polycore.poly_add(polycore.poly_mul(v, g), p, 1.0, -1.0).norm / p.norm
    return g, error


def _coprime(p: Polynomial, t: Polynomial) -> AgcdResult:
    return AgcdResult(g=Polynomial([1.0]), d=0, v=p, u=t, backward_error=0.0)


def agcd(p: Polynomial, t: Polynomial, tol: float = 1e-6, degrees=None) -> AgcdResult:
    """Approximate gcd of p and t, deg t < deg p.

    Degrees d are tried from min(deg t, n - 1) down (or just those in
    `degrees`); the first whose cofactor system p u = t v has relative
    least-squares residual <= tol and whose gcd divides p to within
    10 tol is accepted. A zero t gives d = n and no accepted degree gives
    d = 0, g = 1, v = p.
    """
    if not 0 < tol < 1:
        raise InvalidConfig(f"tol must be in (0, 1), got {tol}")
    n = p.degree
    if t.degree >= n and not t.is_zero:
        raise InputError(f"agcd needs deg t < deg p, got {t.degree} and {n}")
    if t.is_zero or t.norm <= tol**2:
        return AgcdResult(g=polycore.monic(p), d=n, v=Polynomial([1.0]), u=Polynomial([0.0]), backward_error=0.0)
    top = min(t.degree, n - 1)
    candidates = range(top, 0, -1) if degrees is None else [d for d in degrees if 1 <= d <= top]
    for d in candidates:
        try:
            u, v, residual = _cofactors(p, t, d)
        except RankDeficient:
            continue
        if residual > tol:
            continue
        g, error = _quotient(p, v)
        if error <= DIVISION_FACTOR * tol:
            return AgcdResult(g=g, d=d, v=v, u=u, backward_error=residual, division_error=error)
    return _coprime(p, t)


class ModularFlow:
    """Real roots by square-root iterations modulo p and approximate gcds."""

    def __init__(self, config: SignFlowConfig = None, log_path=None, seed=0, verbose=False):
        self.config = (config or SignFlowConfig(variant=Variant.MODULAR)).validate()
        self.seed = seed
        self.verbose = verbose
        self.logger = loggersetup.create_logger(__file__, log_path)
        self.logger.debug(f"config={self.config.to_dict()}")

    def real_roots_modular(self, p: Polynomial, r: int = None) -> SignFlowReport:
        """Iterates y <- (y - 1/y)/2 mod p from y = x and returns the real roots
        once agcd(p, y^2 + 1) has degree n - r.

        With r unknown, d is tested every check_period steps and accepted
        when two tests agree. Either way the cofactor roots must be nearly
        real and polish into roots of p. A residue that cannot be inverted
        restarts the flow on p(x + sigma) with a random sigma, at most
        max_shifts times.
        """

        self.logger.info("Finding real roots by modular sign iterations")
        if not isinstance(p, Polynomial) or p.degree < 2 or not p.is_real:
            msg = "Modular iterations need a real polynomial of degree at least 2"
            self.logger.error(msg)
            raise InputError(msg)
        n = p.degree
        if r is not None and not 0 <= r <= n:
            msg = f"r must be in [0, {n}], got {r}"
            self.logger.error(msg)
            raise InputError(msg)
        cfg = self.config
        rng = utils.make_rng(self.seed, 5)
        sigma = 0.0
        shifts = 0
        while True:
            q = polycore.shift_scale(p, 1.0, sigma) if sigma else p
            try:
                return self._run(p, q, sigma, r, shifts)
            except NotInvertible as e:
                if shifts >= cfg.max_shifts:
                    self.logger.error(f"{e} after {shifts} shifts")
                    raise
                shifts += 1
                size = rng.uniform(*SHIFT_RANGE) * max(1.0, r1_bounds(p)[1])
                sigma = size if rng.random() < 0.5 else -size
                self.logger.warning(f"{e}, restarting on p(x + {sigma:.4g})")

    def _run(self, p, q, sigma, r, shifts) -> SignFlowReport:
        cfg = self.config
        n = q.degree
        y = variable(q)
        history = []
        if self.verbose:
            print(f"Iterating...0%", end="\r")
        for k in range(1, cfg.max_iter + 1):
            y = sqrt_mod_step(y)
            if self.verbose:
                print(f"Iterating...{utils.percentage(k, cfg.max_iter)}%", end="\r")
            if r is None and k % cfg.check_period:
                continue
            t = t_polynomial(y)
            result = agcd(q, t, cfg.tol, degrees=None if r is None else [n - r])
            history.append((k, n - result.d))
            self.logger.debug(f"Iteration {k}: agcd degree {result.d}, backward error {result.backward_error:.3e}")
            if r is not None and result.d != n - r:
                continue
            if r is None and (len(history) < 2 or history[-2][1] != history[-1][1]):
                continue
            approx = self._cofactor_roots(result.v)
            if not np.all(np.abs(approx.imag) <= cfg.im_tol * np.maximum(1.0, np.abs(approx))):
                self.logger.debug(f"Iteration {k}: cofactor still has nonreal roots")
                continue
            roots = self._polish(p, approx, sigma)
            if not self._verified(p, approx.real + sigma, roots):
                self.logger.debug(f"Iteration {k}: cofactor roots are not roots of p")
                continue
            if self.verbose:
                print(f"Iterating... done")
            status = Status.SHIFTED if shifts else Status.OK
            report = SignFlowReport(
                roots=roots,
                iterations=k,
                rank_history=history,
                residuals=root_residuals(p, roots),
                status=status,
                variant=Variant.MODULAR,
                shifts=shifts,
                r_plus=n - result.d,
            )
            self.logger.info(report.colorless_str)
            return report
        msg = f"No verified agcd split in {cfg.max_iter} iterations"
        self.logger.error(msg)
        raise MaxIterExceeded(msg, last=history[-1][1] if history else None)

    def _cofactor_roots(self, v: Polynomial) -> np.ndarray:
        if v.degree == 0:
            return np.zeros(0, dtype=complex)
        try:
            return oracle_roots(v, seed=self.seed)
        except (NoConvergence, OracleDisagreement) as e:
            self.logger.warning(f"Root solver on the cofactor: {e}")
            return eigenvalues(companion(v))

    def _polish(self, p, approx, sigma) -> np.ndarray:
        """Real parts moved back by sigma and Newton-polished on p."""
        roots = []
        for x in np.real(approx) + sigma:
            try:
                x, _ = newton(p, float(x), self.config.refine_iter, self.config.refine_tol)
            except MaxIterExceeded as e:
                x = e.last
            except DerivativeVanished:
                pass
            roots.append(float(np.real(x)))
        return np.sort(np.array(roots))

    def _verified(self, p, start, roots) -> bool:
        """Every polished root is a root of p to within tol and stayed
        within 1e-3 max(1, |x|) of its cofactor root."""
        if roots.size == 0:
            return True
        moved = np.abs(roots - np.sort(start))
        if np.any(moved > MAX_MOVE * np.maximum(1.0, np.abs(roots))):
            return False
        return bool(np.all(root_residuals(p, roots) <= self.config.tol))
