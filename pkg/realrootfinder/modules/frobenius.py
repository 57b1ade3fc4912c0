"""Companion matrices and the algebra of residues modulo p.

A residue f of degree < n stands for the matrix f(C_p). Column j of f(C_p)
is the coefficient vector of x^j f mod p, so multiplying residues and
multiplying the matrices are the same computation.
"""

import numpy as np

from . import polycore
from .denselinalg import qr_positive
from .exceptions import (
    ZeroLeadingCoefficient,
    DimensionMismatch,
    ModulusMismatch,
    NotInvertible,
    RankDeficient,
)
from .structures import Polynomial, FrobeniusElement, ComplexMatrix

EUCLID_TOL = 1e-12
INVERSE_TOL = 1e-8
INVERSE_COND = 1e12


def companion(p: Polynomial) -> ComplexMatrix:
    """Ones on the subdiagonal, last column -p_i/p_n."""
    if p.is_zero or p.degree < 1:
        raise ZeroLeadingCoefficient("Companion matrix needs degree >= 1 and a nonzero leading coefficient")
    n = p.degree
    C = np.zeros((n, n), dtype=p.coeffs.dtype)
    C[1:, :-1] = np.eye(n - 1)
    C[:, -1] = -p.coeffs[:n] / p.leading
    return C


def companion_matvec(p: Polynomial, v) -> np.ndarray:
    """C_p @ v as a down-shift plus a multiple of the last column."""
    n = p.degree
    v = np.asarray(v)
    if v.shape != (n,):
        raise DimensionMismatch(f"Vector of length {n} expected, got shape {v.shape}")
    w = np.zeros(n, dtype=np.result_type(v, p.coeffs, float))
    w[1:] = v[:-1]
    w -= v[-1] * (p.coeffs[:n] / p.leading)
    return w


def element(p: Polynomial, f) -> FrobeniusElement:
    """f mod p as an element of the algebra generated by C_p."""
    modulus = polycore.monic(p)
    if not isinstance(f, Polynomial):
        f = Polynomial(np.atleast_1d(f))
    return FrobeniusElement(modulus, polycore.poly_mod(f, modulus))


def const(p: Polynomial, c) -> FrobeniusElement:
    return element(p, Polynomial([c]))


def variable(p: Polynomial) -> FrobeniusElement:
    """The residue x, i.e. C_p itself."""
    return element(p, Polynomial([0.0, 1.0]))


def _check_modulus(f: FrobeniusElement, g: FrobeniusElement):
    if f.modulus != g.modulus:
        raise ModulusMismatch("Elements belong to different moduli")


def frob_mul(f: FrobeniusElement, g: FrobeniusElement) -> FrobeniusElement:
    _check_modulus(f, g)
    prod = polycore.poly_mul(f.residue, g.residue)
    return FrobeniusElement(f.modulus, polycore.poly_mod(prod, f.modulus))


def frob_lincomb(f: FrobeniusElement, g: FrobeniusElement, a=1.0, b=1.0) -> FrobeniusElement:
    """a*f + b*g"""
    _check_modulus(f, g)
    return FrobeniusElement(f.modulus, polycore.poly_add(f.residue, g.residue, a, b))


def frob_scale(f: FrobeniusElement, a) -> FrobeniusElement:
    return FrobeniusElement(f.modulus, Polynomial(a * f.residue.coeffs))


def frob_eval(f: FrobeniusElement, x):
    """Value of the residue at x; equals the eigenvalue of f(C_p) at a root x of p."""
    return polycore.eval(f.residue, x)


def frob_matrix(f: FrobeniusElement) -> ComplexMatrix:
    """Dense f(C_p), column j = x^j f mod p."""
    p = f.modulus
    n = p.degree
    F = np.zeros((n, n), dtype=np.result_type(f.residue.coeffs, p.coeffs))
    F[:, 0] = f.vector()
    for j in range(1, n):
        F[:, j] = companion_matvec(p, F[:, j - 1])
    return F


def _trim(c, ref):
    k = c.size
    while k > 1 and abs(c[k - 1]) <= EUCLID_TOL * ref:
        k -= 1
    return c[:k]


def _euclid_inverse(f: FrobeniusElement):
    """Extended Euclid on (p, f). None when a remainder collapses."""
    r0, r1 = f.modulus, f.residue
    s0, s1 = Polynomial([0.0]), Polynomial([1.0])
    while r1.degree > 0:
        q, r = polycore.poly_divrem(r0, r1)
        ref = r0.norm
        rc = _trim(r.coeffs, ref)
        if rc.size == 1 and abs(rc[0]) <= EUCLID_TOL * ref:
            return None
        s0, s1 = s1, polycore.poly_add(s0, polycore.poly_mul(q, s1), 1.0, -1.0)
        r0, r1 = r1, Polynomial(rc)
    c = r1.coeffs[0]
    if abs(c) <= EUCLID_TOL * max(f.residue.norm, 1.0):
        return None
    u = Polynomial(s1.coeffs / c)
    return FrobeniusElement(f.modulus, polycore.poly_mod(u, f.modulus))


def _dense_inverse(f: FrobeniusElement):
    """Solves f(C_p) u = e_0 by QR. None if f(C_p) is rank deficient."""
    F = frob_matrix(f)
    try:
        Q, R = qr_positive(F)
    except RankDeficient:
        return None
    rhs = Q.conj().T[:, 0]
    n = R.shape[0]
    u = np.zeros(n, dtype=np.result_type(R, rhs))
    for i in range(n - 1, -1, -1):
        u[i] = (rhs[i] - R[i, i + 1 :] @ u[i + 1 :]) / R[i, i]
    return FrobeniusElement(f.modulus, Polynomial(u))


def _inverse_residual(f, u) -> float:
    one = frob_mul(f, u).vector()
    one[0] -= 1.0
    return float(np.linalg.norm(one))


def frob_inv(f: FrobeniusElement) -> FrobeniusElement:
    """Inverse of f modulo p.

    Extended Euclid first, then a QR solve of f(C_p) u = e_0 when Euclid
    breaks down or its result fails the check
    ||f u - 1|| <= 1e-8 max(1, ||f|| ||u||). A u with ||f|| ||u|| > 1e12
    is refused: f is then numerically singular modulo p.
    """
    if f.residue.is_zero:
        raise NotInvertible("The zero residue has no inverse")
    for attempt in (_euclid_inverse, _dense_inverse):
        u = attempt(f)
        if u is None or not np.all(np.isfinite(u.residue.coeffs)):
            continue
        size = f.residue.norm * u.residue.norm
        if size <= INVERSE_COND and _inverse_residual(f, u) <= INVERSE_TOL * max(1.0, size):
            return u
    raise NotInvertible("Residue shares an approximate factor with the modulus")


def frob_dual_map(y: FrobeniusElement, a, b) -> FrobeniusElement:
    """a*y + b/y mod p. (0.5, -0.5) is the modular sign step, (0, 1) the inversion."""
    out = frob_scale(y, a)
    if b != 0:
        out = frob_lincomb(out, frob_inv(y), 1.0, b)
    return out
