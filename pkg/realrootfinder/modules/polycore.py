"""Polynomial arithmetic and root maps.

Every function here is pure: inputs are read-only `Polynomial` values and
results are new ones. Real inputs give real outputs wherever the operation
allows it.
"""

import warnings

import numpy as np

from .exceptions import ZeroScale, Pole, DegreeDrop, DivisionByZeroPoly
from .structures import Polynomial

# below this product size direct convolution beats the FFT
FFT_CROSSOVER = 32


def _poly(coeffs, real=False) -> Polynomial:
    c = np.asarray(coeffs)
    if real and np.iscomplexobj(c):
        c = c.real
    return Polynomial(c)


def eval(p: Polynomial, x):
    """Horner evaluation of p at x (scalar or array)."""
    x = np.asarray(x)
    y = np.zeros_like(x, dtype=np.result_type(p.coeffs.dtype, x.dtype, float))
    for c in p.coeffs[::-1]:
        y = y * x + c
    return y[()] if y.ndim == 0 else y


def derivative(p: Polynomial) -> Polynomial:
    if p.degree == 0:
        return Polynomial([0.0])
    return Polynomial(p.coeffs[1:] * np.arange(1, p.degree + 1))


def monic(p: Polynomial) -> Polynomial:
    if p.is_zero:
        raise DivisionByZeroPoly("The zero polynomial has no monic form")
    return Polynomial(p.coeffs / p.leading)


def from_roots(roots, leading=1.0) -> Polynomial:
    """Expands leading * prod(x - x_j). Real when the roots close under conjugation."""
    roots = np.asarray(roots, dtype=complex).ravel()
    c = np.array([1.0 + 0j])
    for x in roots:
        c = np.concatenate(([0j], c)) - x * np.concatenate((c, [0j]))
    c = c * leading
    real = np.isrealobj(leading) and np.allclose(
        np.sort_complex(roots), np.sort_complex(roots.conj()), rtol=0, atol=0
    )
    return _poly(c, real=real)


def shift_scale(p: Polynomial, a, b) -> Polynomial:
    """Returns q(x) = p(a*x + b).

    The shift is a Taylor shift by repeated synthetic division, the
    scaling multiplies q_i by a^i.
    """
    if a == 0:
        raise ZeroScale("Scale factor a must be nonzero")
    c = np.array(p.coeffs, dtype=np.result_type(p.coeffs.dtype, np.asarray(b).dtype, np.asarray(a).dtype))
    n = p.degree
    if b != 0:
        for k in range(n):
            for i in range(n - 1, k - 1, -1):
                c[i] += b * c[i + 1]
    if a != 1:
        c = c * np.asarray(a, dtype=np.result_type(a, float)) ** np.arange(n + 1)
    return Polynomial(c)


def reverse(p: Polynomial) -> Polynomial:
    """Returns x^n p(1/x), the roots inverted."""
    if p.coeffs[0] == 0:
        warnings.warn("p(0) = 0: the reversed polynomial has a root at infinity", RuntimeWarning)
    return Polynomial(p.coeffs[::-1])


def _fft_size(m) -> int:
    size = 1
    while size < m:
        size *= 2
    return size


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    m = p.degree + q.degree + 1
    real = p.is_real and q.is_real
    if min(len(p), len(q)) < FFT_CROSSOVER:
        return Polynomial(np.convolve(p.coeffs, q.coeffs))
    size = _fft_size(m)
    prod = np.fft.ifft(np.fft.fft(p.coeffs, size) * np.fft.fft(q.coeffs, size))[:m]
    return _poly(prod, real=real)


def poly_add(p: Polynomial, q: Polynomial, alpha=1.0, beta=1.0) -> Polynomial:
    """alpha*p + beta*q"""
    size = max(len(p), len(q))
    c = np.zeros(size, dtype=np.result_type(p.coeffs, q.coeffs, np.asarray(alpha), np.asarray(beta)))
    c[: len(p)] += alpha * p.coeffs
    c[: len(q)] += beta * q.coeffs
    return Polynomial(c)


def poly_divrem(p: Polynomial, q: Polynomial):
    """Long division. Returns (quot, rem) with p = quot*q + rem, deg rem < deg q."""
    if q.is_zero:
        raise DivisionByZeroPoly("Division by the zero polynomial")
    n, m = p.degree, q.degree
    if n < m:
        return Polynomial([0.0]), p
    rem = np.array(p.coeffs, dtype=np.result_type(p.coeffs, q.coeffs))
    quot = np.zeros(n - m + 1, dtype=rem.dtype)
    lead = q.leading
    for k in range(n - m, -1, -1):
        quot[k] = rem[k + m] / lead
        rem[k : k + m + 1] -= quot[k] * q.coeffs
    rem = rem[:m] if m else np.zeros(1, dtype=rem.dtype)
    return Polynomial(quot), Polynomial(rem)


def poly_mod(p: Polynomial, q: Polynomial) -> Polynomial:
    return poly_divrem(p, q)[1]


def dandelin_square(p: Polynomial) -> Polynomial:
    """Graeffe step: monic q with roots(q) = {x_j^2}.

    q(x^2) = (-1)^n p(x) p(-x). The product goes through `poly_mul`, so
    above the crossover it is evaluated at the k-th roots of unity, k the
    smallest power of two above 2n, and interpolated with the inverse FFT.
    """
    p = monic(p)
    n = p.degree
    if n == 0:
        return p
    mirrored = Polynomial(p.coeffs * (-1.0) ** np.arange(n + 1))
    prod = np.zeros(2 * n + 1, dtype=p.coeffs.dtype)
    full = poly_mul(p, mirrored).coeffs
    prod[: full.size] = full
    # p(x)p(-x) is even, its odd coefficients are rounding noise
    q = (-1.0) ** n * prod[0::2]
    q[-1] = 1.0
    return Polynomial(q)


def cayley_scalar(x, a, direction="line_to_circle"):
    """Cayley map y = (x - a i)/(x + a i) and its inverse x = a i (1 + y)/(1 - y)."""
    if a == 0:
        raise ZeroScale("Cayley parameter a must be nonzero")
    ai = 1j * a
    if direction == "line_to_circle":
        if x == -ai:
            raise Pole(f"x = {-ai} is the pole of the Cayley map")
        return (x - ai) / (x + ai)
    if direction == "circle_to_line":
        if x == 1:
            raise Pole("y = 1 is the pole of the inverse Cayley map")
        return ai * (1 + x) / (1 - x)
    raise ValueError(f"Unknown direction: {direction}")


def cayley_poly(p: Polynomial, a) -> Polynomial:
    """Monic q whose roots are the Cayley images of the roots of p.

    q(y) = sum_k p_k (a i)^k (1 + y)^k (1 - y)^(n - k), which is
    (1 - y)^n p(a i (1 + y)/(1 - y)).
    """
    if a == 0:
        raise ZeroScale("Cayley parameter a must be nonzero")
    n = p.degree
    ai = 1j * a
    scale = np.max(np.abs(p.coeffs)) * max(1.0, abs(a)) ** n
    if abs(eval(p, -ai)) <= 1e-13 * scale:
        raise DegreeDrop(f"p({-ai}) = 0: a root image lies at infinity")
    plus = [np.array([1.0 + 0j])]
    minus = [np.array([1.0 + 0j])]
    for _ in range(n):
        plus.append(np.convolve(plus[-1], [1.0, 1.0]))
        minus.append(np.convolve(minus[-1], [1.0, -1.0]))
    q = np.zeros(n + 1, dtype=complex)
    for k, pk in enumerate(p.coeffs):
        if pk != 0:
            q += pk * ai**k * np.convolve(plus[k], minus[n - k])
    return monic(Polynomial(q))


def chebyshev(r: int) -> Polynomial:
    """T_r by the three-term recurrence."""
    if r < 0:
        raise ValueError(f"Chebyshev degree must be non-negative, got {r}")
    prev, cur = np.array([1.0]), np.array([0.0, 1.0])
    if r == 0:
        return Polynomial(prev)
    for _ in range(r - 1):
        nxt = np.zeros(cur.size + 1)
        nxt[1:] = 2 * cur
        nxt[: prev.size] -= prev
        prev, cur = cur, nxt
    return Polynomial(cur)
