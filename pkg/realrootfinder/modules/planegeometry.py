"""Root counting in discs, root radii and proximity bounds.

Discs are normalized to D(0, 1) by `shift_scale`; counts come from the
winding of p around the unit circle, read off the quadrants that the
samples of p fall in.
"""

import math

import numpy as np

from . import polycore
from .exceptions import ZeroOnCircle, PrecisionLoss, RootAtPoint, InputError, InvalidConfig
from .structures import Polynomial, DiscQuery

MIN_SAMPLES = 32
ZERO_ON_CIRCLE = 1e-13
RADIUS_NUDGE = 1e-3
DYNAMIC_RANGE = 1e250
MAX_BISECTIONS = 30


def _samples(n: int) -> int:
    return max(MIN_SAMPLES, 16 * math.ceil(math.log2(max(n, 2))))


def _quadrant(values) -> np.ndarray:
    return np.floor(np.angle(values) / (np.pi / 2)).astype(int) % 4


def _winding(q: Polynomial) -> int:
    """Winding number of q around 0 along the unit circle.

    Consecutive samples must lie in the same or in adjacent quadrants;
    an arc whose ends lie in opposite quadrants is bisected until they do.
    """
    N = _samples(q.degree)
    angles = 2 * np.pi * np.arange(N) / N
    values = polycore.eval(q, np.exp(1j * angles))
    scale = np.max(np.abs(values))
    if np.min(np.abs(values)) < ZERO_ON_CIRCLE * scale:
        raise ZeroOnCircle("p nearly vanishes on the circle")
    # the loop closes on the first sample, not on a re-evaluation at 2 pi
    quadrants = _quadrant(values)
    total = 0
    for k in range(N):
        b = angles[k + 1] if k + 1 < N else angles[0] + 2 * np.pi
        total += _arc_turn(q, angles[k], b, quadrants[k], quadrants[(k + 1) % N], scale, 0)
    assert total % 4 == 0, f"quarter turns {total} do not close the loop"
    return total // 4


def _arc_turn(q, a, b, qa, qb, scale, depth) -> int:
    step = (qb - qa) % 4
    if step == 0:
        return 0
    if step == 1:
        return 1
    if step == 3:
        return -1
    if depth == MAX_BISECTIONS:
        raise ZeroOnCircle("Opposite quadrants on an arc that cannot be split further")
    mid = 0.5 * (a + b)
    value = polycore.eval(q, np.exp(1j * mid))
    if abs(value) < ZERO_ON_CIRCLE * scale:
        raise ZeroOnCircle("p nearly vanishes on the circle")
    qm = int(_quadrant(value))
    return _arc_turn(q, a, mid, qa, qm, scale, depth + 1) + _arc_turn(q, mid, b, qm, qb, scale, depth + 1)


def _normalized(p: Polynomial, center, radius) -> Polynomial:
    """p(center + radius x): the disc D(center, radius) becomes D(0, 1)."""
    return polycore.shift_scale(p, radius, center)


def count_roots_disc(p: Polynomial, query: DiscQuery) -> int:
    """Number of roots of p in the disc, which should be well isolated.

    If p nearly vanishes on the circle the radius is nudged by a factor
    (1 + 1e-3) once before ZeroOnCircle is raised.
    """
    if p.is_zero:
        raise InputError("The zero polynomial has no root count")
    if p.degree == 0:
        return 0
    try:
        return _winding(_normalized(p, query.center, query.radius))
    except ZeroOnCircle:
        return _winding(_normalized(p, query.center, query.radius * (1 + RADIUS_NUDGE)))


def _dynamic_range(p: Polynomial) -> float:
    mags = np.abs(p.coeffs)
    mags = mags[mags > 0]
    return float(mags.max() / mags.min())


def _square(p: Polynomial, h: int) -> Polynomial:
    for _ in range(h):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                p = polycore.dandelin_square(p)
        except InvalidConfig:
            raise PrecisionLoss("Root squaring overflowed")
        if not np.all(np.isfinite(p.coeffs)) or _dynamic_range(p) > DYNAMIC_RANGE:
            raise PrecisionLoss("Coefficients of the squared polynomial span too many orders of magnitude")
    return p


def count_with_squaring(p: Polynomial, query: DiscQuery) -> int:
    """Counts after h root-squarings of the normalized polynomial.

    Squaring keeps D(0, 1) and squares the isolation ratio, so a disc
    isolated by 9^(1/2^h) is counted like a 9-isolated one.
    """
    if p.is_zero:
        raise InputError("The zero polynomial has no root count")
    if p.degree == 0:
        return 0
    q = _square(_normalized(p, query.center, query.radius), query.squarings)
    return count_roots_disc(q, DiscQuery(0j, 1.0, 0))


def _upper_hull(points):
    hull = []
    for point in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (point[1] - y1) - (y2 - y1) * (point[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(point)
    return hull


def _newton_polygon_radii(p: Polynomial) -> np.ndarray:
    """Radius estimates exp(-slope) of the upper hull of (i, log|p_i|),
    each repeated by the width of its edge; descending."""
    mags = np.abs(p.coeffs)
    points = [(i, math.log(m)) for i, m in enumerate(mags) if m > 0]
    hull = _upper_hull(points)
    radii = []
    for (i, yi), (j, yj) in zip(hull, hull[1:]):
        radii.extend([math.exp(-(yj - yi) / (j - i))] * (j - i))
    return np.sort(np.array(radii))[::-1]


def _check_refine(refine_k):
    if not 0 <= refine_k <= DiscQuery.MAX_SQUARINGS:
        raise InvalidConfig(f"refine_k must be in [0, {DiscQuery.MAX_SQUARINGS}], got {refine_k}")


def root_radii_bracket(p: Polynomial, refine_k: int = 0):
    """(lower, upper) per root radius, descending; upper/lower = (2n)^(2/2^k).

    Roots at the origin are factored out first and get radius 0.
    """
    _check_refine(refine_k)
    if p.is_zero or p.degree < 1:
        raise InputError("Root radii need a polynomial of degree at least 1")
    n = p.degree
    zeros = int(np.flatnonzero(p.coeffs)[0])
    q = Polynomial(p.coeffs[zeros:])
    lower = np.zeros(n)
    upper = np.zeros(n)
    if q.degree:
        t = _newton_polygon_radii(_square(q, refine_k))
        power = 1.0 / 2**refine_k
        lower[: q.degree] = (t / (2 * n)) ** power
        upper[: q.degree] = (t * (2 * n)) ** power
    return lower, upper


def root_radii(p: Polynomial, refine_k: int = 0) -> np.ndarray:
    """Lower estimates r~_j <= r_j of the root radii, descending."""
    return root_radii_bracket(p, refine_k)[0]


def r1_bounds(p: Polynomial):
    """(gamma/n, 2 gamma) around the largest root radius,
    gamma = max_i |p_{n-i}/p_n|^(1/i)."""
    if p.is_zero or p.degree < 1:
        raise InputError("r1_bounds needs a polynomial of degree at least 1")
    n = p.degree
    ratios = np.abs(p.coeffs[:n][::-1] / p.leading)
    gamma = float(np.max(ratios ** (1.0 / np.arange(1, n + 1))))
    return gamma / n, 2 * gamma


def proximity(p: Polynomial, c, refine_k: int = 0):
    """Bracket (lower, upper) on the distance from c to the nearest root.

    The roots of the reverse of p(x + c) are 1/(x_j - c); bounds on
    their largest radius invert into bounds on the smallest distance.
    """
    _check_refine(refine_k)
    if polycore.eval(p, c) == 0:
        raise RootAtPoint(f"p vanishes at {c}")
    shifted = polycore.shift_scale(p, 1.0, c)
    lo, hi = r1_bounds(Polynomial(shifted.coeffs[::-1]))
    lower, upper = 1.0 / hi, 1.0 / lo
    if refine_k:
        r_lo, r_hi = root_radii_bracket(shifted, refine_k)
        lower, upper = max(lower, r_lo[-1]), min(upper, r_hi[-1])
    return lower, upper
