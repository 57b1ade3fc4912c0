import numpy as np
from scipy.optimize import linear_sum_assignment

percentage = lambda current, out_of: round(int(current * 100 / out_of))


def seed_key(seed) -> tuple:
    """An int seed or a tuple of stream indices as a tuple."""
    return tuple(seed) if isinstance(seed, (tuple, list)) else (seed,)


def make_rng(master, *stream) -> np.random.Generator:
    """Returns a Philox generator keyed by (master, *stream).

    Same key, same numbers, on every platform numpy supports."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence([int(master)] + [int(s) for s in stream]))
    )


def gaussian(shape, rng: np.random.Generator) -> np.ndarray:
    """Standard normal variates from the generator."""
    return rng.standard_normal(shape)


def complex_gaussian(shape, rng: np.random.Generator) -> np.ndarray:
    """Standard complex normal variates, E|z|^2 = 1."""
    return (gaussian(shape, rng) + 1j * gaussian(shape, rng)) / np.sqrt(2.0)


def match_multisets(a, b) -> float:
    """Smallest possible largest distance over all pairings of two
    equal-size multisets of complex numbers.

    Bottleneck matching: a binary search over the candidate distances,
    each tested for a perfect pairing with linear_sum_assignment.
    """

    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size != b.size:
        raise ValueError(f"Multisets differ in size ({a.size} and {b.size})")
    if a.size == 0:
        return 0.0
    dist = np.abs(a[:, None] - b[None, :])
    levels = np.unique(dist)
    lo, hi = 0, levels.size - 1
    while lo < hi:
        mid = (lo + hi) // 2
        over = (dist > levels[mid]).astype(float)
        rows, cols = linear_sum_assignment(over)
        if over[rows, cols].sum() == 0:
            hi = mid
        else:
            lo = mid + 1
    return float(levels[lo])
