"""Randomized approximation of a dominant eigenspace.

A Gaussian sketch H = M G with r_plus columns is factored by pivoted QR;
its numerical rank tells the dimension r and the leading r columns of Q
give an orthonormal basis U. The residual ||M - U U^H M|| / ||M|| is
measured, never assumed.
"""

from typing import Callable, Union

import numpy as np

from . import utils
from .denselinalg import pivoted_qr, numerical_rank, norm2_est
from .exceptions import SubspaceFailure, NoStableRank, NotUnitary, DimensionMismatch, InvalidConfig
from .structures import SubspaceResult, ComplexMatrix

UNITARY_TOL = 1e-8


def _action(apply_M: Union[Callable, np.ndarray]) -> Callable:
    if callable(apply_M):
        return apply_M
    M = np.asarray(apply_M)
    return lambda X: M @ X


def _dense(apply_M, n) -> np.ndarray:
    if callable(apply_M):
        return np.asarray(apply_M(np.eye(n)))
    return np.asarray(apply_M)


def projection_residual(M: ComplexMatrix, U: ComplexMatrix) -> float:
    """||M - U U^H M|| / ||M||, both norms estimated."""
    norm = norm2_est(M)
    if norm == 0:
        return 0.0
    return norm2_est(M - U @ (U.conj().T @ M)) / norm


def dominant_eigenspace(
    apply_M,
    n: int,
    r: int,
    r_plus: int = None,
    K: int = 4,
    eps: float = 1e-6,
    seed: int = 0,
    eps_residual: float = None,
) -> SubspaceResult:
    """Orthonormal basis of the r-dimensional dominant eigenspace of M.

    Attempt k draws G from stream (seed, k). It succeeds when nrank(MG) = r
    at tolerance eps and the projection residual is within eps_residual
    (defaults to eps); after K failed attempts SubspaceFailure is raised.
    """
    r_plus = min(r + 4, n) if r_plus is None else r_plus
    eps_residual = eps if eps_residual is None else eps_residual
    if not 0 < r <= r_plus <= n:
        raise InvalidConfig(f"Need 0 < r <= r_plus <= n, got r={r}, r_plus={r_plus}, n={n}")
    action = _action(apply_M)
    M = _dense(apply_M, n)
    last = None
    for attempt in range(K):
        G = utils.gaussian((n, r_plus), utils.make_rng(*utils.seed_key(seed), attempt))
        H = np.asarray(action(G))
        if H.shape != (n, r_plus):
            raise DimensionMismatch(f"Matrix action returned shape {H.shape}, expected {(n, r_plus)}")
        Q, R, _ = pivoted_qr(H)
        d = np.abs(np.diag(R))
        rank = 0 if d.size == 0 or d[0] == 0 else int(np.count_nonzero(d >= eps * d[0]))
        if rank < r:
            last = f"sketch rank {rank} below {r}"
            continue
        U = Q[:, :r]
        residual = projection_residual(M, U)
        if rank == r and residual <= eps_residual:
            return SubspaceResult(U=U, r=r, residual=residual, attempts=attempt + 1, basis=Q)
        last = f"sketch rank {rank}, residual {residual:.3e}"
    raise SubspaceFailure(f"No {r}-dimensional dominant eigenspace after {K} attempts ({last})")


def dim_search(apply_M, n: int, r_plus_max: int = None, eps: float = 1e-6, seed: int = 0):
    """Dimension of the dominant eigenspace by doubling the sketch size.

    The rank of an s-column sketch settles once it falls below s; it is
    accepted when the next sketch reports the same value. At the largest
    size the confirming sketch is redrawn at the same size.
    """
    r_plus_max = n if r_plus_max is None else min(r_plus_max, n)
    action = _action(apply_M)
    M = _dense(apply_M, n)
    if norm2_est(M) == 0:
        return 0, SubspaceResult(U=np.zeros((n, 0)), r=0, residual=0.0, attempts=0, degenerate=True)
    s = 1
    candidate = None
    attempt = 0
    redraws = 0
    while True:
        G = utils.gaussian((n, s), utils.make_rng(*utils.seed_key(seed), attempt))
        attempt += 1
        rank = numerical_rank(np.asarray(action(G)), eps)
        if candidate is not None and rank == candidate:
            break
        candidate = rank if rank < s else None
        if s < r_plus_max:
            s = min(2 * s, r_plus_max)
            continue
        if rank == s == n:
            candidate = n
            break
        redraws += 1
        if candidate is None or redraws > 2:
            raise NoStableRank(f"Sketch rank still changing at size {s}")
    r = candidate
    if r == 0:
        return 0, SubspaceResult(U=np.zeros((n, 0)), r=0, residual=0.0, attempts=attempt, degenerate=True)
    result = dominant_eigenspace(apply_M, n, r, eps=eps, seed=seed)
    result.attempts += attempt
    return r, result


def rayleigh_reduce(M: ComplexMatrix, U: ComplexMatrix) -> ComplexMatrix:
    """L = U^H M U."""
    M = np.asarray(M)
    U = np.asarray(U)
    if U.ndim != 2 or M.shape != (U.shape[0], U.shape[0]):
        raise DimensionMismatch(f"Incompatible shapes {M.shape} and {U.shape}")
    gram = U.conj().T @ U
    if np.max(np.abs(gram - np.eye(U.shape[1])), initial=0.0) > UNITARY_TOL:
        raise NotUnitary("Columns of U are not orthonormal")
    return U.conj().T @ M @ U
