"""Dense matrix kernels.

Real matrices stay real (float64) through every routine, anything else is
handled as complex128. Nothing here calls a LAPACK driver: factorizations
are Householder/Givens based and written against numpy array slices.
"""

import math

import numpy as np

from .exceptions import (
    InputError,
    DimensionMismatch,
    InvalidConfig,
    RankDeficient,
    SingularMatrix,
    IllConditioned,
    NoConvergence,
)
from .structures import ComplexMatrix

EPS = np.finfo(float).eps
RANK_TOL = 1e-13
PIVOT_TOL = 1e-14
COND_LIMIT = 1.0 / (50 * EPS)
POWER_STEPS = 30
SWEEPS_PER_EIGENVALUE = 40


def _matrix(M, square=False) -> np.ndarray:
    A = np.asarray(M)
    if A.ndim != 2:
        raise DimensionMismatch(f"Expected a matrix, got an array of shape {A.shape}")
    if square and A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"Expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError("Matrix entries must be finite")
    dtype = complex if np.iscomplexobj(A) else float
    return np.array(A, dtype=dtype)


def _reflector(x):
    """Unit Householder vector v with (I - 2vv^H)x = -phase(x_0)|x| e_0."""
    alpha = np.linalg.norm(x)
    if x[0] != 0:
        phase = x[0] / abs(x[0])
    else:
        phase = 1.0
    v = x.copy()
    v[0] += phase * alpha
    return v / np.linalg.norm(v)


def _apply_left(A, v):
    A -= 2.0 * np.outer(v, v.conj() @ A)


def _accumulate_q(reflectors, m, k, dtype):
    Q = np.eye(m, k, dtype=dtype)
    for j in range(len(reflectors) - 1, -1, -1):
        _apply_left(Q[j:, :], reflectors[j])
    return Q


def _positive_diagonal(Q, R):
    d = np.diag(R).copy()
    phase = np.where(d != 0, d / np.where(d != 0, np.abs(d), 1), 1)
    R = phase.conj()[:, None] * R
    Q = Q * phase[None, :]
    return Q, R


def qr_positive(M: ComplexMatrix):
    """Thin Householder QR with real positive diag(R).

    Returns Q (m x n, orthonormal columns) and R (n x n upper triangular).
    """
    A = _matrix(M)
    m, n = A.shape
    if m < n:
        raise DimensionMismatch(f"qr_positive needs rows >= cols, got {A.shape}")
    scale = np.linalg.norm(A)
    reflectors = []
    for k in range(n):
        x = A[k:, k]
        if np.linalg.norm(x) <= RANK_TOL * scale:
            raise RankDeficient(f"Column {k} is numerically dependent on the previous ones")
        v = _reflector(x.copy())
        _apply_left(A[k:, k:], v)
        reflectors.append(v)
    Q = _accumulate_q(reflectors, m, n, A.dtype)
    R = np.triu(A[:n, :n])
    Q, R = _positive_diagonal(Q, R)
    if not np.iscomplexobj(A):
        R = R.real
    return Q, R


def pivoted_qr(M: ComplexMatrix):
    """Householder QR with greedy column-norm pivoting, M[:, perm] = QR.

    Stops early when the remaining block is exactly zero, so Q may have
    fewer than min(m, n) columns. |diag(R)| is nonincreasing.
    """
    A = _matrix(M)
    m, n = A.shape
    perm = np.arange(n)
    reflectors = []
    for k in range(min(m, n)):
        norms = np.linalg.norm(A[k:, k:], axis=0)
        j = k + int(np.argmax(norms))
        if norms[j - k] == 0:
            break
        if j != k:
            A[:, [k, j]] = A[:, [j, k]]
            perm[[k, j]] = perm[[j, k]]
        v = _reflector(A[k:, k].copy())
        _apply_left(A[k:, k:], v)
        reflectors.append(v)
    k = len(reflectors)
    Q = _accumulate_q(reflectors, m, k, A.dtype)
    R = np.triu(A[:k, :])
    Q, R = _positive_diagonal(Q, R)
    if not np.iscomplexobj(A):
        R = R.real
    return Q, R, perm


def numerical_rank(M: ComplexMatrix, eps_rel: float = 1e-6) -> int:
    """Number of pivoted-QR diagonal entries >= eps_rel * |R_00|."""
    if not 0 < eps_rel <= 1:
        raise InvalidConfig(f"eps_rel must be in (0, 1], got {eps_rel}")
    _, R, _ = pivoted_qr(M)
    d = np.abs(np.diag(R))
    if d.size == 0 or d[0] == 0:
        return 0
    return int(np.count_nonzero(d >= eps_rel * d[0]))


def _start_vector(n):
    j = np.arange(n)
    return 1.0 + 0.5 * np.sin(1.7 * j + 0.3) + j / (3.0 * max(n, 1))


def norm2_est(M: ComplexMatrix) -> float:
    """Spectral norm estimate by power iteration on M^H M."""
    A = _matrix(M)
    if A.size == 0:
        return 0.0
    v = _start_vector(A.shape[1]).astype(A.dtype)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(POWER_STEPS):
        w = A @ v
        est = np.linalg.norm(w)
        if est == 0:
            return 0.0
        v = A.conj().T @ w
        nv = np.linalg.norm(v)
        if nv == 0:
            return float(est)
        v /= nv
    return float(max(est, np.linalg.norm(A @ v)))


def _gauss_jordan(A):
    n = A.shape[0]
    scale = np.linalg.norm(A)
    inv = np.eye(n, dtype=A.dtype)
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if abs(A[p, k]) <= PIVOT_TOL * scale:
            raise SingularMatrix(f"Negligible pivot at step {k}")
        if p != k:
            A[[k, p]] = A[[p, k]]
            inv[[k, p]] = inv[[p, k]]
        pivot = A[k, k]
        A[k] /= pivot
        inv[k] /= pivot
        factors = A[:, k].copy()
        factors[k] = 0
        A -= np.outer(factors, A[k])
        inv -= np.outer(factors, inv[k])
    return inv


def invert(M: ComplexMatrix, check_condition: bool = True) -> ComplexMatrix:
    """Inverse by elimination with partial pivoting.

    Raises SingularMatrix on a negligible pivot and IllConditioned when
    norm2_est(M) * norm2_est(M^-1) exceeds 1/(50 eps).
    """
    A = _matrix(M, square=True)
    if A.shape[0] == 0:
        return A.copy()
    inv = _gauss_jordan(A.copy())
    if check_condition:
        cond = norm2_est(A) * norm2_est(inv)
        if not np.isfinite(cond) or cond > COND_LIMIT:
            raise IllConditioned(f"Condition estimate {cond:.3e} exceeds {COND_LIMIT:.3e}")
    return inv


def cond_est(M: ComplexMatrix) -> float:
    A = _matrix(M, square=True)
    return norm2_est(A) * norm2_est(invert(A, check_condition=False))


def _balance(a):
    """Diagonal similarity by powers of two that evens out row and column norms."""
    radix = 2.0
    sqrdx = radix * radix
    n = a.shape[0]
    done = False
    while not done:
        done = True
        for i in range(n):
            c = np.sum(np.abs(a[:, i])) - abs(a[i, i])
            r = np.sum(np.abs(a[i, :])) - abs(a[i, i])
            if c == 0 or r == 0:
                continue
            g = r / radix
            f = 1.0
            s = c + r
            while c < g:
                f *= radix
                c *= sqrdx
            g = r * radix
            while c > g:
                f /= radix
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                a[i, :] /= f
                a[:, i] *= f
    return a


def _hessenberg(a):
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1 :, k]
        if np.linalg.norm(x[1:]) == 0:
            continue
        v = _reflector(x.copy())
        _apply_left(a[k + 1 :, k:], v)
        a[:, k + 1 :] -= 2.0 * np.outer(a[:, k + 1 :] @ v, v.conj())
    return np.triu(a, -1)


def _hqr(a):
    """Francis double-shift QR on a real upper Hessenberg matrix.

    Eigenvalues only; deflation by the usual small-subdiagonal test and
    exceptional shifts every ten sweeps without deflation.
    """
    n = a.shape[0]
    wr = np.zeros(n)
    wi = np.zeros(n)
    anorm = np.sum(np.abs(a))
    limit = SWEEPS_PER_EIGENVALUE * n
    sweeps = 0
    t = 0.0
    nn = n - 1
    while nn >= 0:
        its = 0
        while True:
            l = nn
            while l >= 1:
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                if abs(a[l, l - 1]) + s == s:
                    a[l, l - 1] = 0.0
                    break
                l -= 1
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + math.copysign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z:
                        wr[nn] = x - w / z
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break
            if sweeps >= limit:
                raise NoConvergence(f"QR iteration did not converge in {limit} sweeps")
            if its and its % 10 == 0:
                t += x
                idx = np.arange(nn + 1)
                a[idx, idx] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                y = x = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            sweeps += 1
            m = nn - 2
            while True:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u + v == v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0
            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = a[k + 2, k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = math.copysign(math.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x = p / s
                y = q / s
                z = r / s
                q /= p
                r /= p
                cols = slice(k, nn + 1)
                pv = a[k, cols] + q * a[k + 1, cols]
                if k != nn - 1:
                    pv = pv + r * a[k + 2, cols]
                    a[k + 2, cols] -= pv * z
                a[k + 1, cols] -= pv * y
                a[k, cols] -= pv * x
                rows = slice(l, min(nn, k + 3) + 1)
                pv = x * a[rows, k] + y * a[rows, k + 1]
                if k != nn - 1:
                    pv = pv + z * a[rows, k + 2]
                    a[rows, k + 2] -= pv * r
                a[rows, k + 1] -= pv * q
                a[rows, k] -= pv
    return wr + 1j * wi


def _givens(x, y):
    """c, s with [[c, s], [-conj(s), c]] @ [x, y] = [nu, 0], c real."""
    if y == 0:
        return 1.0, 0j
    if x == 0:
        return 0.0, np.conj(y) / abs(y)
    nu = math.hypot(abs(x), abs(y))
    return abs(x) / nu, (x / abs(x)) * np.conj(y) / nu


def _complex_qr(h):
    """Single-shift QR with Wilkinson shifts on a complex upper Hessenberg matrix."""
    n = h.shape[0]
    eigs = np.zeros(n, dtype=complex)
    anorm = np.sum(np.abs(h))
    limit = SWEEPS_PER_EIGENVALUE * n
    sweeps = 0
    its = 0
    hi = n - 1
    while hi >= 0:
        l = hi
        while l >= 1:
            s = abs(h[l - 1, l - 1]) + abs(h[l, l])
            if s == 0.0:
                s = anorm
            if abs(h[l, l - 1]) + s == s:
                h[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            eigs[hi] = h[hi, hi]
            hi -= 1
            its = 0
            continue
        if sweeps >= limit:
            raise NoConvergence(f"QR iteration did not converge in {limit} sweeps")
        a, b = h[hi - 1, hi - 1], h[hi - 1, hi]
        c, d = h[hi, hi - 1], h[hi, hi]
        half = 0.5 * (a - d)
        root = np.sqrt(half * half + b * c)
        mu1, mu2 = 0.5 * (a + d) + root, 0.5 * (a + d) - root
        mu = mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2
        if its and its % 10 == 0:
            mu = d + 0.75 * abs(h[hi, hi - 1]) * (1 + 0.5j)
        idx = np.arange(l, hi + 1)
        h[idx, idx] -= mu
        rotations = []
        for k in range(l, hi):
            cs, sn = _givens(h[k, k], h[k + 1, k])
            G = np.array([[cs, sn], [-np.conj(sn), cs]])
            h[k : k + 2, k : hi + 1] = G @ h[k : k + 2, k : hi + 1]
            rotations.append(G)
        for k, G in zip(range(l, hi), rotations):
            h[l : k + 2, k : k + 2] = h[l : k + 2, k : k + 2] @ G.conj().T
        h[idx, idx] += mu
        its += 1
        sweeps += 1
    return eigs


def eigenvalues(M: ComplexMatrix) -> np.ndarray:
    """All n eigenvalues: balancing, Householder Hessenberg reduction, then
    Francis double-shift QR for real input or Wilkinson single-shift QR for
    complex input. Raises NoConvergence after 40n sweeps."""
    A = _matrix(M, square=True)
    n = A.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex)
    if n == 1:
        return A[0].astype(complex)
    H = _hessenberg(_balance(A))
    if np.iscomplexobj(H):
        return _complex_qr(H)
    return _hqr(H)
