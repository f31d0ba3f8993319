"""Reference computations kept independent of the package internals."""
import numpy as np
from scipy.optimize import linprog


def dense_haar_matrix(n: int) -> np.ndarray:
    """Orthonormal Haar analysis matrix built from explicit basis functions.

    Row 0 is the constant 1/sqrt(n); row 2**j + k (level j, shift k) is +1 on
    the first half and -1 on the second half of block k of length n / 2**j,
    scaled to unit norm.
    """
    H = np.zeros((n, n))
    H[0, :] = 1.0 / np.sqrt(n)
    level = 0
    while 2**level < n:
        width = n // 2**level
        for k in range(2**level):
            row = 2**level + k
            start = k * width
            H[row, start:start + width // 2] = 1.0
            H[row, start + width // 2:start + width] = -1.0
            H[row] /= np.sqrt(width)
        level += 1
    return H


def brute_force_cwt(s, scales) -> np.ndarray:
    """Direct double loop over positions with mirrored indexing."""
    s = np.asarray(s, dtype=float)
    n = s.size

    def at(i):
        while i < 0 or i >= n:
            i = -i - 1 if i < 0 else 2 * n - 1 - i
        return s[i]

    out = np.zeros((len(list(scales)), n))
    for r, a in enumerate(scales):
        for p in range(n):
            left = sum(at(i) for i in range(p - a, p))
            right = sum(at(i) for i in range(p, p + a))
            out[r, p] = abs(left - right) / np.sqrt(2 * a)
    return out


def lp_basis_pursuit(g, indices, n):
    """min ||c||_1 s.t. (H^T c)[indices] = g as a linear program (HiGHS)."""
    A = dense_haar_matrix(n).T[np.asarray(indices)]
    res = linprog(
        np.ones(2 * n),
        A_eq=np.hstack([A, -A]),
        b_eq=np.asarray(g, dtype=float),
        bounds=(0, None),
        method="highs",
    )
    assert res.status == 0, res.message
    return res.x[:n] - res.x[n:]
