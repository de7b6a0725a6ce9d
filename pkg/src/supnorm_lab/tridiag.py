"""Periodic (cyclic) tridiagonal solves via Sherman-Morrison on a banded LAPACK solve."""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded


class CyclicTridiagonal:
    """Matrix with ``A[i, i-1] = lower[i]``, ``A[i, i] = diag[i]``, ``A[i, i+1] = upper[i]``,
    indices taken modulo ``n``.

    The periodic corners are moved into a rank-one correction, so each call
    to :meth:`solve` costs a single O(n) banded solve; the correction vector
    is computed once.
    """

    def __init__(self, lower, diag, upper):
        diag = np.array(diag, dtype=float)
        n = diag.size
        lower = np.broadcast_to(np.asarray(lower, dtype=float), (n,)).copy()
        upper = np.broadcast_to(np.asarray(upper, dtype=float), (n,)).copy()
        if n < 3:
            raise ValueError("cyclic system needs at least 3 unknowns")
        top_right = lower[0]       # A[0, n-1]
        bottom_left = upper[-1]    # A[n-1, 0]
        gamma = -diag[0]
        d = diag.copy()
        d[0] -= gamma
        d[-1] -= bottom_left * top_right / gamma

        ab = np.zeros((3, n))
        ab[0, 1:] = upper[:-1]
        ab[1] = d
        ab[2, :-1] = lower[1:]
        self._ab = ab

        u = np.zeros(n)
        u[0] = gamma
        u[-1] = bottom_left
        self._v0 = 1.0
        self._vn = top_right / gamma
        self._z = solve_banded((1, 1), ab, u)
        self._denom = 1.0 + self._v0 * self._z[0] + self._vn * self._z[-1]
        self.n = n

    def solve(self, rhs) -> np.ndarray:
        y = solve_banded((1, 1), self._ab, rhs, check_finite=False)
        factor = (self._v0 * y[0] + self._vn * y[-1]) / self._denom
        return y - factor * self._z
