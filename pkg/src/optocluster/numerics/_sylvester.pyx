# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled back-substitution for the triangular Sylvester equation T Y + Y T^T = F."""

import numpy as np

cimport cython


def solve_triangular_sylvester(const double complex[:, ::1] t, const double complex[:, ::1] f):
    """Solve ``T Y + Y T^T = F`` with ``T`` upper triangular.

    Columns of ``Y`` are produced from last to first; each one is an
    upper-triangular solve against ``T + T[j, j] I``.
    """
    cdef Py_ssize_t n = t.shape[0]
    if t.shape[1] != n or f.shape[0] != n or f.shape[1] != n:
        raise ValueError("T and F must be square with matching size")
    # yt holds Y transposed so the back-substitution reads contiguous memory
    yt_arr = np.zeros((n, n), dtype=np.complex128)
    rhs_arr = np.empty(n, dtype=np.complex128)
    cdef double complex[:, ::1] yt = yt_arr
    cdef double complex[::1] rhs = rhs_arr
    cdef Py_ssize_t i, j, k
    cdef double complex s, tjj, d

    for j in range(n - 1, -1, -1):
        tjj = t[j, j]
        for i in range(n):
            rhs[i] = f[i, j]
        for k in range(j + 1, n):
            s = t[j, k]
            if s != 0:
                for i in range(n):
                    rhs[i] = rhs[i] - s * yt[k, i]
        for i in range(n - 1, -1, -1):
            s = rhs[i]
            for k in range(i + 1, n):
                s = s - t[i, k] * yt[j, k]
            d = t[i, i] + tjj
            if d == 0:
                raise ZeroDivisionError(f"singular Sylvester operator at ({i}, {j})")
            yt[j, i] = s / d
    return yt_arr.T.copy()
