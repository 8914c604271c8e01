"""Pure numpy back-substitution used when the compiled kernel is unavailable."""

import numpy as np
from scipy.linalg import solve_triangular


def solve_triangular_sylvester(t, f):
    """Solve ``T Y + Y T^T = F`` with ``T`` upper triangular."""
    t = np.asarray(t, dtype=complex)
    f = np.asarray(f, dtype=complex)
    n = t.shape[0]
    if t.shape != (n, n) or f.shape != (n, n):
        raise ValueError("T and F must be square with matching size")
    y = np.zeros((n, n), dtype=complex)
    eye = np.eye(n)
    for j in range(n - 1, -1, -1):
        rhs = f[:, j] - y[:, j + 1:] @ t[j, j + 1:]
        shifted = t + t[j, j] * eye
        if np.any(np.diag(shifted) == 0):
            i = int(np.flatnonzero(np.diag(shifted) == 0)[0])
            raise ZeroDivisionError(f"singular Sylvester operator at ({i}, {j})")
        y[:, j] = solve_triangular(shifted, rhs, lower=False, check_finite=False)
    return y
