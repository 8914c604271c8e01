"""Dense complex linear algebra: Lyapunov solve, stability gate, log-determinant.

The triangular stage of the Bartels-Stewart Lyapunov solver runs in a
compiled Cython kernel when it has been built; otherwise a numpy
implementation is used.  Set ``OPTOCLUSTER_PURE_PYTHON=1`` to force the
fallback.  ``BACKEND`` records which one was selected at import.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.linalg

from ..errors import DefinitenessError, NumericalError, ShapeError, StabilityError
from . import _sylvester_py

# numeric policy
RESIDUAL_RTOL = 1e-10
HURWITZ_RTOL = 1e-14
SYMMETRY_RTOL = 1e-10

_KERNELS = {"python": _sylvester_py.solve_triangular_sylvester}
try:
    if os.environ.get("OPTOCLUSTER_PURE_PYTHON"):
        raise ImportError("compiled kernel disabled by OPTOCLUSTER_PURE_PYTHON")
    from . import _sylvester

    _KERNELS["cython"] = _sylvester.solve_triangular_sylvester
    BACKEND = "cython"
except ImportError:
    BACKEND = "python"

__all__ = [
    "BACKEND",
    "available_backends",
    "solve_lyapunov",
    "lyapunov_residual",
    "spectral_abscissa",
    "logdet_posdef",
]


def available_backends() -> tuple[str, ...]:
    return tuple(_KERNELS)


def _square(m, name):
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NumericalError(f"{name} has non-finite entries")
    return m


def spectral_abscissa(m) -> float:
    """Largest real part of the eigenvalues of ``m``."""
    m = _square(m, "matrix")
    try:
        eig = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue solver did not converge: {exc}") from None
    return float(np.max(eig.real))


def lyapunov_residual(m, c, q) -> float:
    """``max |M C + C M^T + Q|``."""
    return float(np.max(np.abs(m @ c + c @ m.T + q)))


def _solve_schur(m, q, backend):
    t, u = scipy.linalg.schur(m.astype(complex), output="complex")
    diag = np.diag(t)
    sep = np.min(np.abs(diag[:, None] + diag[None, :]))
    if sep == 0.0:
        raise NumericalError("Lyapunov operator is singular (eigenvalues sum to zero)")
    # M = U T U^H  =>  C = U Y U^T with T Y + Y T^T = -U^H Q conj(U)
    f = -(u.conj().T @ q @ u.conj())
    try:
        y = _KERNELS[backend](np.ascontiguousarray(t), np.ascontiguousarray(f))
    except ZeroDivisionError as exc:
        raise NumericalError(str(exc)) from None
    return u @ y @ u.T, sep


def _solve_kron(m, q):
    n = m.shape[0]
    eye = np.eye(n)
    # row-major vec: vec(M C) = (M kron 1) vec(C), vec(C M^T) = (1 kron M) vec(C)
    op = np.kron(m, eye) + np.kron(eye, m)
    lu, piv = scipy.linalg.lu_factor(op, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if pivots.min() == 0.0:
        raise NumericalError("vectorized Lyapunov system is singular")
    sep = pivots.min() / pivots.max()
    c = scipy.linalg.lu_solve((lu, piv), -q.reshape(-1), check_finite=False)
    return c.reshape(n, n), sep


def solve_lyapunov(m, q, *, method: str = "schur", backend: str | None = None, check: bool = True):
    """Solve ``M C + C M^T + Q = 0`` for ``C``.

    The plain transpose is deliberate: ``C`` holds non-Hermitian operator
    correlations, not a covariance.

    Parameters
    ----------
    m, q : (n, n) array_like
        Drift matrix (must be Hurwitz) and inhomogeneity.
    method : {"schur", "kron"}
        Bartels-Stewart with complex Schur form, or dense LU on the
        vectorized ``n^2 x n^2`` system.
    backend : {"cython", "python"}, optional
        Triangular-solve kernel for ``method="schur"``; defaults to ``BACKEND``.
    check : bool
        Enforce the Hurwitz gate and the residual bound.

    Raises
    ------
    StabilityError
        ``M`` is not Hurwitz.
    NumericalError
        Singular operator or residual above ``RESIDUAL_RTOL``.
    """
    m = _square(m, "M")
    q = _square(q, "Q")
    if q.shape != m.shape:
        raise ShapeError(f"M {m.shape} and Q {q.shape} differ in shape")
    m = m.astype(complex)
    q = q.astype(complex)
    norm_m = np.linalg.norm(m)
    if check:
        abscissa = spectral_abscissa(m)
        if not abscissa < -HURWITZ_RTOL * norm_m:
            raise StabilityError(f"drift matrix is not Hurwitz (spectral abscissa {abscissa:.6g})")
    if method == "schur":
        backend = backend or BACKEND
        if backend not in _KERNELS:
            raise ValueError(f"backend {backend!r} not available; have {available_backends()}")
        c, sep = _solve_schur(m, q, backend)
    elif method == "kron":
        c, sep = _solve_kron(m, q)
    else:
        raise ValueError(f"unknown method {method!r}")
    if check:
        res = lyapunov_residual(m, c, q)
        bound = RESIDUAL_RTOL * (norm_m * np.linalg.norm(c) + np.linalg.norm(q))
        if not res <= bound:
            raise NumericalError(
                f"Lyapunov residual {res:.3g} exceeds {bound:.3g} (separation estimate {sep:.3g})"
            )
    return c


def logdet_posdef(v) -> float:
    """``ln det v`` of a real symmetric positive-definite matrix via Cholesky."""
    v = _square(v, "matrix")
    if np.iscomplexobj(v):
        if np.max(np.abs(v.imag)) > SYMMETRY_RTOL * max(np.max(np.abs(v)), 1.0):
            raise ShapeError("logdet_posdef expects a real matrix")
        v = v.real
    scale = max(float(np.max(np.abs(v))), np.finfo(float).tiny)
    if np.max(np.abs(v - v.T)) > SYMMETRY_RTOL * scale:
        raise ShapeError("logdet_posdef expects a symmetric matrix")
    try:
        chol = np.linalg.cholesky(0.5 * (v + v.T))
    except np.linalg.LinAlgError:
        raise DefinitenessError("matrix is not positive definite") from None
    d = np.diag(chol)
    if np.any(d <= 0):
        raise DefinitenessError("matrix is not positive definite")
    return float(2.0 * np.sum(np.log(d)))
