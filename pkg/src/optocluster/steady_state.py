"""Exact steady state of the linearized optomechanical Langevin system.

Operator ordering is ``(a, c, a^+, c^+)`` for the 4N-dimensional
correlation matrix and ``(x_1..x_N, p_1..p_N)`` for covariances, with
``x = b + b^+``, ``p = -i b + i b^+`` so that the vacuum has unit variance.

The same linear system is solved twice, once in the collective basis
``(a, c, a^+, c^+)`` and once in the original mode basis ``(a, b, a^+, b^+)``.
Each covariance is read from the solve in its own basis: mapping one into
the other through ``B`` cancels entries of size ``(2n+1) e^{2r} |A|^2``
and would leave rounding noise far above the thermal diagonal.  The
disagreement between the two solves is reported as ``basis_mismatch``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import NumericalError, ShapeError
from .graphs import require_valid
from .model import (
    BogoliubovPair,
    NoiseBlocks,
    SystemParams,
    bogoliubov_matrix,
    cluster_bogoliubov,
    damping_matrices,
    effective_noise,
    noise_blocks,
)

IMAG_RTOL = 1e-10


@dataclass(frozen=True)
class SteadyStateResult:
    c_full: np.ndarray
    v_collective: np.ndarray
    v_original: np.ndarray
    fidelity: float
    log_fidelity: float
    nullifier_var: np.ndarray
    nullifier_db: np.ndarray
    stability: float
    cooperativities: np.ndarray
    residual: float
    pair: BogoliubovPair
    c_modes: np.ndarray = None
    residual_modes: float = 0.0
    basis_mismatch: float = 0.0

    @property
    def n(self) -> int:
        return self.pair.n


def drift_matrix(params: SystemParams, pair: BogoliubovPair) -> np.ndarray:
    """Drift of ``(a, c, a^+, c^+)``.

    Substituting ``b = X^+ c - Y^T c^+`` into the bare damping gives
    ``dc/dt = -W c + T c^+``; the ``+T`` sign is what makes uncoupled
    mechanics with unequal linewidths thermalize.  ``T`` vanishes when all
    linewidths are equal.
    """
    n = params.n
    if pair.n != n:
        raise ShapeError(f"Bogoliubov pair has {pair.n} modes, params have {n}")
    w, t = damping_matrices(pair, params.gamma)
    k = np.diag(params.kappa).astype(complex)
    g = np.diag(params.g_tilde).astype(complex)
    z = np.zeros((n, n), dtype=complex)
    return np.block(
        [
            [-k / 2, -1j * g, z, z],
            [-1j * g, -w, z, t],
            [z, z, -k / 2, 1j * g],
            [z, t.conj(), 1j * g, -w.conj()],
        ]
    )


def noise_matrix(params: SystemParams, blocks: NoiseBlocks) -> np.ndarray:
    n = params.n
    for name in ("xi_mp", "xi_pm", "xi_mm", "xi_pp"):
        if getattr(blocks, name).shape != (n, n):
            raise ShapeError(f"noise block {name} is not {n}x{n}")
    k = np.diag(params.kappa).astype(complex)
    z = np.zeros((n, n), dtype=complex)
    return np.block(
        [
            [z, z, k, z],
            [z, blocks.xi_mm, z, blocks.xi_mp],
            [z, z, z, z],
            [z, blocks.xi_pm, z, blocks.xi_pp],
        ]
    )


def mode_drift_matrix(params: SystemParams, pair: BogoliubovPair) -> np.ndarray:
    """Drift of ``(a, b, a^+, b^+)``, with ``c = X b + Y b^+`` substituted.

    The mechanical blocks are the bare ``-gamma/2`` and the coupling carries
    the Bogoliubov coefficients, so nothing cancels at large squeezing.
    """
    n = params.n
    if pair.n != n:
        raise ShapeError(f"Bogoliubov pair has {pair.n} modes, params have {n}")
    x, y = pair.x, pair.y
    k = np.diag(params.kappa).astype(complex)
    gam = np.diag(params.gamma).astype(complex)
    g = params.g_tilde[:, None]
    gx, gy = g * x, g * y
    return np.block(
        [
            [-k / 2, -1j * gx, np.zeros((n, n)), -1j * gy],
            [-1j * gx.conj().T, -gam / 2, -1j * gy.T, np.zeros((n, n))],
            [np.zeros((n, n)), 1j * gy.conj(), -k / 2, 1j * gx.conj()],
            [1j * gy.conj().T, np.zeros((n, n)), 1j * gx.T, -gam / 2],
        ]
    )


def mode_noise_matrix(params: SystemParams) -> np.ndarray:
    """Input-noise correlations of ``(a, b, a^+, b^+)``: vacuum light, thermal mechanics."""
    n = params.n
    q = np.zeros((4 * n, 4 * n), dtype=complex)
    idx = np.arange(n)
    q[idx, 2 * n + idx] = params.kappa
    q[n + idx, 3 * n + idx] = params.gamma * (params.nbar + 1.0)
    q[3 * n + idx, n + idx] = params.gamma * params.nbar
    return q


def quadrature_map(n: int) -> np.ndarray:
    """``R`` with ``(x, p) = R (c, c^+)``."""
    eye = np.eye(n)
    return np.block([[eye, eye], [-1j * eye, 1j * eye]])


def symplectic_form(n: int) -> np.ndarray:
    eye = np.eye(n)
    z = np.zeros((n, n))
    return np.block([[z, eye], [-eye, z]])


def _real_covariance(v: np.ndarray) -> np.ndarray:
    scale = max(float(np.max(np.abs(v))), 1.0)
    imag = float(np.max(np.abs(v.imag)))
    if imag > IMAG_RTOL * scale:
        raise NumericalError(f"covariance has an imaginary part of {imag:.3g} (scale {scale:.3g})")
    v = v.real
    return 0.5 * (v + v.T)


def covariance_from_correlations(c_mech: np.ndarray, transform: np.ndarray | None = None) -> np.ndarray:
    """Symmetrized quadrature covariance of a ``(c, c^+)`` correlation block."""
    n = c_mech.shape[0] // 2
    sym = 0.5 * (c_mech + c_mech.T)
    if transform is not None:
        sym = transform @ sym @ transform.T
    r = quadrature_map(n)
    return _real_covariance(r @ sym @ r.T)


def vacuum_correlations(n: int) -> np.ndarray:
    """``(c, c^+)`` correlations of the vacuum: only ``<c c^+> = 1``."""
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[:n, n:] = np.eye(n)
    return out


def target_covariance(pair: BogoliubovPair) -> np.ndarray:
    """Covariance of the pure target state in the original-mode quadratures."""
    return covariance_from_correlations(vacuum_correlations(pair.n), bogoliubov_matrix(pair))


def log_fidelity_pure(v_target: np.ndarray, v: np.ndarray) -> float:
    """``ln F`` for ``F = 2^N / sqrt(det(V_target + V))``; exact when one state is pure."""
    n = v.shape[0] // 2
    return n * np.log(2.0) - 0.5 * numerics.logdet_posdef(v_target + v)


def fidelity_from_covariance(v) -> float:
    """Fidelity of a state with collective covariance ``v`` to the collective vacuum."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] % 2:
        raise ShapeError(f"covariance must be 2N x 2N, got shape {v.shape}")
    return float(np.exp(log_fidelity_pure(np.eye(v.shape[0]), v)))


def nullifier_variances(v_original, a) -> np.ndarray:
    """``diag(O V O^T)`` with ``O = [-A | 1]`` acting on ``(x, p)``."""
    a = require_valid(a)
    v = np.asarray(v_original, dtype=float)
    n = a.n
    if v.shape != (2 * n, 2 * n):
        raise ShapeError(f"covariance must be {2 * n}x{2 * n} for an {n}-node graph")
    o = np.hstack([-a.entries, np.eye(n)])
    return np.einsum("ij,jk,ik->i", o, v, o)


def to_db(x):
    return 10.0 * np.log10(x)


def physicality_floor(v) -> float:
    """Smallest eigenvalue of ``V + i Omega``; non-negative for a physical state."""
    v = np.asarray(v, dtype=float)
    return float(np.min(np.linalg.eigvalsh(v + 1j * symplectic_form(v.shape[0] // 2))))


def solve_steady(params: SystemParams, a, *, method: str = "schur", backend: str | None = None) -> SteadyStateResult:
    """Steady state for the cluster defined by ``a`` and ``params.r``.

    Raises
    ------
    StabilityError
        The drift matrix is not Hurwitz.
    DefinitenessError
        The resulting covariance is unphysical.
    """
    a = require_valid(a)
    if a.n != params.n:
        raise ShapeError(f"graph has {a.n} nodes but params describe {params.n} modes")
    n = params.n
    pair = cluster_bogoliubov(a, params.r)
    m = drift_matrix(params, pair)
    q = noise_matrix(params, noise_blocks(pair, params.gamma, params.nbar))
    stability = numerics.spectral_abscissa(m)
    c_full = numerics.solve_lyapunov(m, q, method=method, backend=backend)
    residual = numerics.lyapunov_residual(m, c_full, q)
    m_b = mode_drift_matrix(params, pair)
    q_b = mode_noise_matrix(params)
    c_modes = numerics.solve_lyapunov(m_b, q_b, method=method, backend=backend)
    residual_modes = numerics.lyapunov_residual(m_b, c_modes, q_b)

    mech = np.r_[n:2 * n, 3 * n:4 * n]
    c_mech = c_full[np.ix_(mech, mech)]
    v_c = covariance_from_correlations(c_mech)
    v_b = covariance_from_correlations(c_modes[np.ix_(mech, mech)])
    v_b_mapped = covariance_from_correlations(c_mech, bogoliubov_matrix(pair))
    mismatch = float(np.max(np.abs(v_b_mapped - v_b)) / np.max(np.abs(v_b)))

    log_f = log_fidelity_pure(np.eye(2 * n), v_c)
    null_var = nullifier_variances(v_b, a)
    coop = effective_noise(params, a).cooperativity
    return SteadyStateResult(
        c_full=c_full,
        v_collective=v_c,
        v_original=v_b,
        fidelity=float(np.exp(log_f)),
        log_fidelity=float(log_f),
        nullifier_var=null_var,
        nullifier_db=to_db(null_var),
        stability=stability,
        cooperativities=coop,
        residual=residual,
        pair=pair,
        c_modes=c_modes,
        residual_modes=residual_modes,
        basis_mismatch=mismatch,
    )
