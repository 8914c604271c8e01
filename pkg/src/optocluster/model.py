"""Physical parameters and the analytic objects of the linearized model.

Covers thermal occupancies, the cluster-state Bogoliubov pair ``(X, Y)``,
the collective damping matrices ``(W, T)``, the collective noise blocks,
the Bogoliubov matrix ``B``, multifrequency drive synthesis, rotating-wave
diagnostics and quantum cooperativities.  Angular frequencies are in rad/s
throughout.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BogoliubovError, DomainError, RwaError, ShapeError, SynthesisError
from .graphs import AdjacencyMatrix, as_adjacency, require_valid

# CODATA 2018 (exact in the 2019 SI)
HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K


def thermal_occupancy(omega, temperature):
    """Bose-Einstein occupancy ``1 / (exp(hbar omega / k_B T) - 1)``.

    Exactly zero at ``temperature == 0``.  Broadcasts over array inputs.
    """
    omega = np.asarray(omega, dtype=float)
    temperature = np.asarray(temperature, dtype=float)
    if np.any(~(omega > 0)):
        raise DomainError("thermal_occupancy needs omega > 0")
    if np.any(~(temperature >= 0)):
        raise DomainError("thermal_occupancy needs temperature >= 0")
    omega, temperature = np.broadcast_arrays(omega, temperature)
    out = np.zeros(omega.shape)
    hot = temperature > 0
    with np.errstate(over="ignore", divide="ignore"):
        x = HBAR * omega[hot] / (K_B * temperature[hot])
    with np.errstate(over="ignore", divide="ignore"):
        out[hot] = 1.0 / np.expm1(x)
    return out if out.ndim else float(out)


def _vector(value, n, name, *, dtype=float, allow_none=False):
    if value is None:
        if allow_none:
            return None
        raise ShapeError(f"{name} is required")
    arr = np.array(value, dtype=dtype)
    if arr.ndim == 0:
        arr = np.full(n, arr.item(), dtype=dtype)
    if arr.shape != (n,):
        raise ShapeError(f"{name} must have length {n}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ShapeError(f"{name} has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SystemParams:
    """All physical inputs of the model.

    Scalars given for vector fields are broadcast to length ``n``.
    ``g_single`` defaults to uniform unit couplings, which leaves every
    steady-state quantity unchanged (they depend only on ``g_tilde`` and
    ``X, Y``) and expresses drive amplitudes in units of ``g``.
    ``nbar_override`` bypasses the Bose-Einstein occupancies; it exists for
    testing.
    """

    n: int
    omega_m: np.ndarray
    kappa: np.ndarray
    gamma: np.ndarray
    temperature: float
    g_tilde: np.ndarray
    r: float
    g_single: Optional[np.ndarray] = None
    delta: Optional[np.ndarray] = None
    omega_c: Optional[np.ndarray] = None
    nbar_override: Optional[np.ndarray] = None

    def __post_init__(self):
        n = self.n
        if int(n) != n or n < 1:
            raise ShapeError(f"mode count must be a positive integer, got {n!r}")
        n = int(n)
        object.__setattr__(self, "n", n)
        for name in ("omega_m", "kappa", "gamma", "g_tilde"):
            arr = _vector(getattr(self, name), n, name)
            if np.any(arr < 0):
                raise DomainError(f"{name} must be non-negative")
            object.__setattr__(self, name, arr)
        if np.any(self.omega_m <= 0):
            raise DomainError("mechanical frequencies must be positive")
        for name in ("temperature", "r"):
            val = float(getattr(self, name))
            if not np.isfinite(val):
                raise DomainError(f"{name} must be finite")
            object.__setattr__(self, name, val)
        if self.temperature < 0:
            raise DomainError("temperature must be non-negative")
        delta = _vector(0.0 if self.delta is None else self.delta, n, "delta")
        object.__setattr__(self, "delta", delta)
        omega_c = _vector(self.omega_c, n, "omega_c", allow_none=True)
        object.__setattr__(self, "omega_c", omega_c)
        nbar = _vector(self.nbar_override, n, "nbar_override", allow_none=True)
        if nbar is not None and np.any(nbar < 0):
            raise DomainError("nbar_override must be non-negative")
        object.__setattr__(self, "nbar_override", nbar)
        g = np.ones((n, n)) if self.g_single is None else np.array(self.g_single, dtype=float)
        if g.ndim == 0:
            g = np.full((n, n), g.item())
        if g.shape != (n, n):
            raise ShapeError(f"g_single must be {n}x{n}, got shape {g.shape}")
        if np.any(g < 0) or not np.all(np.isfinite(g)):
            raise DomainError("g_single entries must be finite and non-negative")
        g.setflags(write=False)
        object.__setattr__(self, "g_single", g)

    @property
    def nbar(self) -> np.ndarray:
        if self.nbar_override is not None:
            return np.array(self.nbar_override)
        return np.atleast_1d(thermal_occupancy(self.omega_m, self.temperature))

    @property
    def omega_tilde(self) -> Optional[np.ndarray]:
        """Shifted cavity frequencies, when bare frequencies are known."""
        return None if self.omega_c is None else self.omega_c + self.delta

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class BogoliubovPair:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=complex)
        y = np.array(self.y, dtype=complex)
        if x.ndim != 2 or x.shape[0] != x.shape[1] or x.shape != y.shape:
            raise ShapeError(f"X {x.shape} and Y {y.shape} must be equal square matrices")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class BogoliubovCheck:
    norm_residual: float
    symmetry_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.norm_residual <= self.tol and self.symmetry_residual <= self.tol


def cluster_bogoliubov(a, r: float) -> BogoliubovPair:
    """``X = cosh(r) 1 - (i/2) e^r A``, ``Y = -sinh(r) 1 - (i/2) e^r A``."""
    a = require_valid(a)
    if not np.isfinite(r):
        raise DomainError("squeezing parameter must be finite")
    eye = np.eye(a.n)
    off = 0.5j * np.exp(r) * a.entries
    return BogoliubovPair(np.cosh(r) * eye - off, -np.sinh(r) * eye - off)


def check_bogoliubov(pair: BogoliubovPair, tol: float = 1e-12) -> BogoliubovCheck:
    """Max-norm residuals of ``X X^+ - Y Y^+ - 1`` and ``X Y^T - Y X^T``."""
    x, y = pair.x, pair.y
    if x.shape != y.shape or x.shape[0] != x.shape[1]:
        raise ShapeError("X and Y must be equal square matrices")
    r1 = x @ x.conj().T - y @ y.conj().T - np.eye(x.shape[0])
    r2 = x @ y.T - y @ x.T
    return BogoliubovCheck(float(np.max(np.abs(r1))), float(np.max(np.abs(r2))), tol)


def bogoliubov_tolerance(pair: BogoliubovPair) -> float:
    """Residual tolerance that scales with the magnitude of the pair."""
    scale = max(1.0, np.max(np.abs(pair.x)) ** 2 + np.max(np.abs(pair.y)) ** 2) * pair.n
    return 1e-12 * scale


def forward_matrix(pair: BogoliubovPair) -> np.ndarray:
    """Map ``(b, b^+) -> (c, c^+)``: ``[[X, Y], [Y*, X*]]``."""
    return np.block([[pair.x, pair.y], [pair.y.conj(), pair.x.conj()]])


def bogoliubov_matrix(pair: BogoliubovPair) -> np.ndarray:
    """Inverse map ``(c, c^+) -> (b, b^+)``: ``[[X^+, -Y^T], [-Y^+, X^T]]``."""
    chk = check_bogoliubov(pair, bogoliubov_tolerance(pair))
    if not chk.passed:
        raise BogoliubovError(
            f"not a Bogoliubov pair (residuals {chk.norm_residual:.3g}, {chk.symmetry_residual:.3g})"
        )
    x, y = pair.x, pair.y
    return np.block([[x.conj().T, -y.T], [-y.conj().T, x.T]])


def _rates(gamma, n, name="gamma"):
    g = np.asarray(gamma, dtype=float)
    if g.shape != (n,):
        raise ShapeError(f"{name} must have length {n}, got shape {g.shape}")
    if np.any(g < 0):
        raise DomainError(f"{name} must be non-negative")
    return g


def damping_matrices(pair: BogoliubovPair, gamma):
    """Collective damping ``W`` and cross-damping ``T`` of the Bogoliubov modes."""
    g = _rates(gamma, pair.n) / 2.0
    x, y = pair.x, pair.y
    w = (x * g) @ x.conj().T - (y * g) @ y.conj().T
    t = (x * g) @ y.T - (y * g) @ x.T
    return w, t


@dataclass(frozen=True)
class NoiseBlocks:
    """Delta-correlated collective noise: ``<f f^+>``, ``<f^+ f>``, ``<f f>``, ``<f^+ f^+>``."""

    xi_mp: np.ndarray
    xi_pm: np.ndarray
    xi_mm: np.ndarray
    xi_pp: np.ndarray


def noise_blocks(pair: BogoliubovPair, gamma, nbar) -> NoiseBlocks:
    g = _rates(gamma, pair.n)
    nb = _rates(nbar, pair.n, "nbar")
    x, y = pair.x, pair.y
    xc, yc = x.conj(), y.conj()
    up = g * (nb + 1.0)
    down = g * nb
    return NoiseBlocks(
        xi_mp=(x * up) @ x.conj().T + (y * down) @ y.conj().T,
        xi_pm=(xc * down) @ x.T + (yc * up) @ y.T,
        xi_mm=(x * up) @ y.T + (y * down) @ x.T,
        xi_pp=(xc * down) @ y.conj().T + (yc * up) @ x.conj().T,
    )


@dataclass(frozen=True)
class EffectiveNoise:
    xi_exact: np.ndarray
    xi_approx: np.ndarray
    xi_star: float
    cooperativity: np.ndarray


def effective_noise(params: SystemParams, a) -> EffectiveNoise:
    """Thermal noise of each collective mode and its quantum cooperativity.

    ``xi_exact`` is the diagonal of ``<f^+ f>``; ``xi_approx`` is its
    large-squeezing form ``e^{2r}/2 [gamma_j (n_j + 1/2) + sum_adj ...]``;
    ``xi_star`` is the fully connected value.  Cooperativities are
    ``4 g~_k^2 / (kappa_k xi_k)`` (``inf`` when the noise vanishes).
    """
    a = require_valid(a)
    pair = cluster_bogoliubov(a, params.r)
    blocks = noise_blocks(pair, params.gamma, params.nbar)
    xi_exact = np.real(np.diag(blocks.xi_pm)).copy()
    half = params.gamma * (params.nbar + 0.5)
    e2r = np.exp(2.0 * params.r)
    xi_approx = 0.5 * e2r * (half + (a.entries ** 2) @ half)
    xi_star = float(0.5 * e2r * np.sum(half))
    with np.errstate(divide="ignore", invalid="ignore"):
        coop = 4.0 * params.g_tilde ** 2 / (params.kappa * xi_exact)
    coop = np.where(xi_exact > 0, coop, np.inf)
    return EffectiveNoise(xi_exact, xi_approx, xi_star, coop)


def gamma_star(params: SystemParams) -> float:
    """Uniform mechanical linewidth at which ``xi_star = 4 g~^2 / kappa``.

    Uses the smallest light-induced rate ``4 g~_k^2 / kappa_k`` when the
    optical parameters are not uniform.
    """
    light = np.min(4.0 * params.g_tilde ** 2 / params.kappa)
    per_gamma = 0.5 * np.exp(2.0 * params.r) * np.sum(params.nbar + 0.5)
    return float(light / per_gamma)


def drive_frequencies(params: SystemParams) -> np.ndarray:
    """Tone frequencies ``lambda[k, m]`` (shape ``N x 2N``).

    Red sidebands ``omega~_k - Omega_m`` fill the first ``N`` columns, blue
    sidebands ``omega~_k + Omega_m`` the rest.  Absolute when bare cavity
    frequencies are known, otherwise relative to ``omega~_k``.
    """
    om = params.omega_m
    base = params.omega_tilde
    if base is None:
        base = np.zeros(params.n)
    return np.concatenate([base[:, None] - om[None, :], base[:, None] + om[None, :]], axis=1)


def tone_detunings(params: SystemParams) -> np.ndarray:
    """``lambda[k, m] - omega_k`` (bare cavity), i.e. ``delta_k -/+ Omega_m``."""
    om = params.omega_m
    d = params.delta[:, None]
    return np.concatenate([d - om[None, :], d + om[None, :]], axis=1)


@dataclass(frozen=True)
class DriveSet:
    lam: np.ndarray
    epsilon: np.ndarray
    alpha_bar: np.ndarray


def synthesize_drives(params: SystemParams, a) -> DriveSet:
    """Tone amplitudes that make the cluster state the attractor.

    ``eps[k, j] = (g~_k / g_kj)(delta_k - Omega_j + i kappa_k/2) X_kj`` and
    ``eps[k, j+N] = (g~_k / g_kj)(delta_k + Omega_j + i kappa_k/2) Y_kj``.
    """
    a = require_valid(a)
    if a.n != params.n:
        raise ShapeError(f"graph has {a.n} nodes but params describe {params.n} modes")
    pair = cluster_bogoliubov(a, params.r)
    coeff = np.concatenate([pair.x, pair.y], axis=1)
    g = np.concatenate([params.g_single, params.g_single], axis=1)
    missing = (g == 0) & (coeff != 0)
    if np.any(missing):
        k, m = np.argwhere(missing)[0]
        j = m % params.n
        raise SynthesisError(
            f"coupling g[{k + 1},{j + 1}] is zero but tone ({k + 1},{m + 1}) is required"
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha_bar = np.where(g > 0, params.g_tilde[:, None] * coeff / g, 0.0)
    denom = tone_detunings(params) + 0.5j * params.kappa[:, None]
    epsilon = alpha_bar * denom
    # round-trip alpha from epsilon so the stored set is self-consistent
    alpha_bar = epsilon / denom
    return DriveSet(drive_frequencies(params), epsilon, alpha_bar)


def interaction_from_drives(params: SystemParams, drives: DriveSet) -> BogoliubovPair:
    """Recover ``X_kj = g_kj alpha[k, j] / g~_k`` and ``Y_kj = g_kj alpha[k, j+N] / g~_k``."""
    n = params.n
    g = params.g_single
    gt = params.g_tilde[:, None]
    return BogoliubovPair(g * drives.alpha_bar[:, :n] / gt, g * drives.alpha_bar[:, n:] / gt)


def collective_coupling(params: SystemParams, drives: DriveSet) -> np.ndarray:
    """``sqrt(sum_j g_kj^2 (|alpha_kj|^2 - |alpha_k,j+N|^2))``."""
    n = params.n
    al = drives.alpha_bar
    s = np.sum(params.g_single ** 2 * (np.abs(al[:, :n]) ** 2 - np.abs(al[:, n:]) ** 2), axis=1)
    return np.sqrt(s)


@dataclass(frozen=True)
class RwaMargin:
    """One rotating-wave condition ``lhs << rhs``.

    For the direct-coupling family ``m`` is the tone and ``m_prime`` the
    off-resonant mechanical mode.  For the mean-field families ``(m,
    m_prime)`` is the tone pair and ``j`` the mechanical mode with the
    largest left-hand side.
    """

    k: int
    m: int
    m_prime: int
    lhs: float
    rhs: float
    j: Optional[int] = None

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs


@dataclass(frozen=True)
class RwaReport:
    simple_ratio: float
    omega_bar: float
    sideband_ratio: float
    direct: list = field(default_factory=list)
    beat_difference: list = field(default_factory=list)
    beat_sum: list = field(default_factory=list)
    safety: float = 5.0

    @staticmethod
    def _worst(margins):
        return max((mg.ratio for mg in margins), default=0.0)

    @property
    def family_max(self) -> dict:
        return {
            "direct": self._worst(self.direct),
            "beat_difference": self._worst(self.beat_difference),
            "beat_sum": self._worst(self.beat_sum),
        }

    @property
    def passed_by_family(self) -> dict:
        lim = 1.0 / self.safety
        out = {name: val <= lim for name, val in self.family_max.items()}
        out["simple"] = self.simple_ratio <= lim
        return out

    @property
    def passed(self) -> bool:
        return all(self.passed_by_family.values())

    def worst(self, family: str, count: int = 5):
        return sorted(getattr(self, family), key=lambda mg: mg.ratio, reverse=True)[:count]


def min_spacing(omega_m) -> float:
    om = np.sort(np.asarray(omega_m, dtype=float))
    if om.size < 2:
        return np.inf
    return float(np.min(np.diff(om)))


def check_rwa(params: SystemParams, a, safety: float = 5.0) -> RwaReport:
    """Evaluate every rotating-wave condition for the cluster drives.

    Three families: direct couplings ``|g_kj alpha_km| << |Omega_j - Omega_m|``
    (``j != m``); mean-field beats at tone-frequency differences compared with
    ``|Omega_m - Omega_m'|`` (``m != m'``); and beats at tone-frequency sums
    compared with ``Omega_m + Omega_m'``.  Passing requires every ratio and
    the uniform-coupling figure ``g~ e^r / (2 Omega_bar)`` to be at most
    ``1 / safety``.

    Raises
    ------
    RwaError
        Two mechanical frequencies coincide.
    """
    if not safety >= 1:
        raise DomainError("safety factor must be >= 1")
    a = require_valid(a)
    n = params.n
    om = params.omega_m
    diff = np.abs(om[:, None] - om[None, :])
    off = ~np.eye(n, dtype=bool)
    if np.any(diff[off] == 0):
        j, m = np.argwhere((diff == 0) & off)[0]
        raise RwaError(
            f"mechanical modes {j + 1} and {m + 1} are degenerate; the rotating-wave premise fails"
        )
    drives = synthesize_drives(params, a)
    al_red = drives.alpha_bar[:, :n]
    al_blue = drives.alpha_bar[:, n:]
    g = params.g_single
    gam = params.gamma

    omega_bar = min_spacing(om)
    simple = 0.0 if n < 2 else float(np.max(params.g_tilde) * np.exp(params.r) / (2.0 * omega_bar))
    sideband = 0.0 if n < 2 else float(np.max(params.kappa) / omega_bar)

    # direct: [k, j, m] = max(|g_kj a_km|, |g_kj a_k,m+N|) vs |Omega_j - Omega_m|
    direct_lhs = g[:, :, None] * np.maximum(np.abs(al_red), np.abs(al_blue))[:, None, :]
    direct = [
        RwaMargin(k, m, j, float(direct_lhs[k, j, m]), float(diff[j, m]))
        for k in range(n)
        for j in range(n)
        for m in range(n)
        if j != m
    ]

    # mean-field amplitudes beta[j, k, m, m'] with detunings from tone beats
    omj = om[:, None, None, None]
    gj = (g.T)[:, :, None, None]
    half_gam = 0.5j * gam[:, None, None, None]
    om_m = om[None, None, :, None]
    om_mp = om[None, None, None, :]

    def beta(al1, al2, beat):
        num = gj * al1[None, :, :, None] * al2.conj()[None, :, None, :]
        den = np.broadcast_to(beat - omj + half_gam, num.shape)
        out = np.zeros(num.shape, dtype=complex)
        live = num != 0
        exact = live & (den == 0)
        live &= ~exact
        out[live] = num[live] / den[live]
        # an undamped mode hit exactly on resonance: unbounded response
        out[exact] = np.inf
        return out

    b_rr = beta(al_red, al_red, om_mp - om_m)
    b_bb = beta(al_blue, al_blue, om_m - om_mp)
    b_rb = beta(al_red, al_blue, -om_m - om_mp)
    b_br = beta(al_blue, al_red, om_m + om_mp)
    diff_lhs = 2.0 * gj * np.maximum(np.abs(b_rr), np.abs(b_bb))
    sum_lhs = 2.0 * gj * np.maximum(np.abs(b_rb), np.abs(b_br))

    beat_difference = []
    beat_sum = []
    for k in range(n):
        for m in range(n):
            for mp in range(n):
                col = sum_lhs[:, k, m, mp]
                jw = int(np.argmax(col))
                beat_sum.append(RwaMargin(k, m, mp, float(col[jw]), float(om[m] + om[mp]), jw))
                if m == mp:
                    continue
                col = diff_lhs[:, k, m, mp]
                jw = int(np.argmax(col))
                beat_difference.append(RwaMargin(k, m, mp, float(col[jw]), float(diff[m, mp]), jw))

    return RwaReport(
        simple_ratio=simple,
        omega_bar=omega_bar,
        sideband_ratio=sideband,
        direct=direct,
        beat_difference=beat_difference,
        beat_sum=beat_sum,
        safety=float(safety),
    )


__all__ = [
    "HBAR",
    "K_B",
    "SystemParams",
    "BogoliubovPair",
    "BogoliubovCheck",
    "NoiseBlocks",
    "EffectiveNoise",
    "DriveSet",
    "RwaMargin",
    "RwaReport",
    "thermal_occupancy",
    "cluster_bogoliubov",
    "check_bogoliubov",
    "bogoliubov_matrix",
    "forward_matrix",
    "damping_matrices",
    "noise_blocks",
    "effective_noise",
    "gamma_star",
    "drive_frequencies",
    "tone_detunings",
    "synthesize_drives",
    "interaction_from_drives",
    "collective_coupling",
    "check_rwa",
    "min_spacing",
    "AdjacencyMatrix",
    "as_adjacency",
]
