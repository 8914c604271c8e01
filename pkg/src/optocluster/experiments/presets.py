"""Named sweep presets ``fig2`` to ``fig9``, one per standard plot.

Every preset shares the base scenario r = 2, T = 10 mK, Omega_j = j Omega_bar
with Omega_bar = 2 pi x 10 MHz, kappa = 0.02 Omega_bar and g~ = 0.16 kappa.
Presets fig4 to fig9 fix gamma_j = 5e-6 kappa.  Continuous axes use 61
points; fig6 steps through even mode counts so the ladder graph exists.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .config import ScenarioConfig, Series, SweepSpec

GRID_POINTS = 61
QUALITY_GAMMA = 5e-6

BASE = ScenarioConfig(
    graph="linear",
    n_modes=4,
    r=2.0,
    temperature_k=0.01,
    omega_base_hz=10e6,
    kappa_over_omegabase=0.02,
    gtilde_over_kappa=0.16,
    gamma_over_kappa=QUALITY_GAMMA,
)

KINDS = ("linear", "rectangular", "complete")
SIZED_SERIES = tuple(Series(kind, n) for n in (4, 10) for kind in KINDS)
KIND_SERIES = tuple(Series(kind) for kind in KINDS)

DESCRIPTIONS = {
    "fig2": "fidelity vs mechanical linewidth gamma (N = 4, 10; three graphs)",
    "fig3": "nullifier variances vs mechanical linewidth gamma (N = 4, 10; three graphs)",
    "fig4": "fidelity vs temperature at gamma = 5e-6 kappa",
    "fig5": "nullifier variances vs temperature at gamma = 5e-6 kappa",
    "fig6": "fidelity vs number of modes at gamma = 5e-6 kappa",
    "fig7": "fidelity vs squeezing parameter r at gamma = 5e-6 kappa",
    "fig8": "nullifier variances vs squeezing parameter r at gamma = 5e-6 kappa",
    "fig9": "fidelity vs collective coupling g~ at gamma = 5e-6 kappa",
}

PRESET_NAMES = tuple(DESCRIPTIONS)


def _gamma_sweep(name):
    grid = np.geomspace(1e-9, 1e-3, GRID_POINTS)
    return SweepSpec("gamma", tuple(grid.tolist()), BASE, SIZED_SERIES, name)


def _temperature_sweep(name):
    grid = np.geomspace(1e-3, 1.0, GRID_POINTS)
    return SweepSpec("temperature", tuple(grid.tolist()), BASE, SIZED_SERIES, name)


def _size_sweep(name):
    # even sizes so the 2-row ladder exists at every point
    grid = tuple(float(n) for n in range(4, 21, 2))
    return SweepSpec("n_modes", grid, BASE, KIND_SERIES, name)


def _squeezing_sweep(name):
    grid = np.linspace(0.0, 4.0, GRID_POINTS)
    return SweepSpec("r", tuple(grid.tolist()), BASE, SIZED_SERIES, name)


def _coupling_sweep(name):
    grid = np.geomspace(1e-2, 1.0, GRID_POINTS)
    return SweepSpec("gtilde", tuple(grid.tolist()), BASE, SIZED_SERIES, name)


_BUILDERS = {
    "fig2": _gamma_sweep,
    "fig3": _gamma_sweep,
    "fig4": _temperature_sweep,
    "fig5": _temperature_sweep,
    "fig6": _size_sweep,
    "fig7": _squeezing_sweep,
    "fig8": _squeezing_sweep,
    "fig9": _coupling_sweep,
}


def preset(name: str) -> SweepSpec:
    try:
        return _BUILDERS[name](name)
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}") from None
