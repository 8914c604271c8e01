"""Scenario and sweep configuration, TOML I/O.

Physical keys carry their unit in the name: ``_hz`` values are ordinary
frequencies and are multiplied by 2 pi on resolution, ``_k`` is kelvin,
everything else is a dimensionless ratio.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..errors import ConfigError, OptoclusterError
from ..graphs import GRAPH_KINDS, AdjacencyMatrix, make_graph, read_adjacency
from ..model import SystemParams

TWO_PI = 2.0 * math.pi

AXES = {
    "gamma": "gamma_over_kappa",
    "temperature": "temperature_k",
    "n_modes": "n_modes",
    "r": "r",
    "gtilde": "gtilde_over_kappa",
}

# overrides are applied after the ratio-based defaults; value -> (field, factor)
OVERRIDE_KEYS = {
    "omega_m_hz": ("omega_m", TWO_PI),
    "kappa_hz": ("kappa", TWO_PI),
    "gamma_hz": ("gamma", TWO_PI),
    "g_tilde_hz": ("g_tilde", TWO_PI),
    "delta_hz": ("delta", TWO_PI),
    "omega_c_hz": ("omega_c", TWO_PI),
    "g_single_hz": ("g_single", TWO_PI),
    "temperature_k": ("temperature", 1.0),
    "r": ("r", 1.0),
    "nbar": ("nbar_override", 1.0),
}


@dataclass(frozen=True)
class ScenarioConfig:
    graph: str = "linear"
    n_modes: int = 4
    graph_file: Optional[str] = None
    r: float = 2.0
    temperature_k: float = 0.01
    omega_base_hz: float = 10e6
    omega_m_hz: Optional[tuple] = None
    kappa_over_omegabase: float = 0.02
    gtilde_over_kappa: float = 0.16
    gamma_over_kappa: Union[float, tuple] = 5e-6
    delta_hz: Optional[Union[float, tuple]] = None
    omega_c_hz: Optional[Union[float, tuple]] = None
    rwa_safety: float = 5.0
    overrides: dict = field(default_factory=dict)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def adjacency(self) -> AdjacencyMatrix:
        if self.graph_file is not None:
            try:
                return read_adjacency(self.graph_file)
            except OSError as exc:
                raise ConfigError(f"cannot read graph file: {exc}") from None
        try:
            return make_graph(self.graph, self.n_modes)
        except OptoclusterError as exc:
            raise ConfigError(str(exc)) from None

    def resolve(self) -> tuple[SystemParams, AdjacencyMatrix]:
        """Build the physical parameter set and graph this scenario describes."""
        a = self.adjacency()
        n = a.n
        omega_bar = TWO_PI * self.omega_base_hz
        if self.omega_m_hz is not None:
            omega_m = TWO_PI * np.asarray(self.omega_m_hz, dtype=float)
        else:
            omega_m = omega_bar * np.arange(1, n + 1)
        kappa = self.kappa_over_omegabase * omega_bar
        fields = dict(
            n=n,
            omega_m=omega_m,
            kappa=kappa,
            gamma=np.asarray(self.gamma_over_kappa, dtype=float) * kappa,
            temperature=self.temperature_k,
            g_tilde=self.gtilde_over_kappa * kappa,
            r=self.r,
            delta=None if self.delta_hz is None else TWO_PI * np.asarray(self.delta_hz, dtype=float),
            omega_c=None if self.omega_c_hz is None else TWO_PI * np.asarray(self.omega_c_hz, dtype=float),
        )
        for key, value in self.overrides.items():
            if key not in OVERRIDE_KEYS:
                raise ConfigError(f"unknown override {key!r}; known: {sorted(OVERRIDE_KEYS)}")
            name, factor = OVERRIDE_KEYS[key]
            fields[name] = factor * np.asarray(value, dtype=float)
        try:
            params = SystemParams(**fields)
        except (OptoclusterError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid scenario: {exc}") from None
        return params, a

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            val = getattr(self, f.name)
            if val is None or (f.name == "overrides" and not val):
                continue
            out[f.name] = list(val) if isinstance(val, tuple) else val
        return out


@dataclass(frozen=True)
class Series:
    """One curve of a sweep: a graph kind, optionally with a fixed size."""

    kind: str
    n: Optional[int] = None

    @property
    def label(self) -> str:
        return self.kind if self.n is None else f"{self.kind}-{self.n}"


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    grid: tuple
    base: ScenarioConfig
    series: tuple = ()
    name: Optional[str] = None

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"unknown sweep axis {self.axis!r}; expected one of {sorted(AXES)}")
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ConfigError("sweep grid is empty")
        steps = np.diff(grid)
        if len(grid) > 1 and not (np.all(steps > 0) or np.all(steps < 0)):
            raise ConfigError("sweep grid must be strictly monotone")
        if self.axis == "n_modes" and any(v != int(v) or v < 1 for v in grid):
            raise ConfigError("n_modes grid must contain positive integers")
        object.__setattr__(self, "grid", grid)
        series = tuple(s if isinstance(s, Series) else Series(**s) for s in self.series)
        for s in series:
            if s.kind not in GRAPH_KINDS:
                raise ConfigError(f"unknown graph kind {s.kind!r} in series")
        object.__setattr__(self, "series", series)
        if self.axis == "n_modes" and self.base.graph_file is not None and not series:
            raise ConfigError("an n_modes sweep cannot use a fixed graph file")

    @property
    def axis_key(self) -> str:
        return AXES[self.axis]

    def effective_series(self) -> tuple:
        if self.series:
            return self.series
        if self.base.graph_file is not None:
            return (Series("file"),)
        n = None if self.axis == "n_modes" else self.base.n_modes
        return (Series(self.base.graph, n),)

    def point_config(self, series: Series, value: float) -> ScenarioConfig:
        cfg = self.base
        if series.kind != "file":
            cfg = cfg.replace(graph=series.kind, graph_file=None)
            if series.n is not None:
                cfg = cfg.replace(n_modes=series.n)
        if self.axis == "n_modes":
            return cfg.replace(n_modes=int(value))
        return cfg.replace(**{self.axis_key: float(value)})


def make_grid(spec: Any) -> tuple:
    """Explicit list, or a table ``{start, stop, num, spacing = "log" | "linear"}``."""
    if isinstance(spec, (list, tuple)):
        return tuple(float(v) for v in spec)
    if isinstance(spec, dict):
        try:
            start, stop, num = float(spec["start"]), float(spec["stop"]), int(spec["num"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"grid table needs start, stop, num: {exc}") from None
        spacing = spec.get("spacing", "linear")
        if spacing == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError("log grid bounds must be positive")
            return tuple(np.geomspace(start, stop, num).tolist())
        if spacing == "linear":
            return tuple(np.linspace(start, stop, num).tolist())
        raise ConfigError(f"unknown grid spacing {spacing!r}")
    raise ConfigError("grid must be a list or a {start, stop, num} table")


_SCENARIO_FIELDS = {f.name for f in dataclasses.fields(ScenarioConfig)} - {"overrides"}


def scenario_from_dict(data: dict, base_dir: Optional[Path] = None) -> ScenarioConfig:
    data = dict(data)
    overrides = data.pop("overrides", {}) or {}
    unknown = set(data) - _SCENARIO_FIELDS
    if unknown:
        raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
    for key in ("omega_m_hz", "gamma_over_kappa", "delta_hz", "omega_c_hz"):
        if isinstance(data.get(key), list):
            data[key] = tuple(data[key])
    if data.get("graph_file") and base_dir is not None:
        path = Path(data["graph_file"])
        data["graph_file"] = str(path if path.is_absolute() else base_dir / path)
    bad = set(overrides) - set(OVERRIDE_KEYS)
    if bad:
        raise ConfigError(f"unknown override keys: {sorted(bad)}")
    try:
        return ScenarioConfig(overrides=dict(overrides), **data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> tuple[ScenarioConfig, Optional[SweepSpec]]:
    """Parse a TOML scenario file; returns the scenario and the sweep, if any."""
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None
    return parse_config(data, path.parent)


def parse_config(data: dict, base_dir: Optional[Path] = None):
    data = dict(data)
    sweep = data.pop("sweep", None)
    name = data.pop("name", None)
    scenario = scenario_from_dict(data, base_dir)
    if sweep is None:
        return scenario, None
    sweep = dict(sweep)
    try:
        axis = sweep.pop("axis")
        grid = make_grid(sweep.pop("grid"))
    except KeyError as exc:
        raise ConfigError(f"[sweep] needs {exc}") from None
    series = sweep.pop("series", [])
    if sweep:
        raise ConfigError(f"unknown [sweep] keys: {sorted(sweep)}")
    spec = SweepSpec(axis=axis, grid=grid, base=scenario, series=tuple(series), name=name)
    return scenario, spec


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{ " + ", ".join(f"{k} = {_toml_value(v)}" for k, v in value.items()) + " }"
    raise TypeError(f"cannot encode {type(value).__name__} as TOML")


def to_toml(scenario: ScenarioConfig, sweep: Optional[SweepSpec] = None) -> str:
    lines = []
    if sweep is not None and sweep.name:
        lines.append(f"name = {_toml_value(sweep.name)}")
    data = scenario.to_dict()
    overrides = data.pop("overrides", None)
    for key, value in data.items():
        lines.append(f"{key} = {_toml_value(value)}")
    if overrides:
        lines.append("")
        lines.append("[overrides]")
        for key, value in overrides.items():
            lines.append(f"{key} = {_toml_value(value)}")
    if sweep is not None:
        lines.append("")
        lines.append("[sweep]")
        lines.append(f"axis = {_toml_value(sweep.axis)}")
        lines.append(f"grid = {_toml_value(list(sweep.grid))}")
        if sweep.series:
            items = []
            for s in sweep.series:
                d = {"kind": s.kind}
                if s.n is not None:
                    d["n"] = s.n
                items.append(d)
            lines.append(f"series = {_toml_value(items)}")
    return "\n".join(lines) + "\n"
