"""Single-point evaluation and order-preserving parameter sweeps."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .. import __version__, numerics
from ..errors import OptoclusterError, PhysicsError, RwaError
from ..model import check_rwa, effective_noise, gamma_star
from ..steady_state import physicality_floor, solve_steady
from .config import ScenarioConfig, Series, SweepSpec


class RwaWarning(UserWarning):
    """The rotating-wave conditions are not met at the requested safety factor."""


@dataclass
class ResultRow:
    series: str
    axis_name: str
    axis_value: float
    n_modes: int = 0
    fidelity: float = math.nan
    nullifier_var: np.ndarray = field(default_factory=lambda: np.zeros(0))
    null_db_min: float = math.nan
    null_db_max: float = math.nan
    xi_exact: np.ndarray = field(default_factory=lambda: np.zeros(0))
    xi_approx: np.ndarray = field(default_factory=lambda: np.zeros(0))
    cooperativities: np.ndarray = field(default_factory=lambda: np.zeros(0))
    xi_star: float = math.nan
    coop_min: float = math.nan
    stability: float = math.nan
    rwa_ratio: float = math.nan
    rwa_pass: Optional[bool] = None
    quality_factors: np.ndarray = field(default_factory=lambda: np.zeros(0))
    physicality: float = math.nan
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error

    @property
    def nullifier_db(self) -> np.ndarray:
        return 10.0 * np.log10(self.nullifier_var)

    def to_dict(self) -> dict:
        out = {}
        for key, value in self.__dict__.items():
            if isinstance(value, np.ndarray):
                value = value.tolist()
            out[key] = value
        return out


def _describe(params) -> str:
    return (
        f"n={params.n}, r={params.r:g}, T={params.temperature:g} K, "
        f"gamma={np.unique(params.gamma).tolist()}, kappa={np.unique(params.kappa).tolist()}, "
        f"g_tilde={np.unique(params.g_tilde).tolist()}"
    )


def run_point(
    cfg: ScenarioConfig,
    *,
    strict_rwa: bool = False,
    series: str = "",
    axis_name: str = "",
    axis_value: float = math.nan,
) -> ResultRow:
    """Resolve ``cfg`` and evaluate every figure of merit at that point.

    A failed rotating-wave check only warns unless ``strict_rwa`` is set.
    Physics errors are re-raised with the offending parameters appended.
    """
    params, a = cfg.resolve()
    try:
        rwa = check_rwa(params, a, cfg.rwa_safety)
        if not rwa.passed:
            failing = [k for k, ok in rwa.passed_by_family.items() if not ok]
            msg = f"rotating-wave conditions fail at safety {cfg.rwa_safety:g}: {', '.join(failing)}"
            if strict_rwa:
                raise RwaError(msg)
            warnings.warn(msg, RwaWarning, stacklevel=2)
        res = solve_steady(params, a)
    except PhysicsError as exc:
        raise type(exc)(f"{exc} [{_describe(params)}]") from exc
    noise = effective_noise(params, a)
    with np.errstate(divide="ignore"):
        q = params.omega_m / params.gamma
    return ResultRow(
        series=series,
        axis_name=axis_name,
        axis_value=axis_value,
        n_modes=params.n,
        fidelity=res.fidelity,
        nullifier_var=res.nullifier_var,
        null_db_min=float(np.min(res.nullifier_db)),
        null_db_max=float(np.max(res.nullifier_db)),
        xi_exact=noise.xi_exact,
        xi_approx=noise.xi_approx,
        cooperativities=noise.cooperativity,
        xi_star=noise.xi_star,
        coop_min=float(np.min(noise.cooperativity)),
        stability=res.stability,
        rwa_ratio=rwa.simple_ratio,
        rwa_pass=rwa.passed,
        quality_factors=q,
        physicality=min(physicality_floor(res.v_collective), physicality_floor(res.v_original)),
    )


def _task(args):
    cfg, strict, label, axis_name, value = args
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RwaWarning)
            return run_point(cfg, strict_rwa=strict, series=label, axis_name=axis_name, axis_value=value)
    except OptoclusterError as exc:
        return ResultRow(series=label, axis_name=axis_name, axis_value=value, error=f"{type(exc).__name__}: {exc}")


def _tasks(spec: SweepSpec, strict_rwa: bool):
    out = []
    for s in spec.effective_series():
        for value in spec.grid:
            out.append((spec.point_config(s, value), strict_rwa, s.label, spec.axis_key, value))
    return out


@dataclass
class SweepResult:
    rows: list
    metadata: dict

    @property
    def failures(self) -> int:
        return sum(1 for r in self.rows if not r.ok)


def _fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    return format(x, ".17g")


def csv_header(max_n: int) -> list:
    return (
        ["series", "axis_name", "axis_value", "fidelity"]
        + [f"null_var_{j}" for j in range(1, max_n + 1)]
        + ["null_db_min", "null_db_max", "xi_star", "coop_min", "rwa_ratio", "stability", "error"]
    )


def rows_to_csv(rows) -> str:
    max_n = max((len(r.nullifier_var) for r in rows), default=0)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(csv_header(max_n))
    for r in rows:
        pad = [_fmt(v) for v in r.nullifier_var] + [""] * (max_n - len(r.nullifier_var))
        writer.writerow(
            [r.series, r.axis_name, _fmt(r.axis_value), _fmt(r.fidelity)]
            + pad
            + [
                _fmt(r.null_db_min),
                _fmt(r.null_db_max),
                _fmt(r.xi_star),
                _fmt(r.coop_min),
                _fmt(r.rwa_ratio),
                _fmt(r.stability),
                r.error,
            ]
        )
    return buf.getvalue()


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _params_dict(params) -> dict:
    out = {}
    for key, value in params.__dict__.items():
        if isinstance(value, np.ndarray):
            value = value.tolist()
        out[key] = value
    return out


def sweep_metadata(spec: SweepSpec, rows) -> dict:
    series_meta = {}
    for s in spec.effective_series():
        entry = {"graph": s.kind, "n": s.n}
        if spec.axis == "n_modes":
            series_meta[s.label] = entry
            continue
        try:
            params, a = spec.point_config(s, spec.grid[0]).resolve()
        except OptoclusterError as exc:
            entry["error"] = str(exc)
            series_meta[s.label] = entry
            continue
        if spec.axis == "gamma":
            params = params.replace(gamma=0.0 * params.gamma)
        entry["params"] = _params_dict(params)
        entry["edges"] = [[i + 1, j + 1] for i, j in a.edges()]
        # uniform linewidth at which the fully connected cooperativity is one
        g_star = gamma_star(params)
        entry["gamma_star_rad_s"] = g_star
        entry["gamma_star_over_kappa"] = g_star / float(np.min(params.kappa))
        series_meta[s.label] = entry
    return {
        "tool": "optocluster",
        "version": __version__,
        "lyapunov_backend": numerics.BACKEND,
        "name": spec.name,
        "axis": spec.axis,
        "axis_key": spec.axis_key,
        "grid": list(spec.grid),
        "base": spec.base.to_dict(),
        "series": series_meta,
        "points": len(rows),
        "failures": sum(1 for r in rows if not r.ok),
    }


def gnuplot_script(csv_path: Path, spec: SweepSpec, rows) -> str:
    labels = [s.label for s in spec.effective_series()]
    logx = spec.axis in ("gamma", "temperature", "gtilde")
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{spec.axis_key}'",
        "set ylabel 'fidelity'",
    ]
    if logx:
        lines.append("set logscale x")
    plots = [
        f"'{csv_path.name}' using (strcol(1) eq '{lab}' ? $3 : 1/0):4 with linespoints title '{lab}'"
        for lab in labels
    ]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def run_sweep(
    spec: SweepSpec,
    out=None,
    *,
    jobs: int = 1,
    strict_rwa: bool = False,
    gnuplot=None,
) -> SweepResult:
    """Evaluate every grid point of every series.

    Rows come back in grid order (series-major) whatever the execution order.
    Failing points become rows with the ``error`` column set.  When ``out``
    is given, the CSV is written atomically next to a ``.meta.json`` sidecar.
    """
    tasks = _tasks(spec, strict_rwa)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        rows = [_task(t) for t in tasks]
    meta = sweep_metadata(spec, rows)
    if out is not None:
        out = Path(out)
        _atomic_write(out, rows_to_csv(rows))
        _atomic_write(out.with_name(out.name + ".meta.json"), json.dumps(meta, indent=2, sort_keys=True) + "\n")
        if gnuplot:
            gp = Path(gnuplot) if not isinstance(gnuplot, bool) else out.with_suffix(".gp")
            _atomic_write(gp, gnuplot_script(out, spec, rows))
    return SweepResult(rows, meta)


__all__ = [
    "ResultRow",
    "RwaWarning",
    "Series",
    "SweepResult",
    "csv_header",
    "rows_to_csv",
    "run_point",
    "run_sweep",
    "sweep_metadata",
]
