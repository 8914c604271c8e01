import csv
import io
import json
import math
import subprocess
import sys
import warnings

import numpy as np
import pytest

from optocluster import __version__
from optocluster.cli import main
from optocluster.errors import ConfigError, RwaError, StabilityError
from optocluster.experiments import (
    PRESET_NAMES,
    ScenarioConfig,
    Series,
    SweepSpec,
    load_config,
    parse_config,
    preset,
    rows_to_csv,
    run_point,
    run_sweep,
    to_toml,
)
from optocluster.experiments.config import make_grid
from optocluster.experiments.sweep import RwaWarning, csv_header
from optocluster.graphs import make_graph, write_adjacency

TWO_PI = 2 * math.pi


def write(tmp_path, text, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


# configuration ------------------------------------------------------------------


def test_defaults_resolve_to_reference_scenario():
    params, a = ScenarioConfig().resolve()
    omega_bar = TWO_PI * 10e6
    assert a == make_graph("linear", 4)
    assert np.allclose(params.omega_m, omega_bar * np.arange(1, 5), rtol=1e-15)
    assert np.allclose(params.kappa, 0.02 * omega_bar, rtol=1e-15)
    assert np.allclose(params.g_tilde, 0.16 * 0.02 * omega_bar, rtol=1e-15)
    assert np.allclose(params.gamma, 5e-6 * 0.02 * omega_bar, rtol=1e-15)
    assert params.r == 2.0 and params.temperature == 0.01


def test_hz_keys_are_converted(tmp_path):
    path = write(
        tmp_path,
        """
graph = "complete"
n_modes = 3
omega_m_hz = [1e6, 2.5e6, 4e6]
delta_hz = 100.0
omega_c_hz = 2e14

[overrides]
kappa_hz = 5e4
nbar = 3.0
""",
    )
    scenario, sweep = load_config(path)
    assert sweep is None
    params, a = scenario.resolve()
    assert np.allclose(params.omega_m, TWO_PI * np.array([1e6, 2.5e6, 4e6]))
    assert np.allclose(params.kappa, TWO_PI * 5e4)
    assert np.allclose(params.delta, TWO_PI * 100.0)
    assert np.allclose(params.omega_tilde, TWO_PI * (2e14 + 100.0))
    assert np.array_equal(params.nbar, [3.0, 3.0, 3.0])
    # the collective coupling follows the default ratio of the unoverridden kappa
    assert np.allclose(params.g_tilde, 0.16 * 0.02 * TWO_PI * 10e6)


def test_graph_file_relative_to_config(tmp_path):
    write_adjacency(make_graph("complete", 3), tmp_path / "tri.txt")
    path = write(tmp_path, 'graph_file = "tri.txt"\n')
    scenario, _ = load_config(path)
    params, a = scenario.resolve()
    assert a == make_graph("complete", 3) and params.n == 3


@pytest.mark.parametrize(
    "text",
    [
        "colour = 3\n",
        "graph = 'rectangular'\nn_modes = 5\n",
        "graph = 'hexagon'\n",
        "[overrides]\nspin = 1\n",
        "r = \n",
        "[sweep]\naxis = 'gamma'\n",
        "[sweep]\naxis = 'pressure'\ngrid = [1, 2]\n",
        "[sweep]\naxis = 'gamma'\ngrid = [1e-6, 1e-7, 1e-5]\n",
        "[sweep]\naxis = 'gamma'\ngrid = []\n",
        "[sweep]\naxis = 'n_modes'\ngrid = [4, 5.5]\n",
        "[sweep]\naxis = 'gamma'\ngrid = [1e-6]\ncolour = 1\n",
        "graph_file = 'missing.txt'\n",
    ],
)
def test_config_errors(tmp_path, text):
    path = write(tmp_path, text)
    with pytest.raises(ConfigError):
        scenario, _ = load_config(path)
        scenario.resolve()


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.toml")


def test_grid_tables():
    assert make_grid([1, 2, 3]) == (1.0, 2.0, 3.0)
    g = make_grid({"start": 1e-9, "stop": 1e-3, "num": 7, "spacing": "log"})
    assert np.allclose(np.log10(g), np.arange(-9, -2))
    assert make_grid({"start": 0, "stop": 1, "num": 3}) == (0.0, 0.5, 1.0)
    with pytest.raises(ConfigError):
        make_grid({"start": 0, "stop": 1, "num": 3, "spacing": "log"})


def test_sweep_section(tmp_path):
    path = write(
        tmp_path,
        """
name = "demo"
[sweep]
axis = "r"
grid = { start = 0.0, stop = 2.0, num = 5 }
series = [{ kind = "linear", n = 4 }, { kind = "complete" }]
""",
    )
    _, spec = load_config(path)
    assert spec.name == "demo" and spec.axis_key == "r"
    assert spec.series == (Series("linear", 4), Series("complete"))
    cfg = spec.point_config(spec.series[0], 1.5)
    assert cfg.r == 1.5 and cfg.n_modes == 4


# presets ------------------------------------------------------------------------


def test_preset_names():
    assert PRESET_NAMES == tuple(f"fig{k}" for k in range(2, 10))
    with pytest.raises(ConfigError):
        preset("fig10")


def test_fig2_base():
    spec = preset("fig2")
    b = spec.base
    assert (b.r, b.temperature_k, b.kappa_over_omegabase, b.gtilde_over_kappa) == (2.0, 0.01, 0.02, 0.16)
    assert spec.axis == "gamma"
    labels = [s.label for s in spec.series]
    assert set(labels) == {f"{k}-{n}" for k in ("linear", "rectangular", "complete") for n in (4, 10)}


@pytest.mark.parametrize(
    "name,axis", [("fig3", "gamma"), ("fig4", "temperature"), ("fig5", "temperature"), ("fig6", "n_modes"),
                  ("fig7", "r"), ("fig8", "r"), ("fig9", "gtilde")]
)
def test_preset_axes(name, axis):
    spec = preset(name)
    assert spec.axis == axis
    if name != "fig3":
        assert spec.base.gamma_over_kappa == 5e-6


@pytest.mark.filterwarnings("ignore::optocluster.experiments.sweep.RwaWarning")
def test_quality_factor_echo():
    row = run_point(preset("fig6").base.replace(n_modes=20))
    assert row.quality_factors[0] == pytest.approx(1e7, rel=1e-12)
    assert row.quality_factors[19] == pytest.approx(2e8, rel=1e-12)


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_preset_emit_round_trip(name, tmp_path):
    spec = preset(name)
    path = write(tmp_path, to_toml(spec.base, spec))
    scenario, again = load_config(path)
    assert scenario == spec.base
    assert again == spec


# single points ------------------------------------------------------------------


@pytest.mark.filterwarnings("ignore::optocluster.experiments.sweep.RwaWarning")
def test_run_point_near_pure_limit():
    row = run_point(ScenarioConfig(gamma_over_kappa=1e-12))
    assert row.ok
    assert row.fidelity >= 0.999
    assert np.all(np.abs(row.nullifier_db - 10 * math.log10(math.exp(-4))) <= 0.01)


def test_run_point_warns_on_rwa_and_strict_raises():
    cfg = ScenarioConfig()
    with pytest.warns(RwaWarning, match="beat_difference"):
        row = run_point(cfg)
    assert row.rwa_pass is False
    assert row.rwa_ratio == pytest.approx(0.16 * 0.02 * math.exp(2) / 2)
    with pytest.raises(RwaError):
        run_point(cfg, strict_rwa=True)


def test_run_point_echoes_parameters_on_physics_error():
    cfg = ScenarioConfig(gamma_over_kappa=0.0, gtilde_over_kappa=0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RwaWarning)
        with pytest.raises(StabilityError, match=r"n=4, r=2"):
            run_point(cfg)


# sweeps -------------------------------------------------------------------------


def tiny_sweep():
    base = ScenarioConfig(n_modes=1)
    return SweepSpec("gamma", (1e-8, 1e-6, 1e-4), base)


def test_three_point_single_mode_sweep():
    res = run_sweep(tiny_sweep())
    assert len(res.rows) == 3
    assert [r.axis_value for r in res.rows] == [1e-8, 1e-6, 1e-4]
    f = [r.fidelity for r in res.rows]
    assert f[0] >= f[1] >= f[2]
    assert res.failures == 0


def test_csv_schema_and_padding():
    spec = SweepSpec("n_modes", (4.0, 6.0), ScenarioConfig())
    rows = run_sweep(spec).rows
    text = rows_to_csv(rows)
    lines = text.splitlines()
    assert lines[0].split(",") == csv_header(6)
    assert lines[0].startswith("series,axis_name,axis_value,fidelity,null_var_1")
    first = lines[1].split(",")
    assert first[4 + 3] != "" and first[4 + 4] == "" and first[4 + 5] == ""
    assert lines[2].split(",")[4 + 5] != ""


def test_failing_points_become_error_rows():
    base = ScenarioConfig(gamma_over_kappa=0.0)
    spec = SweepSpec("gtilde", (0.0, 0.1), base)
    res = run_sweep(spec)
    assert res.failures == 1
    bad, good = res.rows
    assert "StabilityError" in bad.error and math.isnan(bad.fidelity)
    assert good.ok and good.fidelity == pytest.approx(1.0, abs=1e-9)
    record = next(iter(csv.DictReader(io.StringIO(rows_to_csv(res.rows)))))
    assert record["error"] == bad.error
    assert record["fidelity"] == ""


def test_outputs_are_atomic_deterministic_and_parallel_safe(tmp_path):
    spec = SweepSpec("gamma", (1e-8, 1e-6, 1e-5, 1e-4), preset("fig2").base,
                     (Series("linear", 4), Series("complete", 4)), "mini")
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    run_sweep(spec, a)
    run_sweep(spec, b)
    run_sweep(spec, c, jobs=3)
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()
    meta_a = (tmp_path / "a.csv.meta.json").read_text()
    assert meta_a == (tmp_path / "c.csv.meta.json").read_text()
    assert not list(tmp_path.glob(".*.tmp"))
    meta = json.loads(meta_a)
    assert meta["version"] == __version__
    assert meta["points"] == 8 and meta["failures"] == 0
    entry = meta["series"]["complete-4"]
    assert entry["gamma_star_over_kappa"] == pytest.approx(8.633e-5, rel=1e-3)
    assert entry["edges"] == [[i, j] for i in range(1, 5) for j in range(i + 1, 5)]
    assert entry["params"]["r"] == 2.0


def test_row_order_is_series_major(tmp_path):
    spec = SweepSpec("r", (0.5, 1.0), ScenarioConfig(), (Series("linear", 2), Series("complete", 3)))
    rows = run_sweep(spec, jobs=2).rows
    assert [(r.series, r.axis_value) for r in rows] == [
        ("linear-2", 0.5), ("linear-2", 1.0), ("complete-3", 0.5), ("complete-3", 1.0)
    ]
    assert [r.n_modes for r in rows] == [2, 2, 3, 3]


def test_gnuplot_script(tmp_path):
    run_sweep(tiny_sweep(), tmp_path / "s.csv", gnuplot=tmp_path / "s.gp")
    text = (tmp_path / "s.gp").read_text()
    assert "s.csv" in text and "set logscale x" in text


# command line ----------------------------------------------------------------------


@pytest.fixture
def fig2_config(tmp_path):
    path = tmp_path / "fig2.toml"
    assert main(["preset", "fig2", "--emit-config", "--out", str(path)]) == 0
    return path


def test_cli_simulate(fig2_config, capsys):
    assert main(["simulate", str(fig2_config)]) == 0
    out = capsys.readouterr()
    assert "fidelity" in out.out and "nullifier 4" in out.out
    assert "rotating-wave" in out.err


def test_cli_simulate_json(fig2_config, capsys):
    assert main(["simulate", str(fig2_config), "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["n_modes"] == 4 and 0 < payload["fidelity"] <= 1
    assert payload["warnings"]


def test_cli_strict_rwa_is_a_physics_error(fig2_config, capsys):
    assert main(["simulate", str(fig2_config), "--strict-rwa"]) == 3
    assert "physics error" in capsys.readouterr().err


def test_cli_config_error(tmp_path, capsys):
    path = write(tmp_path, "graph = 'rectangular'\nn_modes = 3\n")
    assert main(["simulate", str(path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_unstable_is_exit_three(tmp_path):
    path = write(tmp_path, "gamma_over_kappa = 0.0\ngtilde_over_kappa = 0.0\n")
    assert main(["simulate", str(path)]) == 3


def test_cli_partial_sweep_is_exit_four(tmp_path, capsys):
    path = write(tmp_path, "gamma_over_kappa = 0.0\n[sweep]\naxis = 'gtilde'\ngrid = [0.0, 0.1]\n")
    assert main(["sweep", str(path)]) == 4
    out = capsys.readouterr()
    assert out.out.startswith("series,axis_name")
    assert "1 of 2 points failed" in out.err


def test_cli_sweep_without_table(tmp_path):
    assert main(["sweep", str(write(tmp_path, "r = 1.0\n"))]) == 2


def test_cli_sweep_to_file(tmp_path):
    path = write(tmp_path, "n_modes = 2\n[sweep]\naxis = 'temperature'\ngrid = [0.001, 0.01]\n")
    out = tmp_path / "o.csv"
    assert main(["sweep", str(path), "--out", str(out), "--jobs", "2", "--gnuplot", str(tmp_path / "o.gp")]) == 0
    assert len(out.read_text().splitlines()) == 3
    assert (tmp_path / "o.csv.meta.json").exists() and (tmp_path / "o.gp").exists()


def test_cli_drives(fig2_config, capsys):
    assert main(["drives", str(fig2_config)]) == 0
    lines = capsys.readouterr().out.splitlines()
    # linear N=4: every diagonal red and blue tone plus two neighbours per edge
    assert len(lines) - 1 == 2 * (4 + 2 * 3)
    assert main(["drives", str(fig2_config), "--all"]) == 0
    assert len(capsys.readouterr().out.splitlines()) - 1 == 4 * 8


def test_cli_check_rwa(fig2_config, capsys):
    assert main(["check-rwa", str(fig2_config), "--top", "2"]) == 0
    out = capsys.readouterr().out
    assert "simple ratio" in out and "[beat_sum]" in out
    assert "overall: FAIL" in out


def test_cli_preset_description(capsys):
    assert main(["preset", "fig6"]) == 0
    assert "n_modes" in capsys.readouterr().out


def test_cli_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "optocluster", "preset", "fig9"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "gtilde" in proc.stdout


def test_parse_config_in_memory():
    scenario, spec = parse_config({"r": 1.0, "sweep": {"axis": "r", "grid": [0.5, 1.0]}})
    assert scenario.r == 1.0 and spec.grid == (0.5, 1.0)
