import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from dimerctl import reporting
from dimerctl.cli import main
from dimerctl.config import ConfigError, load_config, parse_config
from dimerctl.experiments import run_experiment, stability_report, tail_average
from dimerctl.ssa import EnsembleTrace

from conftest import EXAMPLE, KC, MU

EXAMPLE_TOML = Path(__file__).resolve().parents[1] / "configs" / "dimerization_example.toml"

SMALL = """
kind = "closed-loop-ssa"
seed = 7
output_dir = "{out}"

[network]
b = 3.0
gamma1 = 2.0
gamma2 = 1.0
k1 = 1.0

[controller]
kc = 1.0
mu = 5.0

[simulation]
n_cells = 100
t_final = 3.0
ts = 0.01

[sweep]
k1_values = [0.0, 1.0, 2.0]
horizon = 4.0
n_cells = 50

[moments]
mode = "closed-loop"
t_final = 5.0
dt = 0.002
variance = 1.5
x1 = 1.94
x2 = 5.0
i = 13.88

[stability]
v_star = 1.5

[ergodicity]
grid_bound = 40
"""


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.toml"
    path.write_text(SMALL.format(out=tmp_path / "out"))
    return path


def make_trace(n):
    t = np.arange(n) * 0.01
    return EnsembleTrace(t, t * 0.1, t + 1 / 3, t * 2, t ** 2, np.maximum(t - 0.01, 0), t - 0.01)


def test_csv_line_count_and_roundtrip(tmp_path):
    tr = make_trace(3)
    path = reporting.emit_csv(tr, tmp_path / "t.csv")
    lines = path.read_text().splitlines()
    assert len(lines) == 4
    assert lines[0] == "t,mean_x1,mean_x2,var_x1,var_x2,u,I"
    back = reporting.read_csv(path)
    for name, col in tr.columns().items():
        assert np.array_equal(back.columns()[name], col), name


def test_csv_roundtrip_real_trace(tmp_path, example_trace):
    path = reporting.emit_csv(example_trace, tmp_path / "t.csv")
    back = reporting.read_csv(path)
    for name, col in example_trace.columns().items():
        assert np.array_equal(back.columns()[name], col), name
    # writing again reproduces the file byte for byte
    again = reporting.emit_csv(back, tmp_path / "u.csv")
    assert again.read_bytes() == path.read_bytes()


def test_empty_trace_rejected(tmp_path):
    with pytest.raises(ValueError):
        reporting.emit_csv(make_trace(0), tmp_path / "x.csv")
    with pytest.raises(ValueError):
        reporting.emit_plot(make_trace(0), "means", tmp_path / "x.svg")


def test_io_error_names_path(tmp_path):
    bad = tmp_path / "missing" / "t.csv"
    with pytest.raises(OSError, match="missing"):
        reporting.emit_csv(make_trace(2), bad)


def test_plots_are_svg(tmp_path, example_trace):
    for kind in reporting.PLOT_KINDS:
        p = reporting.emit_plot(example_trace, kind, tmp_path / f"{kind}.svg", mu=MU,
                                variance_upper=3.5833)
        text = p.read_text()
        assert text.lstrip().startswith("<?xml") and "<svg" in text
        assert "time" in text
    with pytest.raises(ValueError):
        reporting.emit_plot(example_trace, "bogus", tmp_path / "x.svg")


def test_variance_plot_has_dashed_bound(tmp_path, example_trace):
    with_bound = reporting.emit_plot(example_trace, "variances", tmp_path / "a.svg",
                                     variance_upper=3.5833).read_text()
    without = reporting.emit_plot(example_trace, "variances", tmp_path / "b.svg").read_text()
    assert "stroke-dasharray" in with_bound and "stroke-dasharray" not in without


def test_config_validation_reports_all_problems(tmp_path):
    raw = {"kind": "closed-loop-ssa", "network": {"b": -1, "gamma1": 2, "gamma2": 1},
           "controller": {"kc": 0, "mu": 5}, "simulation": {"n_cells": 0, "t_final": 1, "ts": 0.01}}
    with pytest.raises(ConfigError) as err:
        parse_config(raw)
    assert len(err.value.problems) == 3
    with pytest.raises(ConfigError, match="section"):
        parse_config({"kind": "closed-loop-ssa", "network": {"b": 1, "gamma1": 1, "gamma2": 1}})
    with pytest.raises(ConfigError, match="kind"):
        parse_config({"kind": "nope"})


def test_example_config_loads():
    cfg = load_config(EXAMPLE_TOML)
    assert cfg.kind == "full-paper-repro"
    assert cfg.simulation.n_cells == 2000 and cfg.simulation.ts == 0.01
    assert cfg.controller.kc == 1.0 and cfg.controller.mu == 5.0
    cfg = load_config(EXAMPLE_TOML, kind="stability-report", seed=3, n_cells=10)
    assert cfg.seed == 3 and cfg.simulation.n_cells == 10


@pytest.mark.parametrize("kind, files", [
    ("closed-loop-ssa", ["trace.csv", "cell.csv"]),
    ("open-loop-sweep", ["sweep.csv"]),
    ("moment-ode", ["moments.csv"]),
    ("stability-report", ["stability_report.json"]),
    ("ergodicity-report", ["ergodicity_report.json"]),
])
def test_cli_kinds(small_config, tmp_path, capsys, kind, files):
    out = tmp_path / kind
    assert main([kind, "-c", str(small_config), "-o", str(out)]) == 0
    assert sorted(p.name for p in out.iterdir()) == sorted(files)
    printed = capsys.readouterr().out.split()
    assert len(printed) == len(files)


def test_cli_reproducible(small_config, tmp_path):
    for name in ("a", "b"):
        assert main(["closed-loop-ssa", "-c", str(small_config), "-o", str(tmp_path / name)]) == 0
    assert (tmp_path / "a/trace.csv").read_bytes() == (tmp_path / "b/trace.csv").read_bytes()
    assert main(["closed-loop-ssa", "-c", str(small_config), "-o", str(tmp_path / "c"),
                 "--seed", "8"]) == 0
    assert (tmp_path / "a/trace.csv").read_bytes() != (tmp_path / "c/trace.csv").read_bytes()


def test_cli_n_cells_override(small_config, tmp_path):
    assert main(["closed-loop-ssa", "-c", str(small_config), "-o", str(tmp_path / "one"),
                 "--n-cells", "1"]) == 0
    tr = reporting.read_csv(tmp_path / "one/trace.csv")
    cell = reporting.read_table(tmp_path / "one/cell.csv")
    np.testing.assert_array_equal(tr.mean_x2, cell["x2"])
    assert not tr.var_x1.any()


def test_cli_config_error(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text('kind = "closed-loop-ssa"\n[network]\nb = 1.0\n')
    out = tmp_path / "never"
    assert main(["closed-loop-ssa", "-c", str(bad), "-o", str(out)]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["category"] == "config"
    assert not out.exists()
    assert main(["closed-loop-ssa", "-c", str(tmp_path / "absent.toml")]) == 2


def test_cli_simulation_error(small_config, tmp_path, capsys):
    text = small_config.read_text().replace("x1 = 1.94", "x1 = 0.0").replace(
        "x2 = 5.0", "x2 = 0.0").replace("i = 13.88", "i = 0.0")
    small_config.write_text(text)
    out = tmp_path / "fail"
    assert main(["moment-ode", "-c", str(small_config), "-o", str(out)]) == 3
    err = json.loads(capsys.readouterr().err)
    assert err["category"] == "simulation" and "t=" in err["message"] and "seed=7" in err["message"]
    assert not out.exists()


def test_cli_io_error(small_config, tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["stability-report", "-c", str(small_config), "-o", str(blocker / "sub")]) == 4
    assert json.loads(capsys.readouterr().err)["category"] == "io"


def test_stability_report_recomputable_from_csv(tmp_path, example_trace):
    csv_path = reporting.emit_csv(example_trace, tmp_path / "trace.csv")
    cfg = tmp_path / "stab.toml"
    cfg.write_text(SMALL.format(out=tmp_path / "rep").replace(
        "v_star = 1.5", 'trace_csv = "trace.csv"'))
    assert main(["stability-report", "-c", str(cfg)]) == 0
    report = json.loads((tmp_path / "rep/stability_report.json").read_text())
    src = report["v_star_source"]
    cols = reporting.read_table(csv_path)
    sel = cols["t"] >= src["t_from"]
    assert sel.sum() == src["n_samples"]
    v_star = cols[src["column"]][sel].mean()
    assert report["v_star"] == v_star
    fresh = json.loads(json.dumps(stability_report(EXAMPLE, MU, KC, v_star, src)))
    assert fresh == report
    assert report["uniform_gain_bound"] == pytest.approx(19.798, abs=1e-3)


def test_full_repro_small(tmp_path):
    cfg = load_config(EXAMPLE_TOML, output_dir=tmp_path / "full", n_cells=200)
    cfg = type(cfg)(**{**cfg.__dict__, "simulation": type(cfg.simulation)(
        **{**cfg.simulation.__dict__, "t_final": 20.0})})
    paths = run_experiment(cfg)
    names = {p.name for p in paths}
    assert {"trace.csv", "fig_cell.svg", "fig_means.svg", "fig_variances.svg",
            "stability_report.json", "ergodicity_report.json", "summary.json"} <= names
    erg = json.loads((tmp_path / "full/ergodicity_report.json").read_text())
    assert erg["certificate"]["all_satisfied"]
    tr = reporting.read_csv(tmp_path / "full/trace.csv")
    assert erg["k1"] == tail_average(tr, "u")
