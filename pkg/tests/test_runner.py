import json
import math

import numpy as np
import pytest

from thermoweak.closed_form import MeasurementSetup
from thermoweak.conventions import PAPER
from thermoweak.errors import InvalidConfiguration
from thermoweak.gad import GadChannel
from thermoweak.pointer import PointerState
from thermoweak.qubit import QubitState
from thermoweak.runner import (
    PRESETS,
    Axis,
    SweepSpec,
    figure_curves,
    load_setup,
    load_sweep,
    parse_number,
    run_sweep,
    validate,
)
from thermoweak.runner.cli import main
from thermoweak.runner.figures import write_figure
from thermoweak.runner.sweep import with_value

PI = math.pi

SWEEP_TEXT = """
# weak-angle sweep at the anomalous geometry
pre.theta = pi:0.75
post.phi = pi:0.99
channel.gamma = 0.1
channel.p = 0
pointer.n_bar = 0.5
measurement.s = 0.01
sweep.axis = theta_f
sweep.start = 0
sweep.stop = pi:1
sweep.count = 9
sweep.axis2 = p
sweep.start2 = 0
sweep.stop2 = 0.5
sweep.count2 = 3
sweep.outputs = p_succ, wv_re
"""


def trivial_setup():
    return MeasurementSetup(QubitState(1.0, 0.2), QubitState(2.0, 1.0), GadChannel(0.0), PointerState(b=0.5), 0.3)


def test_parse_number():
    assert parse_number("pi:0.75") == pytest.approx(0.75 * PI)
    assert parse_number(" 2.5 ") == 2.5
    for bad in ("pi:x", "abc", "inf"):
        with pytest.raises(InvalidConfiguration):
            parse_number(bad)


def test_config_round_trip():
    spec, conv, engine, workers = load_sweep(SWEEP_TEXT)
    assert spec.base.pre.theta == pytest.approx(0.75 * PI)
    assert spec.base.post.phi == pytest.approx(0.99 * PI)
    assert spec.base.pointer.n_bar == 0.5
    assert spec.axis == Axis("theta_f", 0.0, PI, 9)
    assert spec.extra_axis.name == "p"
    assert spec.outputs == ("p_succ", "wv_re")
    assert conv.name == "calibrated" and engine is None and workers == 1
    assert load_setup("channel.q_bar = 0.5").channel.p == pytest.approx(0.25)


@pytest.mark.parametrize(
    "text",
    [
        "bogus.key = 1",
        "channel.gamma = 2",
        "channel.p = 0.1\nchannel.q_bar = 1",
        "sweep.axis = sigma\nsweep.start = 0\nsweep.stop = 1\nsweep.count = 3",
        "sweep.axis = s\nsweep.start = 0\nsweep.stop = 1\nsweep.count = 1",
        "sweep.axis = s\nsweep.start = 0\nsweep.stop = 1",
        "sweep.axis = s\nsweep.start = 0\nsweep.stop = 1\nsweep.count = 3\nsweep.outputs = entropy",
        "no equals sign here",
    ],
)
def test_invalid_configurations(text):
    with pytest.raises(InvalidConfiguration):
        load_sweep(text)


def test_axis_vocabulary():
    base = trivial_setup()
    assert with_value(base, "s", 1.5).s == 1.5
    assert with_value(base, "theta_f", 0.4).post.theta == 0.4
    assert with_value(base, "theta_i", 0.4).pre.theta == 0.4
    assert with_value(base, "gamma", 0.4).channel.gamma == 0.4
    assert with_value(base, "p", 0.4).channel.p == 0.4
    for name in ("b", "r", "chi", "n_bar"):
        assert getattr(with_value(base, name, 0.4).pointer, name) == 0.4


def test_grid_order_is_outer_axis_major():
    spec, *_ = load_sweep(SWEEP_TEXT)
    table = run_sweep(spec)
    x, y = table.column("axis1"), table.column("axis2")
    assert len(table.rows) == 27
    assert np.all(np.diff(x) >= 0)
    assert list(y[:3]) == [0.0, 0.25, 0.5]


def test_engines_agree_on_trivial_setup():
    spec = SweepSpec(trivial_setup(), Axis("s", 0.0, 1.0, 2))
    table = run_sweep(spec, "both")
    diffs = [c for c in table.columns if c.startswith("absdiff_")]
    for c in diffs:
        vals = table.column(c)
        assert np.all(np.nan_to_num(vals) < 1e-8)
    assert table.columns[:2] == ["axis1", "axis2"] and table.columns[-1] == "status"


def test_zero_postselection_rows_are_kept():
    setup = MeasurementSetup(QubitState(0.0), QubitState(PI), GadChannel(0.0), PointerState(), 0.0)
    spec = SweepSpec(setup, Axis("s", 0.0, 0.5, 3), outputs=("p_succ",))
    table = run_sweep(spec, "analytic")
    status = [row[-1] for row in table.rows]
    assert status == ["zero_postselection", "zero_postselection", "zero_postselection"]
    assert "nan" in table.to_csv()
    both = run_sweep(spec, "both")
    assert len(both.rows) == 3


def test_csv_is_round_trip_exact():
    spec, *_ = load_sweep(SWEEP_TEXT)
    table = run_sweep(spec)
    lines = table.to_csv().splitlines()
    assert lines[0] == "axis1,axis2,p_succ,wv_re,status"
    for row, line in zip(table.rows, lines[1:]):
        cells = line.split(",")
        assert float(cells[2]) == row[2]


def test_sweeps_are_deterministic_and_parallel_invariant():
    spec, *_ = load_sweep(SWEEP_TEXT)
    serial = run_sweep(spec).to_csv()
    assert run_sweep(spec).to_csv() == serial
    assert run_sweep(spec, workers=4).to_csv() == serial


def test_oracle_sweep_parallel_invariant():
    spec = SweepSpec(MeasurementSetup(QubitState(1.9, 0.3), QubitState(0.7, 2.0), GadChannel(0.3, 0.1),
                                      PointerState(b=0.8, n_bar=0.3), 0.5), Axis("s", 0.2, 1.0, 4),
                     outputs=("delta_x", "delta_p"))
    assert run_sweep(spec, "oracle", workers=3).to_csv() == run_sweep(spec, "oracle").to_csv()


def test_preset_bindings_verbatim():
    assert PRESETS["fig2"].bindings == {"gamma": 0.1, "phi_i": 0.0, "phi_f": 0.99 * PI}
    for fig in ("fig3", "fig6"):
        assert PRESETS[fig].bindings == {"gamma": 0.1, "n_bar": 0.5, "phi_i": 0.0, "phi_f": 0.99 * PI}
    fig4 = PRESETS["fig4"].bindings
    assert (fig4["n_bar"], fig4["gamma"], fig4["r"], fig4["theta_i"], fig4["theta_f"]) == (0.5, 0.8, 0.0, PI / 4, PI / 8)
    assert fig4["phi_i"] == fig4["phi_f"] == 0.0
    fig5 = PRESETS["fig5"].bindings
    assert (fig5["r"], fig5["b"], fig5["n_bar"], fig5["gamma"]) == (0.5, 2.0, 0.5, 0.8)
    assert (fig5["theta_i"], fig5["theta_f"]) == (PI / 4, PI / 8)


def test_preset_panels_verbatim():
    fig2 = {p.name: p for p in PRESETS["fig2"].panels}
    assert fig2["a"].overrides == {"theta_i": 3 * PI / 4} and fig2["d"].overrides == {"theta_i": PI / 4}
    assert [c.overrides["p"] for c in fig2["a"].curves] == [0.0, 0.5]
    for fig in ("fig3", "fig6"):
        panels = {p.name: p for p in PRESETS[fig].panels}
        assert panels["a"].overrides["s"] == 0.01 and panels["a"].axis.name == "theta_f"
        assert (panels["c"].overrides["b"], panels["c"].overrides["r"]) == (0.0, 0.0)
        assert panels["e"].overrides["b"] == 6.0
        assert (panels["g"].overrides["b"], panels["g"].overrides["r"], panels["g"].overrides["chi"]) == (6.0, 1.2, 0.0)
        assert [c.overrides["p"] for c in panels["a"].curves] == [0.0, 0.25, 0.5]
    fig3 = {p.name: p for p in PRESETS["fig3"].panels}
    assert fig3["c"].overrides["theta_i"] == 3 * PI / 4 and fig3["c"].overrides["theta_f"] == PI / 4
    assert fig3["d"].overrides["theta_i"] == PI / 4 and fig3["d"].overrides["theta_f"] == 3 * PI / 4
    fig4 = {p.name: p for p in PRESETS["fig4"].panels}
    assert (fig4["a"].overrides["b"], fig4["b"].overrides["b"]) == (0.0, 2.0)
    fig5 = {p.name: p for p in PRESETS["fig5"].panels}
    assert [fig5[k].overrides["p"] for k in "abc"] == [0.0, 0.25, 0.5]
    assert [c.overrides.get("chi") for c in fig5["a"].curves] == [0.0, PI / 4, PI / 2, None]


def test_figure_tables_use_printed_convention(tmp_path):
    paths = write_figure("fig4", tmp_path)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["convention"] == PAPER.as_dict()
    assert len(paths) == 7
    assert set(manifest["tables"]) == {f"fig4_{p}_{c}" for p in "ab" for c in ("p0", "p1_4", "p1_2")}
    tables = figure_curves("fig4")
    assert tables["fig4_a_p0"].column("overlap")[0] == pytest.approx(0.5)


def test_validation_report_is_deterministic():
    first = validate(grid_size=4, seed=11)
    second = validate(grid_size=4, seed=11)
    assert first.format() == second.format()
    assert first.passed
    assert validate(grid_size=4, seed=11, workers=2).format() == first.format()


def test_paper_mode_reports_printed_constants():
    report = validate(grid_size=3, seed=5, paper_mode=True)
    text = report.format()
    assert "kappa = 1\n" in text and "kappa_tilde = 1\n" in text and "m = 1\n" in text
    assert not report.calibrated


def test_cli_commands(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(SWEEP_TEXT)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--config", str(cfg), "--engine", "analytic", "--out", str(out1)]) == 0
    assert main(["sweep", "--config", str(cfg), "--out", str(out2), "--workers", "3"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert main(["eval", "--set", "pre.theta=pi:0.5", "--set", "measurement.s=0.2"]) == 0
    assert "p_succ = " in capsys.readouterr().out
    assert main(["figure", "--id", "fig2", "--out", str(tmp_path / "fig2")]) == 0
    assert (tmp_path / "fig2" / "fig2_a_p0.csv").exists()


def test_cli_invalid_configuration(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("sweep.axis = nonsense\nsweep.start = 0\nsweep.stop = 1\nsweep.count = 3\n")
    assert main(["sweep", "--config", str(bad), "--out", str(tmp_path / "x.csv")]) == 2
    assert main(["sweep", "--config", str(tmp_path / "missing.cfg"), "--out", str(tmp_path / "x.csv")]) == 2
    assert main(["eval", "--set", "channel.p=0.9"]) == 2


def test_cli_validate_exit_codes(capsys):
    assert main(["validate", "--grid", "3", "--seed", "2"]) == 0
    assert main(["validate", "--grid", "3", "--seed", "2", "--paper-mode"]) == 1
    out = capsys.readouterr().out
    assert "result: PASS" in out and "result: FAIL" in out
