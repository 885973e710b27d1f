import json
import math

import numpy as np
import pytest

from purcellkit import io
from purcellkit.circuit import NetlistBuilder
from purcellkit.cli import main

DESIGN = {"targets": {"f_q_target_hz": 5e9, "f_r_hz": 7e9, "kappa_hz": 12.3e6, "g0_hz": 200e6, "ec_hz": 200e6, "z0_ohm": 50.0}}


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


def through_line(path):
    b = NetlistBuilder()
    b.line("a", "b", 50.0, 1.0, 2 * math.pi * 5e9)
    b.port("a")
    b.port("b")
    io.write_netlist(path, b.build())
    return str(path)


def test_ac_through_line(tmp_path):
    net = through_line(tmp_path / "line.json")
    out = tmp_path / "out"
    rc = main(["ac", net, "--fmin", "1e9", "--fmax", "9e9", "--grid", "81", "--out", str(out), "--quantity", "S", "Y"])
    assert rc == 0
    s21 = io.read_csv_columns(out / "S21.csv", ["freq_hz", "re", "im"])
    assert np.all(np.abs(np.abs(s21["re"] + 1j * s21["im"]) - 1) <= 1e-9)
    assert (out / "Y12.csv").read_text().splitlines()[0] == "freq_hz,re,im"


def test_ac_global_flags_before_subcommand(tmp_path):
    net = through_line(tmp_path / "line.json")
    out = tmp_path / "out"
    assert main(["--grid", "11", "--out", str(out), "ac", net, "--fmin", "1e9", "--fmax", "2e9"]) == 0
    assert len((out / "S11.csv").read_text().splitlines()) == 12


def test_ac_filtered_netlist_shows_resonance(tmp_path):
    out = tmp_path / "d"
    assert main(["design", write(tmp_path / "d.json", DESIGN), "--out", str(out)]) == 0
    rc = main(["ac", str(out / "netlist.json"), "--fmin", "6e9", "--fmax", "9e9", "--grid", "3001", "--out", str(out)])
    assert rc == 0
    s = io.read_csv_columns(out / "S21.csv", ["freq_hz", "re", "im"])
    f_dip = s["freq_hz"][np.argmin(np.hypot(s["re"], s["im"]))]
    assert f_dip == pytest.approx(7e9, rel=2e-3)


def test_malformed_json_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"nodes": ["0", "a"],\n  "elements": [}')
    assert main(["ac", str(bad), "--fmin", "1e9", "--fmax", "2e9", "--out", str(tmp_path)]) == 2
    assert "bad.json:2:" in capsys.readouterr().err


def test_schema_violation_exits_2(tmp_path):
    doc = {"targets": {"f_q_target_hz": 5e9}}
    assert main(["design", write(tmp_path / "d.json", doc), "--out", str(tmp_path)]) == 2


def test_singular_netlist_exits_3(tmp_path, capsys):
    b = NetlistBuilder()
    b.resistor("a", "0", 50.0)
    b.inductor("a", "b", 1e-9)
    b.inductor("a", "b", 2e-9)
    b.port("a")
    io.write_netlist(tmp_path / "n.json", b.build())
    doc = json.loads((tmp_path / "n.json").read_text())
    # two ideal voltage sources in parallel
    doc["elements"] += [
        {"name": "V1", "kind": "V", "terminals": ["b", "0"], "params": {"value": {"value": 1.0, "unit": "V"}}},
        {"name": "V2", "kind": "V", "terminals": ["b", "0"], "params": {"value": {"value": 2.0, "unit": "V"}}},
    ]
    net = write(tmp_path / "n.json", doc)
    assert main(["ac", net, "--fmin", "1e9", "--fmax", "2e9", "--grid", "5", "--out", str(tmp_path)]) == 3
    assert "Hz" in capsys.readouterr().err


def test_empty_sweep_exits_2(tmp_path):
    design = write(tmp_path / "d.json", DESIGN)
    assert main(["purcell", design, "--fmin", "5e9", "--fmax", "5e9", "--out", str(tmp_path)]) == 2
    assert main(["purcell", design, "--fmin", "6e9", "--fmax", "5e9", "--out", str(tmp_path)]) == 2


def test_design_report(tmp_path):
    out = tmp_path / "out"
    assert main(["design", write(tmp_path / "d.json", DESIGN), "--out", str(out)]) == 0
    rep = json.loads((out / "design.json").read_text())
    io.validate(rep, "design_report")
    assert rep["verification"]["r_over_r_opt"] == pytest.approx(1.0, rel=0.02)
    assert rep["realized"]["kappa_hz"] == pytest.approx(12.3e6, rel=5e-3)
    assert rep["realized"]["g0_hz"] == pytest.approx(200e6, rel=1e-3)
    io.read_netlist(out / "netlist.json")


def test_larger_linewidth_design(tmp_path):
    base, wide = tmp_path / "a", tmp_path / "b"
    doc = json.loads(json.dumps(DESIGN))
    assert main(["design", write(tmp_path / "a.json", doc), "--out", str(base)]) == 0
    doc["targets"]["kappa_hz"] *= 2
    assert main(["design", write(tmp_path / "b.json", doc), "--out", str(wide)]) == 0
    a = json.loads((base / "design.json").read_text())
    b = json.loads((wide / "design.json").read_text())
    assert b["elements"]["C_m"]["value"] > a["elements"]["C_m"]["value"]
    assert b["elements"]["L_m"]["value"] > a["elements"]["L_m"]["value"]
    assert b["realized"]["r_ohm2"] == pytest.approx(a["realized"]["r_ohm2"], rel=0.01)


def test_infeasible_linewidth_exits_4(tmp_path, capsys):
    doc = json.loads(json.dumps(DESIGN))
    doc["targets"]["kappa_hz"] *= 10
    assert main(["design", write(tmp_path / "d.json", doc), "--out", str(tmp_path)]) == 4
    assert "best residual" in capsys.readouterr().err


@pytest.fixture(scope="module")
def purcell_run(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("purcell")
    design = write(tmp / "d.json", DESIGN)
    outs = []
    for name in ("a", "b"):
        out = tmp / name
        assert main(["purcell", design, "--out", str(out), "--plot"]) == 0
        outs.append(out)
    return outs


def test_purcell_outputs(purcell_run):
    out = purcell_run[0]
    header = (out / "spectrum.csv").read_text().splitlines()[0].split(",")
    assert header == [
        "freq_hz", "gamma_rad_s", "gamma_hz", "t1p_s", "gamma_unfiltered_rad_s", "gamma_unfiltered_hz", "suppression",
    ]
    notch = json.loads((out / "notch.json").read_text())
    io.validate(notch, "notch")
    assert notch["f_notch_hz"] == pytest.approx(5e9, rel=5e-3)
    assert (out / "purcell.svg").read_text().lstrip().startswith("<?xml")


def test_purcell_is_deterministic(purcell_run):
    a, b = purcell_run
    for name in ("spectrum.csv", "notch.json", "design.json", "netlist.json", "purcell.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_detuned_ratio_gives_smaller_q(tmp_path, purcell_run):
    doc = json.loads(json.dumps(DESIGN))
    doc["overrides"] = {"r_scale": 0.25}
    out = tmp_path / "quarter"
    assert main(["purcell", write(tmp_path / "d.json", doc), "--out", str(out)]) == 0
    q_quarter = json.loads((out / "notch.json").read_text())["Q"]
    q_opt = json.loads((purcell_run[0] / "notch.json").read_text())["Q"]
    assert q_quarter < q_opt


def synth(out, *extra):
    return main([
        "synth", "--f-r", "7578.5e6", "--kappa-hz", "13.8e6", "--q-i", "9600", "--phi", "0.1",
        "--tau", "3e-8", "--noise", "0.005", "--seed", "11", "--out", str(out), *extra,
    ])


def test_synth_and_fit_round_trip(tmp_path):
    assert synth(tmp_path / "a") == 0
    assert synth(tmp_path / "b") == 0
    assert (tmp_path / "a" / "trace.csv").read_bytes() == (tmp_path / "b" / "trace.csv").read_bytes()
    assert main(["fit", str(tmp_path / "a" / "trace.csv"), "--out", str(tmp_path / "a"), "--plot"]) == 0
    fit = json.loads((tmp_path / "a" / "fit.json").read_text())
    io.validate(fit, "fit")
    assert fit["f_r"] == pytest.approx(7578.5e6, rel=1e-4)
    assert fit["kappa_hz"] == pytest.approx(13.8e6, rel=0.01)
    assert fit["Q_i"] == pytest.approx(9600, rel=0.1)
    assert (tmp_path / "a" / "fit.svg").exists()


def test_short_trace_exits_5(tmp_path):
    assert synth(tmp_path, "--span-linewidths", "0.3") == 0
    assert main(["fit", str(tmp_path / "trace.csv"), "--out", str(tmp_path)]) == 5


def test_multiplex(tmp_path):
    units = {"units": [
        {"targets": {"f_q_target_hz": fq, "f_r_hz": fq + 2e9, "kappa_hz": 12.3e6, "g0_hz": 200e6}}
        for fq in (4.6e9, 5.0e9, 5.4e9)
    ]}
    out = tmp_path / "m"
    assert main(["multiplex", write(tmp_path / "u.json", units), "--out", str(out), "--fmin", "3e9", "--fmax", "6.3e9"]) == 0
    for i, fq in enumerate((4.6e9, 5.0e9, 5.4e9)):
        n = json.loads((out / f"notch_{i}.json").read_text())
        io.validate(n, "notch")
        assert n["f_notch_hz"] == pytest.approx(fq, rel=0.01)
    assert len(io.read_netlist(out / "netlist.json").ports) == 5


def test_multiplex_single_unit_matches_purcell(tmp_path, purcell_run):
    out = tmp_path / "one"
    assert main(["multiplex", write(tmp_path / "u.json", {"units": [DESIGN]}), "--out", str(out), "--fmin", "2.5e9", "--fmax", "6.8e9"]) == 0
    a = json.loads((out / "notch_0.json").read_text())
    b = json.loads((purcell_run[0] / "notch.json").read_text())
    assert a["f_notch_hz"] == pytest.approx(b["f_notch_hz"], rel=1e-6)
    assert a["Q"] == pytest.approx(b["Q"], rel=1e-4)


def test_multiplex_duplicates_exit_2(tmp_path):
    units = {"units": [DESIGN, {"targets": dict(DESIGN["targets"], f_q_target_hz=4.5e9)}]}
    assert main(["multiplex", write(tmp_path / "u.json", units), "--out", str(tmp_path)]) == 2
