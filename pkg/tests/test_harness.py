import json
import math
import subprocess
import sys

import pytest

from extrinsic_dirac import harness as H
from extrinsic_dirac.errors import ConfigError


def run_cli(args, capsys):
    code = H.main(args)
    return code, capsys.readouterr()


def test_check_circle(capsys):
    code, out = run_cli(["check", "--case", "circle", "--r", "1"], capsys)
    doc = json.loads(out.out)
    assert code == 0
    head = doc["checks"][0]
    assert head["bound"] == pytest.approx(0.25)
    assert head["eigenvalues"][0] ** 2 == pytest.approx(0.25)
    assert head["verdict"] == "pass-with-equality"


def test_check_sphere_pairing_equality():
    doc = H.run_case(H.RunConfig(case="sphere", params={"rho": 1.0}))
    head = doc["checks"][0]
    assert head["bound"] == pytest.approx(1.0)
    assert len(head["eigenvalues"]) == 2
    pairing = next(r for r in doc["checks"] if r["check"] == "pairing")
    assert all(p["equality"] for p in pairing["pairs"])


def test_check_flat_subtorus():
    doc = H.run_case(H.RunConfig(case="flat-subtorus"))
    pairing = next(r for r in doc["checks"] if r["check"] == "pairing")
    assert pairing["kernel_multiplicity"] == 2
    assert pairing["verdict"] == "hypothesis-violated demonstration"
    assert not pairing["asserted"]
    assert doc["status"] == "pass"


def test_every_row_carries_window():
    doc = H.run_case(H.RunConfig(case="geodesic-sphere-hyperbolic"))
    assert all(r["window"] > 0 for r in doc["checks"])
    assert {"imaginary-killing", "imaginary-radius"} <= {r["check"] for r in doc["checks"]}
    assert all(r["verdict"] != "inapplicable" for r in doc["checks"][:2])


def test_json_output_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert H.main(["check", "--case", "ellipse", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_json_round_trip():
    doc = H.build_report([H.run_case(H.RunConfig(case="circle"))])
    assert json.loads(H.render(doc, "json")) == doc


def test_md_and_csv_use_twelve_digits():
    doc = H.run_case(H.RunConfig(case="ellipse"))
    md = H.render(doc, "md")
    assert "0.171235620015" in md
    csv_text = H.render(doc, "csv")
    assert csv_text.splitlines()[0].startswith("check,asserted,verdict,window")


def test_config_file_overrides(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sphere of radius two\ncase = sphere\nrho = 2\nformat = md\n")
    code, out = run_cli(["check", "--config", str(cfg)], capsys)
    assert code == 0
    assert "## sphere" in out.out and "0.25" in out.out


def test_configuration_errors_exit_three(tmp_path, capsys):
    assert run_cli(["check", "--case", "nope"], capsys)[0] == 3
    assert run_cli(["check", "--case", "circle", "--tol", "0"], capsys)[0] == 3
    assert run_cli(["check", "--case", "circle", "--grid", "4"], capsys)[0] == 3
    assert run_cli(["check", "--case", "circle", "--param", "bad"], capsys)[0] == 3
    assert run_cli(["frobnicate"], capsys)[0] == 3
    bad = tmp_path / "bad.cfg"
    bad.write_text("no equals sign here\n")
    assert run_cli(["check", "--config", str(bad)], capsys)[0] == 3


def test_asserted_failure_exits_two(monkeypatch, capsys):
    real = H.B.check_spectrum

    def broken(spectrum, spec, tol=None):
        rep = real(spectrum, spec, tol)
        return H.B.CheckReport(rep.spec, rep.spectrum, rep.eigenvalues, rep.margins, "fail", rep.tolerance)

    monkeypatch.setattr(H.B, "check_spectrum", broken)
    assert run_cli(["check", "--case", "circle"], capsys)[0] == 2


def test_reported_only_rows_do_not_fail():
    doc = H.run_case(H.RunConfig(case="circle"))
    higher = [r for r in doc["checks"] if r["check"] == "higher"]
    assert len(higher) == 6
    k2 = higher[2]
    assert (k2["C_k"], k2["lambda_sq"]) == pytest.approx((1.25, 2.25), abs=1e-12)
    assert not k2["asserted"]
    assert k2["verdict"] == "exceeds (reported-only)"
    assert doc["status"] == "pass"


def test_sweep_skips_degenerate_parameters():
    doc = H.sweep(H.RunConfig(case="torus-of-revolution", lo=0.9, hi=1.5, steps=3))
    assert "skipped" in doc["rows"][0]["note"]
    assert len(doc["rows"]) == 3


def test_sweep_rejects_unknown_family():
    with pytest.raises(ConfigError):
        H.sweep(H.RunConfig(case="circle"))


def test_sweep_geodesic_ratio_increases_toward_one():
    doc = H.sweep(H.RunConfig(case="geodesic-sphere-hyperbolic", lo=0.01, hi=2.0, steps=8))
    ratios = [r["ratio"] for r in doc["rows"]]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert ratios[0] > 0.98


def test_report_rejects_mixed_schemas():
    case = H.run_case(H.RunConfig(case="circle"))
    sw = H.sweep(H.RunConfig(case="fourier-curve", steps=2))
    with pytest.raises(ConfigError):
        H.build_report([case, sw])
    assert H.build_report([sw])["status"] == "pass"


def test_default_report_comparison_table():
    doc = H.build_report()
    assert doc["status"] == "pass"
    row = next(r for r in doc["tables"]["comparison"] if r["case"] == "sphere")
    assert row["extrinsic (ours)"] == pytest.approx(1.0)
    assert row["Bunke"] == pytest.approx(4.0)
    md = H.render(doc, "md")
    assert "| sphere | 1 | 1 | 4 |" in md
    circle = [r for r in doc["tables"]["higher"] if r["case"] == "circle"]
    assert [r["k"] for r in circle] == list(range(6))


def test_verify_clifford_command(capsys):
    code, out = run_cli(["verify-clifford", "--format", "csv"], capsys)
    assert code == 0
    assert out.out.splitlines()[0] == "n,m,jE,jF,case,max_residual,passed"


def test_minmax_demo_command(capsys):
    code, out = run_cli(["minmax-demo", "--trials", "50", "--seed", "3"], capsys)
    doc = json.loads(out.out)
    assert code == 0 and doc["conclusion_violations"] == 0 and doc["example_ok"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "extrinsic_dirac", "check", "--case", "circle", "--format", "md"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "pass-with-equality" in proc.stdout
