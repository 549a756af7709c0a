import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from sncdescent.cli import RunConfig, main
from sncdescent.fileformat import InputError, emit_report, parse_input, parse_report

FIXTURES = Path(__file__).parent / "fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for k in list(os.environ):
        if k.startswith("SNCDESCENT_"):
            monkeypatch.delenv(k)


def test_demo_a1(capsys):
    code, out, _ = run(capsys, "demo", "a1")
    assert code == 0
    assert "R_Y = k[x,1/x]" in out
    assert "invariant factors: x^3" in out


def test_demo_nerve_census(capsys):
    code, out, _ = run(capsys, "demo", "nerve-census")
    assert code == 0
    assert "n=1: 2 1 0" in out and "n=2: 4 5 2" in out and "n=3: 8 19 18" in out


def test_demo_bl_sequence(capsys):
    code, out, _ = run(capsys, "demo", "bl-sequence")
    assert code == 0 and "exact: true" in out


def test_demo_crossing(capsys):
    code, out, _ = run(capsys, "demo", "a2-crossing", "--prec", "4")
    assert code == 0 and out.count("[pass] verify_roundtrip") == 3


def test_unknown_demo(capsys):
    code, _, err = run(capsys, "demo", "a3")
    assert code == 2 and "usage" in err


def test_broken_cocycle_file(capsys):
    code, out, _ = run(capsys, "run", str(FIXTURES / "broken_cocycle.snc"))
    assert code == 1
    assert "Y{} -> Y{x} -> Y{x,y}" in out


def test_torsion_glue_file(capsys):
    code, out, _ = run(capsys, "run", str(FIXTURES / "torsion_glue.snc"))
    assert code == 0
    assert "invariant factors: x^3" in out


def test_laurent_comparison_file(capsys):
    code, out, _ = run(capsys, "run", str(FIXTURES / "laurent_rho.snc"))
    assert code == 0 and "free rank: 1" in out


def test_roundtrip_file(capsys):
    code, out, _ = run(capsys, "run", str(FIXTURES / "roundtrip.snc"))
    assert code == 0 and "unit M -> glued: iso" in out


def test_stabilize_files(capsys):
    code, out, _ = run(capsys, "run", str(FIXTURES / "hidden_torsion.snc"))
    assert code == 3
    code, out, _ = run(capsys, "run", str(FIXTURES / "stabilize_deep.snc"))
    assert code == 0 and "stabilized at level 4" in out


def test_empty_file(capsys):
    code, _, err = run(capsys, "run", str(FIXTURES / "empty.snc"))
    assert code == 2 and "empty input" in err


def test_parse_error_position(capsys):
    code, out, err = run(capsys, "run", str(FIXTURES / "bad_entry.snc"), "--format", "json")
    assert code == 2
    report = json.loads(out)
    assert (report["line"], report["column"]) == (4, 11)


def test_missing_file(capsys):
    code, _, err = run(capsys, "run", str(FIXTURES / "nope.snc"))
    assert code == 2 and "cannot read" in err


def test_json_report_round_trips(capsys):
    for name in ("broken_cocycle.snc", "torsion_glue.snc", "hidden_torsion.snc"):
        _, out, _ = run(capsys, "run", str(FIXTURES / name), "--format", "json")
        assert emit_report(parse_report(out)) == out
        assert parse_report(out)["runs"][0]["verdict"] in ("pass", "fail", "exhausted")


def test_json_report_contents(capsys):
    _, out, _ = run(capsys, "run", str(FIXTURES / "torsion_glue.snc"), "--format", "json")
    block = json.loads(out)["runs"][0]
    assert block["precision"] == 8 and block["verdicts"]["surjectivity"] is True


def test_env_and_flag_precedence(capsys, monkeypatch):
    monkeypatch.setenv("SNCDESCENT_PREC", "1")
    code, _, err = run(capsys, "demo", "bl-sequence")
    assert code == 2 and "at least 2" in err
    code, out, _ = run(capsys, "demo", "bl-sequence", "--prec", "4")
    assert code == 0 and "level 4" in out


def test_env_format(capsys, monkeypatch):
    monkeypatch.setenv("SNCDESCENT_FORMAT", "json")
    code, out, _ = run(capsys, "demo", "nerve-census")
    assert code == 0 and json.loads(out)["exit_code"] == 0


def test_flags_override_file_precision(capsys):
    _, out, _ = run(capsys, "run", str(FIXTURES / "torsion_glue.snc"), "--prec", "5", "--format", "json")
    assert json.loads(out)["runs"][0]["precision"] == 5


def test_prime_field(capsys):
    code, out, _ = run(capsys, "demo", "bl-sequence", "--field", "GF(7)")
    assert code == 0 and "GF(7)[x]" in out
    code, _, _ = run(capsys, "demo", "bl-sequence", "--field", "GF(8)")
    assert code == 2


def test_strata_listing(capsys):
    code, out, _ = run(capsys, "strata", "2")
    assert code == 0
    assert "nerve counts: 4 5 2" in out and "11 objects" in out
    code, _, _ = run(capsys, "strata", "7")
    assert code == 2


def test_run_config_invariants():
    with pytest.raises(InputError):
        RunConfig("demo", prec=1)
    with pytest.raises(InputError):
        RunConfig("demo", deg=0)
    with pytest.raises(InputError):
        RunConfig("demo", prec=16, prec_cap=8)


@pytest.mark.parametrize(
    "text,line",
    [
        ("SNCDESCENT 2\nRING x\n", 1),
        ("SNCDESCENT 1\nRING x\nFROB x\n", 3),
        ("SNCDESCENT 1\nRING x\nREL x\n", 3),
        ("SNCDESCENT 1\nRING x\nDIVISOR y\n", 3),
        ("SNCDESCENT 1\nRING x\nDATUM D\nSTRATUM D {z} 1\n", 4),
        ("SNCDESCENT 1\nRING x\nRUN glue\n", 3),
        ("SNCDESCENT 1\nPREC eight\n", 2),
    ],
)
def test_parse_errors(text, line):
    with pytest.raises(InputError) as exc:
        parse_input(text)
    assert exc.value.line == line


def test_parse_input_structure():
    inp = parse_input((FIXTURES / "broken_cocycle.snc").read_text())
    assert inp.ring == ["x", "y"] and inp.prec == 4
    d = inp.data["broken"]
    assert set(d.strata) == {(), ("x",), ("y",), ("x", "y")}
    assert d.rho[0].src == () and d.rho[0].tgt == ("x", "y")
    assert [r.command for r in inp.runs] == ["check_cocycle", "glue"]


def test_datum_missing_stratum(tmp_path, capsys):
    f = tmp_path / "d.snc"
    f.write_text("SNCDESCENT 1\nRING x\nDIVISOR x\nDATUM D\nSTRATUM D {} 1\nRUN glue D\n")
    code, _, err = run(capsys, "run", str(f))
    assert code == 2 and "no STRATUM for {x}" in err


def test_rho_shape_mismatch(tmp_path, capsys):
    f = tmp_path / "d.snc"
    f.write_text(
        "SNCDESCENT 1\nRING x\nDIVISOR x\nDATUM D\nSTRATUM D {} 1\nSTRATUM D {x} 1\n"
        "RHO D {} {x}\nROW 1, 0\nRUN glue D\n"
    )
    code, _, err = run(capsys, "run", str(f))
    assert code == 2 and "line 7" in err


def test_negative_power_rejected_in_module(tmp_path, capsys):
    f = tmp_path / "m.snc"
    f.write_text("SNCDESCENT 1\nRING x\nMODULE M 1\nREL x^-1\n")
    code, _, err = run(capsys, "run", str(f))
    assert code == 2 and "negative power" in err


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "sncdescent", "run", str(FIXTURES / "hidden_torsion.snc")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 3
