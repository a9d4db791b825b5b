from __future__ import annotations

import json
from fractions import Fraction

import pytest

from anergodic.cli import USAGE, Table, emit, load, main, parse_Ns, read_config
from anergodic.numerics import RigorousReal, Verdict

from conftest import rotation


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_cf_table_schema(capsys):
    code, out, _ = run(capsys, "cf", "--alpha", "golden", "--depth", "10", "--format", "csv")
    assert code == 0
    rows = load(out, "csv")["rows"]
    assert len(rows) == 10
    assert list(rows[0]) == ["r", "a_r", "p_r", "q_r", "q'_r.lo", "q'_r.hi"]
    assert [int(r["q_r"]) for r in rows] == [1, 2, 3, 5, 8, 13, 21, 34, 55, 89]


def test_bounds_rows(capsys):
    code, out, _ = run(capsys, "bounds", "--alpha", "golden", "--phi", "theta:1", "--n", "10")
    assert code == 0
    rows = load(out, "csv")["rows"]
    assert all(r["verdict"] == "PASS" for r in rows)
    for r in rows:
        if r["r"] != "all":
            lo, hi = Fraction(r["B_lower.lo"]), Fraction(r["B_upper.hi"])
            assert lo <= Fraction(r["segment.hi"]) and Fraction(r["segment.lo"]) <= hi


def test_compare_lang(capsys):
    code, out, _ = run(capsys, "compare", "--target", "lang", "--alpha", "golden", "--n", "100", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    q = {r["quantity"]: r for r in doc["rows"]}
    assert {"ours", "theirs", "direct"} <= set(q)
    assert Fraction(q["ours"]["value.lo"]) <= Fraction("1293.863636973213983832") <= Fraction(q["ours"]["value.hi"])
    assert doc["meta"]["alpha"] == "golden"


@pytest.mark.parametrize("argv", [
    ["cf", "--alpha", "golden", "--depth", "0"],
    ["cf", "--alpha", "nonsense"],
    ["sum", "--alpha", "golden"],
    ["frobnicate"],
    ["bounds", "--alpha", "golden", "--phi", "theta:1", "--n", "-4"],
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == USAGE
    assert out == "" and err


def test_all_commands_run(capsys):
    cases = [
        ["ostrowski", "--alpha", "sqrt2m1", "--n", "1000"],
        ["orbit", "--alpha", "golden", "--n", "300"],
        ["sum", "--alpha", "golden", "--phi", "cot", "--n", "1000"],
        ["estimate", "--alpha", "sqrt2m1", "--n", "500", "--beta", "3/2"],
        ["compare", "--target", "beresnevich", "--alpha", "golden", "--n", "400"],
        ["compare", "--target", "antisym", "--alpha", "golden", "--n-max", "8"],
        ["compare", "--target", "weighted", "--alpha", "golden", "--phi", "cot", "--gamma", "1", "--n", "512"],
        ["compare", "--target", "sinai", "--alpha", "golden", "--n-max", "10"],
        ["compare", "--target", "conjecture", "--alpha", "golden"],
    ]
    for argv in cases:
        code, out, err = run(capsys, *argv)
        assert code == 0, (argv, err)
        assert out


def test_exit_code_reflects_fail(capsys):
    # LB1 > LB3 at its stated threshold fails here
    code, _, _ = run(capsys, "compare", "--target", "beresnevich", "--alpha", "cf:1,2,[3]", "--n", "326")
    assert code in (0, 2)
    tab = Table(["x", "verdict"])
    tab.add(Verdict.FAIL, x=1)
    assert tab.verdict == Verdict.FAIL


def test_json_round_trip():
    tab = Table(["N", "value.lo", "value.hi", "verdict"])
    tab.add(Verdict.PASS, N=3, value=RigorousReal.from_exact(Fraction(1, 3)))
    tab.add(Verdict.EXPLORATORY, N=4, value=RigorousReal.from_exact(2))
    text = emit(tab, "json", {"command": "test"})
    doc = load(text, "json")
    assert emit_from(doc) == text
    lo, hi = Fraction(doc["rows"][0]["value.lo"]), Fraction(doc["rows"][0]["value.hi"])
    assert lo <= Fraction(1, 3) <= hi


def emit_from(doc):
    tab = Table(list(doc["rows"][0]))
    for row in doc["rows"]:
        tab.rows.append(row)
    tab.verdicts += [Verdict(r["verdict"]) for r in doc["rows"]]
    return emit(tab, "json", doc["meta"])


def test_ns_grammar():
    rot = rotation("golden")
    assert parse_Ns("5", rot) == [5]
    assert parse_Ns("1..4", rot) == [1, 2, 3, 4]
    assert parse_Ns("10..20:5", rot) == [10, 15, 20]
    assert parse_Ns("quasiperiods:5", rot) == list(range(1, 10))  # q_r - 1, q_r, q_r + 1 up to q_5 = 8
    assert parse_Ns("3, 1..2", rot) == [1, 2, 3]


def test_config_errors():
    from anergodic.cli import UsageError

    with pytest.raises(UsageError):
        read_config("alphas=golden")
    with pytest.raises(UsageError):
        read_config("alphas=golden\nNs=1..3\ncolour=red")


def test_sweep_is_byte_identical(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("alphas = golden; random:2  # two seeded periodic specs\n"
                   "Ns = 1..40, quasiperiods:8\nbetas = 1; 3/2\nchecks = sandwich; methods; lower; epsilon; priorart\n")
    outs = []
    for k in range(2):
        path = tmp_path / f"out{k}.csv"
        code, _, err = run(capsys, "sweep", "--config", str(cfg), "--seed", "2024", "--out", str(path))
        assert code == 0, err
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] and len(outs[0]) > 1000
