import argparse
import csv
import io
import json

import pytest

from bound_atlas import cli
from bound_atlas.formulas import eval_formula
from bound_atlas.targets import exact_for, target_for


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_count_parser():
    assert cli.count("1e7") == 10**7
    assert cli.count("10_000") == 10000
    for bad in ("1.5", "0", "-3", "abc", "inf"):
        with pytest.raises(argparse.ArgumentTypeError):
            cli.count(bad)


def test_exact(capsys):
    code, out, _ = run(capsys, "exact", "d4.ppt")
    assert code == 0 and "0.404956750" in out
    code, out, _ = run(capsys, "exact", "d3.jba.bound", "--alpha", "0.5")
    assert code == 0 and abs(float(out.split("=")[-1].split()[0]) - 0.00470668) < 1e-8
    code, out, _ = run(capsys, "exact", "d3.choi.ent", "--a", "0")
    assert code == 0 and repr(8 / 27)[:12] in out


@pytest.mark.filterwarnings("ignore::bound_atlas.witnesses.ExtrapolationWarning")
def test_exact_errors(capsys):
    assert run(capsys, "exact", "nope")[0] == 2
    assert run(capsys, "exact", "d3.choi.bound", "--a", "2")[0] == 2
    assert run(capsys, "exact", "d3.jba.ent", "--alpha", "0.9", "--extrapolate")[0] == 0


def test_estimate_horodecki(capsys):
    code, out, _ = run(capsys, "estimate", "--family", "horodecki", "--n", "1e5")
    assert code == 0
    assert out.startswith("# bound-atlas schema=1 config=")
    r = {x["region"]: x for x in rows(out)}
    assert set(r) == {"PPT", "(PPT & MUB)"}
    assert abs(float(r["PPT"]["estimate"]) - 0.6) < 1e-3
    assert r["(PPT & MUB)"]["exact_id"] == "horodecki.bound"
    assert list(rows(out)[0]) == list(cli.CSV_COLUMNS)


def test_estimate_rerun_round_trip(tmp_path, capsys):
    out = tmp_path / "t1.csv"
    assert run(capsys, "estimate", "--table1", "--n", "2e4", "--out", str(out))[0] == 0
    assert len(rows(out.read_text())) == 20
    code, msg, _ = run(capsys, "rerun", str(out))
    assert code == 0 and "bit-for-bit" in msg
    out.write_text(out.read_text().replace(",20000,", ",20001,", 1))
    assert run(capsys, "rerun", str(out))[0] == 1


def test_json_output_and_rerun(tmp_path, capsys):
    out = tmp_path / "w.json"
    args = ["estimate", "--family", "hl4", "--witness", "jba4", "--alpha", "0.3", "--n", "1e4",
            "--format", "json", "--out", str(out)]
    assert run(capsys, *args)[0] == 0
    text = out.read_text()
    doc = json.loads(text.split("\n", 1)[1])
    assert doc["schema"] == 1
    assert doc["provenance"]["index_range"] == [0, 10000]
    assert [r["exact_id"] for r in doc["rows"]] == ["d4.jba.ent(alpha=0.3)", "d4.jba.bound(alpha=0.3)"]
    assert run(capsys, "rerun", str(out))[0] == 0


def test_check_exit_code(capsys):
    base = ["estimate", "--family", "hl3", "--regions", "PPT,MUB", "--n", "2e5", "--check"]
    assert run(capsys, *base, "--tol", "2e-3")[0] == 0
    code, _, err = run(capsys, *base, "--tol", "1e-9")
    assert code == 1 and "check failed" in err


def test_slow_lane_is_explicit(capsys):
    assert run(capsys, "estimate", "--family", "full3", "--regions", "PPT", "--n", "1000")[0] == 2
    code, out, _ = run(capsys, "estimate", "--family", "full3", "--regions", "PPT", "--n", "1000", "--slow")
    assert code == 0 and len(rows(out)) == 1


def test_ccnr_flag_adds_regions(capsys):
    code, out, _ = run(capsys, "estimate", "--family", "hl3", "--ccnr", "--slow", "--n", "5000")
    assert code == 0
    assert [r["region"] for r in rows(out)] == ["PPT", "CCNR", "(PPT & CCNR)"]


def test_bad_region(capsys):
    code, _, err = run(capsys, "estimate", "--regions", "PPT & Bogus", "--n", "100")
    assert code == 2 and "Bogus" in err


def test_scan_threshold_endpoints(capsys):
    lo, hi = -3 / 16, 43 / 32 + 1e-9
    code, out, _ = run(capsys, "scan", "threshold", "--lo", repr(lo), "--hi", repr(hi), "--points", "3", "--n", "1e5")
    assert code == 0
    r = rows(out)
    assert int(r[0]["hits"]) == 0
    assert float(r[-1]["estimate"]) == float(r[-1]["ppt_estimate"])


def test_scan_boundary(capsys):
    code, out, _ = run(capsys, "scan", "boundary", "--n", "500")
    assert code == 0
    r = rows(out)
    assert len(r) == 500
    for x in r[:50]:
        q1, q2, q3 = float(x["Q1"]), float(x["Q2"]), float(x["Q3"])
        assert abs(q2 - (q1 - 4 * q3) / 3) < 1e-15
        assert q2 >= 0 and q1 + 3 * q2 + 2 * q3 <= 1 + 1e-12
    assert {x["ppt"] for x in r} == {"0", "1"}


def test_scan_family_curve(capsys, tmp_path):
    out = tmp_path / "fc.csv"
    code, _, _ = run(capsys, "scan", "family-curve", "--formula", "d3.choi.ent", "--points", "5", "--n", "1e5",
                     "--out", str(out))
    assert code == 0
    r = rows(out.read_text())
    assert len(r) == 5
    for x in r:
        assert abs(float(x["exact"]) - float(x["sampled"])) < 3e-3
    assert run(capsys, "rerun", str(out))[0] == 0
    assert run(capsys, "scan", "family-curve", "--formula", "d3.ppt")[0] == 2
    assert run(capsys, "scan", "threshold", "--points", "0")[0] == 2


def test_list_and_plot_data(capsys):
    for what in ("formulas", "witnesses", "table1", "regions"):
        code, out, _ = run(capsys, "list", what)
        assert code == 0 and json.loads(out)
    code, out, _ = run(capsys, "plot-data", "d3.choi.bound", "--points", "5")
    assert code == 0 and out.splitlines()[0] == "a,value" and len(out.splitlines()) == 6
    assert run(capsys, "plot-data", "d3.ppt")[0] == 2


def test_repro_quick_subset(capsys):
    code, out, _ = run(capsys, "repro", "--quick", "--only", "1", "--only", "2")
    assert code == 0
    assert out.count("PASS") == 2


def test_rerun_rejects_foreign_files(tmp_path, capsys):
    p = tmp_path / "x.csv"
    p.write_text("region,hits\n")
    with pytest.raises(SystemExit):
        cli.main(["rerun", str(p)])


@pytest.mark.parametrize(
    "family,expr,fid",
    [
        ("hl3", "PPT & MUB", "d3.ppt_mub"),
        ("hl3", "MUB | Choi", "d3.mub_or_choi"),
        ("hl3", "Choi & PPT", "d3.choi.bound(a=1.0)"),
        ("hl3", "PPT & CCNR", "d3.ccnr.bound"),
        ("hl4", "PPT & Chrusc1 & Chrusc2", "d4.chrusc.joint"),
        ("hl4", "JBA4(alpha=0.3) | JBA4p(alpha=0.3)", "d4.jba.union(alpha=0.3)"),
        ("full4", "PPT & CCNR", "full15.ccnr.bound.conj"),
        ("horodecki", "MUB & PPT", "horodecki.bound"),
    ],
)
def test_exact_targets(family, expr, fid):
    label, value = exact_for(family, expr)
    assert label == fid
    base, x = target_for(family, expr)
    assert value == (eval_formula(base) if x is None else eval_formula(base, x))


def test_exact_targets_absent():
    assert exact_for("hl3", "PPT | MUB") is None
    assert exact_for("hl4", "JBA4(alpha=0.3) | JBA4p(alpha=0.31)") is None
    assert exact_for("hl3", "PPT & JBA(alpha=0.5) & JBA2(alpha=0.6)") is None
