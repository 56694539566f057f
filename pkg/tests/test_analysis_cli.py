import csv
import io
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from neyman_sharp.analysis import (
    AnalysisRequest,
    DataError,
    Report,
    analyze,
    apply_coding,
    load_unit_csv,
    write_unit_csv,
)
from neyman_sharp.cli import main
from neyman_sharp.datasets import CABG, SMOKING, get_dataset, solve_cabg_counts
from neyman_sharp.estimators import ObservedSummary


def test_cabg_derivation():
    assert solve_cabg_counts() == (82, 21, 17, 68)
    assert CABG.successes == (82, 21, 17, 68)


def test_unknown_dataset():
    with pytest.raises(KeyError):
        get_dataset("nope")


def test_smoking_sign_depends_on_coding():
    plus = analyze(AnalysisRequest(dataset=SMOKING.id)).effect(2)
    minus = analyze(AnalysisRequest(dataset=SMOKING.id, coding=(2, 1, 4, 3))).effect(2)
    assert plus.point == pytest.approx(-minus.point)
    assert plus.var_improved == pytest.approx(minus.var_improved)
    assert plus.ci_classic[0] == pytest.approx(0.0354, abs=1e-4)
    assert minus.ci_classic == pytest.approx((-0.12946, -0.03538), abs=1e-5)


def test_degenerate_summary():
    rep = analyze(AnalysisRequest(summary=ObservedSummary((4, 4, 4, 4), (0, 0, 0, 0))))
    for e in rep.effects:
        assert e.point == 0 and e.var_classic == 0 and e.var_improved == 0
        assert e.ci_classic == e.ci_improved == (0.0, 0.0)


def test_request_validation(tmp_path):
    with pytest.raises(ValueError):
        AnalysisRequest()
    with pytest.raises(ValueError):
        AnalysisRequest(dataset=SMOKING.id, csv_path="x.csv")
    with pytest.raises(ValueError):
        AnalysisRequest(dataset=SMOKING.id, effects=(4,))
    with pytest.raises(DataError):
        apply_coding(SMOKING.summary(), (1, 1, 2, 3))
    with pytest.raises(DataError):
        analyze(AnalysisRequest(summary=ObservedSummary((1, 4, 4, 4), (0, 1, 1, 1))))


def test_csv_sufficiency(tmp_path):
    path = tmp_path / "units.csv"
    write_unit_csv(path, CABG.summary())
    assert load_unit_csv(path) == CABG.summary()
    from_csv = analyze(AnalysisRequest(csv_path=str(path)))
    from_summary = analyze(AnalysisRequest(summary=CABG.summary()))
    assert from_csv.effects == from_summary.effects


@pytest.mark.parametrize(
    "body",
    [
        "unit,arm,outcome\n1,1,0\n",
        "unit_id,arm,outcome\n1,5,0\n",
        "unit_id,arm,outcome\n1,1,2\n",
        "unit_id,arm,outcome\n1,1\n",
        "unit_id,arm,outcome\n1,1,0\n1,2,0\n",
        "unit_id,arm,outcome\n1,1,0\n2,2,0\n3,3,0\n",
    ],
)
def test_malformed_csv(tmp_path, body):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(DataError):
        load_unit_csv(path)


@given(st.tuples(*[st.integers(2, 30)] * 4).flatmap(lambda n: st.tuples(st.just(n), st.tuples(*[st.integers(0, k) for k in n]))))
def test_report_round_trip(args):
    n, n_obs = args
    rep = analyze(AnalysisRequest(summary=ObservedSummary(n, n_obs), ci_level=0.9))
    again = Report.from_json(rep.to_json())
    assert again == rep
    assert again.to_json() == rep.to_json()


# -- CLI -------------------------------------------------------------------------


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_analyze_text(capsys):
    code, out, _ = run(capsys, "analyze", "--dataset", "post-cabg-1997", "--effects", "3")
    assert code == 0
    assert "(0.130, 0.202)" in out and "(0.133, 0.200)" in out and "87.7%" in out


def test_cli_analyze_json_matches_library(capsys, tmp_path):
    summary = tmp_path / "s.json"
    summary.write_text(json.dumps({"n": [189, 188, 189, 189], "n_obs": [13, 29, 19, 34], "ci_level": 0.9}))
    code, out, _ = run(capsys, "analyze", "--summary", str(summary), "--format", "json")
    assert code == 0
    rep = Report.from_json(out)
    assert rep.effects == analyze(AnalysisRequest(summary=SMOKING.summary(), ci_level=0.9)).effects
    assert rep.provenance["config_hash"]


def test_cli_analyze_csv_and_out(capsys, tmp_path):
    units = tmp_path / "u.csv"
    write_unit_csv(units, SMOKING.summary())
    out_path = tmp_path / "r.csv"
    code, _, _ = run(capsys, "analyze", "--csv", str(units), "--format", "csv", "--out", str(out_path))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out_path.read_text())))
    assert [r["effect"] for r in rows] == ["1", "2", "3"]
    assert float(rows[1]["point"]) == pytest.approx(0.082419, abs=1e-6)


def test_cli_inline_and_coding(capsys):
    code, out, _ = run(capsys, "analyze", "--n", "189,188,189,189", "--n-obs", "13,29,19,34", "--coding", "2,1,4,3", "--effects", "2")
    assert code == 0 and "-0.082" in out


@pytest.mark.parametrize(
    "argv,code",
    [
        (["analyze", "--dataset", "nope"], 2),
        (["analyze"], 2),
        (["analyze", "--n", "1,2,3"], 2),
        (["frobnicate"], 2),
        (["analyze", "--n", "1,4,4,4", "--n-obs", "0,0,0,0"], 1),
        (["analyze", "--dataset", "smoking-2006", "--coding", "1,1,2,3"], 1),
        (["oracle", "--sharpness-n", "20"], 2),
        (["simulate", "/nonexistent/config.json"], 2),
    ],
)
def test_cli_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_cli_bad_csv_row(capsys, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("unit_id,arm,outcome\n1,9,0\n")
    code, _, err = run(capsys, "analyze", "--csv", str(path))
    assert code == 1 and "arm must be 1..4" in err


def test_cli_oracle_guard_message(capsys):
    code, _, err = run(capsys, "oracle", "--sharpness-n", "20")
    assert code == 2 and "guard" in err


def test_cli_oracle_corrupted_bound(capsys):
    code, out, _ = run(capsys, "oracle", "--sharpness-n", "4", "--tables", "2", "--random-tables", "5", "--corrupt-bound")
    assert code == 1
    assert "FAIL sharpness" in out and "counterexample" in out and "marginals" in out


def test_cli_oracle_small_run_passes(capsys):
    code, out, _ = run(capsys, "oracle", "--sharpness-n", "5", "--tables", "3", "--random-tables", "10", "--format", "json")
    assert code == 0 and json.loads(out)["passed"] is True


def test_cli_examples_and_simulate(capsys, tmp_path):
    code, out, _ = run(capsys, "examples")
    assert code == 0 and "smoking-2006" in out and "latent-tables" in out
    cfg = tmp_path / "cfg.json"
    assert run(capsys, "examples", "latent-tables", "--replicates", "20", "--out", str(cfg))[0] == 0
    code, out, _ = run(capsys, "simulate", str(cfg), "--seed", "3")
    assert code == 0
    rep = json.loads(out)
    assert len(rep["cases"]) == 18 and rep["provenance"]["seed"] == 3
    code2, out2, _ = run(capsys, "simulate", str(cfg), "--seed", "3")
    assert out2 == out
    code, out, _ = run(capsys, "simulate", str(cfg), "--replicates", "1", "--format", "csv")
    assert code == 0 and len(out.strip().splitlines()) == 19
    assert run(capsys, "examples", "nope")[0] == 2


def test_cli_simulate_invalid_generator(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"cases": [{"generator": {"kind": "latent_normal", "mu": [0, 0, 0, 0], "rho": -0.5}}]}))
    code, _, err = run(capsys, "simulate", str(cfg))
    assert code == 1 and "rho" in err


def test_cli_gamma_scan(capsys):
    code, out, _ = run(capsys, "gamma-scan", "--draws", "1")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "tau_hat,gamma"
    data = [l for l in lines[1:] if not l.startswith("#")]
    assert len(data) == 1 and len(data[0].split(",")) == 2
    assert any(l.startswith("# max=") for l in lines)
