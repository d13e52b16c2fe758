import json

import pytest

from toda_bn.cli import main

WORKED = '{"n": 2, "z": ["2", "3"], "Q": ["1/2", "1/5"]}'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_conserved_worked_point(capsys):
    code, out, _ = run(capsys, "conserved", "--point", WORKED)
    assert code == 0
    payload = json.loads(out)
    assert payload["F"] == ["1", "61/15", "223/30", "61/15", "1"]
    assert payload["routes_agree"] is True


def test_lax_output(capsys):
    code, out, _ = run(capsys, "lax", "--point", WORKED, "--n", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["in_gamma"] is True
    assert payload["L"][0][0] == "1"
    assert payload["L"][1][0] == "-12/5"


def test_malformed_json_exits_2(capsys):
    code, _, err = run(capsys, "lax", "--point", "{not json")
    assert code == 2
    assert "JSON" in err or "error" in err


def test_rank_mismatch_exits_2(capsys):
    code, _, _ = run(capsys, "lax", "--point", WORKED, "--n", "3")
    assert code == 2


def test_missing_file_exits_2(capsys):
    code, _, _ = run(capsys, "conserved", "--point", "/nonexistent/file.json")
    assert code == 2


def test_backlund_both_routes(capsys):
    code, out, _ = run(capsys, "backlund", "--point", WORKED,
                       "--steps", "2", "--route", "both")
    assert code == 0
    payload = json.loads(out)
    assert len(payload["steps"]) == 3
    assert all(s["routes_agree"] for s in payload["steps"])
    first = payload["steps"][1]["map"]["point"]
    assert first["z"] == ["6", "-5"]
    assert all(s["map"]["F"] == payload["steps"][0]["map"]["F"]
               for s in payload["steps"])


def test_simulate_csv(capsys):
    code, out, _ = run(capsys, "simulate", "--init", "0.1,0.2,0.0,-0.1",
                       "--T", "0.01", "--h", "1e-3")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "t,z_1,z_2,Q_1,Q_2,drift"
    assert len(lines) == 12  # header + 11 states
    assert float(lines[1].split(",")[0]) == 0.0
    assert float(lines[-1].split(",")[-1]) < 1e-10


def test_canonical_both_directions(capsys):
    code, out, _ = run(capsys, "canonical", "--point", '{"q": [0, 0], "p": [0, 0]}')
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["H_phase"] - payload["H_canonical"]) < 1e-12
    phase = json.dumps(payload["point"])
    code, out, _ = run(capsys, "canonical", "--point", phase)
    assert code == 0
    back = json.loads(out)
    assert max(abs(v) for v in back["q"] + back["p"]) < 1e-12


def test_verify_small_and_deterministic(capsys):
    args = ["verify", "--seed", "11", "--n-max", "2", "--trials", "3",
            "--mode", "rational"]
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    lines = out1.strip().splitlines()
    summary = json.loads(lines[-1])
    assert summary["overall"] == "pass"
    assert summary["failed"] == []
    names = [json.loads(l)["identity"] for l in lines[:-1]]
    assert "conserved-route-equivalence" in names
    assert all(json.loads(l)["passed"] for l in lines[:-1])


def test_verify_seed_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("TODA_BN_SEED", "23")
    code, out, _ = run(capsys, "verify", "--n-max", "1", "--trials", "2",
                       "--mode", "rational")
    assert code == 0
    summary = json.loads(out.strip().splitlines()[-1])
    assert summary["seed"] == 23


def test_verify_out_file(capsys, tmp_path):
    target = tmp_path / "report.jsonl"
    code, out, _ = run(capsys, "verify", "--seed", "3", "--n-max", "1",
                       "--trials", "2", "--mode", "rational", "--out", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text().splitlines()[-1])["overall"] == "pass"


def test_bad_flags_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--T", "1.0"])  # missing --init
    assert exc.value.code == 2


def test_bad_trials_exit_2(capsys):
    code, _, err = run(capsys, "verify", "--trials", "0")
    assert code == 2
    assert "trials" in err
