import json

import pytest

from noumenal.cli import EXIT_DEMO, EXIT_FAIL, EXIT_LOAD, EXIT_OK, EXIT_USAGE, main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_classical_passes(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["check", "classical_2x2", "--out", str(out)], capsys)
    assert code == EXIT_OK
    data = json.loads(out.read_text())
    assert data["passed"] and data["summary"]["fail"] == 0
    assert any(c["id"] == "S6.main" for c in data["checks"])


def test_check_sabotage_fails_and_skips_construction(capsys):
    code, out, err = run(["check", "sabotage_swapped_product"], capsys)
    assert code == EXIT_FAIL
    data = json.loads(out)
    failed = {c["id"] for c in data["checks"] if c["status"] == "fail"}
    assert "S5.req3.interchange" in failed
    s6 = [c for c in data["checks"] if c["id"].startswith("S6.")]
    assert s6 and all(c["status"] == "skipped" for c in s6)
    assert "FAIL S5.req3.interchange" in err


def test_check_seed_flag_beats_environment(tmp_path, monkeypatch, capsys):
    spec = tmp_path / "q1.theory"
    spec.write_text("theory 1 quantum q1\nsites\n  q0\noptions\n  samples 30\n")
    monkeypatch.setenv("NOUMENAL_SEED", "7")
    _, env_out, _ = run(["check", str(spec)], capsys)
    _, flag_out, _ = run(["check", str(spec), "--seed", "7"], capsys)
    _, other_out, _ = run(["check", str(spec), "--seed", "8"], capsys)
    assert json.loads(env_out)["checks"][0]["seed"] == 7
    assert env_out == flag_out != other_out


def test_load_errors_exit_3(tmp_path, capsys):
    bad = tmp_path / "bad.theory"
    bad.write_text("theory 9 classical\nsites\n  a 2\n")
    code, _, err = run(["check", str(bad)], capsys)
    assert code == EXIT_LOAD and "unknown-version" in err
    code, _, _ = run(["check", str(tmp_path / "missing.theory")], capsys)
    assert code == EXIT_LOAD


def test_usage_errors_exit_64(capsys):
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as e:
        main(["check"])
    assert e.value.code == EXIT_USAGE


def test_build_classical_exports_coset_table(capsys):
    code, out, _ = run(["build", "classical_product"], capsys)
    assert code == EXIT_OK
    data = json.loads(out)
    assert [s["class_count"] for s in data["systems"]] == [1, 2, 2, 4]


def test_build_quantum_manifest_spot_checks(tmp_path, capsys):
    spec = tmp_path / "q2.theory"
    spec.write_text("theory 1 quantum q2\nsites\n  q0\n  q1\noptions\n  samples 40\n  seed 3\n")
    code, out, _ = run(["build", str(spec)], capsys)
    assert code == EXIT_OK
    data = json.loads(out)
    assert [c["result"] for c in data["spot_checks"]] == [True, False]
    assert data["kind"] == "quantum" and not data["forced"]


def test_build_refuses_then_forces(capsys):
    code, _, err = run(["build", "sabotage_swapped_product"], capsys)
    assert code == EXIT_FAIL and "S5.req3.interchange" in err
    code, out, _ = run(["build", "sabotage_swapped_product", "--force"], capsys)
    data = json.loads(out)
    assert code == EXIT_OK and data["forced"] and "watermark" in data
    assert "S5.req3.interchange" in data["failing_checks"]


def test_demo_success_and_failure(tmp_path, capsys):
    code, out, _ = run(["demo", "classical_2x2", "local_flip"], capsys)
    assert code == EXIT_OK and "ok   line" in out
    spec = tmp_path / "d.theory"
    spec.write_text("theory 1 classical\nsites\n  a 2\nop\n  f a = [1 0]\ndemo d\n  step a f\n  assert state a = 0\n")
    code, out, err = run(["demo", str(spec), "d", "--out", str(tmp_path / "t.json")], capsys)
    assert code == EXIT_DEMO and "line 8" in err
    assert json.loads((tmp_path / "t.json").read_text())["passed"] is False
    code, _, _ = run(["demo", "classical_2x2", "nope"], capsys)
    assert code == EXIT_DEMO
