import json

import pytest

from artifact import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_detect_json(capsys):
    code, out, _ = run(capsys, "auth", "detect", "--n", "6", "--format", "json")
    assert code == 0
    assert json.loads(out) == [{"n": 6, "p_detect": pytest.approx(0.999756, abs=1e-6)}]


def test_csv_has_header_and_six_decimals(capsys):
    code, out, _ = run(capsys, "auth", "detect")
    lines = out.splitlines()
    assert code == 0 and out.endswith("\n")
    assert lines[0] == "n,p_detect"
    assert lines[1] == "1,0.750000"
    assert len(lines) == 13


def test_threshold_json(capsys):
    code, out, _ = run(capsys, "qkd", "threshold", "--curve", "sb1", "--format", "json")
    assert code == 0
    assert json.loads(out)["root"] == pytest.approx(0.0314, abs=5e-4)


def test_same_seed_same_output(capsys):
    a = run(capsys, "qka", "simulate", "--rounds", "500", "--seed", "7")[1]
    b = run(capsys, "qka", "simulate", "--rounds", "500", "--seed", "7")[1]
    c = run(capsys, "qka", "simulate", "--rounds", "500", "--seed", "8")[1]
    assert a == b
    assert "1.000000" in a.splitlines()[1]
    assert c.splitlines()[0] == a.splitlines()[0]


def test_csv_and_json_carry_the_same_numbers(capsys):
    csv_out = run(capsys, "qkd", "efficiency")[1]
    js = json.loads(run(capsys, "qkd", "efficiency", "--format", "json")[1])
    assert csv_out.splitlines()[1].split(",")[-1] == f"{js[0]['efficiency']:.6f}"


def test_out_directory(tmp_path, capsys):
    code, out, _ = run(capsys, "noise", "collective", "--kind", "rotation", "--out", str(tmp_path))
    assert code == 0 and out == ""
    text = (tmp_path / "noise_collective.csv").read_text()
    assert text.startswith("kind,angle,error_probability\n")


def test_unknown_flag_exits_2(capsys):
    code, _, err = run(capsys, "qkd", "rate", "--bogus")
    assert code == 2
    assert "usage" in err


def test_domain_error_exits_2(capsys):
    code, _, err = run(capsys, "dl04", "payoff", "--p", "1.5")
    assert code == 2
    assert "error" in err


def test_solver_failure_exits_3(capsys):
    code, _, err = run(capsys, "qka", "bound", "--mode", "oracle")
    assert code == 3
    assert "solver failure" in err


def test_alpha_flags(capsys):
    deg = run(capsys, "qka", "attack", "--alpha-deg", "90", "--format", "json")[1]
    rad = run(capsys, "qka", "attack", "--alpha-rad", "1.5707963267948966", "--format", "json")[1]
    assert json.loads(deg) == json.loads(rad)
    code, _, _ = run(capsys, "qka", "attack", "--alpha-deg", "90", "--alpha-rad", "1")
    assert code == 2


def test_nash_csv_keeps_header_without_points(capsys):
    code, out, _ = run(capsys, "dl04", "nash", "--game", "e1-e2", "--grid", "50")
    assert code == 0
    assert out.splitlines()[0].startswith("game,p,q,r,P_A")


def test_nash_csv_rows(capsys):
    code, out, _ = run(capsys, "dl04", "nash", "--game", "e1-e4", "--grid", "50")
    assert code == 0
    assert len(out.splitlines()) > 1


def test_dist_rows_sum_to_one(capsys):
    js = json.loads(run(capsys, "dl04", "dist", "--attack", "e2", "--p", "0.3", "--q", "0.7",
                        "--format", "json")[1])
    assert sum(r["probability"] for r in js) == pytest.approx(1.0)


def test_auth_simulate_honest_sessions_accept(capsys):
    js = json.loads(run(capsys, "auth", "simulate", "--protocol", "2.1", "--sessions", "20",
                        "--format", "json")[1])
    assert js[0]["accept_rate"] == 1.0


def test_module_entry_point():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "artifact", "auth", "detect", "--n", "1"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout == "n,p_detect\n1,0.750000\n"
