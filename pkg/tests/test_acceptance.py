"""The eleven acceptance criteria at their stated tolerances.

A criterion that misses fails here; the reason is in the check's parts.
"""
import json

from artifact import acceptance, cli

SEED = cli.DEFAULT_SEED


def rng(k):
    return cli.rng_for(SEED, 100 + k)


def _verdict(check, report_line):
    report_line(check.line())
    misses = {k: v for k, v in check.parts.items() if not v["passed"]}
    assert check.passed, json.dumps(misses, default=str, indent=1)


def test_criterion_01_impersonation_detection(report_line):
    _verdict(acceptance.criterion_1(rng(1)), report_line)


def test_criterion_02_measure_resend(report_line):
    _verdict(acceptance.criterion_2(), report_line)


def test_criterion_03_fake_state_optima(report_line):
    _verdict(acceptance.criterion_3(rng(3)), report_line)


def test_criterion_04_table_rows(report_line):
    _verdict(acceptance.criterion_4(), report_line)


def test_criterion_05_thresholds(report_line):
    _verdict(acceptance.criterion_5(), report_line)


def test_criterion_06_photon_number_splitting(report_line):
    _verdict(acceptance.criterion_6(), report_line)


def test_criterion_07_efficiencies(report_line):
    _verdict(acceptance.criterion_7(), report_line)


def test_criterion_08_key_agreement(report_line):
    _verdict(acceptance.criterion_8(rng(8)), report_line)


def test_criterion_09_noise(report_line):
    _verdict(acceptance.criterion_9(), report_line)


def test_criterion_10_dl04(report_line):
    _verdict(acceptance.criterion_10(grid_n=100), report_line)


def test_criterion_11_determinism(tmp_path, report_line):
    dirs = [tmp_path / "a", tmp_path / "b"]
    codes = [cli.main(["report", "all", "--seed", "7", "--out", str(d)]) for d in dirs]
    names = sorted(p.name for p in dirs[0].iterdir())
    same = (codes[0] == codes[1]
            and names == sorted(p.name for p in dirs[1].iterdir())
            and all((dirs[0] / n).read_bytes() == (dirs[1] / n).read_bytes() for n in names))
    report_line(f"criterion 11 determinism: {'PASS' if same else 'FAIL'}")
    assert "manifest.json" in names
    assert same
