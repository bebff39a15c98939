from itertools import product

import numpy as np
import pytest

from artifact import auth


@pytest.mark.parametrize("n", range(1, 13))
def test_detect_probability_counts_guesses(n):
    # an impersonator must match n independent 2-bit codes: 4**n equally likely choices
    undetected = sum(1 for g in product(range(4), repeat=n) if all(x == 0 for x in g)) if n <= 6 else 1
    assert auth.detect_probability(n) == pytest.approx(1 - undetected / 4**n, abs=0)


def test_round_pass_probabilities():
    assert auth.impersonation_round_pass("2.3") == pytest.approx(0.25)
    assert auth.impersonation_round_pass("2.4") == pytest.approx(0.25)
    assert auth.impersonation_round_pass("2.2") == pytest.approx(0.5)
    assert auth.impersonation_round_pass("2.1") == pytest.approx(0.625)


def test_full_simulation_agrees_with_round_pass_for_impersonation():
    # full transcripts, one round each, against the Born-rule per-round value
    rng = np.random.default_rng(11)
    trials = 3000
    ok = 0
    for _ in range(trials):
        tr = auth.simulate_protocol("2.3", [1, 0, 0, 1], "impersonate", rng)
        ok += tr.verdict == "accept"
    sigma = np.sqrt(0.25 * 0.75 / trials)
    assert abs(ok / trials - 0.25) < 4 * sigma


@pytest.mark.parametrize("which,key", [("2.1", [0, 1, 1, 0]), ("2.2", [1, 0, 1, 1]),
                                       ("2.3", [1, 1, 0, 0, 1, 0]), ("2.4", [1, 0, 0, 1])])
def test_honest_sessions_accept(which, key):
    rng = np.random.default_rng(5)
    for _ in range(20):
        assert auth.simulate_protocol(which, key, "none", rng).verdict == "accept"


def test_measure_resend_values():
    r = auth.measure_resend_analysis("2.1")
    assert r["I_AB"] == pytest.approx(1.0)
    assert r["I_AE"] == pytest.approx(0.311278, abs=1e-6)
    assert r["holevo_cap"] == pytest.approx(0.600876, abs=1e-6)
    r = auth.measure_resend_analysis("2.2")
    assert r["I_AB"] == pytest.approx(1.188722, abs=1e-6)
    assert r["I_AE"] == pytest.approx(0.5)
    assert r["holevo_cap"] == pytest.approx(1.0)


def test_fake_state_values_at_stated_optima():
    for which, target in (("2.3 single", 0.75), ("2.3 entangled", 0.5), ("2.4", 0.375)):
        r = auth.fake_state_detection(which, auth.OPTIMAL_FAKE[which])
        assert r["oracle"] == pytest.approx(target, abs=1e-10)
        assert r["closed_form"] == pytest.approx(r["oracle"], abs=1e-10)


def test_single_qubit_fake_state_can_go_lower_than_stated_optimum():
    r = auth.fake_state_detection("2.3 single", (1, 0, 1, 0))
    assert r["oracle"] == pytest.approx(0.5)


def test_fake_state_closed_forms_match_oracle_on_random_params():
    rng = np.random.default_rng(2)
    for which in ("2.3 single", "2.3 entangled"):
        for _ in range(20):
            r = auth.fake_state_detection(which, auth.random_fake_params(which, rng))
            assert r["closed_form"] == pytest.approx(r["oracle"], abs=1e-10)
    for _ in range(20):
        r = auth.fake_state_detection("2.4", auth.random_fake_params("2.4", rng))
        assert r["general_form"] == pytest.approx(r["oracle"], abs=1e-10)


def test_protocol_24_pass_can_exceed_stated_optimum():
    # orthogonal columns; |b1 - c1|^2 / 4 alone gives 1/2
    s = 0.5 ** 0.5
    x0, x1 = (1, 0, 0, 0), (0, s, -s, 0)
    r = auth.fake_state_detection("2.4", (x0, x1))
    assert r["oracle"] == pytest.approx(0.5)
    assert r["general_form"] == pytest.approx(0.5)


def test_tables_are_contained_in_enumeration():
    assert auth.table_26_rows() <= auth.TABLE_26
    assert auth.table_28_rows() == auth.TABLE_28


def test_intercepted_particles_carry_no_information():
    assert auth.intercept_holevo("2.3") == pytest.approx(0.0, abs=1e-12)


def test_bad_keys_rejected():
    rng = np.random.default_rng(0)
    with pytest.raises(auth.ConfigError):
        auth.simulate_protocol("2.2", [1, 0, 1], "none", rng)
    with pytest.raises(auth.ConfigError):
        auth.simulate_protocol("2.3", [1, 0], "none", rng)
    with pytest.raises(auth.ConfigError):
        auth.simulate_protocol("9.9", [1, 0], "none", rng)
