from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.stats import poisson

from artifact import keydist
from artifact.itheory import binary_entropy as h


@pytest.mark.parametrize("curve", ["SB1", "SB1_Y", "SB2", "SB2_X"])
def test_thresholds_agree_with_brentq(curve):
    oracle = brentq(lambda e: keydist.key_rate(curve, e), 1e-6, 0.5, xtol=1e-14)
    assert keydist.threshold(curve) == pytest.approx(oracle, abs=1e-10)


def test_sb1_thresholds_reproduce_stated_values():
    assert keydist.threshold("SB1") == pytest.approx(0.0314, abs=5e-4)
    assert keydist.threshold("SB1_Y") == pytest.approx(0.0617, abs=5e-4)


def test_sb2_formula_evaluated_as_written():
    e = 0.05
    assert keydist.key_rate("SB2", e) == pytest.approx(1 - h(1 / 6 + 2 * e / 3) - 2 * h(e))


def test_bisect_raises_without_sign_change():
    with pytest.raises(keydist.SolverError):
        keydist.bisect(lambda x: x * x + 1, -1, 1)


def test_rate_curve_starts_at_zero_error():
    rows = keydist.rate_curve("SB1", step=0.1)
    assert rows[0][0] == 0.0
    assert rows[0][1] == pytest.approx(keydist.key_rate("SB1", 0.0))


def test_sifting_rows_sum_to_one():
    rows = keydist.enumerate_rows()
    assert len(rows) == 28
    assert sum(rows.values()) == 1
    assert set(rows.values()) == {Fraction(1, 8), Fraction(1, 32), Fraction(1, 64)}


def test_intrinsic_errors():
    assert keydist.intrinsic_error("3.1") == 0
    assert keydist.intrinsic_error("3.2") == Fraction(1, 16)


def test_simulated_intrinsic_error_within_three_sigma():
    r = keydist.simulate_rounds("3.2", 200_000, np.random.default_rng(4))
    rate = r["errors"] / r["kept"]
    sigma = np.sqrt(0.0625 * 0.9375 / r["kept"])
    assert abs(rate - 0.0625) < 3 * sigma


def test_sigma_e_states_are_density_matrices():
    for E in (0.01, 0.1, 0.2):
        for k in (0, 1):
            s = keydist.sigma_e(E, k)
            assert np.trace(s).real == pytest.approx(1.0)
            assert np.linalg.eigvalsh(s).min() > -1e-12


def test_dw_lower_bound_at_zero_error_is_one_bit():
    assert keydist.dw_bounds(1e-9, q=0.0)["lower_rate"] == pytest.approx(1.0, abs=1e-6)


def test_upper_bound_below_lower_bound_at_moderate_error():
    b = keydist.dw_bounds(0.1)
    assert b["upper_rate"] <= b["lower_rate"] + 1e-9


def test_pns_p1_information_oracle():
    # oracle: multi-photon fraction over three quarters of the detected fraction
    mu, d = 0.1, 10.0
    eta = 10 ** (-d / 10)
    multi = 1 - poisson.pmf(0, mu) - poisson.pmf(1, mu)
    detected = 1 - np.exp(-mu * eta)
    assert keydist.eve_information("P1", mu, d) == pytest.approx(0.5 * multi / (0.75 * detected), rel=1e-9)


def test_pns_critical_values():
    p1 = keydist.pns_critical("P1")
    assert p1["delta_c_db"] == pytest.approx(15.05, abs=0.1)
    assert p1["l_c_km"] == pytest.approx(60.2, abs=0.5)
    p2 = keydist.pns_critical("P2")
    assert p2["delta_c_db"] == pytest.approx(23.75, abs=0.5)


def test_efficiencies():
    vals = {k: keydist.cabello_efficiency(*v) for k, v in keydist.EFFICIENCY_INPUTS.items()}
    assert vals["3.1"] == pytest.approx(0.2069, abs=1e-4)
    assert vals["3.2"] == pytest.approx(0.192, abs=1e-4)
    assert vals["SARG04"] == pytest.approx(0.125, abs=1e-4)
    assert keydist.protocol32_secret_bits() == pytest.approx(0.72, abs=5e-3)
    with pytest.raises(ValueError):
        keydist.cabello_efficiency(1, 0, 0)


def test_error_rate_domain():
    with pytest.raises(ValueError):
        keydist.key_rate("SB1", 0.7)
    with pytest.raises(ValueError):
        keydist.key_rate("XX", 0.1)
