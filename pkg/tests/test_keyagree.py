import numpy as np
import pytest

from artifact import keyagree
from artifact.keyagree import AncillaParams


@pytest.mark.parametrize("variant", ["4.1", "4.2"])
def test_every_branch_agrees(variant):
    rounds = keyagree.exhaustive_rounds(variant)
    assert sum(p for _, p in rounds) == pytest.approx(1.0)
    for r, _ in rounds:
        assert r.key_alice == r.key_bob == r.key


def test_tables_equal_enumeration():
    got41 = {keyagree.table_row(r, "4.1") for r, _ in keyagree.exhaustive_rounds("4.1")}
    got42 = {keyagree.table_row(r, "4.2") for r, _ in keyagree.exhaustive_rounds("4.2")}
    assert got41 == keyagree.TABLE_41
    assert got42 == keyagree.TABLE_42


def test_fixed_alice_bit_leaves_key_uniform():
    for k_a in (0, 1):
        dist = keyagree.key_distribution_fixed_alice(k_a)
        assert dist[0] == pytest.approx(0.5)


def test_simulation_is_seeded():
    a = keyagree.simulate_cqka(50, rng=np.random.default_rng(9))
    b = keyagree.simulate_cqka(50, rng=np.random.default_rng(9))
    assert a == b
    assert all(r.key_alice == r.key_bob for r in a)


def test_impersonation_detection_is_one_half():
    rng = np.random.default_rng(1)
    for _ in range(30):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        r = keyagree.impersonation_detection(v / np.linalg.norm(v))
        assert r["oracle"] == pytest.approx(0.5, abs=1e-10)


def test_impersonation_rejects_unnormalised_state():
    with pytest.raises(ValueError):
        keyagree.impersonation_detection([1, 1, 0, 0])


def test_trivial_probe_is_undetectable():
    prm = AncillaParams(alpha_zeta=0.0, alpha_eta=0.0, beta_zeta=0.0, beta_eta=0.0)
    assert keyagree.attack_detection_oracle(prm) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("a", [0.2, 0.7, 1.2, np.pi / 2])
def test_oracle_matches_sign_corrected_detection_form(a):
    prm = AncillaParams(A_zeta=0.8, A_eta=0.6, alpha_zeta=a, alpha_eta=a / 2, beta_zeta=a / 3, beta_eta=a)
    assert keyagree.attack_detection_oracle(prm) == pytest.approx(
        keyagree.detection_closed_form(prm, sign=-1), abs=1e-12)


def test_symmetric_probes_give_half_sin_squared():
    a = 0.9
    prm = AncillaParams(alpha_zeta=a, alpha_eta=a, beta_zeta=a, beta_eta=a)
    assert keyagree.attack_detection_oracle(prm) == pytest.approx(np.sin(a) ** 2 / 2)


def test_success_probability_formula():
    assert keyagree.success_probability(6, 0.25) == pytest.approx(0.375**6)
    with pytest.raises(ValueError):
        keyagree.success_probability(3, 1.5)


def test_printed_eigenvalues_match_numerical():
    for eps in np.linspace(0.01, 0.45, 6):
        for a in np.linspace(0.1, np.pi / 2, 6):
            assert keyagree.eigen_check(eps, a) < 1e-12
            assert keyagree.sigma_eigen_check(eps, a) < 1e-12


def test_reproduction_root_at_right_angle():
    assert keyagree.dw_tolerable_qber(np.pi / 2) == pytest.approx(0.27, abs=5e-3)


def test_oracle_mode_has_no_root_at_right_angle():
    assert keyagree.dw_summary(np.pi / 2)["oracle"] is None


def test_alpha_domain():
    with pytest.raises(ValueError):
        keyagree.dw_tolerable_qber(0.0)
    with pytest.raises(ValueError):
        AncillaParams(alpha_zeta=2.0)
