import numpy as np
import pytest

from artifact import dl04game
from artifact.dl04game import PayoffWeights


@pytest.mark.parametrize("attack", dl04game.ATTACKS)
def test_joint_is_a_distribution(attack):
    for p in (0.0, 0.3, 1.0):
        for q in (0.0, 0.6, 1.0):
            P = dl04game.joint_array(attack, p, q)
            assert P.sum() == pytest.approx(1.0)
            assert P.min() >= 0


@pytest.mark.parametrize("attack", dl04game.ATTACKS)
def test_qber_is_off_diagonal_weight(attack):
    P = dl04game.joint_array(attack, 0.35, 0.8)
    assert float(dl04game.qber(attack, 0.35, 0.8)) == pytest.approx(P[0, 1].sum() + P[1, 0].sum())


@pytest.mark.parametrize("attack", dl04game.ATTACKS)
def test_vectorised_information_matches_itheory(attack):
    v = dl04game.informations(attack, 0.4, 0.3)
    s = dl04game.informations_scalar(attack, 0.4, 0.3)
    for k in v:
        assert float(v[k]) == pytest.approx(s[k], abs=1e-12)


@pytest.mark.parametrize("attack", dl04game.ATTACKS)
def test_corrected_closed_forms_match_distribution(attack):
    for p, q in ((0.2, 0.3), (0.7, 0.9)):
        cf = dl04game.closed_form_informations(attack, p, q)
        s = dl04game.informations_scalar(attack, p, q)
        # the E2 and E4 forms carry h(1/4) rounded to six decimals
        for k in ("I_AB", "I_AE", "I_BE"):
            assert cf[k] == pytest.approx(s[k], abs=1e-6)


@pytest.mark.parametrize("attack", ["E1", "E2", "E3"])
def test_gate_level_states_reproduce_joint(attack):
    rep = dl04game.verify_attack_states(attack, grid=11)
    assert rep.residual < 1e-9


def test_known_ket_typo_is_flagged():
    rep = dl04game.verify_attack_states("E2", grid=5)
    assert rep.flagged_kets
    assert max(rep.flagged_kets.values()) > 0.1


def test_payoff_sum_identity():
    g = np.linspace(0, 1, 11)
    P, Q = np.meshgrid(g, g)
    for a in dl04game.ATTACKS:
        pa, _, pe = dl04game.payoff_arrays(a, P, Q)
        assert np.allclose(pa + pe, 0.25, atol=1e-14)


def test_weights_validated():
    with pytest.raises(ValueError):
        PayoffWeights(a=0.5)
    with pytest.raises(ValueError):
        dl04game.payoff("E1", 1.5, 0.5)
    with pytest.raises(ValueError):
        dl04game.payoff("E9", 0.5, 0.5)


def test_best_response_follows_residual_sign():
    game = ("E1", "E3")
    ra, _, _ = dl04game.residuals(game, 0.3, 0.5, 0.4)
    lo, hi = dl04game.best_response(game, "A", p=0.3, r=0.4)
    assert (lo, hi) == ((1.0, 1.0) if ra > 0 else (0.0, 0.0))
    with pytest.raises(ValueError):
        dl04game.best_response(game, "A", p=0.3)


def test_table_points_reproduce_payoffs_and_epsilon():
    for game in dl04game.GAMES:
        for row in dl04game.table_check(game):
            assert row["P_A"] == pytest.approx(row["P_A_table"], abs=5e-4)
            assert row["expected_qber"] == pytest.approx(row["epsilon_table"], abs=5e-4)


def test_find_equilibria_points_satisfy_indifference():
    eq = dl04game.find_equilibria(("E1", "E4"), grid_n=50)
    assert eq
    for e in eq:
        assert max(abs(x) for x in e.residuals) < 1e-4
    assert [(e.p, e.q, e.r) for e in eq] == sorted((e.p, e.q, e.r) for e in eq)


def test_find_equilibria_grid_floor():
    with pytest.raises(ValueError):
        dl04game.find_equilibria(("E1", "E2"), grid_n=10)
