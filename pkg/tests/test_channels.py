import numpy as np
import pytest

from artifact import channels
from artifact.channels import collective_error_probability, cqka_avg_fidelity, kraus_ops


@pytest.mark.parametrize("kind,params", [("AD", (0.3,)), ("PD", (0.7,)), ("NMDPH", (0.4, 0.2)),
                                         ("NMDPO", (0.5, 0.3))])
def test_kraus_sets_are_complete(kind, params):
    ch = kraus_ops(kind, *params)
    total = sum(K.conj().T @ K for K in ch.ops)
    assert np.allclose(total, np.eye(2))


def test_amplitude_damping_moves_excited_population():
    ch = kraus_ops("AD", 0.25)
    rho = np.diag([0.0, 1.0]).astype(complex)
    out = sum(K @ rho @ K.conj().T for K in ch.ops)
    assert out[0, 0].real == pytest.approx(0.25)


@pytest.mark.parametrize("eta", [0.0, 0.2, 0.5, 1.0])
def test_phase_damping_fidelity_is_one_minus_half_eta(eta):
    assert cqka_avg_fidelity(kraus_ops("PD", eta))["fidelity"] == pytest.approx(1 - eta / 2, abs=1e-12)


@pytest.mark.parametrize("eta", [0.0, 0.3, 0.8, 1.0])
def test_amplitude_damping_oracle_matches_rederived_form(eta):
    r = cqka_avg_fidelity(kraus_ops("AD", eta))
    assert r["fidelity"] == pytest.approx(r["closed_form"], abs=1e-12)


@pytest.mark.parametrize("a,p", [(0.0, 0.1), (0.5, 0.25), (1.0, 0.3)])
def test_nmdph_and_nmdpo_oracles_match_rederived_forms(a, p):
    for kind in ("NMDPH", "NMDPO"):
        if kind == "NMDPO" and 3 * a * p > 1:
            continue
        r = cqka_avg_fidelity(kraus_ops(kind, a, p))
        assert r["fidelity"] == pytest.approx(r["closed_form"], abs=1e-12)


def test_nmdph_endpoints():
    assert cqka_avg_fidelity(kraus_ops("NMDPH", 0.7, 0.0))["fidelity"] == pytest.approx(1.0)
    assert cqka_avg_fidelity(kraus_ops("NMDPH", 0.0, 0.5))["fidelity"] == pytest.approx(0.5)


def test_nmdpo_domain_enforced():
    with pytest.raises(ValueError):
        kraus_ops("NMDPO", 1.0, 0.45)


def test_out_of_range_parameters_rejected():
    with pytest.raises(ValueError):
        kraus_ops("AD", 1.5)
    with pytest.raises(ValueError):
        kraus_ops("bogus", 0.1)


def test_collective_error_probabilities():
    assert collective_error_probability("dephasing", 0.0) == 0.0
    assert collective_error_probability("dephasing", np.pi / 2) == pytest.approx(0.5)
    assert collective_error_probability("rotation", np.pi / 4) == pytest.approx(0.5)
    assert collective_error_probability("rotation", np.pi / 2) == pytest.approx(0.0)


def test_fidelity_curve_shape():
    rows = channels.fidelity_curve("AD", step=0.25)
    assert [r[0] for r in rows] == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert rows[0][1] == pytest.approx(1.0)
