import numpy as np
import pytest

from artifact import qcore
from artifact.qcore import CNOT, H, apply_gate, branches, ket, make_bell, partial_trace

s = 0.5 ** 0.5
phi_plus = [s, 0, 0, s]
phi_minus = [s, 0, 0, -s]
psi_plus = [0, s, s, 0]
psi_minus = [0, s, -s, 0]


def test_bell_codes_match_hand_written_vectors():
    for code, vec in (("00", phi_plus), ("01", phi_minus), ("10", psi_plus), ("11", psi_minus)):
        assert np.allclose(make_bell(code).amps, vec)


def test_pauli_codes_permute_bell_basis_from_phi_plus():
    # I|Phi+> = Phi+, X -> Psi+, iY = ZX -> Psi-, Z -> Phi-
    lands_on = {"00": "00", "01": "10", "10": "11", "11": "01"}
    for code, bell in lands_on.items():
        out = apply_gate(make_bell("00"), qcore.pauli(code), [0])
        assert abs(np.vdot(make_bell(bell).amps, out.amps)) == pytest.approx(1.0)


def test_h_then_cnot_makes_phi_plus():
    st = apply_gate(apply_gate(ket("00"), H, [0]), CNOT, [0, 1])
    assert np.allclose(st.amps, phi_plus)


def test_cnot_target_order_is_respected():
    st = apply_gate(ket("01"), CNOT, [1, 0])
    assert np.allclose(st.amps, ket("11").amps)


def test_bell_measurement_of_product_state_is_uniform():
    probs = {tag: p for tag, p, _ in branches(ket("00"), "bell", [0, 1])}
    assert probs == {"00": pytest.approx(0.5), "01": pytest.approx(0.5)}


def test_partial_trace_of_bell_state_is_maximally_mixed():
    rho = partial_trace(make_bell("11").density(), [1])
    assert np.allclose(rho.entries, np.eye(2) / 2)
    assert qcore.vn_entropy(rho) == pytest.approx(1.0)


def test_partial_trace_matches_einsum_oracle():
    rng = np.random.default_rng(3)
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    st = qcore.state(v)
    T = st.amps.reshape(2, 2, 2)
    oracle = np.einsum("aib,ajb->ij", T, T.conj())
    assert np.allclose(partial_trace(st.density(), [1]).entries, oracle)


def test_unnormalized_state_rejected():
    with pytest.raises(ValueError):
        qcore.StateVector((2,), np.array([1.0, 1.0]))


def test_non_unitary_gate_rejected():
    with pytest.raises(ValueError):
        apply_gate(ket("0"), np.diag([1.0, 0.0]) * 2, [0])


def test_xor_code():
    assert qcore.xor_code("10", "11") == "01"
    assert qcore.xor_code(3, (0, 1)) == "10"


def test_measure_samples_only_supported_branches():
    rng = np.random.default_rng(0)
    tags = {qcore.measure(ket("+"), "Z", [0], rng)[0] for _ in range(50)}
    assert tags == {"0", "1"}
    assert {qcore.measure(ket("1"), "Z", [0], rng)[0] for _ in range(10)} == {"1"}


def test_fidelity_of_orthogonal_states_is_zero():
    assert qcore.fidelity(ket("0"), ket("1").density()) == pytest.approx(0.0)
    assert qcore.fidelity(ket("+"), ket("0").density()) == pytest.approx(0.5)
