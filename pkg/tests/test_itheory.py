import numpy as np
import pytest
from scipy.stats import entropy as scipy_entropy

from artifact import itheory
from artifact.itheory import JointDistribution, binary_entropy, holevo, mutual_information


def test_binary_entropy_against_scipy():
    for x in (0.01, 0.11, 0.25, 0.5, 0.9):
        assert binary_entropy(x) == pytest.approx(scipy_entropy([x, 1 - x], base=2))
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0


def test_binary_entropy_vectorised():
    out = binary_entropy(np.array([0.0, 0.5, 1.0]))
    assert np.allclose(out, [0, 1, 0])


def test_mutual_information_of_binary_symmetric_channel():
    e = 0.1
    p = np.array([[(1 - e) / 2, e / 2], [e / 2, (1 - e) / 2]])
    j = JointDistribution(("a", "b"), ((0, 1), (0, 1)), p)
    assert mutual_information(j, "a", "b") == pytest.approx(1 - binary_entropy(e))
    assert itheory.conditional_entropy(j, "a", "b") == pytest.approx(binary_entropy(e))


def test_joint_distribution_rejects_bad_tables():
    with pytest.raises(ValueError):
        JointDistribution(("a",), ((0, 1),), np.array([0.7, 0.7]))
    with pytest.raises(ValueError):
        JointDistribution(("a",), ((0, 1),), np.array([1.5, -0.5]))


def test_holevo_of_bb84_states_is_one_bit():
    kets = [np.array(v, dtype=complex) for v in ([1, 0], [0, 1], [1, 1], [1, -1])]
    kets = [k / np.linalg.norm(k) for k in kets]
    ens = [(0.25, np.outer(k, k.conj())) for k in kets]
    assert holevo(ens) == pytest.approx(1.0)


def test_holevo_of_two_nonorthogonal_states():
    # oracle: eigenvalues of the average are (1 +- |<a|b>|)/2
    th = 0.4
    a = np.array([1, 0], dtype=complex)
    b = np.array([np.cos(th), np.sin(th)], dtype=complex)
    lam = np.array([1 + np.cos(th), 1 - np.cos(th)]) / 2
    expected = -(lam * np.log2(lam)).sum()
    assert holevo([(0.5, np.outer(a, a)), (0.5, np.outer(b, b))]) == pytest.approx(expected)


def test_ensemble_weights_must_sum_to_one():
    with pytest.raises(ValueError):
        holevo([(0.4, np.eye(2) / 2), (0.4, np.eye(2) / 2)])
