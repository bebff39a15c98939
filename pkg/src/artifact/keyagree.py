"""Controlled quantum key agreement (CQKA) and its two-party variant (QKA).

Register order is (A, C1, C2, B).  Charlie prepares Phi+ (k_C = 0) or
Phi- (k_C = 1) on (C1, C2); Alice and Bob prepare Z-basis qubits A and B,
apply CNOT C1 -> A and C2 -> B, and Bell-measure (A, C1) and (C2, B).
Bob announces k_B = 0 for Phi+/Psi- and 1 for Phi-/Psi+.  Each party
infers the other's outcome from the public bits, and the key bit is the
parity of r_A xor r_B.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

import numpy as np

from .auth import _bell_outcomes
from .keydist import SolverError, bisect
from .itheory import binary_entropy as h
from .qcore import CNOT, KETS, apply_op, bell_vector, entropy_of_spectrum, vn_entropy, xor_code

KB_OF = {"00": 0, "11": 0, "01": 1, "10": 1}


def _parity(code: str) -> int:
    return int(code[0]) ^ int(code[1])


def final_state(k_c: int, k_a: int, b: int, pair=None) -> np.ndarray:
    """Tensor on (A, C1, C2, B) after both CNOTs.

    ``pair`` replaces Charlie's Bell state by arbitrary amplitudes
    (a, b, c, d) on |00>, |01>, |10>, |11> of (C1, C2).
    """
    cc = bell_vector("00" if k_c == 0 else "01") if pair is None else np.asarray(pair, complex)
    psi = np.kron(np.kron(KETS[str(k_a)], cc), KETS[str(b)])
    T = psi.reshape(2, 2, 2, 2)
    T = apply_op(T, CNOT, [1, 0])
    T = apply_op(T, CNOT, [2, 3])
    return T


def outcomes(k_c, k_a, b, pair=None) -> dict:
    """{(r_A, r_B): probability} for Bell measurements on (A,C1) and (C2,B)."""
    return _bell_outcomes(final_state(k_c, k_a, b, pair), ((0, 1), (2, 3)))


@dataclass(frozen=True)
class AgreementRound:
    k_c: int
    k_a: int
    k_b: int
    r_a: str
    r_b: str
    key_alice: int
    key_bob: int

    @property
    def key(self) -> int:
        return _parity(xor_code(self.r_a, self.r_b))


def inference_maps() -> tuple:
    """Each party's lookup from public bits plus own outcome to the other's outcome.

    Built from the honest outcome supports; raises if an inference is ambiguous.
    """
    alice, bob = {}, {}
    for k_c, k_a, b in iproduct((0, 1), (0, 1), (0, 1)):
        for (ra, rb) in outcomes(k_c, k_a, b):
            kb = KB_OF[rb]
            for m, key, val in ((alice, (k_c, k_a, kb, ra), rb), (bob, (k_c, k_a, kb, rb), ra)):
                if m.setdefault(key, val) != val:
                    raise RuntimeError(f"ambiguous inference at {key}")
    return alice, bob


_ALICE_MAP, _BOB_MAP = inference_maps()


def agree(k_c, k_a, r_a, r_b) -> AgreementRound:
    kb = KB_OF[r_b]
    rb_guess = _ALICE_MAP[(k_c, k_a, kb, r_a)]
    ra_guess = _BOB_MAP[(k_c, k_a, kb, r_b)]
    return AgreementRound(
        k_c, k_a, kb, r_a, r_b,
        _parity(xor_code(r_a, rb_guess)),
        _parity(xor_code(ra_guess, r_b)),
    )


def simulate_cqka(n: int, variant: str = "4.1", rng=None, alice_bits=None) -> list:
    """Run n rounds.  Variant "4.2" is the two-party scheme where k_C = k_A."""
    rng = np.random.default_rng() if rng is None else rng
    if variant not in ("4.1", "4.2"):
        raise ValueError(f"unknown variant {variant!r}")
    rounds = []
    for i in range(n):
        k_a = int(rng.integers(2)) if alice_bits is None else int(alice_bits[i])
        k_c = k_a if variant == "4.2" else int(rng.integers(2))
        b = int(rng.integers(2))
        dist = outcomes(k_c, k_a, b)
        tags = sorted(dist)
        ra, rb = tags[rng.choice(len(tags), p=np.array([dist[t] for t in tags]))]
        rounds.append(agree(k_c, k_a, ra, rb))
    return rounds


def exhaustive_rounds(variant: str = "4.1") -> list:
    """Every (k_C, k_A, Bob-prep, Bell branch) combination with its probability."""
    out = []
    for k_c, k_a, b in iproduct((0, 1), (0, 1), (0, 1)):
        if variant == "4.2" and k_c != k_a:
            continue
        for (ra, rb), p in sorted(outcomes(k_c, k_a, b).items()):
            out.append((agree(k_c, k_a, ra, rb), p / (8 if variant == "4.1" else 4)))
    return out


# Printed rows: (k_C, k_A, k_B, r_A, r_B, r_A xor r_B, K)
TABLE_41 = {
    (0, 0, 0, "00", "00", "00", 0), (0, 0, 1, "01", "01", "00", 0),
    (0, 0, 1, "00", "10", "10", 1), (0, 0, 0, "01", "11", "10", 1),
    (0, 1, 0, "10", "00", "10", 1), (0, 1, 1, "11", "01", "10", 1),
    (0, 1, 1, "10", "10", "00", 0), (0, 1, 0, "11", "11", "00", 0),
    (1, 0, 1, "00", "01", "01", 1), (1, 0, 0, "01", "00", "01", 1),
    (1, 0, 0, "00", "11", "11", 0), (1, 0, 1, "01", "10", "11", 0),
    (1, 1, 1, "10", "01", "11", 0), (1, 1, 0, "11", "00", "11", 0),
    (1, 1, 0, "10", "11", "01", 1), (1, 1, 1, "11", "10", "01", 1),
}
# (k_A, k_B, r_A, r_B, xor, K); k_C = k_A
TABLE_42 = {
    (0, 0, "00", "00", "00", 0), (0, 1, "01", "01", "00", 0),
    (0, 1, "00", "10", "10", 1), (0, 0, "01", "11", "10", 1),
    (1, 1, "10", "01", "11", 0), (1, 0, "11", "00", "11", 0),
    (1, 0, "10", "11", "01", 1), (1, 1, "11", "10", "01", 1),
}


def table_row(rnd: AgreementRound, variant="4.1") -> tuple:
    x = xor_code(rnd.r_a, rnd.r_b)
    if variant == "4.1":
        return (rnd.k_c, rnd.k_a, rnd.k_b, rnd.r_a, rnd.r_b, x, rnd.key)
    return (rnd.k_a, rnd.k_b, rnd.r_a, rnd.r_b, x, rnd.key)


def key_distribution_fixed_alice(k_a: int, variant: str = "4.1") -> dict:
    """Exact key distribution when Alice fixes her bit and everyone else is honest."""
    dist = {0: 0.0, 1: 0.0}
    for rnd, p in exhaustive_rounds(variant):
        if rnd.k_a == k_a:
            dist[rnd.key] += p
    tot = sum(dist.values())
    return {k: v / tot for k, v in dist.items()}


# ---------------------------------------------------------------------------
# Impersonation of Charlie


def impersonation_detection(amps) -> dict:
    """Detection probability when Eve sends an arbitrary two-qubit state.

    For each of the 8 (k_C, Alice, Bob) cases the round is flagged when the
    outcome pair lies outside the honest support for the announced k_C.
    Returns the oracle average and the closed form 1/2.
    """
    v = np.asarray(amps, dtype=complex)
    if v.shape != (4,) or abs(np.vdot(v, v).real - 1) > 1e-12:
        raise ValueError("fake-state amplitudes must be 4 numbers with unit norm")
    tot = 0.0
    for k_c, k_a, b in iproduct((0, 1), (0, 1), (0, 1)):
        honest = set(outcomes(k_c, k_a, b))
        got = outcomes(k_c, k_a, b, pair=v)
        tot += sum(p for t, p in got.items() if t not in honest)
    return {"oracle": tot / 8, "closed_form": 0.5}


# ---------------------------------------------------------------------------
# Collective attack with entangling probes


@dataclass(frozen=True)
class AncillaParams:
    A_zeta: float = 1.0
    A_eta: float = 1.0
    alpha_zeta: float = np.pi / 2
    alpha_eta: float = np.pi / 2
    beta_zeta: float = np.pi / 2
    beta_eta: float = np.pi / 2

    def __post_init__(self):
        for a in (self.A_zeta, self.A_eta):
            if not (0 <= a <= 1):
                raise ValueError("amplitudes must lie in [0, 1]")
        for ang in (self.alpha_zeta, self.alpha_eta, self.beta_zeta, self.beta_eta):
            if not (-1e-12 <= ang <= np.pi / 2 + 1e-12):
                raise ValueError("angles must lie in [0, pi/2]")

    @property
    def B_zeta(self):
        return np.sqrt(1 - self.A_zeta**2)

    @property
    def B_eta(self):
        return np.sqrt(1 - self.A_eta**2)


def _probe_states(alpha, beta):
    """Probe kets zeta_00, zeta_01, zeta_10, zeta_11 with the stated overlaps."""
    e = np.eye(4)
    z00 = e[0]
    z11 = np.cos(alpha) * e[0] + np.sin(alpha) * e[1]
    z01 = e[2]
    z10 = np.cos(beta) * e[2] + np.sin(beta) * e[3]
    return {"00": z00, "01": z01, "10": z10, "11": z11}


def _probe_unitary_action(A, B, probes):
    """Map |x>|probe> -> sum over (out, probe state) for x in {0, 1}."""
    return {
        0: [(0, A, probes["00"]), (1, B, probes["01"])],
        1: [(0, B, probes["10"]), (1, A, probes["11"])],
    }


def attacked_state(k_c, k_a, b, prm: AncillaParams) -> np.ndarray:
    """Tensor on (A, C1, C2, B, zeta, eta) after the probes and both CNOTs."""
    cc = bell_vector("00" if k_c == 0 else "01").reshape(2, 2)
    Z = _probe_unitary_action(prm.A_zeta, prm.B_zeta, _probe_states(prm.alpha_zeta, prm.beta_zeta))
    E = _probe_unitary_action(prm.A_eta, prm.B_eta, _probe_states(prm.alpha_eta, prm.beta_eta))
    T = np.zeros((2, 2, 2, 2, 4, 4), dtype=complex)
    for x1, x2 in iproduct((0, 1), (0, 1)):
        if cc[x1, x2] == 0:
            continue
        for y1, a1, z in Z[x1]:
            for y2, a2, w in E[x2]:
                amp = cc[x1, x2] * a1 * a2
                T[k_a, y1, y2, b] += amp * np.einsum("i,j->ij", z, w)
    T = apply_op(T, CNOT, [1, 0])
    T = apply_op(T, CNOT, [2, 3])
    return T


def attack_detection_oracle(prm: AncillaParams) -> float:
    """Average probability of an outcome pair outside the honest support."""
    tot = 0.0
    for k_c, k_a, b in iproduct((0, 1), (0, 1), (0, 1)):
        honest = set(outcomes(k_c, k_a, b))
        T = attacked_state(k_c, k_a, b, prm)
        got = _bell_outcomes(T, ((0, 1), (2, 3)))
        tot += sum(p for t, p in got.items() if t not in honest)
    return tot / 8


def detection_closed_form(prm: AncillaParams, sign: int = +1) -> float:
    """Average detection probability for general probe parameters.

    ``sign=+1`` evaluates the expression with 1 + cos*cos terms as printed;
    ``sign=-1`` gives 1 - cos*cos, which agrees with the state-vector oracle.
    """
    Az, Bz, Ae, Be = prm.A_zeta, prm.B_zeta, prm.A_eta, prm.B_eta
    ca_z, cb_z = np.cos(prm.alpha_zeta), np.cos(prm.beta_zeta)
    ca_e, cb_e = np.cos(prm.alpha_eta), np.cos(prm.beta_eta)
    return 0.5 * (
        Az**2 * Ae**2 * (1 + sign * ca_z * ca_e)
        + Az**2 * Be**2 * (1 + sign * ca_z * cb_e)
        + Bz**2 * Ae**2 * (1 + sign * cb_z * ca_e)
        + Bz**2 * Be**2 * (1 + sign * cb_z * cb_e)
    )


def d_printed(alpha: float) -> float:
    """Minimal detection probability as printed: (1 + cos^2 a)/2."""
    return 0.5 * (1 + np.cos(alpha) ** 2)


def eve_key_error(alpha_zeta: float, alpha_eta: float) -> float:
    """Eve's key error with two independent discrimination errors (compensating pair included)."""
    pz, pe = (1 + np.sin(alpha_zeta)) / 2, (1 + np.sin(alpha_eta)) / 2
    return 1 - (pz * pe + (1 - pz) * (1 - pe))


def eve_information(alpha: float) -> float:
    return 0.5 * (1 - h((1 - np.sin(alpha) ** 2) / 2))


def success_probability(n: int, d: float) -> float:
    """Probability that Eve learns an n-bit key undetected: [(1-d)/2]^n."""
    if not (0 <= d <= 1) or n < 0:
        raise ValueError("need 0 <= d <= 1 and n >= 0")
    return ((1 - d) / 2) ** n


def collective_attack_stats(prm: AncillaParams, n: int = 6) -> dict:
    d_pr = detection_closed_form(prm)
    d_or = attack_detection_oracle(prm)
    out = {
        "d_printed": d_pr,
        "d_oracle": d_or,
        "d_corrected_form": detection_closed_form(prm, sign=-1),
        "Q_EK": eve_key_error(prm.alpha_zeta, prm.alpha_eta),
        "I": eve_information(prm.alpha_zeta) if prm.alpha_zeta == prm.alpha_eta else None,
        "Pr_printed": success_probability(n, d_pr),
        "Pr_oracle": success_probability(n, d_or),
    }
    return {k: (None if v is None else float(v)) for k, v in out.items()}


# ---------------------------------------------------------------------------
# Devetak-Winter tolerable error


def _printed_eigs(eps: float, alpha: float) -> tuple:
    c = np.cos(alpha)
    r = abs(1 - 2 * eps + c)
    rho = (0.5 * (1 + c - 2 * eps * c - r), 0.5 * (1 + c - 2 * eps * c + r))
    s = abs(1 - 2 * eps + (1 - 2 * eps + 2 * eps**2) * c)
    base = 1 - 2 * eps + 2 * eps**2 + c - 2 * eps * c
    sig = (0.25 * (base - s), 0.25 * (base + s))
    return rho, sig


def _zeta_pair(alpha):
    return np.array([1.0, 0.0]), np.array([np.cos(alpha), np.sin(alpha)])


def rho_e_printed(eps: float, alpha: float) -> np.ndarray:
    """Eve's unconditioned state as printed (trace 1 + (1-2 eps) cos a)."""
    z0, z1 = _zeta_pair(alpha)
    P = lambda u, v: np.outer(u, v)
    return 0.5 * ((P(z0, z0) + P(z1, z1)) + (1 - 2 * eps) * (P(z0, z1) + P(z1, z0)))


def sigma_printed(eps: float, alpha: float) -> np.ndarray:
    z0, z1 = _zeta_pair(alpha)
    P = lambda u, v: np.outer(u, v)
    a = (eps**2 + (1 - eps) ** 2) / 4
    b = ((1 - eps) ** 2 - eps**2) / 4
    return a * (P(z0, z0) + P(z1, z1)) + b * (P(z0, z1) + P(z1, z0))


def dw_rate(eps: float, alpha: float, mode: str = "reproduction") -> float:
    """r_DW = 1 - h(eps) - [S(rho_E) - (S(sigma0) + S(sigma1))/2].

    reproduction: printed eigenvalue expressions used as they stand.
    oracle: Eve's states derived from the error-weighted composite, each
    conditional state normalized before taking entropies.
    """
    if mode == "reproduction":
        rho, sig = _printed_eigs(eps, alpha)
        s_rho = entropy_of_spectrum(rho)
        s_sig = entropy_of_spectrum(sig)
        return 1 - h(eps) - (s_rho - s_sig)
    if mode == "oracle":
        rho_e, conds = _oracle_states(eps, alpha)
        chi = vn_entropy(rho_e) - sum(p * vn_entropy(s) for p, s in conds)
        return 1 - h(eps) - chi
    raise ValueError(f"unknown mode {mode!r}")


def _oracle_states(eps, alpha):
    """Eve's states from the composite with error weight eps.

    Branches (Alice, Bob) -> (amplitude, Eve ket): no-error pairs carry
    zeta00 + zeta11, error pairs zeta00 - zeta11; k_B follows Bob's
    Psi+/Psi- outcome.
    """
    z0, z1 = _zeta_pair(alpha)
    plus, minus = z0 + z1, z0 - z1
    branches = [
        ("00", "10", np.sqrt((1 - eps) / 4), plus),
        ("00", "11", np.sqrt(eps / 4), minus),
        ("01", "10", np.sqrt(eps / 4), minus),
        ("01", "11", np.sqrt((1 - eps) / 4), plus),
    ]
    vecs = {}
    norm = 0.0
    for ra, rb, amp, v in branches:
        w = amp * v
        norm += float(np.vdot(w, w).real)
        vecs[(ra, rb)] = w
    rho_e = sum(np.outer(w, w.conj()) for w in vecs.values()) / norm
    conds = []
    for kb in (0, 1):
        m = sum(np.outer(w, w.conj()) for (ra, rb), w in vecs.items() if KB_OF[rb] == kb)
        p = float(np.trace(m).real) / norm
        if p > 0:
            conds.append((p, m / np.trace(m).real))
    return rho_e, conds


def dw_tolerable_qber(alpha: float, mode: str = "reproduction") -> float:
    if not (0 < alpha <= np.pi / 2 + 1e-12):
        raise ValueError("alpha must lie in (0, pi/2]")
    return bisect(lambda e: dw_rate(e, alpha, mode), 1e-9, 0.5 - 1e-9, tol=1e-12)


def dw_summary(alpha: float) -> dict:
    """Roots in both modes; a mode without a sign change reports None."""
    out = {"alpha": alpha}
    for mode in ("reproduction", "oracle"):
        try:
            out[mode] = dw_tolerable_qber(alpha, mode)
        except SolverError:
            out[mode] = None
    return out


def eigen_check(eps: float, alpha: float) -> float:
    """Max deviation between numerical and printed eigenvalues of rho_E."""
    num = np.sort(np.linalg.eigvalsh(rho_e_printed(eps, alpha)))
    pr = np.sort(np.array(_printed_eigs(eps, alpha)[0]))
    return float(np.abs(num - pr).max())


def sigma_eigen_check(eps: float, alpha: float) -> float:
    num = np.sort(np.linalg.eigvalsh(sigma_printed(eps, alpha)))
    pr = np.sort(np.array(_printed_eigs(eps, alpha)[1]))
    return float(np.abs(num - pr).max())
