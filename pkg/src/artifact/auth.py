"""Quantum identity authentication: four protocols and their attack analyses.

Protocol labels follow the order in which the schemes are usually presented:

* "2.1" single qubits with decoys interleaved by a key-dependent rule,
* "2.2" single qubits, key-selected BB84 states, 4n-bit key,
* "2.3" Bell pairs plus a permuting third party (Charlie),
* "2.4" Bell pairs plus a CNOT-controlling third party.

Bell outcomes and Pauli operations use the 2-bit codes of ``qcore``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from . import qcore
from .itheory import JointDistribution, holevo, mutual_information
from .qcore import CNOT, KETS, PAULI, SQ2, apply_op, bell_vector, xor_code

BELL_MAT = np.array([bell_vector(c) for c in ("00", "01", "10", "11")])
CODES = ("00", "01", "10", "11")
STATES = ("0", "1", "+", "-")
BASIS_OF = {"0": "Z", "1": "Z", "+": "X", "-": "X"}
BASIS_STATES = {"Z": ("0", "1"), "X": ("+", "-")}


class ConfigError(ValueError):
    pass


def detect_probability(n: int) -> float:
    """Probability that an impersonator is caught after n rounds: 1 - (1/4)^n."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return 1.0 - 0.25**n


# ---------------------------------------------------------------------------
# Encoding tables for the single-qubit protocols


def prep_tables(which: str) -> dict:
    """Encoding and decoding rules as lookup tables."""
    if which == "2.1":
        return {
            "decoy": {0: ("0", "1"), 1: ("+", "-")},  # k_2i -> allowed decoy states
            "auth": {0: "0", 1: "-"},  # k_{2i-1} xor k_2i -> auth qubit
            "auth_basis": {0: "Z", 1: "X"},
            "auth_placement": {0: "after", 1: "before"},
            "decoy_basis": {0: "Z", 1: "X"},
        }
    if which == "2.2":
        return {
            # (xor, k_2i) -> prepared state
            "auth": {(0, 0): "0", (0, 1): "1", (1, 0): "+", (1, 1): "-"},
            "auth_basis": {0: "Z", 1: "X"},
            "bit_of": {"0": 0, "+": 0, "1": 1, "-": 1},
        }
    raise ValueError(f"no preparation table for protocol {which!r}")


def _born(state: str, outcome: str) -> float:
    return float(abs(np.vdot(KETS[outcome], KETS[state])) ** 2)


def _measure1(state: str, basis: str, rng) -> str:
    a, b = BASIS_STATES[basis]
    return a if rng.random() < _born(state, a) else b


def build_sequence_21(key, rng) -> list:
    """Alice's transmitted sequence for Protocol 2.1.

    Returns a list of slots ``(role, round_index, state)``.  Authentication
    qubits are inserted next to their decoy by the key rule; an insertion that
    would index past the end of the sequence is appended at the end.
    """
    tab = prep_tables("2.1")
    pairs = _pairs(key)
    seq = [("decoy", i, rng.choice(tab["decoy"][k2])) for i, (_, k2) in enumerate(pairs)]
    for i, (k1, k2) in enumerate(pairs):
        x = k1 ^ k2
        pos = next(j for j, s in enumerate(seq) if s[0] == "decoy" and s[1] == i)
        at = pos + 1 if tab["auth_placement"][x] == "after" else pos
        slot = ("auth", i, tab["auth"][x])
        if at >= len(seq):
            seq.append(slot)
        else:
            seq.insert(at, slot)
    return seq


def _pairs(key):
    bits = [int(b) for b in key]
    if len(bits) % 2 or not bits or any(b not in (0, 1) for b in bits):
        raise ConfigError("key must be a non-empty even-length bit list")
    return [(bits[2 * i], bits[2 * i + 1]) for i in range(len(bits) // 2)]


def _positions_21(key) -> list:
    """Receiver's reconstruction of (role, round) for each slot."""
    out = []
    for i, (k1, k2) in enumerate(_pairs(key)):
        if k1 ^ k2 == 0:
            out += [("decoy", i), ("auth", i)]
        else:
            out += [("auth", i), ("decoy", i)]
    return out


# ---------------------------------------------------------------------------
# Transcripts


@dataclass
class AuthTranscript:
    protocol: str
    rounds: list = field(default_factory=list)
    verdict: str = "accept"
    error_rate: float = 0.0

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "rounds": self.rounds,
            "verdict": self.verdict,
            "error_rate": self.error_rate,
        }


def _intercept(state: str, rng) -> str:
    """Measure-resend on one qubit: random basis, resend the outcome."""
    return _measure1(state, rng.choice(["Z", "X"]), rng)


def _forge_21(n, rng) -> list:
    """Impersonator's sequence: uniform guesses of auth state and placement."""
    seq = []
    for i in range(n):
        auth = ("auth", i, rng.choice(["0", "-"]))
        decoy = ("decoy", i, rng.choice(STATES))
        seq += [decoy, auth] if rng.random() < 0.5 else [auth, decoy]
    return seq


def _run_21(key, adversary, rng, threshold):
    tab = prep_tables("2.1")
    pairs = _pairs(key)
    n = len(pairs)
    if adversary == "impersonate":
        seq = _forge_21(n, rng)
    else:
        seq = build_sequence_21(key, rng)
    if adversary == "measure_resend":
        sent = [(r, i, _intercept(s, rng)) for r, i, s in seq]
    else:
        sent = list(seq)
    rounds = []
    auth_err = decoy_err = decoy_used = 0
    for slot, (role, i) in enumerate(_positions_21(key)):
        k1, k2 = pairs[i]
        if role == "auth":
            basis = tab["auth_basis"][k1 ^ k2]
            expect = tab["auth"][k1 ^ k2]
        else:
            basis = tab["decoy_basis"][k2]
            # the sender announces what it placed in this slot
            expect = seq[slot][2]
        got = _measure1(sent[slot][2], basis, rng)
        rec = {"slot": slot, "role": role, "round": i, "basis": basis, "outcome": got}
        if role == "auth":
            rec["ok"] = got == expect
            auth_err += got != expect
        elif BASIS_OF[expect] == basis:
            decoy_used += 1
            rec["ok"] = got == expect
            decoy_err += got != expect
        rounds.append(rec)
    qber = decoy_err / decoy_used if decoy_used else 0.0
    verdict = "accept" if auth_err / n <= threshold and qber <= threshold else "reject"
    return rounds, verdict, auth_err / n


def _run_22(key, adversary, rng, threshold):
    tab = prep_tables("2.2")
    bits = [int(b) for b in key]
    if len(bits) % 4 or not bits:
        raise ConfigError("Protocol 2.2 key length must be a multiple of 4")
    half = len(bits) // 2
    rounds = []
    errs = 0
    total = 0
    for direction, part in (("A->B", bits[:half]), ("B->A", bits[half:])):
        for i, (k1, k2) in enumerate(_pairs(part)):
            x = k1 ^ k2
            if adversary == "impersonate":
                g1, g2 = rng.integers(0, 2, size=2)
                sent = tab["auth"][(int(g1 ^ g2), int(g2))]
            else:
                sent = tab["auth"][(x, k2)]
                if adversary == "measure_resend":
                    sent = _intercept(sent, rng)
            got = _measure1(sent, tab["auth_basis"][x], rng)
            ok = tab["bit_of"][got] == k2
            errs += not ok
            total += 1
            rounds.append({"direction": direction, "round": i, "outcome": got, "ok": ok})
    rate = errs / total
    return rounds, ("accept" if rate <= threshold else "reject"), rate


# ---------------------------------------------------------------------------
# Bell-pair protocols


def _bell_outcomes(T: np.ndarray, pairs, z_qubits=()) -> dict:
    """Joint distribution of Bell measurements on ``pairs`` and Z on ``z_qubits``."""
    n = T.ndim
    order = [q for p in pairs for q in p] + list(z_qubits)
    rest = [q for q in range(n) if q not in order]
    T = np.transpose(T, order + rest)
    k = len(pairs)
    T = T.reshape((4,) * k + (2,) * len(z_qubits) + (-1,))
    for j in range(k):
        T = np.moveaxis(np.tensordot(BELL_MAT.conj(), T, axes=([1], [j])), 0, j)
    P = (np.abs(T) ** 2).sum(axis=-1)
    out = {}
    for idx in zip(*np.nonzero(P > 1e-14)):
        tag = tuple(CODES[i] for i in idx[:k]) + tuple(str(int(b)) for b in idx[k:])
        out[tag] = float(P[idx])
    return out


def _sample(dist: dict, rng):
    tags = sorted(dist)
    p = np.array([dist[t] for t in tags])
    return tags[rng.choice(len(tags), p=p / p.sum())]


def state_23(k_m, k_next, fake=None, alice=None) -> tuple:
    """Pre-measurement tensor for one Protocol-2.3 round.

    Returns (tensor, measured pairs).  Axes 0..3 are particles 1..4.
    ``alice`` = (g_m, g_next) overrides the sender's key knowledge, as an
    impersonator who guesses both elements would.
    With ``fake`` (single: (a,b,c,d); entangled: 4 amplitudes with
    kind='entangled') Eve attaches qubits 5, 6 by CNOT from particles 2, 4 and
    forwards them in place of 2 and 4.
    """
    g_m, g_next = (k_m, k_next) if alice is None else alice
    A = bell_vector(g_next)
    B = bell_vector(xor_code(k_m, k_next))
    psi = np.kron(A, B)
    pairs = ((0, 3), (1, 2))
    if fake is not None:
        kind, amps = fake
        if kind == "single":
            a, b, c, d = amps
            eve = np.kron([a, b], [c, d])
        else:
            eve = np.asarray(amps, dtype=complex)
        psi = np.kron(psi, eve)
        T = psi.reshape((2,) * 6)
        T = apply_op(T, CNOT, [1, 4])
        T = apply_op(T, CNOT, [3, 5])
        pairs = ((0, 5), (4, 2))
    else:
        T = psi.reshape((2,) * 4)
    T = apply_op(T, PAULI[qcore._code(g_m)], [0])
    T = apply_op(T, PAULI[qcore._code(k_m)], [2])
    return T, pairs


def outcomes_23(k_m, k_next, fake=None, alice=None) -> dict:
    """All (r14, r23) Bell outcome pairs with probabilities."""
    T, pairs = state_23(k_m, k_next, fake, alice)
    return _bell_outcomes(T, pairs)


def state_24(key, charlie_minus: bool, target: int) -> np.ndarray:
    """Pre-measurement tensor (particles 1..5) for one Protocol-2.4 round.

    ``target`` is 2 or 4: the particle Charlie's qubit controls.
    """
    b = bell_vector(key)
    c5 = KETS["-"] if charlie_minus else KETS["+"]
    T = np.kron(np.kron(b, b), c5).reshape((2,) * 5)
    T = apply_op(T, CNOT, [4, target - 1])
    U = PAULI[qcore._code(key)]
    T = apply_op(T, U, [0])
    T = apply_op(T, U, [2])
    return T


def accept_24(r14: str, r23: str, r5: str) -> bool:
    x = xor_code(r14, r23)
    return (r5 == "0" and x == "00") or (r5 == "1" and x == "10")


def outcomes_24(key, charlie_minus=True, target=2) -> dict:
    return _bell_outcomes(state_24(key, charlie_minus, target), ((0, 3), (1, 2)), (4,))


def _codes(key):
    bits = [int(b) for b in key]
    if len(bits) % 2 or not bits:
        raise ConfigError("key must be a list of 2-bit elements")
    return ["%d%d" % (bits[2 * i], bits[2 * i + 1]) for i in range(len(bits) // 2)]


def _run_23(key, adversary, rng, fake):
    codes = _codes(key)
    if len(codes) < 2:
        raise ConfigError("Protocol 2.3 needs n+1 >= 2 key elements")
    n = len(codes) - 1
    perm = rng.permutation(n)  # Charlie's permutation, announced later
    rounds = []
    errs = 0
    for m in range(n):
        k_m, k_next = codes[m], codes[m + 1]
        if adversary == "impersonate":
            g = (CODES[rng.integers(4)], CODES[rng.integers(4)])
            dist = outcomes_23(k_m, k_next, alice=g)
        elif adversary == "fake_state":
            dist = outcomes_23(k_m, k_next, fake)
        else:
            dist = outcomes_23(k_m, k_next)
        r14, r23 = _sample(dist, rng)
        ok = xor_code(r14, r23) == k_m
        errs += not ok
        rounds.append({"m": m, "position": int(perm[m]), "r14": r14, "r23": r23, "ok": ok})
    return rounds, errs / n


def _run_24(key, adversary, rng):
    codes = _codes(key)
    rounds = []
    errs = 0
    for i, k in enumerate(codes):
        minus = bool(rng.integers(2))
        target = 2 if rng.random() < 0.5 else 4
        if adversary == "impersonate":
            # the impersonator prepares a guessed Bell state in Alice's place
            g = CODES[rng.integers(4)]
            T = _impersonated_24(k, g, minus, target)
            dist = _bell_outcomes(T, ((0, 3), (1, 2)), (4,))
        else:
            dist = outcomes_24(k, minus, target)
        r14, r23, r5 = _sample(dist, rng)
        ok = accept_24(r14, r23, r5)
        errs += not ok
        rounds.append(
            {"round": i, "charlie": "-" if minus else "+", "target": target,
             "r14": r14, "r23": r23, "r5": r5, "ok": ok}
        )
    return rounds, errs / len(codes)


def _impersonated_24(key, guess, charlie_minus, target):
    a = bell_vector(guess)
    b = bell_vector(key)
    c5 = KETS["-"] if charlie_minus else KETS["+"]
    T = np.kron(np.kron(a, b), c5).reshape((2,) * 5)
    T = apply_op(T, CNOT, [4, target - 1])
    T = apply_op(T, PAULI[qcore._code(guess)], [0])
    T = apply_op(T, PAULI[qcore._code(key)], [2])
    return T


def simulate_protocol(which, key, adversary="none", rng=None, fake_params=None, threshold=0.0):
    """Run one authentication session and return its transcript.

    ``adversary`` is one of none, impersonate, measure_resend, fake_state.
    Verdicts use an error threshold (default 0: any error rejects).
    """
    rng = np.random.default_rng() if rng is None else rng
    tr = AuthTranscript(str(which))
    if which == "2.1":
        tr.rounds, tr.verdict, tr.error_rate = _run_21(key, adversary, rng, threshold)
        return tr
    if which == "2.2":
        tr.rounds, tr.verdict, tr.error_rate = _run_22(key, adversary, rng, threshold)
        return tr
    if which == "2.3":
        if adversary == "fake_state" and fake_params is None:
            raise ConfigError("fake_state adversary needs fake_params")
        tr.rounds, tr.error_rate = _run_23(key, adversary, rng, fake_params)
    elif which == "2.4":
        tr.rounds, tr.error_rate = _run_24(key, adversary, rng)
    else:
        raise ConfigError(f"unknown protocol {which!r}")
    tr.verdict = "accept" if tr.error_rate <= threshold else "reject"
    return tr


def impersonation_accept_rate(which: str, n: int, trials: int, rng) -> float:
    """Fraction of impersonation sessions of n rounds that pass verification.

    Uses per-round Born probabilities so that large trial counts stay cheap;
    ``simulate_protocol`` produces the same per-round statistics.
    """
    s = impersonation_round_pass(which)
    passed = (rng.random((trials, n)) < s).all(axis=1)
    return float(passed.mean())


def impersonation_round_pass(which: str) -> float:
    """Exact per-round probability that a uniformly guessing impersonator passes."""
    if which == "2.1":
        # placement right: own auth guess measured (right state 1, wrong 1/2);
        # placement wrong: a uniformly random decoy lands in the auth slot.
        right = 0.5 * 1 + 0.5 * _born("-", "0")
        wrong = np.mean([_born(s, "0") for s in STATES])
        return 0.5 * right + 0.5 * wrong
    if which == "2.2":
        return float(np.mean([_born(s, "0") for s in STATES]))
    if which == "2.3":
        return float(np.mean([
            sum(p for (a, b), p in outcomes_23("11", "00", alice=g).items()
                if xor_code(a, b) == "11")
            for g in iproduct(CODES, CODES)
        ]))
    if which == "2.4":
        tot = 0.0
        for g, minus, target in iproduct(CODES, (False, True), (2, 4)):
            T = _impersonated_24("10", g, minus, target)
            d = _bell_outcomes(T, ((0, 3), (1, 2)), (4,))
            tot += sum(p for t, p in d.items() if accept_24(*t))
        return tot / 16
    raise ValueError(which)


# ---------------------------------------------------------------------------
# Measure-resend information analysis


def measure_resend_joints(which: str, eve_policy: str = "random") -> tuple:
    """Joint distributions P(A, B) and P(A, E) by exhaustive branch enumeration.

    Alice's states are the authentication states of the protocol, sent with
    equal weight.  Eve measures in Z or X (uniformly, or always in the right
    basis with ``eve_policy='matched'``) and resends her outcome; Bob measures
    in the key-selected basis.
    """
    if which == "2.1":
        alice = ["0", "-"]
    elif which == "2.2":
        alice = list(STATES)
    else:
        raise ValueError(which)
    pab: dict = {}
    pae: dict = {}
    for a in alice:
        pa = 1 / len(alice)
        bob_basis = BASIS_OF[a]
        eve_bases = [bob_basis] if eve_policy == "matched" else ["Z", "X"]
        for eb in eve_bases:
            pb_ = pa / len(eve_bases)
            for e in BASIS_STATES[eb]:
                pe = pb_ * _born(a, e)
                if pe <= 0:
                    continue
                pae[(a, e)] = pae.get((a, e), 0.0) + pe
                for b in BASIS_STATES[bob_basis]:
                    w = pe * _born(e, b)
                    if w > 0:
                        pab[(a, b)] = pab.get((a, b), 0.0) + w
    labs = (tuple(alice), STATES)
    jab = JointDistribution.from_counts(("A", "B"), labs, pab)
    jae = JointDistribution.from_counts(("A", "E"), labs, pae)
    return jab, jae, alice


def measure_resend_analysis(which: str, eve_policy: str = "random") -> dict:
    jab, jae, alice = measure_resend_joints(which, eve_policy)
    ens = [(1 / len(alice), np.outer(KETS[a], KETS[a].conj())) for a in alice]
    return {
        "I_AB": mutual_information(jab, "A", "B"),
        "I_AE": mutual_information(jae, "A", "E"),
        "holevo_cap": holevo(ens),
        "H_A": jab.entropy("A"),
    }


# ---------------------------------------------------------------------------
# Fake-state attacks


def _normalized(v, tol=1e-12):
    v = np.asarray(v, dtype=complex)
    if abs(np.vdot(v, v).real - 1) > tol:
        raise ValueError("fake-state amplitudes are not normalized")
    return v


def fake_state_closed_form(which: str, params) -> float:
    if which == "2.3 single":
        a, b, c, d = params
        return 1 - 0.5 * (abs(a * c) ** 2 + abs(b * d) ** 2)
    if which == "2.3 entangled":
        a, b, c, d = params
        return 1 - 0.5 * (abs(a) ** 2 + abs(d) ** 2)
    if which == "2.4":
        x0 = params[0]
        return 0.25 * (abs(x0[1]) ** 2 + abs(x0[2]) ** 2) + 1 / 8
    raise ValueError(which)


def pass_probability_24(x0, x1) -> float:
    """Re-derived pass probability for arbitrary output columns x0, x1.

    Agrees with the state-vector oracle everywhere; the form above only
    covers the family with x1 = |0>.
    """
    _, b0, c0, _ = x0
    _, b1, c1, _ = x1
    return float((abs(b0) ** 2 + abs(c0) ** 2) / 4 - (b0 * np.conj(c0)).real / 4 + abs(b1 - c1) ** 2 / 4)


# Printed composite of the Protocol-2.4 fraudulent attack, qubit order
# (1, 2, e, 3, 4, 5), overall factor 1/(2 sqrt 2).  Each row lists the signed
# kets multiplying one of a0, b0, c0, d0, a1, b1, c1, d1.
_P24_TERMS = (
    ("a0", "+110110 -100111 -110000 +100001"),
    ("b0", "+111110 -101111 -111000 +101001"),
    ("c0", "-100110 -110111 -100000 +110001"),
    ("d0", "+101110 -111111 -101000 +111001"),
    ("a1", "-010110 +000111 +010000 +000001"),
    ("b1", "-011110 +001111 +011000 -001001"),
    ("c1", "-000110 +010111 +000000 -010001"),
    ("d1", "-001110 +011111 +001000 -011001"),
)


def composite_24(x0, x1) -> np.ndarray:
    """Six-qubit tensor of the printed fraudulent-attack composite."""
    coef = dict(zip(("a0", "b0", "c0", "d0"), x0))
    coef.update(zip(("a1", "b1", "c1", "d1"), x1))
    T = np.zeros((2,) * 6, dtype=complex)
    for name, kets in _P24_TERMS:
        for k in kets.split():
            sign = 1 if k[0] == "+" else -1
            T[tuple(int(ch) for ch in k[1:])] += sign * coef[name]
    return T / (2 * SQ2)


def fake_state_detection(which: str, params) -> dict:
    """Detection (2.3) or pass (2.4) probability from the state-vector oracle.

    ``params``: (a,b,c,d) for the 2.3 cases; (x0, x1) for 2.4 where
    x0 = (a0,b0,c0,d0) and x1 = (a1,b1,c1,d1) are Eve's output columns.
    """
    if which in ("2.3 single", "2.3 entangled"):
        if which == "2.3 single":
            a, b, c, d = params
            _normalized([a, b])
            _normalized([c, d])
            fake = ("single", (a, b, c, d))
        else:
            fake = ("entangled", tuple(_normalized(params)))
        dist = outcomes_23("11", "00", fake)
        p_nd = sum(p for (a_, b_), p in dist.items() if xor_code(a_, b_) == "11")
        return {"oracle": 1 - p_nd, "closed_form": fake_state_closed_form(which, params)}
    if which == "2.4":
        x0, x1 = (_normalized(v) for v in params)
        T = composite_24(x0, x1)
        # axes: 0=1, 1=2, 2=e, 3=3, 4=4, 5=5; Eve holds e in place of 1
        dist = _bell_outcomes(T, ((2, 4), (1, 3)), (5,))
        p_pass = sum(p for t, p in dist.items() if accept_24(*t))
        return {"oracle": p_pass, "closed_form": fake_state_closed_form(which, params),
                "general_form": pass_probability_24(x0, x1)}
    raise ValueError(which)


OPTIMAL_FAKE = {
    "2.3 single": (1 / SQ2, 1 / SQ2, 1 / SQ2, 1 / SQ2),
    "2.3 entangled": (1 / SQ2, 0, 0, 1 / SQ2),
    "2.4": ((0, 1 / SQ2, -1 / SQ2, 0), (1, 0, 0, 0)),
}


def random_fake_params(which: str, rng):
    def rv(k):
        v = rng.normal(size=k) + 1j * rng.normal(size=k)
        return v / np.linalg.norm(v)

    if which == "2.3 single":
        return tuple(rv(2)) + tuple(rv(2))
    if which == "2.3 entangled":
        return tuple(rv(4))
    if which == "2.4":
        # two orthonormal columns of a random unitary on (particle 2, ancilla)
        z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        q, r = np.linalg.qr(z)
        q = q * (np.diag(r) / np.abs(np.diag(r)))
        # column order in the basis |00>,|01>,|10>,|11> of (2, e) -> (c, d, a, b)
        u1, u0 = q[:, 0], q[:, 1]
        to_abcd = lambda u: (u[2], u[3], u[0], u[1])
        return (to_abcd(u1), to_abcd(u0))
    raise ValueError(which)


# ---------------------------------------------------------------------------
# Tables and intercept Holevo checks


TABLE_26 = {  # keys (11, 00): allowed (r14, r23) pairs
    ("11", "00"), ("10", "01"), ("01", "10"), ("00", "11"),
}

TABLE_28 = {  # (r14, r23, r5) rows
    ("00", "00", "0"), ("01", "01", "0"), ("10", "10", "0"), ("11", "11", "0"),
    ("00", "10", "1"), ("01", "11", "1"), ("10", "00", "1"), ("11", "01", "1"),
}


def table_26_rows(k_m="11", k_next="00") -> set:
    return set(outcomes_23(k_m, k_next))


def table_28_rows(key="10") -> set:
    rows = set()
    for minus in (False, True):
        for target in (2, 4):
            rows |= set(outcomes_24(key, minus, target))
    return rows


def intercept_holevo(which: str, particles=(1, 3)) -> float:
    """Holevo quantity of the reduced states Eve could intercept.

    For 2.3 the ensemble is the four key-pair composites reduced to
    particles 2 and 4; for 2.4 the four keys' composites reduced to the
    listed particles (default 2 and 4).
    """
    members = []
    if which == "2.3":
        for k_m, k_next in (("11", "00"), ("00", "01"), ("01", "10"), ("10", "11")):
            T, _ = state_23(k_m, k_next)
            members.append(T.reshape(-1))
        dims = (2, 2, 2, 2)
    elif which == "2.4":
        for k in CODES:
            members.append(state_24(k, True, 2).reshape(-1))
        dims = (2,) * 5
    else:
        raise ValueError(which)
    keep = [p for p in particles]
    ens = []
    for v in members:
        rho = qcore.StateVector(dims, v).density()
        ens.append((1 / len(members), qcore.partial_trace(rho, keep).entries))
    return holevo(ens)
