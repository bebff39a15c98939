"""Two-way single-photon QKD: sifting, key-rate curves, Eve's purification
states and secret-key-rate bounds, photon-number-splitting distances and
efficiency bookkeeping.

States are labelled by their kets: "0", "1" (Z basis), "+", "-" (X basis).
Protocol "3.1" discloses the basis value J for a subset of positions;
protocol "3.2" discloses a sign value M instead and accepts a small
intrinsic error rate in exchange for keeping more positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.stats import poisson

from .itheory import binary_entropy as h
from .qcore import vn_entropy

STATES = ("0", "1", "+", "-")
BASIS = {"0": 0, "1": 0, "+": 1, "-": 1}  # J value
BIT = {"0": 0, "1": 1, "+": 0, "-": 1}  # sign / M value
KET_OF = {(0, 0): "0", (0, 1): "1", (1, 0): "+", (1, 1): "-"}


class SolverError(RuntimeError):
    """A root or critical point could not be bracketed."""


def _flip_basis(s: str) -> str:
    return KET_OF[(1 - BASIS[s], BIT[s])]


def _orth(s: str) -> str:
    return KET_OF[(BASIS[s], 1 - BIT[s])]


# ---------------------------------------------------------------------------
# Sifting


@dataclass(frozen=True)
class SiftRecord:
    s_a: str
    r_b1: str
    r_b2: str
    announced: tuple | None  # ("J", v) or ("M", v) or None
    result: str | None  # determined state of Bob's measurement, None = discard


def sift(which: str, s_a: str, r_b1: str, r_b2: str, bob: str) -> SiftRecord:
    """Alice's inference of Bob's first-round result.

    ``r_b1``/``r_b2`` are Alice's readings of the two returned sequences and
    ``bob`` is Bob's actual result on S_A; Bob uses it only to answer the
    public J or M query.
    """
    for s in (s_a, r_b1, r_b2, bob):
        if s not in STATES:
            raise ValueError(f"unknown state {s!r}")
    if which == "3.1":
        if r_b1 == _orth(s_a):
            # Bob's basis differed; the same-basis reading of S_B2 carries his bit.
            return SiftRecord(s_a, r_b1, r_b2, None, KET_OF[(1 - BASIS[s_a], BIT[r_b2])])
        if BIT[r_b2] == BIT[r_b1]:
            j = BASIS[bob]
            res = s_a if j == BASIS[s_a] else None
            return SiftRecord(s_a, r_b1, r_b2, ("J", j), res)
        return SiftRecord(s_a, r_b1, r_b2, None, None)
    if which == "3.2":
        if r_b1 == _orth(s_a):
            return SiftRecord(s_a, r_b1, r_b2, None, KET_OF[(1 - BASIS[s_a], BIT[r_b2])])
        m = BIT[bob]
        other = 1 - BASIS[s_a]
        if m != BIT[s_a]:
            res = KET_OF[(other, m)]
        elif BIT[r_b2] == BIT[s_a]:
            res = s_a
        else:
            res = KET_OF[(other, m)]
        return SiftRecord(s_a, r_b1, r_b2, ("M", m), res)
    raise ValueError(f"unknown protocol {which!r}")


def _born(state: str, basis: int):
    """Outcome distribution of measuring ``state`` in a basis (0=Z, 1=X)."""
    if BASIS[state] == basis:
        return {state: Fraction(1)}
    return {KET_OF[(basis, 0)]: Fraction(1, 2), KET_OF[(basis, 1)]: Fraction(1, 2)}


def enumerate_rows() -> dict:
    """Exact probabilities of every (S_A, S_B1, r_B1, r_B2) event, honest channel."""
    rows: dict = {}
    for s_a in STATES:
        for bb in (0, 1):
            for bob, p1 in _born(s_a, bb).items():
                w = Fraction(1, 4) * Fraction(1, 2) * p1
                for r1, p2 in _born(bob, BASIS[s_a]).items():
                    second = 1 - BASIS[s_a] if r1 == s_a else BASIS[s_a]
                    for r2, p3 in _born(_flip_basis(bob), second).items():
                        key = (s_a, bob, r1, r2)
                        rows[key] = rows.get(key, 0) + w * p2 * p3
    return rows


def intrinsic_error(which: str) -> Fraction:
    """Probability per round that the determined result differs from Bob's."""
    tot = Fraction(0)
    for (s_a, bob, r1, r2), p in enumerate_rows().items():
        rec = sift(which, s_a, r1, r2, bob)
        if rec.result is not None and BIT_KEY[which](rec.result) != BIT_KEY[which](bob):
            tot += p
    return tot


BIT_KEY = {
    "3.1": lambda s: s,  # error means a different state
    "3.2": lambda s: BASIS[s],  # key bit: 0 for Z states, 1 for X states
}


def simulate_rounds(which: str, n: int, rng) -> dict:
    """Honest-channel Monte-Carlo of n rounds.

    Returns counts keyed by (S_A, S_B1, r_B1, r_B2), the number of kept
    positions and the number of intrinsic errors.
    """
    if n <= 0:
        return {"n": 0, "rows": {}, "kept": 0, "errors": 0}
    s_a = rng.integers(0, 4, n)
    bb = rng.integers(0, 2, n)
    coin = rng.integers(0, 2, (3, n))
    ba, va = s_a // 2, s_a % 2
    # Bob's result on S_A
    vb = np.where(bb == ba, va, coin[0])
    # Alice reads S_B1 in her basis
    v1 = np.where(bb == ba, vb, coin[1])
    # Alice reads S_B2 (Bob's bit in the flipped basis)
    b2 = np.where(v1 == va, 1 - ba, ba)
    v2 = np.where(b2 == 1 - bb, vb, coin[2])
    codes = ((ba * 2 + va) * 4 + (bb * 2 + vb)) * 16 + (ba * 2 + v1) * 4 + (b2 * 2 + v2)
    counts = np.bincount(codes, minlength=256)
    lab = [KET_OF[(i // 2, i % 2)] for i in range(4)]
    rows = {}
    kept = errors = 0
    for c in np.nonzero(counts)[0]:
        sa, bob = lab[c // 64], lab[(c // 16) % 4]
        r1, r2 = lab[(c // 4) % 4], lab[c % 4]
        rows[(sa, bob, r1, r2)] = int(counts[c])
        rec = sift(which, sa, r1, r2, bob)
        if rec.result is not None:
            kept += int(counts[c])
            if BIT_KEY[which](rec.result) != BIT_KEY[which](bob):
                errors += int(counts[c])
    return {"n": n, "rows": rows, "kept": kept, "errors": errors}


# ---------------------------------------------------------------------------
# Key-rate curves


def _check_E(E):
    if not (0 <= E <= 0.5):
        raise ValueError(f"error rate {E} outside [0, 0.5]")


def _xlog(x):
    return 0.0 if x <= 0 else x * np.log2(x)


def key_rate(curve: str, E: float) -> float:
    _check_E(E)
    if curve in ("SB1", "SB1_Y"):
        base = 1 + _xlog((1 - E) / 2) + _xlog(E / 2)
        return base - (2 if curve == "SB1" else 1) * h(E)
    if curve in ("SB2", "SB2_X"):
        base = 1 - h(1 / 6 + 2 * E / 3)
        return base - (2 if curve == "SB2" else 1) * h(E)
    raise ValueError(f"unknown curve {curve!r}")


def bisect(f, lo, hi, tol=1e-12, maxiter=200):
    """Root of a sign-changing function on [lo, hi]."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if np.sign(flo) == np.sign(fhi):
        raise SolverError("no sign change on the bracket")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def threshold(curve: str) -> float:
    return bisect(lambda E: key_rate(curve, E), 1e-6, 0.5)


# ---------------------------------------------------------------------------
# Eve's purification and rate bounds


@dataclass(frozen=True)
class BellDiagonalWeights:
    mu: tuple

    def __post_init__(self):
        m = np.asarray(self.mu, dtype=float)
        if m.shape != (4,) or np.any(m < -1e-12) or abs(m.sum() - 1) > 1e-9:
            raise ValueError("weights must be 4 non-negative numbers summing to 1")
        object.__setattr__(self, "mu", tuple(float(x) for x in np.clip(m, 0, None)))

    @classmethod
    def on_surface(cls, E: float, mu4: float):
        _check_E(E)
        if not (-1e-15 <= mu4 <= E + 1e-15):
            raise ValueError("mu4 must lie in [0, E]")
        return cls((1 - 2 * E + mu4, E - mu4, E - mu4, mu4))


def entropy_maximizer(E: float) -> tuple:
    """Return (mu4*, H(V)) maximizing the weight entropy on the constraint surface."""
    _check_E(E)
    if E == 0:
        return 0.0, 0.0

    def neg(m4):
        mu = BellDiagonalWeights.on_surface(E, m4).mu
        return -sum(-_xlog(x) for x in mu)

    r = minimize_scalar(neg, bounds=(0.0, E), method="bounded", options={"xatol": 1e-12})
    return float(r.x), float(-r.fun)


def eve_states(E: float) -> dict:
    """Eve's (unnormalized) states phi^{a,b} in the basis eps_1..eps_4, with mu4 = E^2."""
    m = np.sqrt(BellDiagonalWeights.on_surface(E, E * E).mu)
    s = np.sqrt(2)
    return {
        "00": np.array([m[0], m[1], 0, 0]) / s,
        "11": np.array([m[0], -m[1], 0, 0]) / s,
        "01": np.array([0, 0, m[2], m[3]]) / s,
        "10": np.array([0, 0, m[2], -m[3]]) / s,
        "0+": np.array([m[0], m[1], m[2], m[3]]) / 2,
        "0-": np.array([m[0], m[1], -m[2], -m[3]]) / 2,
        "1+": np.array([m[0], -m[1], m[2], -m[3]]) / 2,
        "1-": np.array([-m[0], m[1], m[2], -m[3]]) / 2,
    }


def _proj(v):
    return np.outer(v, v.conj())


def _unit_trace(m):
    return m / np.trace(m).real


def sigma_e(E: float, k: int, normalized: bool = True) -> np.ndarray:
    """Eve's state conditioned on Alice's bit k."""
    P = eve_states(E)
    m = 0.5 * (_proj(P[f"{k}0"]) + _proj(P[f"{k}1"])) + 0.5 * (
        _proj(P[f"{k}+"]) + _proj(P[f"{k}-"])
    )
    return _unit_trace(m) if normalized else m


def lower_rate(E: float, q: float) -> float:
    """S(E|c) - S(E) - (H(b|c) - H(b)) with bit-flip preprocessing q."""
    s0, s1 = sigma_e(E, 0), sigma_e(E, 1)
    s_ec = 0.5 * vn_entropy((1 - q) * s0 + q * s1) + 0.5 * vn_entropy(q * s0 + (1 - q) * s1)
    s_e = vn_entropy(0.5 * s0 + 0.5 * s1)
    return s_ec - s_e - (h(q * (1 - E) + (1 - q) * E) - 1)


def upper_rate(E: float, q: float) -> float:
    """-chi(E) - (H(b|c) - H(b)) for Eve's four-outcome ensemble."""
    P = eve_states(E)
    A = _unit_trace(2 / 3 * _proj(P["00"]) + 1 / 3 * _proj(P["0+"]))
    B = _unit_trace(2 / 3 * _proj(P["11"]) + 1 / 3 * _proj(P["1-"]))
    chi = (
        vn_entropy(0.5 * A + 0.5 * B)
        - 0.5 * vn_entropy((1 - q) * A + q * B)
        - 0.5 * vn_entropy(q * A + (1 - q) * B)
    )
    return -chi - (h(q * (1 - E) + (1 - q) * E) - 1)


def optimize_q(rate, E: float) -> tuple:
    """Maximize rate(E, q) over q in [0, 1/2]: grid step 1e-3, then golden refinement."""
    qs = np.linspace(0, 0.5, 501)
    vals = np.array([rate(E, q) for q in qs])
    i = int(vals.argmax())
    lo, hi = qs[max(i - 1, 0)], qs[min(i + 1, 500)]
    if hi > lo:
        r = minimize_scalar(lambda q: -rate(E, q), bounds=(lo, hi), method="bounded",
                            options={"xatol": 1e-10})
        if -r.fun > vals[i]:
            return float(r.x), float(-r.fun)
    return float(qs[i]), float(vals[i])


def dw_bounds(E: float, q: float | None = None) -> dict:
    """Lower and upper key rates at (E, q); q=None optimizes each bound separately."""
    _check_E(E)
    if q is not None:
        if not (0 <= q <= 0.5):
            raise ValueError("q outside [0, 0.5]")
        return {"lower_rate": lower_rate(E, q), "upper_rate": upper_rate(E, q), "q": q}
    ql, lo = optimize_q(lower_rate, E)
    qu, up = optimize_q(upper_rate, E)
    return {"lower_rate": lo, "upper_rate": up, "q_lower": ql, "q_upper": qu}


def bound_threshold(which: str, tol: float = 1e-7) -> float:
    """Largest E at which the q-optimized bound is still strictly positive.

    At q = 1/2 both rates vanish identically, so the optimized rate decays to
    zero rather than crossing it; positivity is judged against 1e-12.
    """
    rate = {"lower": lower_rate, "upper": upper_rate}[which]
    lo, hi = 1e-3, 0.3
    if optimize_q(rate, lo)[1] <= 1e-12 or optimize_q(rate, hi)[1] > 1e-12:
        raise SolverError("bound threshold not bracketed")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if optimize_q(rate, mid)[1] > 1e-12:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Photon-number splitting and unambiguous discrimination


N_MAX = 30


@dataclass(frozen=True)
class SourceChannelModel:
    mu: float
    alpha_db: float = 0.25
    length_km: float = 0.0

    def __post_init__(self):
        if self.mu <= 0 or self.alpha_db < 0 or self.length_km < 0:
            raise ValueError("invalid source/channel parameters")

    @property
    def delta_db(self) -> float:
        return self.alpha_db * self.length_km

    @property
    def eta(self) -> float:
        return 10 ** (-self.delta_db / 10)


def _tail(n0: int, mu: float) -> float:
    n = np.arange(n0, N_MAX + 1)
    return float(poisson.pmf(n, mu).sum())


def discrimination_info(n: int, chi: float) -> float:
    """Information from unambiguous discrimination of n copies with overlap chi."""
    return 1 - h((1 + np.sqrt(1 - chi ** (2 * n))) / 2)


def eve_information(which: str, mu: float, delta_db: float) -> float:
    eta = 10 ** (-delta_db / 10)
    if which == "P1":
        return 0.5 * _tail(2, mu) / (0.75 * _tail(1, mu * eta))
    if which == "P2":
        chi = 1 / np.sqrt(2)
        return discrimination_info(3, chi) * float(poisson.pmf(3, mu)) / _tail(1, mu * eta)
    raise ValueError(f"unknown PNS scenario {which!r}")


def pns_critical(which: str, mu: float | None = None, alpha_db: float = 0.25,
                 max_db: float = 100.0) -> dict:
    """Critical attenuation where Eve's information reaches one bit."""
    mu = {"P1": 0.1, "P2": 0.2}[which] if mu is None else mu
    f = lambda d: eve_information(which, mu, d) - 1
    try:
        d = bisect(f, 0.0, max_db, tol=1e-10)
    except SolverError as exc:
        raise SolverError(f"Eve's information never reaches 1 below {max_db} dB") from exc
    return {"scenario": which, "mu": mu, "delta_c_db": d,
            "l_c_km": d / alpha_db if alpha_db > 0 else float("inf")}


def pns_curve(which: str, mu: float | None = None, alpha_db: float = 0.25,
              lengths=None) -> list:
    mu = {"P1": 0.1, "P2": 0.2}[which] if mu is None else mu
    lengths = np.arange(0, 121, 1.0) if lengths is None else lengths
    return [(float(l), eve_information(which, mu, alpha_db * l)) for l in lengths]


# ---------------------------------------------------------------------------
# Efficiency


def cabello_efficiency(b_s: float, q_t: float, b_t: float) -> float:
    """Secret bits per qubit-plus-classical-bit exchanged."""
    if q_t + b_t <= 0:
        raise ValueError("q_t + b_t must be positive")
    return b_s / (q_t + b_t)


def protocol32_secret_bits() -> float:
    return ((1 / 16 + 1 / 32 + 1 / 64) + (1 / 8 + 1 / 64) * (1 - h(1 / 9))) * 4


EFFICIENCY_INPUTS = {
    "3.1": (0.75, 3, 0.625),
    "3.2": (0.72, 3, 0.75),
    "SARG04": (0.25, 1, 1),
}


def rate_curve(curve: str, step: float = 1e-3) -> list:
    Es = np.round(np.arange(0, 0.5 + step / 2, step), 12)
    return [(float(E), key_rate(curve, E)) for E in Es]


def all_rows_sum() -> Fraction:
    return sum(enumerate_rows().values(), Fraction(0))


__all__ = [n for n in dir() if not n.startswith("_") and n not in ("iproduct",)]
