"""Kraus noise channels, collective-noise error curves and the fidelity of the
controlled key-agreement resource state under noise.

Conventions for the operator sets:

* AD (amplitude damping): F0 = diag(1, sqrt(1-eta)), F1 = [[0, sqrt(eta)], [0, 0]].
* PD (phase damping): F0 = diag(1, sqrt(1-eta)), F1 = diag(0, sqrt(eta)).
* NMDPH (non-Markovian dephasing): weights (1-a p)(1-p) on I and
  p[1 + a(1-p)] on Z.
* NMDPO (non-Markovian depolarizing): weight (1-3 a p)(1-p) on I and
  [1 + 3a(1-p)] p/3 on each of X, Y, Z.  The identity weight turns
  negative once 3 a p > 1, so that region is rejected as outside the domain.

Every closed-form fidelity curve is paired with a Kraus-simulation oracle.
Where the two disagree the oracle value is the one returned as ``fidelity``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qcore import (
    CNOT,
    I2,
    KETS,
    X,
    Y,
    Z,
    DensityMatrix,
    StateVector,
    apply_op,
    bell_vector,
    fidelity,
)

KINDS = ("AD", "PD", "NMDPH", "NMDPO")


@dataclass(frozen=True)
class KrausChannel:
    kind: str
    params: tuple
    ops: tuple

    def completeness_residual(self) -> float:
        acc = sum(K.conj().T @ K for K in self.ops)
        return float(np.abs(acc - np.eye(2)).max())


def _range(name, v, lo, hi):
    if not (lo - 1e-15 <= v <= hi + 1e-15):
        raise ValueError(f"{name}={v} outside [{lo}, {hi}]")


def kraus_ops(kind: str, *params) -> KrausChannel:
    """Build a channel.  AD/PD take ``eta``; NMDPH/NMDPO take ``(alpha, p)``."""
    kind = kind.upper()
    if kind in ("AD", "PD"):
        (eta,) = params
        _range("eta", eta, 0.0, 1.0)
        F0 = np.diag([1.0, np.sqrt(1 - eta)]).astype(complex)
        if kind == "AD":
            F1 = np.array([[0, np.sqrt(eta)], [0, 0]], dtype=complex)
        else:
            F1 = np.diag([0.0, np.sqrt(eta)]).astype(complex)
        ops = (F0, F1)
    elif kind == "NMDPH":
        alpha, p = params
        _range("alpha", alpha, 0.0, 1.0)
        _range("p", p, 0.0, 0.5)
        w0 = (1 - alpha * p) * (1 - p)
        w1 = p * (1 + alpha * (1 - p))
        ops = (np.sqrt(w0) * I2, np.sqrt(w1) * Z)
    elif kind == "NMDPO":
        alpha, p = params
        _range("alpha", alpha, 0.0, 1.0)
        _range("p", p, 0.0, 0.5)
        if 3 * alpha * p > 1 + 1e-15:
            raise ValueError("NMDPO requires 3*alpha*p <= 1 (identity weight would be negative)")
        wi = (1 - 3 * alpha * p) * (1 - p)
        w = (1 + 3 * alpha * (1 - p)) * p / 3
        ops = (np.sqrt(max(wi, 0.0)) * I2, np.sqrt(w) * X, np.sqrt(w) * Y, np.sqrt(w) * Z)
    else:
        raise ValueError(f"unknown channel kind {kind!r}")
    ch = KrausChannel(kind, tuple(float(x) for x in params), tuple(ops))
    if ch.completeness_residual() > 1e-10:
        raise ValueError("Kraus set is not complete")
    return ch


def identity_channel() -> KrausChannel:
    return KrausChannel("ID", (), (I2.copy(),))


def _apply_raw(m: np.ndarray, dims, ch: KrausChannel, target: int) -> np.ndarray:
    n = len(dims)
    T = m.reshape(tuple(dims) * 2)
    out = np.zeros_like(T)
    for K in ch.ops:
        t = apply_op(T, K, [target])
        t = apply_op(t, K.conj(), [n + target])
        out = out + t
    D = int(np.prod(dims))
    return out.reshape(D, D)


def apply_channel(rho: DensityMatrix, ch: KrausChannel, target: int) -> DensityMatrix:
    """rho -> sum_k K rho K^dagger on one qubit subsystem."""
    if rho.dims[target] != 2:
        raise ValueError("channel target must be a qubit")
    m = _apply_raw(rho.entries, rho.dims, ch, target)
    return DensityMatrix(rho.dims, (m + m.conj().T) / 2)


# ---------------------------------------------------------------------------
# Collective noise


def collective_error_probability(kind: str, angle: float) -> float:
    """Error probability of the two-qubit authentication check.

    dephasing: (1 - cos 2 phi)/4   (cosh(2 i phi) = cos 2 phi)
    rotation:  2 sin^2 theta cos^2 theta
    """
    if kind == "dephasing":
        return (1 - np.cos(2 * angle)) / 4
    if kind == "rotation":
        return 2 * np.sin(angle) ** 2 * np.cos(angle) ** 2
    raise ValueError(f"unknown collective noise kind {kind!r}")


# ---------------------------------------------------------------------------
# Fidelity of the key-agreement resource state


def _printed_fidelity(kind: str, params) -> float:
    if kind == "AD":
        (eta,) = params
        return 1 - 0.5 * (eta - 2) * eta
    if kind == "PD":
        (eta,) = params
        return 1 - eta / 2
    if kind == "NMDPH":
        a, p = params
        return 0.5 * (1 + (1 - 2 * p + 2 * (p - 1) * p * a))
    if kind == "NMDPO":
        a, p = params
        return 1 + (2 / 3) * (3 * (p - 1) * a - 1) * (6 * (p - 1) * p * a - 2 * p + 3)
    raise ValueError(kind)


def closed_form_fidelity(kind: str, params) -> float:
    """Closed forms re-derived for two noisy travel qubits."""
    if kind == "AD":
        (eta,) = params
        return 1 - eta + eta**2 / 2
    if kind == "PD":
        (eta,) = params
        return 1 - eta / 2
    if kind == "NMDPH":
        a, p = params
        d = 1 - 2 * p + 2 * (p - 1) * p * a
        return 0.5 * (1 + d**2)
    if kind == "NMDPO":
        a, p = params
        wi = (1 - 3 * a * p) * (1 - p)
        w = (1 - wi) / 3
        return wi**2 + 3 * w**2
    raise ValueError(kind)


def cqka_final_state(k_c: int, k_a: int, b: int) -> np.ndarray:
    """Ideal pre-measurement state on (A, C1, C2, B) for one preparation."""
    psi = np.kron(np.kron(KETS[str(k_a)], bell_vector("00" if k_c == 0 else "01")), KETS[str(b)])
    T = psi.reshape(2, 2, 2, 2)
    T = apply_op(T, CNOT, [1, 0])
    T = apply_op(T, CNOT, [2, 3])
    return T.reshape(-1)


def cqka_avg_fidelity(ch: KrausChannel) -> dict:
    """Average fidelity over the 8 (k_C, k_A, b) preparations.

    Both travel qubits C1 and C2 go through ``ch`` before the CNOTs.
    Returns the oracle value, the re-derived closed form and the printed
    closed form (the last two only for the four named kinds).
    """
    dims = (2, 2, 2, 2)
    total = 0.0
    for k_c in (0, 1):
        for k_a in (0, 1):
            for b in (0, 1):
                psi0 = np.kron(
                    np.kron(KETS[str(k_a)], bell_vector("00" if k_c == 0 else "01")),
                    KETS[str(b)],
                )
                rho = np.outer(psi0, psi0.conj())
                rho = _apply_raw(rho, dims, ch, 1)
                rho = _apply_raw(rho, dims, ch, 2)
                U = np.eye(16, dtype=complex).reshape((2,) * 8)
                U = apply_op(U, CNOT, [1, 0])
                U = apply_op(U, CNOT, [2, 3]).reshape(16, 16)
                rho_f = U @ rho @ U.conj().T
                ref = StateVector(dims, cqka_final_state(k_c, k_a, b))
                total += fidelity(ref, rho_f)
    out = {"fidelity": total / 8}
    if ch.kind in KINDS:
        out["closed_form"] = closed_form_fidelity(ch.kind, ch.params)
        out["printed"] = _printed_fidelity(ch.kind, ch.params)
    return out


def fidelity_curve(kind: str, step: float = 0.01, alpha: float | None = None) -> list:
    """Sample (parameter, oracle fidelity, printed) rows.

    AD/PD sweep eta over [0, 1]; NMDPH/NMDPO sweep p over [0, 1/2] at fixed
    alpha, stopping where NMDPO leaves its domain.
    """
    kind = kind.upper()
    rows = []
    if kind in ("AD", "PD"):
        grid = np.round(np.arange(0, 1 + step / 2, step), 12)
        for eta in grid:
            r = cqka_avg_fidelity(kraus_ops(kind, eta))
            rows.append((float(eta), r["fidelity"], r["printed"]))
    else:
        a = 0.5 if alpha is None else alpha
        grid = np.round(np.arange(0, 0.5 + step / 2, step), 12)
        for p in grid:
            if kind == "NMDPO" and 3 * a * p > 1:
                break
            r = cqka_avg_fidelity(kraus_ops(kind, a, p))
            rows.append((float(p), r["fidelity"], r["printed"]))
    return rows
