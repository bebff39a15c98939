"""Shannon and von Neumann information quantities, all in bits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qcore import DensityMatrix, vn_entropy

NEG_TOL = 1e-9


class ConsistencyError(RuntimeError):
    """An information quantity came out meaningfully negative."""


def _clamp(x: float) -> float:
    if x < -NEG_TOL:
        raise ConsistencyError(f"negative information quantity {x}")
    return max(0.0, float(x))


def binary_entropy(x) -> float | np.ndarray:
    """h(x) = -x log2 x - (1-x) log2(1-x), with h(0) = h(1) = 0.

    Accepts scalars or arrays; raises ValueError outside [0, 1].
    """
    a = np.asarray(x, dtype=float)
    if np.any(a < -1e-12) or np.any(a > 1 + 1e-12):
        raise ValueError(f"binary entropy argument outside [0,1]: {x}")
    a = np.clip(a, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(a > 0, -a * np.log2(np.where(a > 0, a, 1)), 0.0)
        u = np.where(a < 1, -(1 - a) * np.log2(np.where(a < 1, 1 - a, 1)), 0.0)
    out = t + u
    return float(out) if out.ndim == 0 else out


def shannon(probs) -> float:
    p = np.asarray(probs, dtype=float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


@dataclass(frozen=True)
class JointDistribution:
    """Probability table over named discrete axes."""

    axes: tuple
    labels: tuple
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if len(self.axes) != p.ndim or len(self.labels) != p.ndim:
            raise ValueError("axes/labels must match the array rank")
        for lab, n in zip(self.labels, p.shape):
            if len(lab) != n:
                raise ValueError("label set size does not match axis length")
        if np.any(p < -1e-12):
            raise ValueError("negative probability")
        if abs(p.sum() - 1) > 1e-9:
            raise ValueError(f"probabilities sum to {p.sum()}")
        p = np.clip(p, 0, None)
        p.setflags(write=False)
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "labels", tuple(tuple(l) for l in self.labels))
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_counts(cls, axes, labels, counts: dict):
        """Build from a {(label_a, label_b, ...): weight} mapping."""
        arr = np.zeros([len(l) for l in labels])
        for key, w in counts.items():
            idx = tuple(list(lab).index(k) for lab, k in zip(labels, key))
            arr[idx] += w
        return cls(tuple(axes), tuple(labels), arr / arr.sum())

    def _ax(self, name) -> int:
        return self.axes.index(name)

    def marginal(self, names: Sequence[str]) -> np.ndarray:
        keep = [self._ax(n) for n in names]
        drop = tuple(i for i in range(len(self.axes)) if i not in keep)
        m = self.probs.sum(axis=drop)
        # reorder to the requested axis order
        order = sorted(keep)
        return np.moveaxis(m, [order.index(k) for k in keep], list(range(len(keep))))

    def entropy(self, *names) -> float:
        return shannon(self.marginal(names or self.axes))

    def prob(self, **kw) -> float:
        idx = tuple(
            slice(None) if a not in kw else list(self.labels[i]).index(kw[a])
            for i, a in enumerate(self.axes)
        )
        return float(np.sum(self.probs[idx]))


def mutual_information(joint: JointDistribution, a: str, b: str) -> float:
    """I(A;B) = H(A) + H(B) - H(A,B)."""
    return _clamp(joint.entropy(a) + joint.entropy(b) - joint.entropy(a, b))


def conditional_entropy(joint: JointDistribution, target: str, given: str) -> float:
    """H(T|G) = H(T,G) - H(G)."""
    return _clamp(joint.entropy(target, given) - joint.entropy(given))


@dataclass(frozen=True)
class Ensemble:
    entries: tuple

    def __post_init__(self):
        ents = tuple((float(p), r) for p, r in self.entries)
        if abs(sum(p for p, _ in ents) - 1) > 1e-9:
            raise ValueError("ensemble weights must sum to 1")
        shapes = {np.shape(_mat(r)) for _, r in ents}
        if len(shapes) != 1:
            raise ValueError("ensemble members have different dimensions")
        object.__setattr__(self, "entries", ents)


def _mat(r):
    return r.entries if isinstance(r, DensityMatrix) else np.asarray(r, dtype=complex)


def holevo(ens: Ensemble | Sequence) -> float:
    """chi = S(sum p_i rho_i) - sum p_i S(rho_i)."""
    if not isinstance(ens, Ensemble):
        ens = Ensemble(tuple(ens))
    avg = sum(p * _mat(r) for p, r in ens.entries)
    chi = vn_entropy(avg) - sum(p * vn_entropy(_mat(r)) for p, r in ens.entries)
    return _clamp(chi)
