"""Small dense state-vector and density-matrix toolkit.

Subsystems carry their own dimension, so qubits (d=2) and the three-level
vac/0/1 travel modes (d=3) share one tensor engine.  Everything here is a
pure function over immutable values; randomness is always injected through a
``numpy.random.Generator``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

NORM_TOL = 1e-12
EIG_CLAMP = 1e-12

SQ2 = np.sqrt(2.0)

# Single-qubit constants.
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
IY = Z @ X  # i*Y as a real matrix
H = np.array([[1, 1], [1, -1]], dtype=complex) / SQ2
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KETP = np.array([1, 1], dtype=complex) / SQ2
KETM = np.array([1, -1], dtype=complex) / SQ2

# Named single-qubit kets; "+" and "-" are the X-basis states.
KETS = {"0": KET0, "1": KET1, "+": KETP, "-": KETM}

BASES = {
    "Z": (("0", KET0), ("1", KET1)),
    "X": (("+", KETP), ("-", KETM)),
}

# Bell codes: 00 -> Phi+, 01 -> Phi-, 10 -> Psi+, 11 -> Psi-.
BELL_NAMES = {"00": "Phi+", "01": "Phi-", "10": "Psi+", "11": "Psi-"}
BELL_CODES = {v: k for k, v in BELL_NAMES.items()}
_BELL_VECS = {
    "00": np.array([1, 0, 0, 1], dtype=complex) / SQ2,
    "01": np.array([1, 0, 0, -1], dtype=complex) / SQ2,
    "10": np.array([0, 1, 1, 0], dtype=complex) / SQ2,
    "11": np.array([0, 1, -1, 0], dtype=complex) / SQ2,
}

# Pauli codes: 00 -> I, 01 -> X, 10 -> iY (= Z X), 11 -> Z.
PAULI = {"00": I2, "01": X, "10": IY, "11": Z}


def _code(c) -> str:
    """Normalize a 2-bit code given as str, int or tuple to a '00'..'11' string."""
    if isinstance(c, str):
        s = c
    elif isinstance(c, (tuple, list)):
        s = "".join(str(int(b)) for b in c)
    else:
        s = format(int(c), "02b")
    if s not in _BELL_VECS:
        raise ValueError(f"invalid 2-bit code {c!r}")
    return s


def xor_code(a, b) -> str:
    """Bitwise XOR of two 2-bit codes."""
    return format(int(_code(a), 2) ^ int(_code(b), 2), "02b")


def pauli(code) -> np.ndarray:
    return PAULI[_code(code)].copy()


# ---------------------------------------------------------------------------
# States


@dataclass(frozen=True)
class StateVector:
    dims: tuple
    amps: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.size != int(np.prod(dims)):
            raise ValueError(f"amplitude length {amps.size} does not match dims {dims}")
        nrm = np.vdot(amps, amps).real
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized (norm^2 = {nrm})")
        amps = amps.copy()
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amps", amps)

    @property
    def n(self) -> int:
        return len(self.dims)

    def tensor(self) -> np.ndarray:
        return self.amps.reshape(self.dims)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.amps, self.amps.conj()))

    def __matmul__(self, other: "StateVector") -> "StateVector":
        return product(self, other)


@dataclass(frozen=True)
class DensityMatrix:
    dims: tuple
    entries: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        m = np.asarray(self.entries, dtype=complex)
        D = int(np.prod(dims))
        if m.shape != (D, D):
            raise ValueError(f"matrix shape {m.shape} does not match dims {dims}")
        if not np.allclose(m, m.conj().T, atol=1e-12):
            raise ValueError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > NORM_TOL * max(1, D):
            raise ValueError(f"density matrix trace is {tr}")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "entries", m)

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


def state(vec, dims=None) -> StateVector:
    """Build a StateVector from raw amplitudes; normalizes the input."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("zero vector")
    if dims is None:
        n = int(round(np.log2(v.size)))
        if 2**n != v.size:
            raise ValueError("dims required for non-qubit register")
        dims = (2,) * n
    return StateVector(dims, v / nrm)


def ket(labels: str) -> StateVector:
    """Product qubit ket from a label string, e.g. ket('0+1-')."""
    v = np.array([1.0 + 0j])
    for ch in labels:
        v = np.kron(v, KETS[ch])
    return StateVector((2,) * len(labels), v)


def product(*states: StateVector) -> StateVector:
    v = np.array([1.0 + 0j])
    dims: list = []
    for s in states:
        v = np.kron(v, s.amps)
        dims.extend(s.dims)
    return StateVector(tuple(dims), v)


def make_bell(code) -> StateVector:
    """Two-qubit Bell ket for a 2-bit code (00=Phi+, 01=Phi-, 10=Psi+, 11=Psi-)."""
    return StateVector((2, 2), _BELL_VECS[_code(code)])


def bell_vector(code) -> np.ndarray:
    return _BELL_VECS[_code(code)].copy()


# ---------------------------------------------------------------------------
# Gates


def _apply_tensor(T: np.ndarray, U: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    dims = T.shape
    k = len(targets)
    tdims = [dims[t] for t in targets]
    U = U.reshape(tdims + tdims)
    out = np.tensordot(U, T, axes=(list(range(k, 2 * k)), list(targets)))
    return np.moveaxis(out, list(range(k)), list(targets))


def _check_targets(dims, gate, targets):
    targets = [int(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise ValueError("targets must be distinct")
    if any(t < 0 or t >= len(dims) for t in targets):
        raise ValueError("target out of range")
    D = int(np.prod([dims[t] for t in targets]))
    if gate.shape != (D, D):
        raise ValueError(f"gate shape {gate.shape} does not match targets of total dim {D}")
    return targets


def apply_gate(st: StateVector, gate, targets) -> StateVector:
    """Apply a unitary to the listed subsystems (in the listed order)."""
    gate = np.asarray(gate, dtype=complex)
    if np.isscalar(targets) or isinstance(targets, (int, np.integer)):
        targets = [targets]
    targets = _check_targets(st.dims, gate, targets)
    T = _apply_tensor(st.tensor(), gate, targets)
    v = T.reshape(-1)
    # Renormalize away floating drift only; a non-unitary gate is an error.
    nrm = np.vdot(v, v).real
    if abs(nrm - 1) > 1e-9:
        raise ValueError("gate is not unitary on this state")
    return StateVector(st.dims, v / np.sqrt(nrm))


def apply_op(T: np.ndarray, op: np.ndarray, targets) -> np.ndarray:
    """Apply an arbitrary (possibly non-unitary) operator to a raw tensor."""
    return _apply_tensor(T, np.asarray(op, dtype=complex), list(targets))


# ---------------------------------------------------------------------------
# Measurement


def _projectors(basis, targets, dims):
    """List of (tag, projector vector over the targets) for a measurement."""
    if basis in ("bell", "Bell", "B"):
        if len(targets) != 2 or any(dims[t] != 2 for t in targets):
            raise ValueError("Bell measurement needs two qubit targets")
        return [(c, _BELL_VECS[c]) for c in ("00", "01", "10", "11")]
    if isinstance(basis, str):
        basis = [basis] * len(targets)
    outs = [("", np.array([1.0 + 0j]))]
    for b in basis:
        nxt = []
        for tag, v in outs:
            for lab, k in BASES[b]:
                nxt.append((tag + lab, np.kron(v, k)))
        outs = nxt
    return outs


def branches(st: StateVector, basis, targets) -> list:
    """All measurement branches as (tag, probability, collapsed state).

    Zero-probability branches are dropped.  The collapsed state keeps the
    measured subsystems, now in the projected state.
    """
    targets = [int(t) for t in (targets if not np.isscalar(targets) else [targets])]
    out = []
    for tag, vec in _projectors(basis, targets, st.dims):
        P = np.outer(vec, vec.conj())
        T = apply_op(st.tensor(), P, targets).reshape(-1)
        prob = np.vdot(T, T).real
        if prob > 1e-15:
            out.append((tag, float(prob), StateVector(st.dims, T / np.sqrt(prob))))
    return out


def measure(st: StateVector, basis, targets, rng: np.random.Generator):
    """Projective measurement; returns (outcome tag, collapsed state, probability)."""
    br = branches(st, basis, targets)
    probs = np.array([b[1] for b in br])
    k = rng.choice(len(br), p=probs / probs.sum())
    tag, prob, post = br[k]
    return tag, post, prob


# ---------------------------------------------------------------------------
# Mixed states


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    keep = sorted(int(k) for k in keep)
    if not keep:
        raise ValueError("keep must be non-empty")
    dims = rho.dims
    n = len(dims)
    T = rho.entries.reshape(dims + dims)
    drop = [i for i in range(n) if i not in keep]
    # trace pairs (i, n+i) from the highest index down so positions stay valid
    cur_n = n
    for i in sorted(drop, reverse=True):
        T = np.trace(T, axis1=i, axis2=i + cur_n)
        cur_n -= 1
    D = int(np.prod([dims[k] for k in keep]))
    m = T.reshape(D, D)
    return DensityMatrix(tuple(dims[k] for k in keep), (m + m.conj().T) / 2)


def mix(weights, mats, dims=None) -> np.ndarray:
    """Convex sum of matrices (raw arrays or DensityMatrix)."""
    acc = None
    for w, m in zip(weights, mats):
        m = m.entries if isinstance(m, DensityMatrix) else np.asarray(m, dtype=complex)
        acc = w * m if acc is None else acc + w * m
    return acc


def entropy_of_spectrum(lam) -> float:
    lam = np.asarray(lam, dtype=float)
    lam = lam[lam > EIG_CLAMP]
    return float(-(lam * np.log2(lam)).sum())


def vn_entropy(rho) -> float:
    """Von Neumann entropy in bits; eigenvalues below 1e-12 count as zero."""
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    return entropy_of_spectrum(np.linalg.eigvalsh((m + m.conj().T) / 2))


def fidelity(ref: StateVector, rho) -> float:
    """Overlap <ref|rho|ref> for a pure reference state."""
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if m.shape[0] != ref.amps.size:
        raise ValueError("dimension mismatch")
    f = np.vdot(ref.amps, m @ ref.amps).real
    return float(min(1.0, max(0.0, f)))
