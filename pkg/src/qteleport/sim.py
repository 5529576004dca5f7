"""Dense state-vector simulation, density matrices, fidelity, and sampling.

Basis convention: qubit 0 is the most significant bit of the amplitude index,
so a ket written |q0 q1 ... q(n-1)> reads left to right. All operations are
pure functions over immutable values.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .circuits import Circuit, Gate, GateKind

NORM_TOL = 1e-12
PSD_TOL = 1e-10
UNITARY_MAX_QUBITS = 10


@dataclass(frozen=True)
class MessageParams:
    """Single-qubit message cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""

    theta: float
    phi: float = 0.0

    @property
    def alpha(self) -> complex:
        return complex(math.cos(self.theta / 2))

    @property
    def beta(self) -> complex:
        return cmath.exp(1j * self.phi) * math.sin(self.theta / 2)

    def ket(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)


@dataclass(frozen=True)
class StateVector:
    qubit_count: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.qubit_count,):
            raise ValueError(f"expected {2**self.qubit_count} amplitudes, got {amps.shape}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |norm - 1| = {abs(norm - 1.0):.3e}")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def zero(cls, qubit_count: int) -> "StateVector":
        amps = np.zeros(2**qubit_count, dtype=complex)
        amps[0] = 1.0
        return cls(qubit_count, amps)

    def amplitude(self, bits: str) -> complex:
        if len(bits) != self.qubit_count:
            raise ValueError("bitstring length mismatch")
        return complex(self.amplitudes[int(bits, 2)])


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = m.shape[0]
        if m.shape != (d, d) or d & (d - 1) != 0 or d == 0:
            raise ValueError(f"density matrix must be square with power-of-2 dimension, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > NORM_TOL:
            raise ValueError("density matrix not Hermitian within 1e-12")
        if abs(np.trace(m) - 1.0) > NORM_TOL:
            raise ValueError(f"trace must be 1, got {np.trace(m):.6g}")
        if np.min(np.linalg.eigvalsh((m + m.conj().T) / 2)) < -PSD_TOL:
            raise ValueError("density matrix has eigenvalue below -1e-10")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "re": self.matrix.real.tolist(),
            "im": self.matrix.imag.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DensityMatrix":
        m = np.array(obj["re"], dtype=float) + 1j * np.array(obj["im"], dtype=float)
        if m.shape != (obj["dim"], obj["dim"]):
            raise ValueError("dim field does not match matrix shape")
        return cls(m)


_SQ2 = 1.0 / math.sqrt(2.0)
_MAT_1Q = {
    GateKind.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    GateKind.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
}


def _ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _prep_matrix(theta: float, phi: float) -> np.ndarray:
    # RY(theta) followed by the |1> phase e^{i phi}
    m = _ry(theta)
    m[1, :] *= cmath.exp(1j * phi)
    return m


def _apply_1q(psi: np.ndarray, mat: np.ndarray, q: int) -> np.ndarray:
    out = np.tensordot(mat, psi, axes=([1], [q]))
    return np.moveaxis(out, 0, q)


def _slices(ndim: int, assignments: dict[int, int]) -> tuple:
    idx: list = [slice(None)] * ndim
    for axis, val in assignments.items():
        idx[axis] = val
    return tuple(idx)


def _apply_2q(psi: np.ndarray, kind: GateKind, q0: int, q1: int) -> np.ndarray:
    out = psi.copy()
    if kind is GateKind.CNOT:
        out[_slices(psi.ndim, {q0: 1, q1: 0})] = psi[_slices(psi.ndim, {q0: 1, q1: 1})]
        out[_slices(psi.ndim, {q0: 1, q1: 1})] = psi[_slices(psi.ndim, {q0: 1, q1: 0})]
    elif kind is GateKind.CZ:
        out[_slices(psi.ndim, {q0: 1, q1: 1})] *= -1
    elif kind is GateKind.SWAP:
        out[_slices(psi.ndim, {q0: 0, q1: 1})] = psi[_slices(psi.ndim, {q0: 1, q1: 0})]
        out[_slices(psi.ndim, {q0: 1, q1: 0})] = psi[_slices(psi.ndim, {q0: 0, q1: 1})]
    else:
        raise ValueError(f"not a two-qubit gate: {kind}")
    return out


def _apply_gate_tensor(psi: np.ndarray, g: Gate, message: MessageParams | None = None) -> np.ndarray:
    """Apply one gate to a state tensor of shape (2,)*n (+ trailing axes)."""
    if g.kind.n_qubits == 2:
        return _apply_2q(psi, g.kind, *g.qubits)
    if g.kind is GateKind.RY:
        mat = _ry(g.angle)
    elif g.kind is GateKind.PREP:
        if message is not None:
            mat = _prep_matrix(message.theta, message.phi)
        else:
            mat = _prep_matrix(g.angle, 0.0)
    else:
        mat = _MAT_1Q[g.kind]
    return _apply_1q(psi, mat, g.qubits[0])


def apply_gate(s: StateVector, g: Gate) -> StateVector:
    """Apply one gate. PREP uses the gate's own angle with zero phase."""
    for q in g.qubits:
        if not 0 <= q < s.qubit_count:
            raise ValueError(f"operand {q} out of range")
    psi = s.amplitudes.reshape((2,) * s.qubit_count)
    psi = _apply_gate_tensor(psi, g)
    return StateVector(s.qubit_count, psi.reshape(-1))


def run(c: Circuit, m: MessageParams | None = None) -> StateVector:
    """Run a circuit on |0...0>; PREP angles are overridden by m when given."""
    psi = np.zeros((2,) * c.qubit_count, dtype=complex)
    psi[(0,) * c.qubit_count] = 1.0
    for g in c.gates:
        psi = _apply_gate_tensor(psi, g, message=m)
    return StateVector(c.qubit_count, psi.reshape(-1))


def run_prefix(c: Circuit, n_gates: int, m: MessageParams | None = None) -> StateVector:
    """Run only the first n_gates gates of c."""
    return run(Circuit(c.qubit_count, c.gates[:n_gates]), m)


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Full unitary of a PREP-free circuit (column j = action on basis state j)."""
    if c.prep_index is not None:
        raise ValueError("circuit_unitary is undefined for circuits with prep")
    if c.qubit_count > UNITARY_MAX_QUBITS:
        raise ValueError(f"circuit_unitary supports at most {UNITARY_MAX_QUBITS} qubits")
    dim = 2**c.qubit_count
    u = np.eye(dim, dtype=complex).reshape((2,) * c.qubit_count + (dim,))
    for g in c.gates:
        u = _apply_gate_tensor(u, g)
    return u.reshape(dim, dim)


def reduced_density(s: StateVector, keep) -> DensityMatrix:
    """Partial trace keeping the given qubits (ascending index order in the result)."""
    keep = sorted(set(keep))
    if not keep:
        raise ValueError("keep must be non-empty")
    for q in keep:
        if not 0 <= q < s.qubit_count:
            raise ValueError(f"qubit {q} out of range")
    traced = [q for q in range(s.qubit_count) if q not in keep]
    psi = s.amplitudes.reshape((2,) * s.qubit_count)
    psi = np.transpose(psi, keep + traced).reshape(2 ** len(keep), 2 ** len(traced))
    rho = psi @ psi.conj().T
    # guard against tiny numerical asymmetry/trace drift
    rho = (rho + rho.conj().T) / 2
    rho /= np.trace(rho).real
    return DensityMatrix(rho)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(m)
    # eigenvalues at numerical-noise scale are true zeros of a rank-deficient
    # state; the sqrt would otherwise amplify them to sqrt(eps)
    cutoff = max(vals.max(), 0.0) * m.shape[0] * 64 * np.finfo(float).eps
    vals = np.where(vals < cutoff, 0.0, vals)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Overlap (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.

    Computed as the squared trace norm of sqrt(sigma) sqrt(rho) (the same
    quantity), which avoids the sqrt-of-epsilon noise a direct
    eigendecomposition of the triple product would introduce for pure states.
    """
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} != {sigma.dim}")
    product = _psd_sqrt(sigma.matrix) @ _psd_sqrt(rho.matrix)
    singular_values = np.linalg.svd(product, compute_uv=False)
    f = float(np.sum(singular_values) ** 2)
    return min(max(f, 0.0), 1.0)


BASIS_Z = "z"
BASIS_X = "x"
BASIS_Y = "y"
BASIS_SKIP = "skip"
_BASES = (BASIS_Z, BASIS_X, BASIS_Y, BASIS_SKIP)


def sample_measurements(s: StateVector, basis, shots: int, seed: int) -> dict[str, int]:
    """Sample bitstring counts in per-qubit bases ('z' | 'x' | 'y' | 'skip').

    X-basis measurement applies H before sampling, Y-basis applies S-dagger
    then H. Skipped qubits are marginalized out. Bitstrings list the non-skip
    qubits in ascending index order. Deterministic for a fixed seed.
    """
    basis = list(basis)
    if len(basis) != s.qubit_count:
        raise ValueError("need one basis selector per qubit")
    for b in basis:
        if b not in _BASES:
            raise ValueError(f"unknown basis {b!r}")
    measured = [q for q, b in enumerate(basis) if b != BASIS_SKIP]
    if not measured:
        raise ValueError("at least one qubit must be measured")
    if shots < 1:
        raise ValueError("shots must be positive")
    psi = s.amplitudes.reshape((2,) * s.qubit_count)
    for q, b in enumerate(basis):
        if b == BASIS_X:
            psi = _apply_1q(psi, _MAT_1Q[GateKind.H], q)
        elif b == BASIS_Y:
            psi = _apply_1q(psi, _MAT_1Q[GateKind.SDG], q)
            psi = _apply_1q(psi, _MAT_1Q[GateKind.H], q)
    probs = np.abs(psi) ** 2
    skip_axes = tuple(q for q, b in enumerate(basis) if b == BASIS_SKIP)
    if skip_axes:
        probs = probs.sum(axis=skip_axes)
    probs = probs.reshape(-1)
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, probs)
    width = len(measured)
    return {format(i, f"0{width}b"): int(n) for i, n in enumerate(draws) if n > 0}
