"""Dense quantum states, Kraus channels and exact evolution.

Everything here is dense and sized for n <= 10 qubits.  Density matrices are
stored as ``2^n x 2^n`` arrays; the hot path flattens them and reuses the
statevector kernels (ket axes then bra axes).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import kernels
from .paulis import PauliSumOperator

ATOL_NORM = 1e-12
ATOL_ALGEBRA = 1e-10


@dataclass
class StateVector:
    """Normalized pure state on ``num_qubits`` qubits."""

    vector: np.ndarray
    num_qubits: int = 0

    def __post_init__(self):
        self.vector = np.asarray(self.vector, dtype=complex).reshape(-1)
        n = int(np.log2(self.vector.size))
        if 2 ** n != self.vector.size:
            raise ValueError("vector length is not a power of two")
        if self.num_qubits == 0:
            self.num_qubits = n
        elif self.num_qubits != n:
            raise ValueError("num_qubits does not match vector length")
        norm = np.linalg.norm(self.vector)
        if abs(norm - 1.0) > 1e-8:
            raise ValueError(f"state not normalized (norm={norm})")

    @classmethod
    def zero(cls, num_qubits: int) -> "StateVector":
        v = np.zeros(2 ** num_qubits, dtype=complex)
        v[0] = 1.0
        return cls(v, num_qubits)

    def to_density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.vector, self.vector.conj()), self.num_qubits)

    def expectation(self, op: np.ndarray | PauliSumOperator) -> complex:
        m = op.to_matrix() if isinstance(op, PauliSumOperator) else op
        return complex(self.vector.conj() @ (m @ self.vector))


@dataclass
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite matrix on n qubits."""

    matrix: np.ndarray
    num_qubits: int = 0

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        dim = self.matrix.shape[0]
        if self.matrix.shape != (dim, dim):
            raise ValueError("density matrix must be square")
        n = int(np.log2(dim))
        if 2 ** n != dim:
            raise ValueError("dimension is not a power of two")
        if self.num_qubits == 0:
            self.num_qubits = n
        elif self.num_qubits != n:
            raise ValueError("num_qubits does not match dimension")

    def validate(self, atol: float = 1e-8) -> None:
        """Check hermiticity, unit trace and positivity (eigenvalues >= -atol)."""
        m = self.matrix
        if not np.allclose(m, m.conj().T, atol=atol):
            raise ValueError("density matrix not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > atol:
            raise ValueError(f"trace {tr} != 1")
        w = np.linalg.eigvalsh(m)
        if w.min() < -atol:
            raise ValueError(f"negative eigenvalue {w.min()}")

    @classmethod
    def zero(cls, num_qubits: int) -> "DensityMatrix":
        return StateVector.zero(num_qubits).to_density_matrix()

    @classmethod
    def maximally_mixed(cls, num_qubits: int) -> "DensityMatrix":
        dim = 2 ** num_qubits
        return cls(np.eye(dim, dtype=complex) / dim, num_qubits)

    def expectation(self, op: np.ndarray | PauliSumOperator) -> complex:
        m = op.to_matrix() if isinstance(op, PauliSumOperator) else op
        return complex(np.trace(m @ self.matrix))

    def probabilities(self) -> np.ndarray:
        """Computational-basis outcome probabilities (clipped at 0)."""
        p = np.real(np.diag(self.matrix)).copy()
        np.clip(p, 0.0, None, out=p)
        return p


@dataclass
class Channel:
    """Kraus channel on ``arity`` qubits: rho -> sum_K K rho K^dag.

    ``kind`` tags analytically special channels ("depolarizing" enables the
    mix-with-identity fast path in the simulator).
    """

    kraus: list[np.ndarray] = field(default_factory=list)
    arity: int = 1
    kind: str = ""
    param: float = 0.0

    def __post_init__(self):
        dim = 2 ** self.arity
        self.kraus = [np.asarray(k, dtype=complex) for k in self.kraus]
        for k in self.kraus:
            if k.shape != (dim, dim):
                raise ValueError("Kraus operator shape mismatch")

    def validate(self, atol: float = ATOL_ALGEBRA) -> None:
        """Trace preservation: sum_K K^dag K = 1 within atol."""
        dim = 2 ** self.arity
        acc = sum(k.conj().T @ k for k in self.kraus)
        if not np.allclose(acc, np.eye(dim), atol=atol):
            raise ValueError("Kraus operators do not satisfy completeness")


def apply_unitary(rho: DensityMatrix, gate: np.ndarray, qubits: tuple[int, ...]) -> DensityMatrix:
    """Conjugate ``rho`` by a local unitary acting on ``qubits``."""
    flat = kernels.apply_gate_density(rho.matrix.reshape(-1), gate, qubits, rho.num_qubits)
    dim = 2 ** rho.num_qubits
    return DensityMatrix(flat.reshape(dim, dim), rho.num_qubits)


def _mix_sites(rho_mat: np.ndarray, qubits: tuple[int, ...], nq: int) -> np.ndarray:
    """Replace the state on ``qubits`` with the maximally mixed state."""
    t = rho_mat.reshape([2] * (2 * nq))
    for q in qubits:
        ket, bra = q, q + nq
        tr = np.trace(t, axis1=ket, axis2=bra)
        # reinsert identity/2 on the traced pair of axes
        eye = np.eye(2) / 2.0
        t = np.tensordot(tr, eye, axes=0)
        # new axes are at the end; move them back to (ket, bra)
        nd = t.ndim
        t = np.moveaxis(t, [nd - 2, nd - 1], [ket, bra])
    dim = 2 ** nq
    return np.ascontiguousarray(t).reshape(dim, dim)


def apply_channel(rho: DensityMatrix, channel: Channel, qubits: tuple[int, ...]) -> DensityMatrix:
    """Apply a Kraus channel to the given qubits of ``rho``."""
    if len(qubits) != channel.arity:
        raise ValueError("channel arity does not match qubit count")
    nq = rho.num_qubits
    if channel.kind == "depolarizing":
        p = channel.param
        mixed = _mix_sites(rho.matrix, qubits, nq)
        return DensityMatrix((1.0 - p) * rho.matrix + p * mixed, nq)
    flat = rho.matrix.reshape(-1)
    acc = np.zeros_like(flat)
    for k in channel.kraus:
        acc = acc + kernels.apply_gate_density(flat, k, qubits, nq)
    dim = 2 ** nq
    return DensityMatrix(acc.reshape(dim, dim), nq)


def exact_evolution(h: PauliSumOperator | np.ndarray, t: float) -> np.ndarray:
    """Dense ``exp(-i t H)`` by Hermitian eigendecomposition."""
    m = h.to_matrix() if isinstance(h, PauliSumOperator) else np.asarray(h, dtype=complex)
    w, v = scipy.linalg.eigh(m)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def purity(rho: DensityMatrix) -> float:
    return float(np.real(np.trace(rho.matrix @ rho.matrix)))


def project_and_reduce(rho: DensityMatrix, keep: int,
                       others_value: int = 0) -> tuple[np.ndarray, float]:
    """Project all qubits except ``keep`` onto ``|others_value...>`` and reduce.

    Returns the unnormalized 2x2 block on the kept qubit and its trace (the
    post-selection success probability).  Used for ancilla tomography where
    the system register is post-selected on the all-zeros outcome.
    """
    nq = rho.num_qubits
    t = rho.matrix.reshape([2] * (2 * nq))
    idx: list[object] = []
    for q in range(nq):
        idx.append(slice(None) if q == keep else others_value)
    for q in range(nq):
        idx.append(slice(None) if q == keep else others_value)
    block = np.asarray(t[tuple(idx)], dtype=complex).reshape(2, 2)
    return block, float(np.real(np.trace(block)))


def states_equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = ATOL_ALGEBRA) -> bool:
    """Global-phase-insensitive statevector comparison."""
    a = np.asarray(a).reshape(-1)
    b = np.asarray(b).reshape(-1)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < atol or nb < atol:
        return na < atol and nb < atol
    return abs(abs(np.vdot(a, b)) / (na * nb) - 1.0) < atol


def unitaries_equal_up_to_phase(u: np.ndarray, v: np.ndarray, atol: float = ATOL_ALGEBRA) -> bool:
    """``|Tr(U^dag V)| / dim == 1`` within atol."""
    dim = u.shape[0]
    return abs(abs(np.trace(u.conj().T @ v)) / dim - 1.0) < atol


def phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Spectral-norm distance between unitaries after optimal phase alignment."""
    tr = np.trace(u.conj().T @ v)
    phase = tr / abs(tr) if abs(tr) > 1e-300 else 1.0
    return float(np.linalg.norm(v / phase - u, ord=2))
