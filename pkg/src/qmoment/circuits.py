"""Circuit intermediate representation, dense simulation and sampling.

Gate kinds: H X Y Z S SDG RX RY RZ CNOT CZ CPAULI.  ``CPAULI`` is a
controlled Pauli-string gate kept first-class so reversal constructions can
be lowered lazily; :mod:`qmoment.templates` owns the lowering.

Rotation convention: ``RX(theta) = exp(-i theta X / 2)`` and likewise for
RY/RZ, so ``exp(-i t c P)`` for a Pauli term needs ``theta = 2 t c``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .paulis import PauliString, SINGLE_QUBIT_MATRICES
from .states import Channel, DensityMatrix, StateVector

_SQRT2 = np.sqrt(2.0)

FIXED_MATRICES = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / _SQRT2,
    "X": SINGLE_QUBIT_MATRICES["X"],
    "Y": SINGLE_QUBIT_MATRICES["Y"],
    "Z": SINGLE_QUBIT_MATRICES["Z"],
    "S": np.diag([1, 1j]).astype(complex),
    "SDG": np.diag([1, -1j]).astype(complex),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
}

ROTATIONS = ("RX", "RY", "RZ")
GATE_KINDS = tuple(FIXED_MATRICES) + ROTATIONS + ("CPAULI",)


def _rotation_matrix(kind: str, theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]])
    raise ValueError(kind)


@dataclass(frozen=True)
class Gate:
    """One gate application.  ``sites`` order is the gate's own bit order."""

    kind: str
    sites: tuple[int, ...]
    param: float | None = None
    pauli: PauliString | None = None
    polarity: int = 1

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(set(self.sites)) != len(self.sites):
            raise ValueError("repeated site in gate")
        if self.kind in ROTATIONS and self.param is None:
            raise ValueError(f"{self.kind} requires an angle")
        if self.kind == "CPAULI":
            if self.pauli is None:
                raise ValueError("CPAULI requires a Pauli string")
            if self.pauli.phase not in (1, -1):
                raise ValueError("controlled Pauli phase must be +-1")
            if self.polarity not in (0, 1):
                raise ValueError("polarity must be 0 or 1")

    @property
    def num_sites(self) -> int:
        return len(self.sites)

    def matrix(self) -> np.ndarray:
        """Local matrix over ``sites`` (first site = slowest gate bit)."""
        if self.kind in FIXED_MATRICES:
            return FIXED_MATRICES[self.kind]
        if self.kind in ROTATIONS:
            return _rotation_matrix(self.kind, self.param)
        # CPAULI: control first, then the Pauli support in listed order
        p = self.pauli.restricted_matrix()
        dim = p.shape[0]
        on = np.zeros((2, 2)); on[self.polarity, self.polarity] = 1.0
        off = np.eye(2) - on
        return np.kron(off, np.eye(dim, dtype=complex)) + np.kron(on, p)

    def dagger(self) -> "Gate":
        if self.kind in ("H", "X", "Y", "Z", "CNOT", "CZ"):
            return self
        if self.kind == "S":
            return replace(self, kind="SDG")
        if self.kind == "SDG":
            return replace(self, kind="S")
        if self.kind in ROTATIONS:
            return replace(self, param=-self.param)
        return replace(self, pauli=self.pauli.adjoint())


def controlled_pauli(control: int, pauli: PauliString, polarity: int = 1) -> Gate:
    """CPAULI gate; sites are the control followed by the support qubits."""
    sites = (control,) + pauli.support
    if control in pauli.support:
        raise ValueError("control overlaps Pauli support")
    return Gate("CPAULI", sites, pauli=pauli, polarity=polarity)


@dataclass
class Circuit:
    """Ordered gate list on ``num_qubits`` qubits.

    Treated as immutable once handed to simulation or compilation; the
    builder methods return ``self`` for chaining.
    """

    num_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def add(self, gate: Gate) -> "Circuit":
        for s in gate.sites:
            if not 0 <= s < self.num_qubits:
                raise ValueError(f"site {s} out of range")
        self.gates.append(gate)
        return self

    def h(self, q): return self.add(Gate("H", (q,)))
    def x(self, q): return self.add(Gate("X", (q,)))
    def y(self, q): return self.add(Gate("Y", (q,)))
    def z(self, q): return self.add(Gate("Z", (q,)))
    def s(self, q): return self.add(Gate("S", (q,)))
    def sdg(self, q): return self.add(Gate("SDG", (q,)))
    def rx(self, q, theta): return self.add(Gate("RX", (q,), float(theta)))
    def ry(self, q, theta): return self.add(Gate("RY", (q,), float(theta)))
    def rz(self, q, theta): return self.add(Gate("RZ", (q,), float(theta)))
    def cnot(self, c, t): return self.add(Gate("CNOT", (c, t)))
    def cz(self, a, b): return self.add(Gate("CZ", (a, b)))

    def cpauli(self, control, pauli, polarity=1):
        return self.add(controlled_pauli(control, pauli, polarity))

    def extend(self, other: "Circuit") -> "Circuit":
        if other.num_qubits != self.num_qubits:
            raise ValueError("qubit count mismatch")
        for g in other.gates:
            self.add(g)
        return self

    def inverse(self) -> "Circuit":
        inv = Circuit(self.num_qubits)
        for g in reversed(self.gates):
            inv.add(g.dagger())
        return inv

    def copy(self) -> "Circuit":
        return Circuit(self.num_qubits, list(self.gates))

    def __len__(self):
        return len(self.gates)


def apply_circuit(circuit: Circuit, state: StateVector) -> StateVector:
    """Noiseless statevector evolution."""
    if state.num_qubits != circuit.num_qubits:
        raise ValueError("qubit count mismatch")
    v = state.vector.copy()
    for g in circuit.gates:
        v = kernels.apply_gate(v, g.matrix(), g.sites, circuit.num_qubits)
    return StateVector(v, circuit.num_qubits)


def circuit_to_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of the whole circuit (n <= 10)."""
    n = circuit.num_qubits
    dim = 2 ** n
    u = np.eye(dim, dtype=complex).reshape(-1)
    for g in circuit.gates:
        u = kernels.apply_gate_unitary_left(u, g.matrix(), g.sites, n)
    return u.reshape(dim, dim)


def simulate_noiseless(circuit: Circuit,
                       rho_in: DensityMatrix | None = None) -> DensityMatrix:
    from .states import apply_unitary
    rho = rho_in if rho_in is not None else DensityMatrix.zero(circuit.num_qubits)
    for g in circuit.gates:
        rho = apply_unitary(rho, g.matrix(), g.sites)
    return rho


def simulate_noisy(circuit: Circuit, noise, rho_in: DensityMatrix | None = None) -> DensityMatrix:
    """Density-matrix simulation: each gate's unitary, then its noise channel.

    ``noise`` is a :class:`qmoment.noise.NoiseModel` (or None for noiseless).
    Readout confusion is *not* applied here; it belongs to sampling.
    """
    from .states import apply_channel, apply_unitary

    rho = rho_in if rho_in is not None else DensityMatrix.zero(circuit.num_qubits)
    if rho.num_qubits != circuit.num_qubits:
        raise ValueError("qubit count mismatch")
    if noise is None:
        return simulate_noiseless(circuit, rho)
    for index, g in enumerate(circuit.gates):
        rho = apply_unitary(rho, g.matrix(), g.sites)
        for channel, qubits in noise.channels_for(index, g):
            rho = apply_channel(rho, channel, qubits)
    if noise.global_channel is not None:
        rho = apply_channel(rho, noise.global_channel, tuple(range(circuit.num_qubits)))
    return rho


@dataclass
class MeasurementCounts:
    """Computational-basis counts keyed by bitstring (char i = qubit i)."""

    counts: dict[str, int]
    num_qubits: int
    shots: int

    def __post_init__(self):
        total = 0
        for label, c in self.counts.items():
            if len(label) != self.num_qubits or any(ch not in "01" for ch in label):
                raise ValueError(f"bad outcome label {label!r}")
            if c < 0:
                raise ValueError("negative count")
            total += c
        if total != self.shots:
            raise ValueError(f"counts sum {total} != shots {self.shots}")

    def merged_with(self, other: "MeasurementCounts") -> "MeasurementCounts":
        if other.num_qubits != self.num_qubits:
            raise ValueError("qubit count mismatch")
        out = dict(self.counts)
        for k, v in other.counts.items():
            out[k] = out.get(k, 0) + v
        return MeasurementCounts(out, self.num_qubits, self.shots + other.shots)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("outcome,count\n")
        for label in sorted(self.counts):
            buf.write(f"{label},{self.counts[label]}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, num_qubits: int | None = None) -> "MeasurementCounts":
        lines = [ln for ln in text.strip().splitlines() if ln]
        if lines and lines[0].lower().startswith("outcome"):
            lines = lines[1:]
        counts = {}
        for ln in lines:
            label, c = ln.split(",")
            counts[label.strip()] = counts.get(label.strip(), 0) + int(c)
        n = num_qubits if num_qubits is not None else len(next(iter(counts)))
        return cls(counts, n, sum(counts.values()))


def sample_counts(rho: DensityMatrix, shots: int, seed,
                  confusion: list[np.ndarray] | None = None) -> MeasurementCounts:
    """Multinomial draw from diag(rho), then per-qubit readout bit flips.

    ``confusion`` is one column-stochastic 2x2 matrix per qubit with
    ``P[i, j] = P(read i | true j)``.  Deterministic for a given seed.
    """
    nq = rho.num_qubits
    dim = 2 ** nq
    rng = np.random.default_rng(seed)
    p = rho.probabilities()
    total = p.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"probabilities sum to {total}")
    p = p / total
    raw = rng.multinomial(shots, p)
    if confusion is not None:
        if len(confusion) != nq:
            raise ValueError("need one confusion matrix per qubit")
        for q in range(nq):
            m = np.asarray(confusion[q], dtype=float)
            if m.shape != (2, 2) or not np.allclose(m.sum(axis=0), 1.0, atol=1e-9):
                raise ValueError("confusion matrices must be 2x2 column-stochastic")
            bit = 1 << (nq - 1 - q)
            flipped = np.zeros_like(raw)
            for idx in np.nonzero(raw)[0]:
                b = (idx >> (nq - 1 - q)) & 1
                nflip = rng.binomial(raw[idx], m[1 - b, b])
                flipped[idx ^ bit] += nflip
                flipped[idx] += raw[idx] - nflip
            raw = flipped
    counts = {}
    for idx in np.nonzero(raw)[0]:
        counts[format(idx, f"0{nq}b")] = int(raw[idx])
    return MeasurementCounts(counts, nq, shots)


def serialize_circuit(circuit: Circuit) -> str:
    """Line-oriented text form; round-trips exactly (angles via repr)."""
    lines = [f"qubits {circuit.num_qubits}"]
    for g in circuit.gates:
        if g.kind == "CPAULI":
            sign = "-" if g.pauli.phase == -1 else ""
            lines.append(f"CPAULI {g.sites[0]} {g.polarity} {sign}{g.pauli.factors}")
        elif g.param is not None:
            lines.append(f"{g.kind} {' '.join(map(str, g.sites))} {g.param!r}")
        else:
            lines.append(f"{g.kind} {' '.join(map(str, g.sites))}")
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("qubits "):
        raise ValueError("missing 'qubits N' header")
    circuit = Circuit(int(lines[0].split()[1]))
    for ln in lines[1:]:
        parts = ln.split()
        kind = parts[0].upper()
        if kind == "CPAULI":
            control, polarity = int(parts[1]), int(parts[2])
            spec = parts[3]
            phase = 1
            if spec.startswith("-"):
                phase, spec = -1, spec[1:]
            circuit.cpauli(control, PauliString(spec, phase), polarity)
        elif kind in ROTATIONS:
            circuit.add(Gate(kind, tuple(int(s) for s in parts[1:-1]), float(parts[-1])))
        elif kind in FIXED_MATRICES:
            circuit.add(Gate(kind, tuple(int(s) for s in parts[1:])))
        else:
            raise ValueError(f"unknown gate {kind!r} in line {ln!r}")
    return circuit
