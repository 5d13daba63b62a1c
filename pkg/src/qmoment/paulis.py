"""Pauli strings and real-weighted sums of them.

A :class:`PauliString` is a tensor product of single-qubit factors from
``{I, X, Y, Z}`` together with a phase from ``{1, -1, 1j, -1j}``.  Products,
commutation checks and dense matrices are exact (integer/complex-unit
arithmetic), so these objects double as the oracle layer for circuit tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

_FACTORS = "IXYZ"

SINGLE_QUBIT_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# (a, b) -> (phase, product) for single-qubit Pauli multiplication a*b.
_MUL = {}
for _a in _FACTORS:
    for _b in _FACTORS:
        _m = SINGLE_QUBIT_MATRICES[_a] @ SINGLE_QUBIT_MATRICES[_b]
        for _c in _FACTORS:
            for _ph in (1, -1, 1j, -1j):
                if np.allclose(_m, _ph * SINGLE_QUBIT_MATRICES[_c]):
                    _MUL[(_a, _b)] = (_ph, _c)
del _a, _b, _c, _m, _ph

_PHASES = (1, -1, 1j, -1j)


def _normalize_phase(phase: complex) -> complex:
    for p in _PHASES:
        if abs(phase - p) < 1e-12:
            return p
    raise ValueError(f"phase must be a fourth root of unity, got {phase!r}")


@dataclass(frozen=True)
class PauliString:
    """Phased tensor product of single-qubit Paulis on ``num_qubits`` qubits."""

    factors: str
    phase: complex = 1

    def __post_init__(self):
        if not self.factors or any(f not in _FACTORS for f in self.factors):
            raise ValueError(f"invalid factors {self.factors!r}")
        object.__setattr__(self, "phase", _normalize_phase(self.phase))

    @classmethod
    def from_sites(cls, num_qubits: int, sites: dict[int, str] | Iterable[tuple[int, str]],
                   phase: complex = 1) -> "PauliString":
        """Build from a sparse ``{qubit: factor}`` map, identity elsewhere."""
        items = dict(sites)
        factors = ["I"] * num_qubits
        for q, f in items.items():
            if not 0 <= q < num_qubits:
                raise ValueError(f"site {q} out of range for {num_qubits} qubits")
            factors[q] = f
        return cls("".join(factors), phase)

    @classmethod
    def identity(cls, num_qubits: int) -> "PauliString":
        return cls("I" * num_qubits)

    @property
    def num_qubits(self) -> int:
        return len(self.factors)

    @property
    def weight(self) -> int:
        """Number of non-identity factors."""
        return sum(f != "I" for f in self.factors)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, f in enumerate(self.factors) if f != "I")

    def is_identity(self) -> bool:
        return self.weight == 0

    def is_diagonal(self) -> bool:
        """True when every factor is I or Z."""
        return all(f in "IZ" for f in self.factors)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.num_qubits != other.num_qubits:
            raise ValueError("qubit count mismatch")
        phase = self.phase * other.phase
        out = []
        for a, b in zip(self.factors, other.factors):
            p, c = _MUL[(a, b)]
            phase *= p
            out.append(c)
        return PauliString("".join(out), phase)

    def adjoint(self) -> "PauliString":
        return PauliString(self.factors, np.conj(self.phase))

    def without_phase(self) -> "PauliString":
        return PauliString(self.factors)

    def to_matrix(self) -> np.ndarray:
        """Dense ``2^n x 2^n`` matrix, qubit 0 on the leftmost kron factor."""
        mats = [SINGLE_QUBIT_MATRICES[f] for f in self.factors]
        return self.phase * reduce(np.kron, mats)

    def restricted_matrix(self) -> np.ndarray:
        """Dense matrix on the support qubits only (identity factors dropped)."""
        mats = [SINGLE_QUBIT_MATRICES[f] for f in self.factors if f != "I"]
        if not mats:
            return self.phase * np.eye(1, dtype=complex)
        return self.phase * reduce(np.kron, mats)

    def __str__(self):
        pre = {1: "", -1: "-", 1j: "i", -1j: "-i"}[self.phase]
        return pre + self.factors


def pauli_commutes(a: PauliString, b: PauliString) -> bool:
    """Commutation by the parity rule: even number of differing non-identity sites."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("qubit count mismatch")
    diff = sum(1 for fa, fb in zip(a.factors, b.factors)
               if fa != "I" and fb != "I" and fa != fb)
    return diff % 2 == 0


@dataclass
class PauliSumOperator:
    """Real linear combination of phase-free Pauli strings, canonicalized.

    Canonical form: every stored string has phase +1, strings are unique,
    zero coefficients are dropped, and terms keep first-appearance order.
    """

    terms: list[tuple[float, PauliString]] = field(default_factory=list)
    num_qubits: int = 0

    def __post_init__(self):
        if self.terms and self.num_qubits == 0:
            self.num_qubits = self.terms[0][1].num_qubits
        self.terms = self._canonicalize(self.terms, self.num_qubits)

    @staticmethod
    def _canonicalize(terms: Sequence[tuple[float, PauliString]], num_qubits: int):
        merged: dict[str, float] = {}
        order: list[str] = []
        for coeff, string in terms:
            if string.num_qubits != num_qubits:
                raise ValueError("qubit count mismatch among terms")
            if string.phase not in (1, -1):
                raise ValueError("sum terms must carry real phase")
            c = float(coeff) * string.phase.real
            key = string.factors
            if key not in merged:
                merged[key] = 0.0
                order.append(key)
            merged[key] += c
        out = []
        for key in order:
            if abs(merged[key]) > 1e-14:
                out.append((merged[key], PauliString(key)))
        return out

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[float, PauliString]],
                   num_qubits: int | None = None) -> "PauliSumOperator":
        terms = list(terms)
        if num_qubits is None:
            if not terms:
                raise ValueError("num_qubits required for an empty operator")
            num_qubits = terms[0][1].num_qubits
        return cls(terms, num_qubits)

    def __add__(self, other: "PauliSumOperator") -> "PauliSumOperator":
        if self.num_qubits != other.num_qubits:
            raise ValueError("qubit count mismatch")
        return PauliSumOperator(self.terms + other.terms, self.num_qubits)

    def __rmul__(self, scalar: float) -> "PauliSumOperator":
        return PauliSumOperator([(scalar * c, s) for c, s in self.terms], self.num_qubits)

    def __len__(self):
        return len(self.terms)

    def coefficient(self, factors: str) -> float:
        for c, s in self.terms:
            if s.factors == factors:
                return c
        return 0.0

    def identity_part(self) -> float:
        return self.coefficient("I" * self.num_qubits)

    def without_identity(self) -> "PauliSumOperator":
        terms = [(c, s) for c, s in self.terms if not s.is_identity()]
        return PauliSumOperator(terms, self.num_qubits)

    def to_matrix(self) -> np.ndarray:
        dim = 2 ** self.num_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for c, s in self.terms:
            out += c * s.to_matrix()
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c:g}*{s.factors}" for c, s in self.terms)
