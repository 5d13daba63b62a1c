"""Product-formula evolution for the lattice model.

The Hamiltonian splits into a transverse part A (single-qubit X terms) and a
diagonal part B (Z strings).  Identity terms only contribute a global phase
and are dropped throughout this module, so circuits and dense formulas agree
exactly, not merely up to phase.

Orders: 1 is A then B; 2 is the symmetric split A/2, B, A/2; higher even
orders 2j follow the recursive construction
``S_2j(t) = S_2j-2(p t)^2 S_2j-2((1-4p) t) S_2j-2(p t)^2`` with
``p = 1 / (4 - 4^(1/(2j-1)))``.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .circuits import Circuit
from .lattice import COUPLING_CHAIN, NUM_QUBITS
from .paulis import PauliString, PauliSumOperator
from .states import phase_distance
from .templates import chain_rotation_block, fanout_rotation_block, relay_cnot

# Diagonal supports the shared-ladder step layout can absorb, keyed by the
# block that takes them.  Wire tuples refer to the fan-out pattern roles.
_FANOUT_A = ((0, 3, 2, 1), (frozenset({0, 3}), frozenset({0, 2, 3}), frozenset({0, 1, 3})))
_CHAIN_B = ((3, 2, 1), frozenset({1, 2, 3}))
_FANOUT_C = ((1, 2, 3, 0), (frozenset({1, 2}), None, frozenset({0, 1, 2})))


def split_terms(h: PauliSumOperator):
    """(transverse [(coeff, qubit)], diagonal [(coeff, string)]); identity dropped."""
    transverse, diagonal = [], []
    for coeff, p in h.terms:
        if p.is_identity():
            continue
        if p.is_diagonal():
            diagonal.append((coeff, p))
        elif p.weight == 1 and p.factors[p.support[0]] == "X":
            transverse.append((coeff, p.support[0]))
        else:
            raise ValueError(f"term {p} fits neither the X nor the Z layer")
    return transverse, diagonal


def _suzuki_fragments(order: int, t: float) -> list[float]:
    """Durations of the order-2 steps composing one order-``order`` step."""
    if order == 2:
        return [t]
    if order < 2 or order % 2:
        raise ValueError("recursive construction needs an even order >= 2")
    p = 1.0 / (4.0 - 4.0 ** (1.0 / (order - 1)))
    inner = lambda s: _suzuki_fragments(order - 2, s)
    return inner(p * t) * 2 + inner((1.0 - 4.0 * p) * t) + inner(p * t) * 2


def _x_layer(circuit: Circuit, transverse, t: float) -> None:
    for coeff, q in transverse:
        circuit.rx(q, 2.0 * coeff * t)


def _generic_diagonal(circuit: Circuit, pauli: PauliString, theta: float,
                      chain) -> None:
    """Parity ladder for one Z string; relays bridge non-adjacent supports."""
    sites = sorted(pauli.support, key=lambda q: chain.index(q))
    fwd = []
    for a, b in zip(sites, sites[1:]):
        fwd += relay_cnot(a, b, chain)
    for g in fwd:
        circuit.add(g)
    circuit.rz(sites[-1], theta)
    for g in reversed(fwd):
        circuit.add(g)


def _diagonal_layer(circuit: Circuit, diagonal, t: float,
                    chain=COUPLING_CHAIN) -> None:
    """Apply exp(-i B t) using the three shared-ladder blocks when the term
    structure allows, one generic ladder per leftover term otherwise."""
    coeffs = {frozenset(p.support): 2.0 * c * t for c, p in diagonal}
    if len(coeffs) != len(diagonal):
        raise ValueError("duplicate diagonal supports")
    blocks = set(_FANOUT_A[1]) | {_CHAIN_B[1]} | {s for s in _FANOUT_C[1] if s}
    if set(coeffs) <= blocks:
        def fanout(spec):
            wires, keys = spec
            thetas = tuple(coeffs.get(k) if k else None for k in keys)
            if any(theta is not None for theta in thetas):
                fanout_rotation_block(circuit, wires, thetas)

        fanout(_FANOUT_A)
        if _CHAIN_B[1] in coeffs:
            chain_rotation_block(circuit, _CHAIN_B[0], coeffs[_CHAIN_B[1]])
        fanout(_FANOUT_C)
    else:
        for c, p in diagonal:
            _generic_diagonal(circuit, p, 2.0 * c * t, chain)


def step_circuit(h: PauliSumOperator, t: float, order: int = 2,
                 num_qubits: int = NUM_QUBITS) -> Circuit:
    """One product-formula step as a circuit (identity phase dropped)."""
    transverse, diagonal = split_terms(h)
    circuit = Circuit(num_qubits)
    if order == 1:
        _x_layer(circuit, transverse, t)
        _diagonal_layer(circuit, diagonal, t)
        return circuit
    for frag in _suzuki_fragments(order, t):
        _x_layer(circuit, transverse, frag / 2.0)
        _diagonal_layer(circuit, diagonal, frag)
        _x_layer(circuit, transverse, frag / 2.0)
    return circuit


def evolution_circuit(h: PauliSumOperator, t: float, steps: int,
                      order: int = 2, num_qubits: int = NUM_QUBITS) -> Circuit:
    """``steps`` repetitions of the step circuit at t/steps each."""
    if steps < 1:
        raise ValueError("steps must be positive")
    circuit = Circuit(num_qubits)
    one = step_circuit(h, t / steps, order, num_qubits)
    for _ in range(steps):
        circuit.extend(one)
    return circuit


def _split_matrices(h: PauliSumOperator):
    transverse, diagonal = split_terms(h)
    dim = 2 ** h.num_qubits
    a = np.zeros((dim, dim), dtype=complex)
    for coeff, q in transverse:
        a += coeff * PauliString.from_sites(h.num_qubits, {q: "X"}).to_matrix()
    b = np.zeros((dim, dim), dtype=complex)
    for coeff, p in diagonal:
        b += coeff * p.to_matrix()
    return a, b


def trotter_unitary(h: PauliSumOperator, t: float, order: int = 2,
                    steps: int = 1) -> np.ndarray:
    """Dense product-formula unitary, same conventions as the circuits."""
    a, b = _split_matrices(h)
    dt = t / steps
    if order == 1:
        step = scipy.linalg.expm(-1j * b * dt) @ scipy.linalg.expm(-1j * a * dt)
    else:
        step = np.eye(a.shape[0], dtype=complex)
        for frag in _suzuki_fragments(order, dt):
            half = scipy.linalg.expm(-1j * a * frag / 2.0)
            step = half @ scipy.linalg.expm(-1j * b * frag) @ half @ step
    return np.linalg.matrix_power(step, steps)


def trotter_error(h: PauliSumOperator, t: float, order: int = 2,
                  steps: int = 1) -> float:
    """Spectral-norm distance to the exact evolution, phase aligned."""
    a, b = _split_matrices(h)
    exact = scipy.linalg.expm(-1j * (a + b) * t)
    return phase_distance(trotter_unitary(h, t, order, steps), exact)


def error_slope(h: PauliSumOperator, order: int,
                times: np.ndarray | None = None) -> float:
    """Fitted log-log slope of single-step error against step duration."""
    if times is None:
        times = np.geomspace(0.02, 0.2, 7)
    errs = [trotter_error(h, t, order, 1) for t in times]
    slope, _ = np.polyfit(np.log(times), np.log(errs), 1)
    return float(slope)
