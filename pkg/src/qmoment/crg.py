"""Controlled reversal gates: echo evolution steered by the probe qubit.

A reversal for a set of Pauli terms is a Pauli string anticommuting with
every member, so conjugating by it flips the sign of the evolution time for
exactly those terms.  Applying reversals controlled on the probe being |0>
around an otherwise unconditional product-formula circuit yields forward
evolution on the |1> branch and inverse evolution on the |0> branch; an
uncontrolled forward block in front turns that into a verification echo
(|0> branch returns to the start) while the |1> branch evolves twice as far.

The lattice model needs just two reversals: ``ZZZY`` on the position
register takes the whole transverse layer and every Z string touching
qubit 3, and a single ``X`` on qubit 1 (the wire next to the probe) takes
the remaining two diagonal terms.  The merged step body costs two extra
CNOTs per step plus the pair of controlled-``ZZZY`` gates (7 CNOTs each) at
the ends, independent of the step count.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .circuits import Circuit, controlled_pauli
from .lattice import FULL_QUBITS, PROBE
from .paulis import PauliString, PauliSumOperator, pauli_commutes
from .templates import (chain_rotation_block, fanout_rotation_block,
                        pauli_rotation_block)
from .trotter import _CHAIN_B, _FANOUT_A, _FANOUT_C, _x_layer, split_terms

EDGE_REVERSAL = PauliString("ZZZY")
MID_REVERSAL = PauliString("IXII")

_SEARCH_LIMIT = 8  # exhaustive reversal search enumerates 4^n strings


@dataclass(frozen=True)
class ReversalGroup:
    """Term indices sharing one reversal string."""

    reversal: PauliString
    indices: tuple[int, ...]


def _candidate_strings(num_qubits: int):
    """All non-identity Pauli strings, cheapest first: by weight, then
    support position, then letters with X before Y before Z."""
    for weight in range(1, num_qubits + 1):
        for support in itertools.combinations(range(num_qubits), weight):
            for letters in itertools.product("XYZ", repeat=weight):
                yield PauliString.from_sites(num_qubits, dict(zip(support, letters)))


def find_reversal(members: list[PauliString], num_qubits: int) -> PauliString | None:
    """Cheapest Pauli string anticommuting with every member, or None."""
    if num_qubits > _SEARCH_LIMIT:
        raise ValueError(f"reversal search is exhaustive; need <= {_SEARCH_LIMIT} qubits")
    for cand in _candidate_strings(num_qubits):
        if all(not pauli_commutes(cand, p) for p in members):
            return cand
    return None


def crg_grouping(h: PauliSumOperator, method: str = "greedy") -> list[ReversalGroup]:
    """Partition the non-identity terms of ``h`` into reversal groups.

    ``greedy``: first-fit within the off-diagonal and diagonal sectors
    separately, re-searching for the cheapest reversal as members join.
    Keeping the sectors apart costs nothing for a transverse-field layout
    and keeps every diagonal group's reversal free of Z factors.

    ``worst-case``: one group per (first support site, X/Y-or-Z there),
    at most 2n groups, each with a weight-1 reversal.  Linear time, used
    as the fallback bound.
    """
    indexed = [(i, p) for i, (_, p) in enumerate(h.terms) if not p.is_identity()]
    n = h.num_qubits
    if method == "worst-case":
        keyed: dict[tuple[int, bool], list[int]] = {}
        for i, p in indexed:
            q = p.support[0]
            keyed.setdefault((q, p.factors[q] == "Z"), []).append(i)
        groups = []
        for (q, diag), idxs in sorted(keyed.items()):
            letter = "X" if diag else "Z"
            groups.append(ReversalGroup(
                PauliString.from_sites(n, {q: letter}), tuple(idxs)))
        return groups
    if method != "greedy":
        raise ValueError(f"unknown grouping method {method!r}")
    groups = []
    for sector in (False, True):
        open_groups: list[tuple[PauliString, list[int], list[PauliString]]] = []
        for i, p in indexed:
            if p.is_diagonal() is not sector:
                continue
            for g, (rev, idxs, members) in enumerate(open_groups):
                cand = find_reversal(members + [p], n)
                if cand is not None:
                    open_groups[g] = (cand, idxs + [i], members + [p])
                    break
            else:
                rev = find_reversal([p], n)
                open_groups.append((rev, [i], [p]))
        groups += [ReversalGroup(rev, tuple(idxs)) for rev, idxs, _ in open_groups]
    return groups


def grouping_is_valid(h: PauliSumOperator, groups: list[ReversalGroup]) -> bool:
    """Every non-identity term in exactly one group, anticommuting with its
    group's reversal."""
    want = {i for i, (_, p) in enumerate(h.terms) if not p.is_identity()}
    seen: set[int] = set()
    for g in groups:
        for i in g.indices:
            if i in seen or pauli_commutes(g.reversal, h.terms[i][1]):
                return False
            seen.add(i)
    return seen == want


def group_operator(h: PauliSumOperator, group: ReversalGroup) -> PauliSumOperator:
    return PauliSumOperator([h.terms[i] for i in group.indices], h.num_qubits)


def _pad(p: PauliString, num_qubits: int) -> PauliString:
    return PauliString(p.factors + "I" * (num_qubits - p.num_qubits), p.phase)


def _nuclear_layout(h: PauliSumOperator):
    """Split terms for the merged echo body; None when the model's term
    structure does not fit the two hard-wired reversals."""
    if h.num_qubits != EDGE_REVERSAL.num_qubits:
        return None
    try:
        transverse, diagonal = split_terms(h)
    except ValueError:
        return None
    edge, mid = [], []
    for c, p in diagonal:
        if not pauli_commutes(EDGE_REVERSAL, p):
            edge.append((c, p))
        elif not pauli_commutes(MID_REVERSAL, p):
            mid.append((c, p))
        else:
            return None
    for _, q in transverse:
        if pauli_commutes(EDGE_REVERSAL, PauliString.from_sites(h.num_qubits, {q: "X"})):
            return None
    fan_a = set(_FANOUT_A[1]) | {_CHAIN_B[1]}
    fan_c = {s for s in _FANOUT_C[1] if s}
    if not {frozenset(p.support) for _, p in edge} <= fan_a:
        return None
    if not {frozenset(p.support) for _, p in mid} <= fan_c:
        return None
    return transverse, edge, mid


def _merged_body(h: PauliSumOperator, dt: float) -> Circuit:
    """One second-order step; conjugation by EDGE_REVERSAL plus the two
    probe-controlled X gates flips its sign exactly."""
    transverse, edge, mid = _nuclear_layout(h)
    body = Circuit(FULL_QUBITS)
    _x_layer(body, transverse, dt / 2.0)
    coeffs = {frozenset(p.support): 2.0 * c * dt for c, p in edge}
    fanout_rotation_block(body, _FANOUT_A[0],
                          tuple(coeffs.get(k) for k in _FANOUT_A[1]))
    if _CHAIN_B[1] in coeffs:
        chain_rotation_block(body, _CHAIN_B[0], coeffs[_CHAIN_B[1]])
    mid_coeffs = {frozenset(p.support): 2.0 * c * dt for c, p in mid}
    body.cpauli(PROBE, _pad(MID_REVERSAL, FULL_QUBITS), polarity=0)
    fanout_rotation_block(body, _FANOUT_C[0],
                          tuple(mid_coeffs.get(k) if k else None for k in _FANOUT_C[1]))
    body.cpauli(PROBE, _pad(MID_REVERSAL, FULL_QUBITS), polarity=0)
    _x_layer(body, transverse, dt / 2.0)
    return body


def _generic_body(h: PauliSumOperator, dt: float,
                  groups: list[ReversalGroup]) -> Circuit:
    """Palindromic second-order step with every rotation wrapped in its
    group's probe-controlled reversal.  Correct for any grouping; no claim
    on gate count."""
    rev_of = {}
    for g in groups:
        for i in g.indices:
            rev_of[i] = _pad(g.reversal, FULL_QUBITS)
    body = Circuit(FULL_QUBITS)
    order = [i for i, (_, p) in enumerate(h.terms) if not p.is_identity()]
    for i in order + order[::-1]:
        c, p = h.terms[i]
        body.cpauli(PROBE, rev_of[i], polarity=0)
        pauli_rotation_block(body, _pad(p, FULL_QUBITS), c * dt)  # half step
        body.cpauli(PROBE, rev_of[i], polarity=0)
    return body


def _sign_controlled(h: PauliSumOperator, step_times: list[float],
                     groups: list[ReversalGroup] | None) -> Circuit:
    circuit = Circuit(FULL_QUBITS)
    layout = _nuclear_layout(h)
    if layout is not None:
        edge = controlled_pauli(PROBE, _pad(EDGE_REVERSAL, FULL_QUBITS), polarity=0)
        circuit.add(edge)
        for dt in step_times:
            circuit.extend(_merged_body(h, dt))
        circuit.add(edge)
        return circuit
    if groups is None:
        groups = crg_grouping(h)
    for dt in step_times:
        circuit.extend(_generic_body(h, dt, groups))
    return circuit


def sign_controlled_evolution(h: PauliSumOperator, t: float, steps: int,
                              groups: list[ReversalGroup] | None = None) -> Circuit:
    """Circuit equal to U(t) when the probe is |1> and U(t)^-1 when |0>.

    U is the order-2 product formula at t/steps.  The lattice model gets the
    merged body; anything else falls back to per-term reversal wrapping
    (pass ``groups`` to choose them, default greedy).
    """
    if steps < 1:
        raise ValueError("steps must be positive")
    return _sign_controlled(h, [t / steps] * steps, groups)


def sign_controlled_identity(h: PauliSumOperator, t: float, steps: int,
                             groups: list[ReversalGroup] | None = None) -> Circuit:
    """Same gate skeleton as sign_controlled_evolution but net identity.

    Step durations alternate +dt, -dt so consecutive steps cancel on both
    probe branches (a zero-angle step pads an odd count).  Serves as the
    depth-matched reference whose ideal expectation is 1.
    """
    if steps < 1:
        raise ValueError("steps must be positive")
    dt = t / steps
    step_times = [dt if i % 2 == 0 else -dt for i in range(steps - steps % 2)]
    if steps % 2:
        step_times.append(0.0)
    return _sign_controlled(h, step_times, groups)


def echo_evolution_block(h: PauliSumOperator, half_time: float,
                         steps: int) -> Circuit:
    """Forward steps then sign-controlled steps at the same step size.

    Probe |1>: order-2 evolution through ``2 * half_time``.
    Probe |0>: exact identity on the register (the echo).
    """
    from .trotter import evolution_circuit

    circuit = evolution_circuit(h, half_time, steps, order=2,
                                num_qubits=FULL_QUBITS)
    circuit.extend(sign_controlled_evolution(h, half_time, steps))
    return circuit


def controlled_gate_count(circuit: Circuit) -> int:
    return sum(1 for g in circuit.gates if g.kind == "CPAULI")


def echo_cnot_overhead(steps: int) -> int:
    """Extra CNOTs of the sign-controlled block over plain steps: the two
    controlled edge reversals plus two controlled X per step."""
    return 14 + 2 * steps
