"""Gate templates and lowering onto a linear coupling chain.

Everything here emits only single-qubit gates and chain-adjacent CNOTs, the
native set assumed by the cost model.  A controlled Pauli string with
contiguous support ending next to its control costs ``2k - 1`` CNOTs for
weight ``k``; support gaps are bridged with short CNOT relays and cost more.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuits import Circuit, Gate
from .paulis import PauliString

# Basis layers V with V^dag X V = P for each Pauli factor, as gate lists in
# time order.  The closing layer is the reverse with each gate inverted.
_PRE_BASIS = {"X": (), "Z": ("H",), "Y": ("H", "S")}
_POST_BASIS = {"X": (), "Z": ("H",), "Y": ("SDG", "H")}

# Same idea targeting Z instead of X, for rotation ladders.
_PRE_Z_BASIS = {"Z": (), "X": ("H",), "Y": ("SDG", "H")}
_POST_Z_BASIS = {"Z": (), "X": ("H",), "Y": ("H", "S")}


def chain_position(chain: tuple[int, ...]) -> dict[int, int]:
    if len(set(chain)) != len(chain):
        raise ValueError("chain repeats a qubit")
    return {q: i for i, q in enumerate(chain)}


def is_chain_adjacent(chain: tuple[int, ...], a: int, b: int) -> bool:
    pos = chain_position(chain)
    return abs(pos[a] - pos[b]) == 1


def relay_cnot(control: int, target: int, chain: tuple[int, ...]) -> list[Gate]:
    """CNOT between arbitrary chain sites via the doubling identity.

    CNOT(a->c) = CNOT(a->b) CNOT(b->c) CNOT(a->b) CNOT(b->c) in time order,
    recursing on the control side; 1 CNOT when adjacent, 4 for one gap,
    2x + 2 per further gap.
    """
    pos = chain_position(chain)
    lo, hi = sorted((pos[control], pos[target]))
    between = [chain[i] for i in range(lo + 1, hi)]
    if pos[control] > pos[target]:
        between = between[::-1]
    if not between:
        return [Gate("CNOT", (control, target))]
    mid = between[-1]  # gap wire adjacent to the target
    inner = relay_cnot(control, mid, chain)
    hop = Gate("CNOT", (mid, target))
    return inner + [hop] + inner + [hop]


def _ladder_conjugations(sites: list[int], chain: tuple[int, ...]) -> list[Gate]:
    """Adjacent-CNOT conjugation list mapping X on ``sites[0]`` to the X
    product over all ``sites``, innermost conjugation first.

    Each link is a palindrome, so the list doubles as its own unwind and the
    pre-middle ladder is simply this list reversed.  Gap wires between
    consecutive sites are walked through and then cleared, costing
    ``2r + 1`` CNOTs for ``r`` gaps instead of 1.
    """
    pos = chain_position(chain)
    gates: list[Gate] = []
    for near, far in zip(sites, sites[1:]):
        lo, hi = sorted((pos[near], pos[far]))
        path = [chain[i] for i in range(lo, hi + 1)]
        if path[0] != near:
            path = path[::-1]
        forward = [Gate("CNOT", (a, b)) for a, b in zip(path, path[1:])]
        gates += forward + forward[-2::-1]
    return gates


def lower_controlled_pauli(gate: Gate, chain: tuple[int, ...]) -> list[Gate]:
    """Expand a CPAULI gate into basis layers and a CNOT ladder.

    Exact (not merely up to phase): a -1 string phase becomes a Z on the
    control and polarity 0 an X conjugation of the control.
    """
    if gate.kind != "CPAULI":
        raise ValueError("expected a CPAULI gate")
    control, pauli = gate.sites[0], gate.pauli
    pos = chain_position(chain)
    body: list[Gate] = []
    for side in (-1, +1):
        sites = [q for q in pauli.support
                 if (pos[q] - pos[control]) * side > 0]
        if not sites:
            continue
        sites.sort(key=lambda q: abs(pos[q] - pos[control]))
        pre = [Gate(k, (q,)) for q in sites for k in _PRE_BASIS[pauli.factors[q]]]
        post = [Gate(k, (q,)) for q in reversed(sites)
                for k in _POST_BASIS[pauli.factors[q]]]
        ladder = _ladder_conjugations(sites, chain)
        mid = relay_cnot(control, sites[0], chain)
        body += pre + ladder[::-1] + mid + ladder + post
    if pauli.phase == -1:
        body = body + [Gate("Z", (control,))]
    if gate.polarity == 0:
        body = [Gate("X", (control,))] + body + [Gate("X", (control,))]
    return body


def fanout_rotation_block(circuit: Circuit, wires: tuple[int, int, int, int],
                          thetas: tuple[float | None, float | None, float | None]) -> Circuit:
    """Shared-ladder rotations about Z_a Z_b, Z_a Z_b Z_c and Z_a Z_b Z_d.

    ``wires = (a, b, c, d)`` with (a,b), (b,c), (c,d) coupled; a ``None``
    angle skips that rotation.  8 CNOTs regardless of how many of the three
    rotations are taken.
    """
    a, b, c, d = wires
    circuit.cnot(a, b).cnot(c, d).cnot(b, c).cnot(c, d)
    t_ab, t_abc, t_abd = thetas
    if t_ab is not None:
        circuit.rz(b, t_ab)
    if t_abc is not None:
        circuit.rz(c, t_abc)
    if t_abd is not None:
        circuit.rz(d, t_abd)
    circuit.cnot(c, d).cnot(b, c).cnot(c, d).cnot(a, b)
    return circuit


def chain_rotation_block(circuit: Circuit, wires: tuple[int, int, int],
                         theta: float) -> Circuit:
    """Rotation about Z_a Z_b Z_c via a 4-CNOT parity chain on (a, b, c)."""
    a, b, c = wires
    circuit.cnot(a, b).cnot(b, c).rz(c, theta).cnot(b, c).cnot(a, b)
    return circuit


def pauli_rotation_block(circuit: Circuit, pauli: PauliString,
                         theta: float) -> Circuit:
    """exp(-i theta P / 2) for one Pauli string, RZ-style angle convention.

    Basis layers map each factor to Z, a CNOT ladder collects the parity on
    the last support qubit.  CNOTs here may be non-adjacent; compile onto a
    chain afterwards if needed.
    """
    if pauli.is_identity():
        raise ValueError("identity rotation is a global phase")
    if pauli.phase == -1:
        theta = -theta
    sites = list(pauli.support)
    for q in sites:
        for k in _PRE_Z_BASIS[pauli.factors[q]]:
            circuit.add(Gate(k, (q,)))
    for a, b in zip(sites, sites[1:]):
        circuit.cnot(a, b)
    circuit.rz(sites[-1], theta)
    for a, b in zip(sites[:-1][::-1], sites[1:][::-1]):
        circuit.cnot(a, b)
    for q in reversed(sites):
        for k in _POST_Z_BASIS[pauli.factors[q]]:
            circuit.add(Gate(k, (q,)))
    return circuit


@dataclass(frozen=True)
class CompiledCircuit:
    """A circuit proven executable on ``chain``: 1q gates plus adjacent CNOTs."""

    circuit: Circuit
    chain: tuple[int, ...]

    def __post_init__(self):
        pos = chain_position(self.chain)
        for g in self.circuit.gates:
            for q in g.sites:
                if q not in pos:
                    raise ValueError(f"qubit {q} not on the chain")
            if len(g.sites) == 1:
                continue
            if g.kind != "CNOT" or abs(pos[g.sites[0]] - pos[g.sites[1]]) != 1:
                raise ValueError(f"gate {g.kind} on {g.sites} not chain-native")

    @property
    def cnots(self) -> int:
        return cnot_count(self.circuit)


def compile_circuit(circuit: Circuit, chain: tuple[int, ...]) -> CompiledCircuit:
    """Lower CPAULI/CZ/far CNOT gates onto the chain; 1q gates pass through."""
    pos = chain_position(chain)
    out = Circuit(circuit.num_qubits)
    for g in circuit.gates:
        if len(g.sites) == 1:
            out.add(g)
        elif g.kind == "CPAULI":
            for h in lower_controlled_pauli(g, chain):
                out.add(h)
        elif g.kind == "CNOT":
            if abs(pos[g.sites[0]] - pos[g.sites[1]]) == 1:
                out.add(g)
            else:
                for h in relay_cnot(g.sites[0], g.sites[1], chain):
                    out.add(h)
        elif g.kind == "CZ":
            a, b = g.sites
            out.h(b)
            for h in relay_cnot(a, b, chain):
                out.add(h)
            out.h(b)
        else:
            raise ValueError(f"cannot lower {g.kind}")
    return CompiledCircuit(out, chain)


_SELF_INVERSE = {"H", "X", "Y", "Z", "CNOT", "CZ"}
_PHASE_PAIR = {"S": "SDG", "SDG": "S"}


def _cancel(prev: Gate, gate: Gate) -> Gate | None | bool:
    """None = pair annihilates, Gate = merged replacement, False = keep both."""
    if prev.sites != gate.sites:
        return False
    if prev.kind == gate.kind and prev.kind in _SELF_INVERSE:
        return None
    if _PHASE_PAIR.get(prev.kind) == gate.kind:
        return None
    if prev.kind == gate.kind and prev.kind in ("RX", "RY", "RZ"):
        theta = prev.param + gate.param
        if abs(theta) < 1e-15:
            return None
        return Gate(prev.kind, prev.sites, theta)
    if (prev.kind == gate.kind == "CPAULI" and prev.pauli == gate.pauli
            and prev.polarity == gate.polarity):
        return None
    return False


def peephole_cancel(circuit: Circuit) -> Circuit:
    """Drop adjacent inverse pairs and merge same-axis rotations, to fixpoint.

    A pair only cancels when no intervening gate touches any of its sites.
    """
    gates = list(circuit.gates)
    changed = True
    while changed:
        changed = False
        out: list[Gate] = []
        last_on: dict[int, int] = {}
        for g in gates:
            while True:
                idxs = {last_on.get(q) for q in g.sites}
                idx = idxs.pop() if len(idxs) == 1 else None
                if idx is None:
                    break
                merged = _cancel(out[idx], g)
                if merged is False:
                    break
                changed = True
                out[idx] = None
                for q, i in list(last_on.items()):
                    if i == idx:
                        j = next((k for k in range(idx - 1, -1, -1)
                                  if out[k] is not None and q in out[k].sites), None)
                        if j is None:
                            last_on.pop(q)
                        else:
                            last_on[q] = j
                if merged is None:
                    g = None
                    break
                g = merged
            if g is not None:
                for q in g.sites:
                    last_on[q] = len(out)
                out.append(g)
        gates = [g for g in out if g is not None]
    return Circuit(circuit.num_qubits, gates)


def cnot_count(circuit: Circuit) -> int:
    """Two-qubit gate count; CZ counts as one CNOT, CPAULI must be lowered."""
    n = 0
    for g in circuit.gates:
        if g.kind == "CPAULI":
            raise ValueError("lower CPAULI before counting")
        if len(g.sites) == 2:
            n += 1
    return n
