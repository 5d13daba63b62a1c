"""Probe-interference circuits for moment estimation.

Two families share the layout  H(probe) / prepare / excite / evolve / close:

* verification circuits un-prepare the state so the probe tomogram can be
  post-selected on the system returning to all zeros;
* renormalization circuits fold the evolution into a sign-controlled block
  and measure only <Z> of the probe after a closing H, paired with a
  depth-matched reference whose ideal value is 1.

"plain" style realizes controlled evolution by controlling every rotation
of the product formula (valid because the zero-angle skeleton collapses to
the identity); "crg" style replaces that with reversal-conjugated blocks.
"""

from __future__ import annotations

from .circuits import Circuit, Gate, controlled_pauli
from .crg import (echo_evolution_block, sign_controlled_evolution,
                  sign_controlled_identity)
from .paulis import PauliString, PauliSumOperator
from .trotter import evolution_circuit, step_circuit

STYLES = ("plain", "crg")


def widened(circuit: Circuit, num_qubits: int) -> Circuit:
    """The same gates on a larger register."""
    if num_qubits < circuit.num_qubits:
        raise ValueError("cannot narrow a circuit")
    out = Circuit(num_qubits)
    for g in circuit.gates:
        out.add(g)
    return out


def controlled_rotations(circuit: Circuit, control: int) -> Circuit:
    """Control a product-formula circuit on one extra wire.

    Every rotation becomes its controlled version (two CNOTs each); fixed
    gates pass through untouched.  That equals the controlled circuit as a
    whole only when the circuit with all angles zeroed is the identity,
    which holds for the evolution circuits built here (every ladder is
    unwound inside the step).
    """
    out = Circuit(circuit.num_qubits)
    for g in circuit.gates:
        if g.kind not in ("RX", "RY", "RZ"):
            if control in g.sites:
                raise ValueError("control wire already used by the circuit")
            out.add(g)
            continue
        (q,) = g.sites
        pre = {"RX": ("H",), "RY": ("SDG", "H"), "RZ": ()}[g.kind]
        for kind in pre:
            out.add(Gate(kind, (q,)))
        out.rz(q, g.param / 2.0)
        out.cnot(control, q)
        out.rz(q, -g.param / 2.0)
        out.cnot(control, q)
        for kind in reversed(pre):
            out.add(Gate({"H": "H", "SDG": "S"}[kind], (q,)))
    return out


def apply_pauli_gates(circuit: Circuit, pauli: PauliString) -> None:
    """Append an uncontrolled Pauli string gate by gate (phase dropped)."""
    for q, letter in enumerate(pauli.factors):
        if letter != "I":
            circuit.add(Gate(letter, (q,)))


def _pad(p: PauliString, num_qubits: int) -> PauliString:
    if p.num_qubits == num_qubits:
        return p
    return PauliString(p.factors + "I" * (num_qubits - p.num_qubits), p.phase)


def _checked(style: str, steps: int, order: int) -> None:
    if style not in STYLES:
        raise ValueError(f"unknown style {style!r}")
    if steps < 1:
        raise ValueError("steps must be positive")
    if style == "crg":
        if steps % 2:
            raise ValueError("crg style needs an even number of steps")
        if order != 2:
            raise ValueError("crg bodies are second order only")


def build_ev_circuit(h: PauliSumOperator, prep: Circuit, o_k: PauliString,
                     o_l: PauliString, j: int, tau: float, steps: int = 2,
                     order: int = 2, style: str = "plain") -> Circuit:
    """Verification circuit for the moment <psi| O_l^dag U(j tau) O_k |psi>.

    Probe is the wire after the system register.  Returned without the
    measurement-basis rotation; see tomogram_circuits.  The probe |0> branch
    is the exact identity on the system, so ideal post-selection never fails.
    """
    _checked(style, steps, order)
    n = h.num_qubits
    probe = n
    circuit = Circuit(n + 1)
    circuit.h(probe)
    circuit.extend(widened(prep, n + 1))
    circuit.add(controlled_pauli(probe, _pad(o_k, n + 1), polarity=1))
    if j != 0:
        if style == "plain":
            body = evolution_circuit(h, j * tau, steps, order, num_qubits=n + 1)
            circuit.extend(controlled_rotations(body, probe))
        else:
            circuit.extend(echo_evolution_block(h, j * tau / 2.0, steps // 2))
    circuit.add(controlled_pauli(probe, _pad(o_l.adjoint(), n + 1), polarity=1))
    circuit.extend(widened(prep.inverse(), n + 1))
    return circuit


def tomogram_circuits(base: Circuit, probe: int,
                      flipped: bool = False) -> dict[str, Circuit]:
    """X/Y/Z measurement variants of a verification circuit.

    ``flipped`` inserts X on the probe between the body and the basis
    rotation, exchanging the roles of the probe branches; the estimator
    formulas absorb the resulting sign changes.
    """
    variants = {}
    for basis, rotation in (("X", ("H",)), ("Y", ("SDG", "H")), ("Z", ())):
        c = base.copy()
        if flipped:
            c.x(probe)
        for kind in rotation:
            c.add(Gate(kind, (probe,)))
        variants[basis] = c
    return variants


def _excitation_gates(circuit: Circuit, o_k: PauliString, o_l: PauliString,
                      probe: int, num_qubits: int) -> None:
    if o_k == o_l:
        apply_pauli_gates(circuit, _pad(o_k, num_qubits))
        return
    # off-diagonal moment: the probe branches carry different excitations
    circuit.add(controlled_pauli(probe, _pad(o_l.adjoint(), num_qubits), polarity=0))
    circuit.add(controlled_pauli(probe, _pad(o_k, num_qubits), polarity=1))


def _alternating_reference_body(h: PauliSumOperator, t: float, steps: int,
                                order: int, num_qubits: int) -> Circuit:
    dt = t / steps
    body = Circuit(num_qubits)
    for i in range(steps - steps % 2):
        body.extend(step_circuit(h, dt if i % 2 == 0 else -dt, order,
                                 num_qubits=num_qubits))
    if steps % 2:
        body.extend(step_circuit(h, 0.0, order, num_qubits=num_qubits))
    return body


def build_odr_circuits(h: PauliSumOperator, prep: Circuit, o_k: PauliString,
                       o_l: PauliString, j: int, tau: float, steps: int = 2,
                       order: int = 2, style: str = "crg",
                       imag: bool = False) -> tuple[Circuit, Circuit]:
    """(signal, reference) pair for renormalized moment estimation.

    Signal measures <Z> of the probe = Re m_kl(j tau) (Im with ``imag``,
    via an S^dag before the closing H).  The crg style fast-forwards: each
    probe branch evolves only j tau / 2, in opposite directions.  The
    reference has the same gate skeleton with net-identity step angles and
    ideal value 1; it is independent of (k, l), so one reference serves all
    moments at a given depth.
    """
    _checked(style, steps, order)
    n = h.num_qubits
    probe = n
    signal = Circuit(n + 1)
    signal.h(probe)
    signal.extend(widened(prep, n + 1))
    _excitation_gates(signal, o_k, o_l, probe, n + 1)

    reference = Circuit(n + 1)
    reference.h(probe)
    reference.extend(widened(prep, n + 1))

    if j != 0:
        if style == "crg":
            signal.extend(sign_controlled_evolution(h, j * tau / 2.0, steps))
            reference.extend(sign_controlled_identity(h, j * tau / 2.0, steps))
        else:
            body = evolution_circuit(h, j * tau, steps, order, num_qubits=n + 1)
            signal.extend(controlled_rotations(body, probe))
            ref_body = _alternating_reference_body(h, j * tau, steps, order, n + 1)
            reference.extend(controlled_rotations(ref_body, probe))

    if imag:
        signal.sdg(probe)
    signal.h(probe)
    reference.h(probe)
    return signal, reference


def control_flip_pair(circuit: Circuit, probe: int) -> tuple[Circuit, Circuit]:
    """The circuit and its probe-flipped twin (X appended last).

    Averaging <Z> from the first with -<Z> from the second cancels any
    readout bias that is odd under exchanging the probe's 0/1 outcomes.
    """
    flipped = circuit.copy()
    flipped.x(probe)
    return circuit, flipped
