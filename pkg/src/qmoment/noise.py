"""Noise channels and composite device models.

Channels are Kraus sets (states.Channel).  A NoiseModel maps gate classes to
channels and is consumed by circuits.simulate_noisy, which applies the
returned channels after each gate and the optional global channel once at the
end.  Readout confusion lives here too but acts at sampling time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .states import Channel
from .circuits import Gate
from .paulis import PauliString

DEFAULT_P_2Q = 7.5e-3
DEFAULT_P_1Q = 3.5e-4
DEFAULT_READOUT = 2.0e-2
DEFAULT_DAMPING = 1.0e-3


def depolarizing_channel(p: float, arity: int = 1) -> Channel:
    """Uniform depolarizing on ``arity`` qubits: rho -> (1-p) rho + p 1/2^m."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing strength {p} outside [0, 1]")
    dim = 4 ** arity
    kraus = []
    for idx in range(dim):
        letters = []
        rest = idx
        for _ in range(arity):
            letters.append("IXYZ"[rest % 4])
            rest //= 4
        weight = 1.0 - p * (dim - 1) / dim if idx == 0 else p / dim
        mat = PauliString("".join(letters)).to_matrix()
        kraus.append(np.sqrt(weight) * mat)
    return Channel(kraus, arity, kind="depolarizing", param=p)


def amplitude_damping_channel(gamma: float) -> Channel:
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"damping rate {gamma} outside [0, 1]")
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return Channel([k0, k1], 1, kind="amplitude_damping", param=gamma)


def phase_damping_channel(gamma: float) -> Channel:
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"damping rate {gamma} outside [0, 1]")
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, 0.0], [0.0, np.sqrt(gamma)]], dtype=complex)
    return Channel([k0, k1], 1, kind="phase_damping", param=gamma)


def coherent_overrotation_channel(epsilon: float, axis: str = "z") -> Channel:
    """Systematic unitary error: Rz(eps) on one qubit or exp(-i eps ZZ/2)."""
    if axis == "z":
        u = np.diag([np.exp(-0.5j * epsilon), np.exp(0.5j * epsilon)])
        return Channel([u], 1, kind="coherent", param=epsilon)
    if axis == "zz":
        phases = np.array([1.0, -1.0, -1.0, 1.0])
        u = np.diag(np.exp(-0.5j * epsilon * phases))
        return Channel([u], 2, kind="coherent", param=epsilon)
    raise ValueError(f"unknown over-rotation axis {axis!r}")


_CHANNEL_MAKERS = {
    "depolarizing": depolarizing_channel,
    "amplitude_damping": amplitude_damping_channel,
    "phase_damping": phase_damping_channel,
    "coherent_overrotation": coherent_overrotation_channel,
}


def make_channel(kind: str, *args, **kwargs) -> Channel:
    try:
        maker = _CHANNEL_MAKERS[kind]
    except KeyError:
        raise ValueError(f"unknown channel kind {kind!r}") from None
    channel = maker(*args, **kwargs)
    channel.validate()
    return channel


def symmetric_confusion(flip: float) -> np.ndarray:
    """2x2 readout matrix P[i, j] = P(read i | true j) with equal flip rates."""
    if not 0.0 <= flip <= 0.5:
        raise ValueError(f"readout flip probability {flip} outside [0, 0.5]")
    return np.array([[1.0 - flip, flip], [flip, 1.0 - flip]])


@dataclass
class NoiseModel:
    """Gate-class channels plus optional global channel and readout confusion.

    ``per_gate`` maps "1q"/"2q" to channel lists.  Arity-1 channels attached
    to the "2q" class act independently on each wire of the gate.  ``readout``
    is a single 2x2 confusion matrix shared by all qubits or a per-qubit list.
    ``scale`` records the strength multiplier already baked into the channels.
    """

    per_gate: dict[str, list[Channel]] = field(default_factory=dict)
    global_channel: Channel | None = None
    readout: np.ndarray | list[np.ndarray] | None = None
    scale: float = 1.0

    def channels_for(self, index: int, gate: Gate) -> list[tuple[Channel, tuple[int, ...]]]:
        """Channels to apply after ``gate``, with the sites they act on."""
        width = len(gate.sites)
        if width == 1:
            configured = self.per_gate.get("1q", [])
        elif width == 2:
            configured = self.per_gate.get("2q", [])
        else:
            configured = self.per_gate.get("2q", [])
            if configured:
                raise ValueError(
                    f"gate {gate.kind} touches {width} qubits; compile to the "
                    "1q/2q gate set before noisy simulation")
            return []
        out = []
        for channel in configured:
            if channel.arity == width:
                out.append((channel, gate.sites))
            elif channel.arity == 1:
                for q in gate.sites:
                    out.append((channel, (q,)))
            else:
                raise ValueError(
                    f"cannot place a {channel.arity}-qubit channel on a "
                    f"{width}-qubit gate")
        return out

    def confusion_for(self, num_qubits: int) -> list[np.ndarray] | None:
        if self.readout is None:
            return None
        if isinstance(self.readout, np.ndarray):
            return [self.readout] * num_qubits
        if len(self.readout) != num_qubits:
            raise ValueError("per-qubit confusion list length mismatch")
        return list(self.readout)


def global_depolarizing_model(p: float, num_qubits: int) -> NoiseModel:
    """Single uniform depolarizing channel on the full register, post-circuit."""
    return NoiseModel(global_channel=depolarizing_channel(p, num_qubits), scale=p)


def make_device_model(p0_2q: float = DEFAULT_P_2Q, p0_1q: float = DEFAULT_P_1Q,
                      readout_err: float = DEFAULT_READOUT,
                      damping: float = DEFAULT_DAMPING,
                      scale: float = 1.0,
                      coherent: float = 0.0) -> NoiseModel:
    """Composite model: per-gate depolarizing + amplitude damping + readout.

    All error parameters are multiplied by ``scale``.  ``coherent`` adds a
    systematic Rz(eps) on both wires of every two-qubit gate, giving twirling
    a coherent error to randomize; it defaults to off.
    """
    if not 0.0 < scale <= 1.0:
        raise ValueError(f"scale {scale} outside (0, 1]")
    one_q = [depolarizing_channel(scale * p0_1q, 1)]
    two_q = [depolarizing_channel(scale * p0_2q, 2)]
    if coherent:
        two_q.append(coherent_overrotation_channel(scale * coherent, "z"))
    if damping:
        damp = amplitude_damping_channel(scale * damping)
        one_q.append(damp)
        two_q.append(damp)
    readout = symmetric_confusion(scale * readout_err) if readout_err else None
    return NoiseModel(per_gate={"1q": one_q, "2q": two_q},
                      readout=readout, scale=scale)
