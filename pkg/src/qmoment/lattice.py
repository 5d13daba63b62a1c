"""Two-particle nuclear lattice model on a 2x2 periodic grid.

Each dynamical particle's position is one lattice site out of four, encoded
in two qubits by the binary-reflected labels |site 1> = |00>, |2> = |01>,
|3> = |10>, |4> = |11>; the high bit is the y coordinate.  Particle A lives
on qubits (0, 1), particle B on (2, 3), and a third, static particle sits at
site 1.  A fifth probe qubit used by measurement circuits is index 4 and
plays no role here.

With two sites per dimension a hop left and a hop right are the same bit
flip, so the kinetic term for one particle and one dimension is
``2 t (1 - X)``.  Contact interactions become projector products over
position bits, e.g. the pairwise term is ``U/4 (1 + Z0 Z2)(1 + Z1 Z3)``
expanded into Pauli strings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .paulis import PauliString, PauliSumOperator
from .states import StateVector

NUM_SITES = 4
NUM_QUBITS = 4
LENGTH = 2

# Measurement circuits append one probe qubit after the position register.
PROBE = 4
FULL_QUBITS = 5

# Linear coupling order of the five physical qubits.
COUPLING_CHAIN = (0, 3, 2, 1, 4)


def site_coordinates(site: int) -> tuple[int, int]:
    """(x, y) of 1-based site label; y is the high bit of ``site - 1``."""
    if not 1 <= site <= NUM_SITES:
        raise ValueError(f"site {site} out of range")
    b = site - 1
    return (b & 1, b >> 1)


def _projector_sum(paulis: list[PauliString], scale: float) -> PauliSumOperator:
    """``scale * prod_i (1 + P_i) / 2`` expanded into Pauli strings."""
    coeff = scale / 2 ** len(paulis)
    terms = []
    for mask in range(2 ** len(paulis)):
        prod = PauliString.identity(NUM_QUBITS)
        for i, p in enumerate(paulis):
            if mask >> i & 1:
                prod = prod * p
        terms.append((coeff, prod))
    return PauliSumOperator(terms, NUM_QUBITS)


def _z(*qubits: int) -> PauliString:
    return PauliString.from_sites(NUM_QUBITS, {q: "Z" for q in qubits})


def _x(qubit: int) -> PauliString:
    return PauliString.from_sites(NUM_QUBITS, {qubit: "X"})


def build_hamiltonian(hopping: float = 1.0, two_body: float = -7.0,
                      three_body: float = 28.0) -> PauliSumOperator:
    """Pauli form of the lattice Hamiltonian.

    ``hopping`` multiplies the kinetic term, ``two_body`` every pairwise
    contact (including contacts with the static particle), and
    ``three_body`` the triple contact at the static particle's site.
    """
    ident = PauliString.identity(NUM_QUBITS)
    terms = []
    for q in range(NUM_QUBITS):
        terms.append((2.0 * hopping, ident))
        terms.append((-2.0 * hopping, _x(q)))
    h = PauliSumOperator(terms, NUM_QUBITS)
    # A-B contact: positions match bit by bit
    h = h + _projector_sum([_z(0, 2), _z(1, 3)], two_body)
    # each dynamical particle sitting on the static one (site 1 = bits 00)
    h = h + _projector_sum([_z(0), _z(1)], two_body)
    h = h + _projector_sum([_z(2), _z(3)], two_body)
    # all three particles at site 1
    h = h + _projector_sum([_z(0), _z(1), _z(2), _z(3)], three_body)
    return h


def shift_identity(op: PauliSumOperator) -> tuple[PauliSumOperator, float]:
    """Split off the identity component: returns (traceless-in-identity op, shift)."""
    shift = op.identity_part()
    return op.without_identity(), shift


def excitation_operator(x: tuple[int, int]) -> PauliSumOperator:
    """Density-wave excitation at crystal momentum ``(2 pi / L) x``.

    ``sum_particles sum_c exp(i (2 pi / L) x . c) |c><c|``.  With L = 2 the
    phases are (-1)^(x . c), so each component is a Z string on the bits
    picked out by ``x``; x = (0, 0) gives twice the identity.
    """
    xx, xy = int(x[0]) % LENGTH, int(x[1]) % LENGTH
    terms = []
    for bits in ((0, 1), (2, 3)):  # (y bit, x bit) per particle
        sites = {}
        if xy:
            sites[bits[0]] = "Z"
        if xx:
            sites[bits[1]] = "Z"
        terms.append((1.0, PauliString.from_sites(NUM_QUBITS, sites)))
    return PauliSumOperator(terms, NUM_QUBITS)


@dataclass(frozen=True)
class MomentumVector:
    """Integer mode numbers and the momentum they label, in units 1/a."""

    x: tuple[int, int]
    lattice_spacing: float = 1.0

    @property
    def momentum(self) -> tuple[float, float]:
        unit = 2.0 * np.pi / (LENGTH * self.lattice_spacing)
        return (unit * self.x[0], unit * self.x[1])


@dataclass
class SpectralDecomposition:
    """Eigenbasis of a Hermitian operator, energies ascending."""

    energies: np.ndarray
    states: np.ndarray  # column f = |f>
    num_qubits: int

    @classmethod
    def from_operator(cls, op: PauliSumOperator) -> "SpectralDecomposition":
        mat = op.to_matrix()
        energies, states = np.linalg.eigh(mat)
        return cls(energies, states, op.num_qubits)

    @property
    def ground_energy(self) -> float:
        return float(self.energies[0])

    def ground_state(self) -> StateVector:
        v = self.states[:, 0].copy()
        k = np.argmax(np.abs(v) > 1e-12)
        v *= np.exp(-1j * np.angle(v[k]))
        return StateVector(v, self.num_qubits)

    def transition_amplitudes(self, op: PauliSumOperator,
                              state: np.ndarray | None = None) -> np.ndarray:
        """<f| O |ref> for every eigenstate f; ``ref`` defaults to ground."""
        ref = self.states[:, 0] if state is None else np.asarray(state, dtype=complex)
        return self.states.conj().T @ (op.to_matrix() @ ref)

    def response_weights(self, op: PauliSumOperator,
                         state: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
        """(excitation energies E_f - E_0, weights |<f|O|ref>|^2)."""
        amps = self.transition_amplitudes(op, state)
        return self.energies - self.energies[0], np.abs(amps) ** 2


def exact_ground_state(op: PauliSumOperator) -> tuple[float, StateVector]:
    dec = SpectralDecomposition.from_operator(op)
    return dec.ground_energy, dec.ground_state()


def exact_moment(decomp: SpectralDecomposition, o_k: PauliSumOperator,
                 o_l: PauliSumOperator, j: int, tau: float,
                 energy_shift: float | None = None,
                 state: np.ndarray | None = None) -> complex:
    """m_kl(j) = <ref| O_l^dag exp(-i (H - shift) j tau) O_k |ref>.

    O_k acts on the ket side, matching the interferometry circuits where the
    k-indexed excitation is inserted before the evolution.  ``energy_shift``
    defaults to the ground energy, which pins the reference state's
    contribution at zero frequency; ``state`` defaults to the ground state.
    """
    shift = decomp.ground_energy if energy_shift is None else energy_shift
    a_k = decomp.transition_amplitudes(o_k, state)
    a_l = decomp.transition_amplitudes(o_l, state)
    phases = np.exp(-1j * (decomp.energies - shift) * j * tau)
    return complex(np.sum(np.conj(a_l) * phases * a_k))


def exact_response(decomp: SpectralDecomposition, op: PauliSumOperator,
                   delta: float, nu: np.ndarray,
                   tau: float | None = None, images: int = 0,
                   state: np.ndarray | None = None) -> np.ndarray:
    """Gaussian-broadened spectral function on the ``nu`` grid.

    ``Phi(nu) = sum_f |<f|O|0>|^2 exp(-(nu - omega_f)^2 / (2 delta^2))``,
    unit peak height per unit weight.  With ``tau`` given, ``images`` pairs
    of aliases at ``omega_f +- 2 pi k / tau`` model the periodicity of a
    discrete-time reconstruction.
    """
    omegas, weights = decomp.response_weights(op, state)
    nu = np.asarray(nu, dtype=float)
    out = np.zeros_like(nu)
    shifts = [0.0]
    if images and tau:
        shifts += [s * 2.0 * np.pi * k / tau
                   for k in range(1, images + 1) for s in (+1.0, -1.0)]
    for omega, w in zip(omegas, weights):
        if w < 1e-15:
            continue
        for s in shifts:
            out += w * np.exp(-((nu - omega - s) ** 2) / (2.0 * delta ** 2))
    return out


def total_weight(decomp: SpectralDecomposition, op: PauliSumOperator) -> float:
    """Sum rule: integral of Phi over nu / (sqrt(2 pi) delta) = <0|O^dag O|0>."""
    _, weights = decomp.response_weights(op)
    return float(weights.sum())
