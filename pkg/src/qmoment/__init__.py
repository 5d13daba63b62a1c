"""Noisy-circuit simulation and error-mitigated moment estimation.

Qubit convention used throughout: qubit ``q`` is tensor axis ``q``, so qubit 0
is the most significant bit of a basis-state index and ``kron(A, B)`` puts
``A`` on qubit 0.  Experiment circuits on the four-site lattice model use
system qubits 0..3 plus one ancilla at index 4.
"""

from .paulis import PauliString, PauliSumOperator, pauli_commutes
from .states import StateVector, DensityMatrix, Channel

__version__ = "0.1.0"

__all__ = [
    "PauliString",
    "PauliSumOperator",
    "pauli_commutes",
    "StateVector",
    "DensityMatrix",
    "Channel",
    "__version__",
]
