"""
Codage conjugué (états BB84) : |x^θ⟩ = H^θ |x⟩
"""

from functools import reduce
from typing import Sequence, Tuple

import numpy as np

from ..core.errors import DimensionError
from .f2linalg import BitVector
from .qsim import H_GATE, StateVector, apply_matrix, measure_computational

_KET = {
    (0, 0): np.array([1, 0], dtype=np.complex128),
    (1, 0): np.array([0, 1], dtype=np.complex128),
    (0, 1): np.array([1, 1], dtype=np.complex128) / np.sqrt(2),
    (1, 1): np.array([1, -1], dtype=np.complex128) / np.sqrt(2),
}


def encode_bb84(x: BitVector, theta: BitVector) -> StateVector:
    """Qubit i : |x_i⟩ si θ_i = 0, H|x_i⟩ sinon"""
    if x.length != theta.length:
        raise DimensionError(f"x ({x.length} bits) et θ ({theta.length} bits) de longueurs différentes")
    if x.length == 0:
        return StateVector(0, np.ones(1, dtype=np.complex128))
    # Qubit 0 = bit faible : le dernier facteur du produit de Kronecker
    kets = [_KET[(x[i], theta[i])] for i in reversed(range(x.length))]
    return StateVector(x.length, reduce(np.kron, kets))


def measure_in_bases(
    state: StateVector,
    qubits: Sequence[int],
    theta: BitVector,
    rng: np.random.Generator
) -> Tuple[BitVector, StateVector]:
    """
    Mesure non destructive des qubits listés dans les bases θ

    H^θ, mesure dans la base de calcul, puis H^θ à nouveau sur l'état projeté.
    """
    if theta.length != len(qubits):
        raise DimensionError(f"θ de {theta.length} bits pour {len(qubits)} qubits")
    rotated = [q for q, t in zip(qubits, theta) if t]
    for q in rotated:
        apply_matrix(state, H_GATE, [q])
    outcome, state = measure_computational(state, qubits, rng)
    for q in rotated:
        apply_matrix(state, H_GATE, [q])
    return outcome, state


def decode_bb84(
    state: StateVector,
    theta: BitVector,
    rng: np.random.Generator
) -> Tuple[BitVector, StateVector]:
    """Décodage de tous les qubits ; l'état honnête est restitué intact"""
    if theta.length != state.num_qubits:
        raise DimensionError(f"θ de {theta.length} bits pour {state.num_qubits} qubits")
    return measure_in_bases(state, list(range(state.num_qubits)), theta, rng)
