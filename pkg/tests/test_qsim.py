"""
Tests unitaires pour le simulateur d'états, l'algèbre de Pauli et les Cliffords
"""

import pytest
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.errors import DimensionError, NonUnitaryError, SizeCapError
from src.engine.f2linalg import BitVector
from src.engine.qsim import (
    StateVector, apply_matrix, apply_unitary, measure_computational, outcome_distribution,
    random_unitary, is_unitary, hadamard_layer,
    X_GATE, Y_GATE, Z_GATE, H_GATE, CNOT_GATE,
    PauliString, pauli_operators,
    CliffordElement, clifford_conjugate_pauli, compose, hadamard_clifford, phase_clifford,
    cnot_clifford, clifford_to_unitary, num_symplectics, num_cliffords,
    sample_clifford, enumerate_cliffords, twirl_sum
)


class TestStateVector:
    """Tests pour StateVector"""

    def test_basis_endianness(self):
        """Le qubit 0 est le bit de poids faible"""
        state = StateVector.basis(3, BitVector.from_string("100"))
        assert state.probabilities()[1] == pytest.approx(1.0)

    def test_norm_checked(self):
        with pytest.raises(DimensionError):
            StateVector(1, np.array([1.0, 1.0]))

    def test_wrong_dimension(self):
        with pytest.raises(DimensionError):
            StateVector(2, np.array([1.0, 0.0]))

    def test_size_cap(self, default_config):
        default_config.simulation.statevector_cap = 3
        with pytest.raises(SizeCapError):
            StateVector.zero(4)

    def test_tensor_order(self):
        state = StateVector.basis(1, 1).tensor(StateVector.basis(1, 0))
        assert state.num_qubits == 2
        assert state.probabilities()[1] == pytest.approx(1.0)

    def test_random_is_normalized(self, rng):
        assert StateVector.random(4, rng).norm() == pytest.approx(1.0)

    def test_fidelity(self):
        plus = StateVector.from_amplitudes([1, 1], normalize=True)
        assert plus.fidelity(StateVector.zero(1)) == pytest.approx(0.5)

    def test_drop_qubits(self):
        state = StateVector.basis(3, 0b110)
        state.drop_qubits([2], [1])
        assert state.num_qubits == 2
        assert state.allclose(StateVector.basis(2, 0b10))

    def test_drop_entangled_qubit(self):
        bell = StateVector.from_amplitudes([1, 0, 0, 1], normalize=True)
        with pytest.raises(DimensionError):
            bell.drop_qubits([1], [0])


class TestGates:
    """Application de portes"""

    def test_x_on_second_qubit(self):
        state = apply_matrix(StateVector.zero(2), X_GATE, [1])
        assert state.allclose(StateVector.basis(2, 2))

    def test_cnot_control_is_first_target(self):
        state = apply_unitary(StateVector.basis(2, 1), CNOT_GATE, [0, 1])
        assert state.allclose(StateVector.basis(2, 3))
        state = apply_unitary(StateVector.basis(2, 2), CNOT_GATE, [0, 1])
        assert state.allclose(StateVector.basis(2, 2))

    def test_reversed_targets(self):
        state = apply_unitary(StateVector.basis(2, 2), CNOT_GATE, [1, 0])
        assert state.allclose(StateVector.basis(2, 3))

    def test_non_unitary_rejected(self):
        with pytest.raises(NonUnitaryError):
            apply_unitary(StateVector.zero(1), np.array([[1, 1], [0, 1]]), [0])

    def test_repeated_targets(self):
        with pytest.raises(DimensionError):
            apply_matrix(StateVector.zero(2), CNOT_GATE, [0, 0])

    def test_random_unitary(self, rng):
        assert is_unitary(random_unitary(4, rng))
        assert is_unitary(random_unitary(1, rng))

    def test_outcome_distribution(self):
        state = hadamard_layer(StateVector.zero(2), [0])
        assert np.allclose(outcome_distribution(state, [0]), [0.5, 0.5])
        assert np.allclose(outcome_distribution(state, [1]), [1.0, 0.0])

    def test_measurement_collapses(self, rng):
        state = hadamard_layer(StateVector.zero(2), [0, 1])
        outcome, post = measure_computational(state, [0, 1], rng)
        assert post.allclose(StateVector.basis(2, outcome.value))

    def test_measurement_statistics(self, rng):
        counts = np.zeros(2)
        for _ in range(2000):
            state = hadamard_layer(StateVector.zero(1), [0])
            outcome, _ = measure_computational(state, [0], rng)
            counts[outcome.value] += 1
        assert abs(counts[1] / 2000 - 0.5) < 0.05


class TestPauli:
    """Tests pour PauliString"""

    def test_y_label(self):
        assert np.allclose(PauliString.from_label("Y").to_matrix(), Y_GATE)
        assert np.allclose(PauliString.from_label("-Z").to_matrix(), -Z_GATE)

    def test_label_round_trip(self):
        assert PauliString.from_label("XIZY").label() == "XIZY"

    def test_product_matches_matrices(self):
        paulis = list(pauli_operators(2))
        for p in paulis:
            for q in paulis:
                assert np.allclose((p * q).to_matrix(), p.to_matrix() @ q.to_matrix())

    def test_commutation(self):
        x = PauliString.from_label("X")
        z = PauliString.from_label("Z")
        assert not x.commutes_with(z)
        assert PauliString.from_label("XX").commutes_with(PauliString.from_label("ZZ"))

    def test_hermitian(self):
        assert PauliString.hermitian(BitVector(1, 1), BitVector(1, 1)).is_hermitian()
        assert not PauliString.from_bits(1, 1, 1).is_hermitian()

    def test_dagger(self):
        p = PauliString.from_bits(1, 1, 1, phase_exp=0)
        assert np.allclose(p.dagger().to_matrix(), p.to_matrix().conj().T)


class TestClifford:
    """Tests du groupe de Clifford"""

    def test_group_sizes(self):
        assert num_symplectics(1) == 6
        assert num_cliffords(1) == 24
        assert num_cliffords(2) == 11520

    def test_generators_valid(self):
        for c in (CliffordElement.identity(2), hadamard_clifford(2, 0),
                  phase_clifford(2, 1), cnot_clifford(2, 0, 1)):
            assert c.is_valid()

    def test_phase_gate_image(self):
        image = phase_clifford(1, 0).x_images[0]
        assert np.allclose(image.to_matrix(), -Y_GATE)

    def test_hadamard_squared(self):
        h = hadamard_clifford(1, 0)
        assert compose(h, h) == CliffordElement.identity(1)

    def test_dense_realization(self, rng):
        """V† P V coïncide avec l'image du tableau pour tout Pauli"""
        for _ in range(5):
            c = sample_clifford(2, rng)
            v = clifford_to_unitary(c)
            assert is_unitary(v)
            for p in pauli_operators(2):
                expected = clifford_conjugate_pauli(c, p).to_matrix()
                assert np.allclose(v.conj().T @ p.to_matrix() @ v, expected)

    def test_hadamard_realization(self):
        v = clifford_to_unitary(hadamard_clifford(1, 0))
        # H à une phase globale près
        overlap = abs(np.trace(H_GATE.conj().T @ v)) / 2
        assert overlap == pytest.approx(1.0)

    def test_enumeration_single_qubit(self):
        group = enumerate_cliffords(1)
        assert len(group) == 24
        assert len(set(group)) == 24
        assert all(c.is_valid() for c in group)

    def test_enumeration_cap(self):
        with pytest.raises(SizeCapError):
            enumerate_cliffords(3)

    def test_sampled_valid(self, rng):
        for _ in range(20):
            assert sample_clifford(3, rng).is_valid()


class TestTwirl:
    """Somme de twirl sur le groupe entier"""

    def test_distinct_paulis_vanish(self, rng):
        psi = StateVector.random(1, rng)
        total = twirl_sum(1, (1, 0), (0, 1), psi)
        assert np.linalg.norm(total) < 1e-10

    def test_identity_pair(self, rng):
        psi = StateVector.random(1, rng)
        total = twirl_sum(1, (0, 0), (0, 0), psi)
        assert np.allclose(total, 24 * psi.density_matrix())

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionError):
            twirl_sum(1, (0, 0), (1, 0), StateVector.random(2, rng))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
