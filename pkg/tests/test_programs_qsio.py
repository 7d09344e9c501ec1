"""
Tests unitaires pour les descripteurs de programmes et la couche d'obfuscation
"""

import pytest
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.errors import DimensionError, EquivalenceFailure, ParameterError, SizeCapError
from src.engine.crypto import GgmKey, encode_ggm_key, ggm_eval, ggm_puncture
from src.engine.f2linalg import BitVector, enumerate_vectors, sample_rank_constrained
from src.engine.programs import (
    PlainProgram, make_point, make_patched, make_tilde_patched, make_search_patched,
    make_point_coset, coset_pair, x_of
)
from src.engine.qsim import is_unitary, random_unitary
from src.engine.qsio import (
    QuantumImplementation, OpaqueProgram, wrap_opaque, evaluate, clifford_otp_obfuscate,
    functional_equiv, find_witness, assert_functional_equiv,
    purified_hybrid_gap, purified_gap_bound, projected_branch_weight,
    projected_branch_weight_formula
)
from src.engine.unclonable import UeScheme, compile_key_testing


def _table(*values):
    return [BitVector(1, v) for v in values]


class TestBasicPrograms:
    """Programmes de base"""

    def test_point_function(self, rng):
        s = BitVector.from_string("101")
        point = make_point({s}, 3)
        for x in enumerate_vectors(3):
            assert point.evaluate(x, rng).value == int(x == s)

    def test_point_length_check(self):
        with pytest.raises(DimensionError):
            make_point({BitVector.zeros(2)}, 3)

    def test_from_table(self, rng):
        program = PlainProgram.from_table(_table(1, 0, 0, 1))
        assert program.in_len == 2
        assert [y.value for y in program.truth_table(rng)] == [1, 0, 0, 1]

    def test_table_size(self):
        with pytest.raises(DimensionError):
            PlainProgram.from_table(_table(1, 0, 0))

    def test_input_length_checked(self, rng):
        with pytest.raises(DimensionError):
            PlainProgram.from_table(_table(0, 1)).evaluate(BitVector.zeros(2), rng)


class TestPatchedPrograms:
    """Programmes patchés par un chiffré à test de clé"""

    def test_patched(self, rng):
        scheme = compile_key_testing(UeScheme.toy(2, 1))
        s = scheme.keygen(rng)
        sigma = scheme.encrypt(s, BitVector.from_string("1"), rng)
        g = PlainProgram(lambda x: BitVector(1, 0), scheme.key_len, 1, "zero")
        patched = make_patched(g, sigma)
        assert patched.evaluate(s, rng).value == 1
        assert patched.evaluate(s.flip(3), rng).value == 0

    def test_key_length_mismatch(self, rng):
        scheme = compile_key_testing(UeScheme.toy(2, 1))
        sigma = scheme.encrypt(scheme.keygen(rng), BitVector.zeros(1), rng)
        with pytest.raises(DimensionError):
            make_patched(PlainProgram(lambda x: BitVector(1, 0), 4, 1), sigma)

    def test_tilde_patched(self, rng):
        scheme = compile_key_testing(UeScheme.full(22))
        n = scheme.key_len
        s = scheme.keygen(rng)
        y = BitVector.random(n, rng)
        sigma = scheme.encrypt(s, y, rng)
        g = PlainProgram(lambda x: BitVector(1, x[0]), n, 1, "first-bit")
        program = make_tilde_patched(g, sigma)
        assert program.evaluate(s, rng).value == y[0]
        other = s.flip(0)
        assert program.evaluate(other, rng).value == other[0]

    def test_search_patched(self, rng):
        scheme = compile_key_testing(UeScheme.full(22), outer_key_len=8)
        s = scheme.keygen(rng)
        key = GgmKey.random(8, 4, 8, rng)
        plaintext = BitVector.zeros(4).concat(encode_ggm_key(key))
        sigma = scheme.encrypt(s, plaintext, rng)

        f = PlainProgram.from_punctured(ggm_puncture(key, [s]))
        program = make_search_patched(f, sigma, 4)
        assert program.evaluate(s, rng) == ggm_eval(key, s)
        other = s.flip(2)
        assert program.evaluate(other, rng) == ggm_eval(key, other)

    def test_search_patched_nonzero_prefix(self, rng):
        scheme = compile_key_testing(UeScheme.full(22), outer_key_len=8)
        s = scheme.keygen(rng)
        key = GgmKey.random(8, 4, 8, rng)
        plaintext = BitVector.ones(4).concat(encode_ggm_key(key))
        sigma = scheme.encrypt(s, plaintext, rng)
        program = make_search_patched(PlainProgram.from_ggm(key), sigma, 4)
        assert program.evaluate(s, rng) is None


class TestPointCoset:
    """Programme P_{T,σ} des fonctions point"""

    def test_coset_pair(self, rng):
        T = sample_rank_constrained(3, 4, None, 3, rng)
        w = BitVector.random(3, rng)
        x0, x1 = coset_pair(T, w)
        assert x0 != x1
        assert T @ x0 == w and T @ x1 == w
        assert x0.lex_key() < x1.lex_key()

    def test_x_of(self):
        x0, x1 = BitVector.from_string("0110"), BitVector.from_string("0011")
        assert x_of(1, x0, x1) == x0
        assert x_of(0, x0, x1) == x1
        with pytest.raises(ParameterError):
            x_of(0, x0, x0)

    def test_point_coset_is_a_point_function(self, rng):
        T = sample_rank_constrained(3, 4, None, 3, rng)
        scheme = compile_key_testing(UeScheme.toy(2, 1), outer_key_len=3)
        w = BitVector.random(3, rng)
        c = BitVector.random(1, rng)
        sigma = scheme.encrypt(w, c, rng)
        program = make_point_coset(T, sigma)

        table = program.truth_table(rng)
        hits = [x for x, y in zip(enumerate_vectors(4), table) if y.value]
        assert hits == [x_of(c[0], *coset_pair(T, w))]


class TestQuantumImplementation:
    """Implémentations quantiques et obfuscateur de Clifford"""

    def test_truth_table(self, rng):
        impl = QuantumImplementation.from_truth_table(_table(0, 1))
        assert impl.register_qubits == 2
        assert np.allclose(impl.output_distribution(BitVector(1, 1)), [0, 1])
        for _ in range(3):
            assert impl.evaluate(BitVector(1, 0), rng).value == 0
            assert impl.evaluate(BitVector(1, 1), rng).value == 1

    def test_from_function(self, rng):
        impl = QuantumImplementation.from_function(lambda x: BitVector(1, x.weight & 1), 2, 1)
        assert impl.register_qubits == 0
        assert impl.evaluate(BitVector.from_string("11"), rng).value == 0
        assert impl.evaluate(BitVector.from_string("10"), rng).value == 1

    def test_permutation_is_involution(self):
        impl = QuantumImplementation.from_truth_table(_table(1, 0))
        perm = impl.permutation(extra_qubits=1)
        assert np.array_equal(perm[perm], np.arange(perm.shape[0]))

    def test_otp_correctness(self, rng):
        impl = QuantumImplementation.from_truth_table(_table(1, 0))
        artifact = clifford_otp_obfuscate(impl, 1, rng)
        assert artifact.register_qubits == 3
        for _ in range(3):
            for x in enumerate_vectors(1):
                assert artifact.evaluate(x, rng).value == 1 - x.value
        assert is_unitary(artifact.oracle_matrix())

    def test_otp_cap(self, rng, default_config):
        default_config.simulation.dense_clifford_cap = 2
        impl = QuantumImplementation.from_truth_table(_table(1, 0))
        with pytest.raises(SizeCapError):
            clifford_otp_obfuscate(impl, 1, rng)


class TestOpaqueProgram:
    """Programme opaque : évaluation seule"""

    def test_evaluate_only(self, rng):
        program = PlainProgram.from_table(_table(0, 1))
        opaque = wrap_opaque(program)
        assert isinstance(opaque, OpaqueProgram)
        assert evaluate(opaque, BitVector(1, 1), rng).value == 1
        assert not hasattr(opaque, "inner")
        assert not hasattr(opaque, "__dict__")

    def test_distinct_tokens(self):
        program = PlainProgram.from_table(_table(0, 1))
        assert wrap_opaque(program).token != wrap_opaque(program).token

    def test_length_check(self, rng):
        opaque = wrap_opaque(PlainProgram.from_table(_table(0, 1)))
        with pytest.raises(DimensionError):
            opaque.evaluate(BitVector.zeros(2), rng)


class TestFunctionalEquivalence:
    """Audit d'équivalence fonctionnelle"""

    def test_equivalent_programs(self, rng):
        table = _table(1, 0, 1, 1)
        plain = PlainProgram.from_table(table)
        impl = QuantumImplementation.from_truth_table(table)
        assert functional_equiv(plain, impl, enumerate_vectors(2), rng)
        assert functional_equiv(plain, wrap_opaque(plain), enumerate_vectors(2), rng)

    def test_witness(self, rng):
        left = PlainProgram.from_table(_table(1, 0, 1, 1))
        right = PlainProgram.from_table(_table(1, 0, 0, 1))
        witness = find_witness(left, right, enumerate_vectors(2), rng)
        assert witness[0] == BitVector(2, 2)
        with pytest.raises(EquivalenceFailure) as excinfo:
            assert_functional_equiv(left, right, enumerate_vectors(2), rng)
        assert excinfo.value.witness == BitVector(2, 2)

    def test_signature_mismatch(self, rng):
        with pytest.raises(DimensionError):
            find_witness(PlainProgram.from_table(_table(0, 1)),
                         PlainProgram.from_table(_table(0, 1, 1, 0)),
                         enumerate_vectors(1), rng)


class TestPurifiedOracles:
    """Écart entre oracles purifiés"""

    def test_zero_queries(self, rng):
        adv = random_unitary(16, rng)
        assert purified_hybrid_gap(0, adv, 0) == pytest.approx(0.0)

    def test_gap_below_bound(self, rng):
        adv = random_unitary(16, rng)
        for q in (1, 2):
            for b in (0, 1):
                assert purified_hybrid_gap(q, adv, b) <= purified_gap_bound(q, 1) + 1e-9

    def test_bound_values(self):
        assert purified_gap_bound(0) == 0.0
        assert purified_gap_bound(2, 1) == pytest.approx(3.0)
        assert purified_gap_bound(1, 3) == pytest.approx(0.25)

    def test_identity_adversary(self):
        adv = np.eye(16)
        assert projected_branch_weight(adv) == pytest.approx(0.0, abs=1e-12)
        assert projected_branch_weight_formula(adv) == pytest.approx(0.0, abs=1e-12)

    def test_projected_weight(self, rng):
        for _ in range(3):
            adv = random_unitary(16, rng)
            assert projected_branch_weight(adv) <= 0.5 + 1e-9
            assert 0 <= projected_branch_weight_formula(adv) <= 7 / 15 + 1e-9

    def test_invalid_inputs(self, rng):
        with pytest.raises(SizeCapError):
            purified_hybrid_gap(1, np.eye(8), 0)
        with pytest.raises(DimensionError):
            purified_hybrid_gap(1, np.eye(16), 2)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
