"""
Tests unitaires pour l'algèbre linéaire sur F2
"""

import pytest
import sys
from pathlib import Path

import numpy as np
from hypothesis import given, settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core.errors import DimensionError, InfeasibleConstraintError
from src.engine.f2linalg import (
    BitVector, BitMatrix, SamplerStats, rank, kernel_basis, solve, matvec,
    sample_orthogonal, sample_rank_constrained, enumerate_vectors
)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    rows = draw(st.integers(1, max_rows))
    cols = draw(st.integers(1, max_cols))
    data = draw(st.lists(st.integers(0, (1 << cols) - 1), min_size=rows, max_size=rows))
    return BitMatrix(rows, cols, tuple(data))


class TestBitVector:
    """Tests pour BitVector"""

    def test_string_order(self):
        """Le premier caractère est le bit 0"""
        v = BitVector.from_string("1101")
        assert v.length == 4
        assert v.value == 0b1011
        assert v.to_string() == "1101"

    def test_invalid_string(self):
        with pytest.raises(DimensionError):
            BitVector.from_string("01a1")

    def test_value_out_of_range(self):
        with pytest.raises(DimensionError):
            BitVector(2, 4)

    def test_xor_and_dot(self):
        a = BitVector.from_string("110")
        b = BitVector.from_string("011")
        assert (a ^ b).to_string() == "101"
        assert a.dot(b) == 1

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            BitVector(2, 1) ^ BitVector(3, 1)

    def test_concat_and_slice(self):
        a = BitVector.from_string("10")
        b = BitVector.from_string("011")
        joined = a.concat(b)
        assert joined.to_string() == "10011"
        assert joined.slice(2, 5) == b
        assert joined.prefix(2) == a

    def test_bytes(self):
        v = BitVector.from_string("10000000" + "1")
        assert v.to_bytes() == bytes([1, 1])
        assert BitVector.from_bytes(v.to_bytes(), 9) == v

    def test_lowest_set_bit(self):
        assert BitVector.zeros(4).lowest_set_bit() == -1
        assert BitVector.from_string("0010").lowest_set_bit() == 2

    def test_random_respects_length(self, rng):
        for _ in range(50):
            assert BitVector.random(5, rng).value < 32


class TestBitMatrix:
    """Tests pour BitMatrix"""

    def test_identity_matvec(self):
        x = BitVector.from_string("1011")
        assert BitMatrix.identity(4) @ x == x

    def test_transpose(self):
        m = BitMatrix.from_lists([[1, 0, 1], [0, 1, 1]])
        t = m.transpose()
        assert (t.rows, t.cols) == (3, 2)
        assert t.to_array().tolist() == [[1, 0], [0, 1], [1, 1]]

    def test_flatten_round_trip(self):
        m = BitMatrix.from_lists([[1, 0], [1, 1], [0, 1]])
        assert BitMatrix.from_bitvector(3, 2, m.to_bitvector()) == m

    def test_product_matches_numpy(self, rng):
        a = BitMatrix.random(3, 4, rng)
        b = BitMatrix.random(4, 2, rng)
        expected = (a.to_array().astype(int) @ b.to_array().astype(int)) % 2
        assert np.array_equal((a @ b).to_array(), expected)

    def test_stack_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            BitMatrix.zeros(1, 2).stack(BitMatrix.zeros(1, 3))


class TestGauss:
    """Rang, noyau et résolution"""

    def test_rank_examples(self):
        assert rank(BitMatrix.identity(5)) == 5
        assert rank(BitMatrix.from_lists([[1, 1], [1, 1]])) == 1
        assert rank(BitMatrix.zeros(3, 3)) == 0

    @given(matrices())
    @settings(max_examples=60, deadline=None)
    def test_rank_nullity(self, m):
        basis = kernel_basis(m)
        assert len(basis) == m.cols - rank(m)
        for v in basis:
            assert matvec(m, v).is_zero()

    @given(matrices(), st.data())
    @settings(max_examples=60, deadline=None)
    def test_solve_consistent_system(self, m, data):
        z = BitVector(m.cols, data.draw(st.integers(0, (1 << m.cols) - 1)))
        b = matvec(m, z)
        solution = solve(m, b)
        assert solution is not None
        assert matvec(m, solution) == b

    def test_solve_inconsistent(self):
        m = BitMatrix.from_lists([[1, 1], [1, 1]])
        assert solve(m, BitVector.from_string("10")) is None


class TestSampling:
    """Échantillonnage contraint"""

    def test_sample_orthogonal(self, rng):
        d = BitVector.from_string("0110")
        for parity in (0, 1):
            for _ in range(30):
                assert sample_orthogonal(d, rng, parity).dot(d) == parity

    def test_orthogonal_to_zero_infeasible(self, rng):
        with pytest.raises(InfeasibleConstraintError):
            sample_orthogonal(BitVector.zeros(3), rng, parity=1)

    def test_rank_constrained(self, rng):
        d = BitVector.from_string("1010")
        stats = SamplerStats()
        for _ in range(10):
            m = sample_rank_constrained(3, 4, d, 2, rng, stats=stats)
            assert rank(m) == 2
            assert matvec(m, d).is_zero()
        assert stats.accepted == 10
        assert 0 < stats.acceptance_rate <= 1

    def test_rank_too_large_with_kernel(self, rng):
        with pytest.raises(InfeasibleConstraintError):
            sample_rank_constrained(4, 4, BitVector.from_string("1000"), 4, rng)

    def test_rank_out_of_bounds(self, rng):
        with pytest.raises(InfeasibleConstraintError):
            sample_rank_constrained(2, 3, None, 3, rng)

    def test_enumerate_vectors(self):
        vectors = list(enumerate_vectors(3))
        assert len(vectors) == 8
        assert [v.value for v in vectors] == list(range(8))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
