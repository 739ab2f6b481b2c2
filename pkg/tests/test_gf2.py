import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from llps.gf2 import (
    BitMatrix,
    BitVector,
    RankDeficientError,
    SingularMatrixError,
    find_invertible_right_block,
    invert,
    mul_vec_mt,
    nullspace_basis,
    rank,
)


def bm(rows):
    return BitMatrix.from_bits(np.array(rows, dtype=np.uint8))


def bv(bits):
    return BitVector.from_bits(np.array(bits, dtype=np.uint8))


def random_full_rank(n, rng):
    while True:
        M = BitMatrix.from_bits(rng.integers(0, 2, size=(n, n), dtype=np.uint8))
        if rank(M) == n:
            return M


def brute_nullspace(M):
    c = M.cols
    hb = M.to_bits().astype(int)
    out = set()
    for x in itertools.product((0, 1), repeat=c):
        if not ((np.array(x) @ hb.T) % 2).any():
            out.add(x)
    return out


def span(vectors, c):
    out = {tuple([0] * c)}
    for v in vectors:
        vb = tuple(v.to_bits())
        out |= {tuple(np.bitwise_xor(a, vb)) for a in out}
    return out


matrices = st.integers(1, 7).flatmap(
    lambda r: st.integers(1, 12).flatmap(lambda c: arrays(np.uint8, (r, c), elements=st.integers(0, 1)))
)


class TestBitVector:
    def test_padding_stays_zero(self):
        v = BitVector.ones(70)
        assert v.weight() == 70
        assert (~v).weight() == 0

    def test_roundtrip_and_indexing(self):
        bits = np.array([1, 0, 1, 1, 0] * 30, dtype=np.uint8)
        v = BitVector.from_bits(bits)
        assert np.array_equal(v.to_bits(), bits)
        assert v[2] == 1 and v[1] == 0 and v[-1] == 0
        assert v[5:10] == BitVector.from_bits(bits[5:10])

    def test_xor_length_mismatch(self):
        with pytest.raises(ValueError):
            BitVector.zeros(3) ^ BitVector.zeros(4)


class TestMulVecMt:
    def test_zero_vector(self):
        M = bm(np.random.default_rng(0).integers(0, 2, size=(3, 4)))
        assert mul_vec_mt(BitVector.zeros(4), M) == BitVector.zeros(3)

    def test_identity(self):
        assert mul_vec_mt(bv([1, 0, 1, 1]), BitMatrix.identity(4)) == bv([1, 0, 1, 1])

    def test_hand_parity(self):
        # (1,1,0)·(1,1,1) = 0, (1,1,0)·(0,1,1) = 1
        assert mul_vec_mt(bv([1, 1, 0]), bm([[1, 1, 1], [0, 1, 1]])) == bv([0, 1])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mul_vec_mt(BitVector.zeros(3), BitMatrix.identity(4))

    @given(matrices, st.data())
    def test_distributes_over_xor(self, M, data):
        M = BitMatrix.from_bits(M)
        v = bv(data.draw(arrays(np.uint8, M.cols, elements=st.integers(0, 1))))
        w = bv(data.draw(arrays(np.uint8, M.cols, elements=st.integers(0, 1))))
        assert mul_vec_mt(v ^ w, M) == mul_vec_mt(v, M) ^ mul_vec_mt(w, M)

    def test_wide_matrix_matches_dense_product(self):
        rng = np.random.default_rng(3)
        Mb = rng.integers(0, 2, size=(40, 300), dtype=np.uint8)
        vb = rng.integers(0, 2, size=300, dtype=np.uint8)
        expected = (Mb.astype(int) @ vb) % 2
        assert np.array_equal(mul_vec_mt(bv(vb), bm(Mb)).to_bits(), expected)


class TestInvert:
    def test_identity(self):
        assert invert(BitMatrix.identity(5)) == BitMatrix.identity(5)

    def test_self_inverse_upper_triangular(self):
        M = bm([[1, 1], [0, 1]])
        assert invert(M) == M

    @pytest.mark.parametrize("seed", range(5))
    def test_random_full_rank(self, seed):
        M = random_full_rank(8, np.random.default_rng(seed))
        Mi = invert(M)
        assert M @ Mi == BitMatrix.identity(8)
        assert Mi @ M == BitMatrix.identity(8)

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            invert(bm([[1, 1], [1, 1]]))

    def test_not_square(self):
        with pytest.raises(ValueError):
            invert(BitMatrix.zeros(2, 3))


class TestRank:
    def test_examples(self):
        assert rank(BitMatrix.zeros(3, 5)) == 0
        assert rank(BitMatrix.identity(4)) == 4
        assert rank(bm([[1, 0, 1], [1, 0, 1]])) == 1

    @given(matrices, st.randoms(use_true_random=False))
    @settings(max_examples=50)
    def test_invariant_under_row_operations(self, Mb, rnd):
        r0 = rank(BitMatrix.from_bits(Mb))
        A = Mb.copy()
        for _ in range(10):
            i, j = rnd.randrange(A.shape[0]), rnd.randrange(A.shape[0])
            if rnd.random() < 0.5:
                A[[i, j]] = A[[j, i]]
            elif i != j:
                A[i] ^= A[j]
        assert rank(BitMatrix.from_bits(A)) == r0


class TestNullspace:
    def test_identity_has_trivial_nullspace(self):
        assert nullspace_basis(BitMatrix.identity(4)) == []

    def test_zero_matrix_spans_everything(self):
        basis = nullspace_basis(BitMatrix.zeros(2, 3))
        assert len(basis) == 3
        assert span(basis, 3) == set(itertools.product((0, 1), repeat=3))

    def test_enumerated_example(self):
        M = bm([[1, 1, 0], [0, 1, 1]])
        # brute force over all 8 words: only 000 and 111 are annihilated
        assert brute_nullspace(M) == {(0, 0, 0), (1, 1, 1)}
        assert nullspace_basis(M) == [bv([1, 1, 1])]

    @given(matrices)
    @settings(max_examples=60, deadline=None)
    def test_exhaustive_cross_check(self, Mb):
        M = BitMatrix.from_bits(Mb)
        basis = nullspace_basis(M)
        assert len(basis) + rank(M) == M.cols
        for b in basis:
            assert not mul_vec_mt(b, M).any()
        assert span(basis, M.cols) == brute_nullspace(M)


class TestInvertibleRightBlock:
    def test_identity_on_right(self):
        rng = np.random.default_rng(1)
        M = BitMatrix.from_bits(np.hstack([rng.integers(0, 2, size=(4, 3), dtype=np.uint8), np.eye(4, dtype=np.uint8)]))
        perm, inv = find_invertible_right_block(M)
        assert np.array_equal(perm, np.arange(7))
        assert inv == BitMatrix.identity(4)

    def test_zero_rightmost_column(self):
        Mb = np.array([[1, 0, 0, 1, 0], [0, 1, 0, 1, 0], [0, 0, 1, 1, 0]], dtype=np.uint8)
        M = bm(Mb)
        perm, inv = find_invertible_right_block(M)
        assert not np.array_equal(perm, np.arange(5))
        block = M.columns(perm[2:])
        assert block @ inv == BitMatrix.identity(3)
        assert sorted(perm) == list(range(5))

    def test_rank_deficient(self):
        with pytest.raises(RankDeficientError):
            find_invertible_right_block(bm([[1, 1, 0], [1, 1, 0]]))

    @pytest.mark.parametrize("seed", range(10))
    def test_random_wide(self, seed):
        rng = np.random.default_rng(seed)
        M = bm(rng.integers(0, 2, size=(6, 9)))
        while rank(M) < 6:
            M = bm(rng.integers(0, 2, size=(6, 9)))
        perm, inv = find_invertible_right_block(M)
        assert M.columns(perm[3:]) @ inv == BitMatrix.identity(6)
