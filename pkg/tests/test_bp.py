import itertools

import numpy as np
import pytest

from llps.bp import decode
from llps.channel import DpcChannelParams, llr_int_as_noise, transmit
from llps.codec import is_codeword, pas_encode
from llps.gf2 import BitMatrix, BitVector, mul_vec_mt
from llps.ldpc import partition, wimax_r12

HAMMING_SYS = np.array(
    [[1, 1, 0, 1, 1, 0, 0], [1, 0, 1, 1, 0, 1, 0], [0, 1, 1, 1, 0, 0, 1]],
    dtype=np.uint8,
)


@pytest.fixture(scope="module")
def code24():
    return partition(wimax_r12(24), 0)


def test_noiseless_converges_in_one_iteration(code24):
    rng = np.random.default_rng(0)
    c = pas_encode(code24, BitVector.random(code24.k, rng)).bits.to_bits()
    llr = np.where(c == 0, 50.0, -50.0)
    res = decode(code24, llr, 100)
    assert res.converged and res.iterations == 1
    assert np.array_equal(res.hard.to_bits(), c)


def test_high_snr_all_zero(code24):
    p = DpcChannelParams(1.0, 0.0, 10 ** (-6 / 20))
    for seed in range(50):
        y = transmit(np.zeros(code24.n, dtype=np.uint8), np.ones(code24.n), p, seed)
        res = decode(code24, llr_int_as_noise(y, p))
        assert res.converged and not res.hard.any()


def test_hamming_single_error_matches_ml():
    # the flipped bit is the least reliable one; with equal magnitudes loopy BP
    # on this dense 3x7 graph can settle on a weight-3 neighbour instead
    lay = partition(BitMatrix.from_bits(HAMMING_SYS), 0)
    codewords = [pas_encode(lay, BitVector.from_bits(v)).bits.to_bits() for v in itertools.product((0, 1), repeat=4)]
    for c in codewords:
        for flip in range(7):
            r = c.copy()
            r[flip] ^= 1
            llr = np.where(r == 0, 4.0, -4.0)
            llr[flip] /= 2
            # exhaustive ML over all 16 codewords (max correlation)
            ml = max(codewords, key=lambda w: float(np.sum(np.where(w == 0, 1, -1) * llr)))
            res = decode(lay, llr, 50)
            assert res.converged
            assert np.array_equal(res.hard.to_bits(), ml)
            assert np.array_equal(ml, c)


def test_converged_flag_means_codeword(code24):
    p = DpcChannelParams(1.0, 0.0, 10 ** (-0.5 / 20))
    for seed in range(30):
        y = transmit(np.zeros(code24.n, dtype=np.uint8), np.ones(code24.n), p, seed)
        res = decode(code24, llr_int_as_noise(y, p), 20)
        if res.converged:
            assert is_codeword(code24, res.hard)
        else:
            assert res.iterations == 20


def test_unit_scaling_is_identity(code24):
    p = DpcChannelParams(1.0, 0.0, 0.8)
    y = transmit(np.zeros(code24.n, dtype=np.uint8), np.ones(code24.n), p, 9)
    llr = llr_int_as_noise(y, p)
    a, b = decode(code24, llr), decode(code24, 1.0 * llr)
    assert a.hard == b.hard and a.iterations == b.iterations


def test_negation_complements_when_all_ones_is_codeword():
    # Hamming code contains 1111111 (every row of H has even weight 4)
    lay = partition(BitMatrix.from_bits(HAMMING_SYS), 0)
    assert is_codeword(lay, BitVector.ones(7))
    rng = np.random.default_rng(2)
    for _ in range(20):
        llr = rng.normal(3.0, 2.0, size=7)
        a, b = decode(lay, llr), decode(lay, -llr)
        assert b.hard == ~a.hard


def test_length_checked(code24):
    with pytest.raises(ValueError):
        decode(code24, np.zeros(code24.n - 1))


def test_shortened_positions_pinned():
    lay = partition(wimax_r12(24), 0)
    p = DpcChannelParams(1.0, 0.0, 10 ** (-2 / 20))
    y = transmit(np.zeros(lay.n, dtype=np.uint8), np.ones(lay.n), p, 1)
    llr = llr_int_as_noise(y, p)
    llr[:20] = 50.0
    res = decode(lay, llr)
    assert not res.hard.to_bits()[:20].any()
    assert not mul_vec_mt(res.hard, lay.H).any() or not res.converged
