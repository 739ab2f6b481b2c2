"""Linear layered probabilistic shaping (LLPS) for binary linear codes."""

from .gf2 import BitMatrix, BitVector, mul_vec_mt, rank, invert, nullspace_basis
from .ldpc import LinearCodeLayout, lift, partition, shorten, wimax_r12
from .sdm import CrossEntropy, HammingWeight, PatternMatch, SdmSpec, build, match
from .codec import dpc_encode, llps_encode, make_dpc_encoder, pas_encode, recover_info

__version__ = "0.1.0"
