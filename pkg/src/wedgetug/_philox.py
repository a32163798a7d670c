"""Counter-based random words (Philox-style 4x64, 10 rounds).

Trajectory j of cell c under master seed m draws words addressed purely by
(key0=m, key1=c, counter=(block, j, 0, 0)); nothing is sequential, so any
worker can produce any word of any trajectory and results are independent of
scheduling, chunking, and backend.  The compiled kernel implements the same
function; equality is asserted in the test suite.

Each 64-bit word feeds 32 game steps at two bits per step (coin, noise sign),
consumed LSB-first.
"""

import numpy as np

_M0 = np.uint64(0xD2E7470EE14C6C93)
_M1 = np.uint64(0xCA5A826395121157)
_W0 = np.uint64(0x9E3779B97F4A7C15)
_W1 = np.uint64(0xBB67AE8584CAA73B)
_MASK32 = np.uint64(0xFFFFFFFF)
_SH32 = np.uint64(32)


def _mulhilo(a, b):
    lo = a * b
    ah = a >> _SH32
    al = a & _MASK32
    bh = b >> _SH32
    bl = b & _MASK32
    t = al * bl
    w = ah * bl + (t >> _SH32)
    u = al * bh + (w & _MASK32)
    hi = ah * bh + (w >> _SH32) + (u >> _SH32)
    return hi, lo


def philox_block(block, traj, key0, key1):
    """Four uint64 words for counter (block, traj, 0, 0); vectorized."""
    c0 = np.asarray(block, dtype=np.uint64)
    c1 = np.asarray(traj, dtype=np.uint64)
    c2 = np.zeros_like(c0)
    c3 = np.zeros_like(c0)
    k0 = np.uint64(key0)
    k1 = np.uint64(key1)
    with np.errstate(over="ignore"):  # wraparound is the point
        for _ in range(10):
            hi0, lo0 = _mulhilo(_M0, c0)
            hi1, lo1 = _mulhilo(_M1, c2)
            c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
            k0 = k0 + _W0
            k1 = k1 + _W1
    return c0, c1, c2, c3


def word_for_step(step, traj, key0, key1):
    """The uint64 word feeding game step `step` (scalar helper)."""
    m = step >> 5
    blk = np.uint64(m >> 2)
    words = philox_block(blk, np.uint64(traj), key0, key1)
    return int(words[m & 3])


def bits_for_step(step, traj, key0, key1):
    """(coin, sign_bit) for one step; coin 1 means player I moves."""
    word = word_for_step(step, traj, key0, key1)
    chunk = word >> (2 * (step & 31))
    return chunk & 1, (chunk >> 1) & 1
