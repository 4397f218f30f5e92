"""Counter-based random numbers: Philox4x32-10 with explicit streams.

Stream discipline (documented contract): one stream per (seed, path index).
The 64-bit seed is the Philox key, the 128-bit counter packs

    (block low 32, block high 32, path-index low 32, path-index high 32)

so every path owns an independent 2^64-block stream and any degree of
parallelism or chunking reproduces identical numbers.  Each 128-bit output
block yields two uniform doubles in the open interval (0, 1): the top 53
bits of words (0,1) and (2,3), offset by half an ulp so neither 0.0 nor 1.0
can occur (both would break exponential sampling via log).

The round function is written in masked integer arithmetic that means the
same thing to numba (uint64 operands) and to pure Python (unbounded ints),
so the compiled and fallback paths are bit-identical.  Known-answer vectors
for the zero and pi-digit counters pin the algorithm in the test suite.
"""

from __future__ import annotations

__all__ = [
    "HAVE_NUMBA",
    "philox4x32",
    "block_uniforms",
    "PHILOX_M0",
    "PHILOX_M1",
    "PHILOX_W0",
    "PHILOX_W1",
    "MASK32",
]

PHILOX_M0 = 0xD2511F53
PHILOX_M1 = 0xCD9E8D57
PHILOX_W0 = 0x9E3779B9
PHILOX_W1 = 0xBB67AE85
MASK32 = 0xFFFFFFFF

_INV53 = 1.0 / 9007199254740992.0  # 2^-53


def _philox4x32_py(c0, c1, c2, c3, k0, k1):
    """Ten Philox rounds on counter (c0..c3) under key (k0, k1)."""
    for rnd in range(10):
        if rnd > 0:
            k0 = (k0 + PHILOX_W0) & MASK32
            k1 = (k1 + PHILOX_W1) & MASK32
        p0 = PHILOX_M0 * c0  # both factors < 2^32, product exact in 64 bits
        p1 = PHILOX_M1 * c2
        hi0 = (p0 >> 32) & MASK32
        lo0 = p0 & MASK32
        hi1 = (p1 >> 32) & MASK32
        lo1 = p1 & MASK32
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
    return c0, c1, c2, c3


def _block_uniforms_py(seed_lo, seed_hi, path_lo, path_hi, block_lo, block_hi):
    """Two uniforms in (0,1) from one counter block of the (seed, path) stream.

    53 mantissa bits are assembled as 27 + 26 bits from two 32-bit words;
    the result stays below 2^53, so the same code is exact under both
    Python's big ints and numba's int64.
    """
    x0, x1, x2, x3 = philox4x32(block_lo, block_hi, path_lo, path_hi, seed_lo, seed_hi)
    v1 = (x0 >> 5) * 67108864 + (x1 >> 6)
    v2 = (x2 >> 5) * 67108864 + (x3 >> 6)
    return (v1 + 0.5) * _INV53, (v2 + 0.5) * _INV53


try:
    import numba

    HAVE_NUMBA = True
    philox4x32 = numba.njit(nogil=True)(_philox4x32_py)
    block_uniforms = numba.njit(nogil=True)(_block_uniforms_py)
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False
    philox4x32 = _philox4x32_py
    block_uniforms = _block_uniforms_py


def split64(value: int):
    """(low 32, high 32) of a 64-bit integer, for counter/key packing."""
    value &= 0xFFFFFFFFFFFFFFFF
    return value & MASK32, (value >> 32) & MASK32
