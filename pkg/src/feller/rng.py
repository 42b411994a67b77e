"""Deterministic per-path random streams and exact variate samplers.

Parallel path generation needs one independent stream per path that is a
pure function of (master seed, path index), so results never depend on
scheduling or worker count.  Each stream is a xoshiro256++ generator
whose four state words are derived by SplitMix64 from the pair -- the
key-derivation construction recommended by the xoshiro authors, here
driven by a counter so any (seed, index) state can be built directly.

The samplers on top are exact (no normal approximations anywhere):

* Poisson: sequential-search inversion for small means, Hormann's PTRS
  transformed rejection (1993) for means >= 10, valid for arbitrarily
  large means.
* Gamma(shape >= 1, unit scale): Marsaglia & Tsang's squeeze method
  (ACM TOMS 26(3), 2000); chi-squared with even degrees of freedom is
  ``2 * Gamma(N, 1)``.
* Normal: Box-Muller pairs.

All kernels are numba-compiled; the state is a 4-word uint64 array
mutated in place, which lets the same code drive both the scalar Python
API and the hot path loops.
"""

import math

import numpy as np
from numba import float64, int64, njit, uint64

__all__ = ["RandomStream", "stream_state"]

_GOLDEN = uint64(0x9E3779B97F4A7C15)
# odd multiplier decorrelating consecutive path indices before mixing
_INDEX_STRIDE = uint64(0xD1342543DE82EF95)


@njit(cache=True, inline="always")
def _mix64(z):
    # SplitMix64 output function (Steele, Lea & Flood 2014)
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(cache=True)
def stream_state(seed, path_index):
    """xoshiro256++ state words for stream (seed, path_index)."""
    s = np.empty(4, dtype=np.uint64)
    z = uint64(seed) + uint64(path_index) * _INDEX_STRIDE
    for i in range(4):
        z = z + _GOLDEN
        s[i] = _mix64(z)
    if s[0] | s[1] | s[2] | s[3] == uint64(0):
        s[0] = uint64(1)  # the all-zero state is a fixed point of xoshiro
    return s


@njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << uint64(k)) | (x >> uint64(64 - k))


@njit(cache=True, inline="always")
def next_u64(s):
    out = _rotl(s[0] + s[3], 23) + s[0]
    t = s[1] << uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return out


@njit(cache=True, inline="always")
def next_double(s):
    """Uniform double in [0, 1) with 53 random bits."""
    return (next_u64(s) >> uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True, inline="always")
def next_normal_pair(s):
    # Box-Muller; 1 - U keeps the log argument in (0, 1]
    u1 = 1.0 - next_double(s)
    u2 = next_double(s)
    r = math.sqrt(-2.0 * math.log(u1))
    a = 2.0 * math.pi * u2
    return r * math.cos(a), r * math.sin(a)


@njit(cache=True, inline="always")
def next_normal(s):
    z, _ = next_normal_pair(s)
    return z


@njit(cache=True)
def poisson_draw(s, mean):
    """Exact Poisson draw for any finite mean >= 0."""
    if mean <= 0.0:
        return int64(0)
    if mean < 10.0:
        # inversion by sequential search of the cumulative pmf
        x = int64(0)
        p = math.exp(-mean)
        cum = p
        u = next_double(s)
        while u > cum:
            x += 1
            p *= mean / x
            cum += p
        return x
    # PTRS transformed rejection (Hormann 1993), exact for mean >= 10
    b = 0.931 + 2.53 * math.sqrt(mean)
    a = -0.059 + 0.02483 * b
    inv_alpha = 1.1239 + 1.1328 / (b - 3.4)
    v_r = 0.9277 - 3.6224 / (b - 2.0)
    log_mean = math.log(mean)
    while True:
        u = next_double(s) - 0.5
        v = next_double(s)
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + mean + 0.43)
        if us >= 0.07 and v <= v_r:
            return int64(k)
        if k < 0.0 or (us < 0.013 and v > us):
            continue
        if math.log(v * inv_alpha / (a / (us * us) + b)) <= (
            k * log_mean - mean - math.lgamma(k + 1.0)
        ):
            return int64(k)


@njit(cache=True)
def gamma_draw(s, shape):
    """Exact Gamma(shape, 1) draw for shape >= 1 (Marsaglia-Tsang)."""
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        z = next_normal(s)
        v = 1.0 + c * z
        if v <= 0.0:
            continue
        v = v * v * v
        u = next_double(s)
        z2 = z * z
        if u < 1.0 - 0.0331 * z2 * z2:
            return d * v
        if math.log(u) < 0.5 * z2 + d - d * v + d * math.log(v):
            return d * v


class RandomStream:
    """Deterministic pseudo-random stream for one path.

    ``RandomStream(seed, index)`` is a pure function of its arguments:
    the same pair always replays the same draw sequence, and distinct
    indices give statistically independent streams.  Instances are cheap
    and are not meant to be shared across workers; give each worker its
    own indices instead.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int, path_index: int = 0):
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if not 0 <= path_index < 2**64:
            raise ValueError(f"path_index must be a 64-bit unsigned integer, got {path_index}")
        self.state = stream_state(np.uint64(seed), np.uint64(path_index))

    def uniform(self) -> float:
        """Next uniform draw in [0, 1)."""
        return next_double(self.state)

    def normal(self) -> float:
        """Next standard normal draw."""
        return next_normal(self.state)
