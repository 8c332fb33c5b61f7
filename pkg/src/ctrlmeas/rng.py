"""Deterministic counter-based pseudo-random number generation.

Every random draw in this package comes from the splitmix64 construction:
output ``i`` of the stream with seed ``s`` is ``mix64(s + (i + 1) * GOLDEN)``
where ``mix64`` is the 64-bit multiply-xor-shift finalizer

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

and ``GOLDEN = 0x9E3779B97F4A7C15`` (2^64 / golden ratio, forced odd).

Because the stream is a pure function of (seed, counter), blocks can be
generated with vectorized numpy arithmetic and are byte-identical across
runs, platforms, and worker counts.  Sub-streams for independent tasks
(one per measurement setting, per Monte Carlo repetition, ...) are derived
with :func:`substream_seed`, which mixes the parent seed with the child
index so that streams do not overlap.
"""

from __future__ import annotations

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
_MULT1 = 0xBF58476D1CE4E5B9
_MULT2 = 0x94D049BB133111EB
_MASK64 = 0xFFFFFFFFFFFFFFFF


def mix64(z: int) -> int:
    """Apply the splitmix64 finalizer to a 64-bit integer."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MULT1) & _MASK64
    z = ((z ^ (z >> 27)) * _MULT2) & _MASK64
    return z ^ (z >> 31)


def substream_seed(seed: int, index: int) -> int:
    """Derive the seed of sub-stream ``index`` from a parent seed."""
    if index < 0:
        raise ValueError("sub-stream index must be nonnegative")
    return mix64((seed & _MASK64) ^ (((index + 1) * GOLDEN) & _MASK64))


def raw64(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Return ``count`` raw 64-bit outputs starting at stream position ``offset``."""
    counters = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    z = np.uint64(seed & _MASK64) + counters * np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MULT1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MULT2)
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Return ``count`` doubles uniform on [0, 1), from the top 53 bits of each output."""
    return (raw64(seed, count, offset) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def gaussians(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Return ``count`` standard normal doubles via Box-Muller on consecutive pairs."""
    pairs = (count + 1) // 2
    raw = raw64(seed, 2 * pairs, offset)
    # first of each pair mapped to (0, 1] so the log is finite
    u1 = ((raw[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0**-53
    u2 = (raw[1::2] >> np.uint64(11)).astype(np.float64) * 2.0**-53
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:count]
