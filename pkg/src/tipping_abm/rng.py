"""Deterministic randomness for simulation runs.

Every run owns exactly one `RngStream`. All stochastic operations document
their draw order (see the engine docstrings), so a run is bit-identically
replayable from (config, seed) within this implementation. Streams for
sweep cells are derived with `derive_run_seed`, never by reusing or
splitting a live stream.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
# SplitMix64 constants (Steele, Lea & Flood 2014).
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix64(x: int) -> int:
    """SplitMix64 finalizer: bijective avalanche mix of a 64-bit word."""
    x &= _MASK64
    x ^= x >> 30
    x = (x * _MIX1) & _MASK64
    x ^= x >> 27
    x = (x * _MIX2) & _MASK64
    x ^= x >> 31
    return x


def derive_run_seed(master_seed: int, coordinates: tuple[int, ...] = ()) -> int:
    """Derive a stable 64-bit run seed from a master seed and integer coordinates.

    The hash spec is fixed and platform independent: start from
    ``h = mix64(master_seed + GAMMA)`` (the offset avoids the finalizer's
    zero fixed point), then for each coordinate absorb
    ``h = mix64(h + GAMMA + mix64(coordinate + GAMMA))`` where all
    arithmetic is modulo 2**64 and negative coordinates are taken
    two's-complement. Pure function; distinct coordinate tuples give
    distinct seeds with overwhelming probability.
    """
    h = _mix64((master_seed + _GAMMA) & _MASK64)
    for c in coordinates:
        h = _mix64((h + _GAMMA + _mix64((int(c) + _GAMMA) & _MASK64)) & _MASK64)
    return h


class RngStream:
    """Single-owner uniform random stream backed by numpy's PCG64.

    Draw primitives are deliberately minimal so that the compiled kernels
    and the pure-Python engines consume identical sequences:

    - ``random()`` / ``random_block(n)``: U[0,1) doubles via ``next_double``,
    - ``index(n)``: ``floor(random() * n)`` clamped to ``n - 1`` (one draw),
    - ``shuffle(a)``: Fisher-Yates from the top using ``index`` (n - 1 draws).

    ``draw_count`` counts consumed doubles, including those consumed inside
    compiled kernels (the kernels report their count back).
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self.bit_generator = np.random.PCG64(self.seed)
        self._gen = np.random.Generator(self.bit_generator)
        self.draw_count = 0

    def random(self) -> float:
        self.draw_count += 1
        return float(self._gen.random())

    def random_block(self, n: int) -> np.ndarray:
        self.draw_count += n
        return self._gen.random(n)

    def index(self, n: int) -> int:
        """Uniform index in [0, n); consumes exactly one draw."""
        k = int(self.random() * n)
        return n - 1 if k >= n else k

    def shuffle(self, a: np.ndarray) -> None:
        """In-place Fisher-Yates shuffle; consumes len(a) - 1 draws."""
        for i in range(len(a) - 1, 0, -1):
            j = self.index(i + 1)
            a[i], a[j] = a[j], a[i]

    def add_kernel_draws(self, n: int) -> None:
        """Record draws consumed by a compiled kernel on this stream."""
        self.draw_count += int(n)
