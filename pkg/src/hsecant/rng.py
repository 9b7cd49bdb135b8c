"""Counter-based random streams.

Every stream is a Philox4x64-10 generator keyed by ``(seed, stream_id)``.
The 256-bit counter is laid out as ``[block, lane, attempt, 0]``:

* lane 0 is the stream's own sequential generator (used through a
  :class:`numpy.random.Generator`);
* lane ``r + 1`` is the child stream of work unit ``r``.  Its blocks are
  addressed directly, so a replication's draws do not depend on which
  thread computed it or in what order.
* ``attempt`` separates redraws of the same work unit.

The compiled kernels reimplement Philox4x64-10 and must agree with
:func:`philox_block` bit for bit.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = ["RngStream", "philox_block", "lane_bitgen", "standard_cauchy_draw"]

_U64 = 1 << 64
_MAX_REDRAW_ROUNDS = 64


def _check_u64(name, value):
    value = int(value)
    if not 0 <= value < _U64:
        raise ValueError(f"{name} must be a 64-bit unsigned integer, got {value}")
    return value


def lane_bitgen(seed: int, stream_id: int, lane: int, attempt: int = 0) -> np.random.Philox:
    """Philox bit generator positioned at block 0 of ``(lane, attempt)``.

    numpy increments the counter before producing a block, so the counter
    starts one below ``[0, lane, attempt, 0]`` (the carry moves into word 1).
    """
    if lane < 1:
        raise ValueError("direct lane addressing needs lane >= 1")
    key = np.array([seed, stream_id], dtype=np.uint64)
    counter = np.array([_U64 - 1, lane - 1, attempt, 0], dtype=np.uint64)
    return np.random.Philox(key=key, counter=counter)


def philox_block(seed: int, stream_id: int, lane: int, block: int, attempt: int = 0) -> np.ndarray:
    """The four raw 64-bit words at counter ``[block, lane, attempt, 0]``."""
    bg = lane_bitgen(seed, stream_id, lane, attempt)
    if block:
        bg.advance(block)
    return bg.random_raw(4)


class RngStream:
    """A reproducible stream identified by ``(seed, stream_id)``.

    Draws through :attr:`generator` are sequential and mutate the stream;
    :meth:`child` returns independent, directly-addressable sub-streams.
    """

    def __init__(self, seed: int = 0, stream_id: int = 0):
        self.seed = _check_u64("seed", seed)
        self.stream_id = _check_u64("stream_id", stream_id)
        bg = np.random.Philox(key=np.array([self.seed, self.stream_id], dtype=np.uint64))
        self.generator = np.random.Generator(bg)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def child(self, index: int) -> np.random.Generator:
        """Generator for work unit ``index`` (lane ``index + 1``)."""
        return np.random.Generator(lane_bitgen(self.seed, self.stream_id, int(index) + 1))

    def uniform(self, size) -> np.ndarray:
        return self.generator.random(size)

    def normal(self, size) -> np.ndarray:
        return self.generator.standard_normal(size)

    def open_uniform(self, size) -> tuple[np.ndarray, int]:
        """Uniforms on (0, 1); exact zeros are redrawn.  Returns ``(u, redraws)``."""
        u = self.generator.random(size)
        redraws = 0
        for _ in range(_MAX_REDRAW_ROUNDS):
            bad = u == 0.0
            k = int(bad.sum())
            if not k:
                return u, redraws
            redraws += k
            u[bad] = self.generator.random(k)
        raise RuntimeError("uniform redraw limit exceeded")

    def nonzero_normal(self, size) -> tuple[np.ndarray, int]:
        """Standard normals with exact zeros redrawn.  Returns ``(z, redraws)``."""
        z = self.generator.standard_normal(size)
        redraws = 0
        for _ in range(_MAX_REDRAW_ROUNDS):
            bad = z == 0.0
            k = int(bad.sum())
            if not k:
                return z, redraws
            redraws += k
            z[bad] = self.generator.standard_normal(k)
        raise RuntimeError("normal redraw limit exceeded")


def standard_cauchy_draw(rng: RngStream, n: int, method: str = "inverse") -> tuple[np.ndarray, int]:
    """Draw ``n`` standard Cauchy variates.

    ``method="inverse"`` uses ``tan(pi*(u - 1/2))``; ``method="ratio"`` uses
    the ratio of two independent standard normals, redrawing exact-zero
    denominators.  Returns ``(draws, redraws)``.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if method == "inverse":
        u, redraws = rng.open_uniform(n)
        return np.tan(math.pi * (u - 0.5)), redraws
    if method == "ratio":
        num = rng.normal(n)
        den, redraws = rng.nonzero_normal(n)
        return num / den, redraws
    raise ValueError(f"unknown Cauchy method {method!r}")
