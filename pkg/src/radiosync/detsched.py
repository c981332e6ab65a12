"""Deterministic two-processor wake-up schedule.

For a maximum clock offset of ``d`` time units, a single string whose
translated copy collides with itself at every shift 1..d lets two
identically-programmed radios meet regardless of their offset. The
schedule below achieves that with O(sqrt(d)) awake units inside a
window of 2d + 4*ceil(sqrt(d)) + 2 units, matching the sqrt(d) lower
bound that low-density strings cannot beat.

Construction: with r = ceil(sqrt(d)), turn on the multiples of r and
the multiples of r + 1. Any shift D <= d splits as D = q*r + s and is
realized either as s*(r+1) - (s-q)*r (when s >= q) or as
(r-s+q+1)*r - (r-s)*(r+1) (when s < q), so every shift is a pairwise
difference of awake positions. When d is a perfect square the same
two families are written as {i*r} and {i*(r+1)} for i = 1..2r+2,
which fills the full window; otherwise the index ranges are trimmed
(j <= 2r for multiples of r, i <= r for multiples of r+1, zero
included) to keep the window within its bound.

``verify_self_overlap`` is the arbiter for all of this: it checks
every shift exhaustively and is what the test suite trusts.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Optional

import numpy as np

from .bitstrings import BitSchedule


def ceil_sqrt(d: int) -> int:
    r = isqrt(d)
    return r if r * r == d else r + 1


@dataclass(frozen=True)
class TwoProcParams:
    """Derived quantities for offset bound ``d``: the window length ``W``
    and the largest schedule index ``max_i`` = floor(2*sqrt(d) + 2)."""

    d: int
    W: int
    max_i: int

    @classmethod
    def for_offset(cls, d: int) -> "TwoProcParams":
        if d < 1:
            raise ValueError(f"offset bound must be positive, got {d}")
        W = 2 * d + 4 * ceil_sqrt(d) + 2
        max_i = isqrt(4 * d) + 2  # floor(2*sqrt(d)) + 2, exact in integers
        return cls(d=d, W=W, max_i=max_i)


def build_two_proc_schedule(d: int) -> BitSchedule:
    """Schedule that self-overlaps at every shift 1..d (see module docs).

    The result has at most 4*ceil(sqrt(d)) + 4 ones inside a window of
    at most 2d + 4*ceil(sqrt(d)) + 2 units.
    """
    params = TwoProcParams.for_offset(d)
    r = isqrt(d)
    if r * r == d:
        # integer sqrt: both families over i = 1..2r+2, zero-based via -1
        positions = set()
        for i in range(1, params.max_i + 1):
            positions.add(i * r - 1)
            positions.add(i * (r + 1) - 1)
    else:
        r += 1
        positions = {j * r for j in range(0, 2 * r + 1)}
        positions.update(i * (r + 1) for i in range(0, r + 1))
    length = max(positions) + 1
    assert length <= params.W, f"window {length} exceeds bound {params.W} for d={d}"
    return BitSchedule.from_positions(length, positions)


def first_uncovered_shift(s: BitSchedule, d: int) -> Optional[int]:
    """Smallest shift in 1..d at which ``s`` misses its own translate,
    or ``None`` when every shift produces a collision.

    A shift collides iff it is a pairwise difference of one-positions,
    so coverage is checked on the difference set directly; chunking
    keeps the position-pair table memory-bounded for dense strings.
    """
    if d < 1:
        raise ValueError(f"offset bound must be positive, got {d}")
    if not s.ones:
        return 1
    ones = np.asarray(s.ones, dtype=np.int64)
    covered = np.zeros(d + 1, dtype=bool)
    chunk = max(1, 8_000_000 // max(1, len(ones)))
    for start in range(0, len(ones), chunk):
        diffs = ones[start : start + chunk, None] - ones[None, :]
        diffs = diffs[(diffs >= 1) & (diffs <= d)]
        covered[diffs] = True
    missing = np.flatnonzero(~covered[1:])
    return int(missing[0]) + 1 if missing.size else None


def verify_self_overlap(s: BitSchedule, d: int) -> bool:
    """True iff ``s`` overlaps its own translate at every shift 1..d."""
    return first_uncovered_shift(s, d) is None


def radio_cost(s: BitSchedule) -> int:
    """Awake time units needed to run the schedule once."""
    return s.density
