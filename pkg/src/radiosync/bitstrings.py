"""Wake-up strings and the non-colliding shift machinery.

A radio schedule over a finite window is a bit string: position ``p``
is 1 iff the radio is on during time unit ``p``. Two strings *overlap*
at shift ``i`` when some 1 of the first lands on a 1 of the second
after the second is translated by ``i`` units. The constructive side
of the low-density lower bounds is a difference-set argument: the
shifts at which two strings collide are exactly the pairwise position
differences, so any shift outside that set separates them.

All types are immutable and all operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence


@dataclass(frozen=True)
class BitSchedule:
    """A finite wake-up string.

    ``ones`` holds the zero-based awake positions, strictly increasing
    and all below ``length``. ``density`` is the radio cost of running
    the schedule once.
    """

    length: int
    ones: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValueError(f"length must be positive, got {self.length}")
        prev = -1
        for p in self.ones:
            if p <= prev:
                raise ValueError("one-positions must be strictly increasing")
            prev = p
        if prev >= self.length:
            raise ValueError(
                f"position {prev} does not fit in a length-{self.length} string"
            )

    @classmethod
    def from_positions(cls, length: int, positions: Iterable[int]) -> "BitSchedule":
        """Build from any iterable of positions; duplicates collapse."""
        return cls(length, tuple(sorted(set(positions))))

    @property
    def density(self) -> int:
        return len(self.ones)

    @cached_property
    def ones_set(self) -> frozenset[int]:
        return frozenset(self.ones)

    def to_text(self) -> str:
        """Two-line interchange format: ``L=<length>`` then the positions."""
        return f"L={self.length}\n{' '.join(str(p) for p in self.ones)}\n"

    @classmethod
    def from_text(cls, text: str) -> "BitSchedule":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("L="):
            raise ValueError("expected first line 'L=<length>'")
        length = int(lines[0][2:])
        positions = tuple(int(tok) for tok in lines[1].split()) if len(lines) > 1 else ()
        return cls(length, positions)


@dataclass(frozen=True)
class ShiftAssignment:
    """Per-string translations, each at most ``bound``."""

    shifts: tuple[int, ...]
    bound: int

    def __post_init__(self) -> None:
        for s in self.shifts:
            if s < 0 or s > self.bound:
                raise ValueError(f"shift {s} outside [0, {self.bound}]")


@dataclass(frozen=True)
class NotFound:
    """Returned by :func:`pack_non_overlapping` when some string exhausts
    the shift budget; ``failing_index`` names the first string that
    could not be placed."""

    failing_index: int


def overlaps_at(a: BitSchedule, b: BitSchedule, shift: int) -> bool:
    """True iff some 1 of ``a`` meets a 1 of ``b`` translated by ``shift``.

    Equivalently: ``shift`` is a member of the difference set
    ``{p - q : p in a.ones, q in b.ones}``.
    """
    a_set = a.ones_set
    return any(q + shift in a_set for q in b.ones)


def union(
    strings: Sequence[BitSchedule],
    assignment: ShiftAssignment,
    length: Optional[int] = None,
) -> BitSchedule:
    """Bitwise OR of the shifted strings.

    If ``length`` is omitted it is the smallest window containing every
    shifted string; an explicit ``length`` too small for some shifted
    position is rejected.
    """
    if len(strings) != len(assignment.shifts):
        raise ValueError(
            f"{len(strings)} strings but {len(assignment.shifts)} shifts"
        )
    if not strings:
        raise ValueError("union of zero strings is undefined")
    needed = max(s.length + shift for s, shift in zip(strings, assignment.shifts))
    if length is None:
        length = needed
    elif length < needed:
        raise ValueError(f"length {length} overflows: shifted strings need {needed}")
    positions: set[int] = set()
    for s, shift in zip(strings, assignment.shifts):
        positions.update(p + shift for p in s.ones)
    return BitSchedule.from_positions(length, positions)


def _difference_flags(
    a_ones: Iterable[int], b_ones: Sequence[int], bound: int
) -> list[bool]:
    """Membership table over shifts 0..bound for the difference set of
    the two position families."""
    flags = [False] * (bound + 1)
    for p in a_ones:
        for q in b_ones:
            d = p - q
            if 0 <= d <= bound:
                flags[d] = True
    return flags


def find_non_overlap_shift(
    a: BitSchedule, b: BitSchedule, bound: int, bidirectional: bool = False
) -> Optional[int]:
    """Smallest shift in [0, bound] at which ``b`` avoids every 1 of ``a``.

    Materializes the difference set {p - q} as a membership table and
    returns the first gap, or ``None`` when every candidate shift is a
    difference. Whenever ``a.density * b.density <= bound`` a gap is
    guaranteed by counting.

    With ``bidirectional=True`` negative shifts are allowed too; the
    candidates are tried in order of absolute value (positive first),
    so the returned shift minimizes ``abs(shift)``.
    """
    if bound < 0:
        raise ValueError(f"bound must be non-negative, got {bound}")
    forward = _difference_flags(a.ones, b.ones, bound)
    if not bidirectional:
        for i, hit in enumerate(forward):
            if not hit:
                return i
        return None
    backward = _difference_flags(b.ones, a.ones, bound)
    if not forward[0]:
        return 0
    for i in range(1, bound + 1):
        if not forward[i]:
            return i
        if not backward[i]:
            return -i
    return None


def brute_force_min_overlap_shift(
    a: BitSchedule, b: BitSchedule, bound: int
) -> Optional[int]:
    """Exhaustive oracle: test every shift 0..bound with overlaps_at."""
    if bound < 0:
        raise ValueError(f"bound must be non-negative, got {bound}")
    for i in range(bound + 1):
        if not overlaps_at(a, b, i):
            return i
    return None


def pack_non_overlapping(
    strings: Sequence[BitSchedule], bound: int
) -> ShiftAssignment | NotFound:
    """Assign each string a shift <= bound so that no two shifted strings
    share a position.

    Strings are placed sequentially: each one gets the smallest shift
    that avoids the union of everything placed so far. Succeeds whenever
    the running density product stays within the shift budget; on
    failure reports the index of the string that could not be placed.
    """
    if not strings:
        raise ValueError("nothing to pack")
    placed: set[int] = set()
    shifts: list[int] = []
    for idx, s in enumerate(strings):
        flags = _difference_flags(placed, s.ones, bound)
        shift = next((i for i, hit in enumerate(flags) if not hit), None)
        if shift is None:
            return NotFound(failing_index=idx)
        shifts.append(shift)
        placed.update(q + shift for q in s.ones)
    return ShiftAssignment(tuple(shifts), bound)
