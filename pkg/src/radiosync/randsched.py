"""Random schedule matrices and the meeting graph they induce.

Each of ``n`` processors independently picks ``k`` wake-up units
uniformly (with replacement, duplicates collapse) inside a window of
``columns`` time units; the rows stacked together form a schedule
matrix. Row start times are offset by an adversarial amount of at most
``d`` units. Two rows meet when they are awake in the same global
column, and the meetings induce an undirected graph over the rows. In
interference mode only columns with *exactly two* awake rows count.

Windows are concatenated in time to amplify meeting probabilities;
because every row repeats its own pattern, the graph edges of one
window recur in every copy, which is what lets a later protocol round
reuse the same communication structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .bitstrings import BitSchedule

#: meeting-probability scale; above sqrt(1 - ln 0.1) the shared-bin
#: probability per window clears 0.8
DEFAULT_SCALE = 1.82

#: distinct-neighbor target per row used by the repetition rule
MIN_DISTINCT_MEETINGS = 10


def clamped_log2(n: int) -> float:
    """log2(n), floored at 1 so degenerate tiny networks keep nonzero
    repetition counts."""
    return max(1.0, math.log2(max(n, 2)))


def repetition_constant(n: int) -> int:
    """Smallest K with 0.1*K > 1 and K*log2(n-1) > 30."""
    return max(11, math.ceil(30.0 / clamped_log2(n - 1)))


@dataclass
class ScheduleMatrix:
    """n rows of wake-up positions over a shared window.

    Rows are stored as sorted unique numpy position arrays; ``rows``
    materializes them as :class:`BitSchedule` values. ``offsets`` are
    the per-row global start times (None until assigned).
    """

    n: int
    columns: int
    positions: list[np.ndarray]
    offsets: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.n != len(self.positions):
            raise ValueError(f"{self.n} rows declared, {len(self.positions)} given")
        if self.offsets is not None:
            self.offsets = np.asarray(self.offsets, dtype=np.int64)
            if self.offsets.shape != (self.n,):
                raise ValueError("need one offset per row")
            if self.offsets.min(initial=0) < 0:
                raise ValueError("offsets must be non-negative")

    @property
    def rows(self) -> tuple[BitSchedule, ...]:
        return tuple(
            BitSchedule(self.columns, tuple(int(p) for p in row))
            for row in self.positions
        )

    def densities(self) -> np.ndarray:
        return np.array([len(row) for row in self.positions], dtype=np.int64)

    def with_offsets(self, offsets: Sequence[int]) -> "ScheduleMatrix":
        return replace(self, offsets=np.asarray(offsets, dtype=np.int64))


def gen_row(columns: int, draws: int, rng: np.random.Generator) -> BitSchedule:
    """One random row: ``draws`` uniform positions, duplicates collapsed."""
    if not 1 <= draws <= columns:
        raise ValueError(f"draws must be in [1, {columns}], got {draws}")
    positions = np.unique(rng.integers(0, columns, size=draws))
    return BitSchedule(columns, tuple(int(p) for p in positions))


def row_draws(columns: int, density_exponent: float, scale: float) -> int:
    """Per-row draw count ceil(scale * columns**density_exponent)."""
    return math.ceil(scale * columns**density_exponent)


def gen_matrix(
    n: int,
    columns: int,
    density_exponent: float,
    scale: float,
    rng: np.random.Generator,
) -> ScheduleMatrix:
    """n independent rows, each with ceil(scale * columns**exponent) draws.

    Offsets are left unset; the caller assigns them.
    """
    if n < 1:
        raise ValueError(f"need at least one row, got {n}")
    if not 0.0 <= density_exponent <= 1.0:
        raise ValueError(f"density exponent must lie in [0, 1], got {density_exponent}")
    draws = row_draws(columns, density_exponent, scale)
    if draws > columns:
        raise ValueError(f"{draws} draws exceed window of {columns} columns")
    positions = [
        np.unique(rng.integers(0, columns, size=draws)) for _ in range(n)
    ]
    return ScheduleMatrix(n=n, columns=columns, positions=positions)


def detect_meetings(
    m: ScheduleMatrix, exclusive: bool = False
) -> list[tuple[int, tuple[int, ...]]]:
    """Columns at which rows can exchange messages.

    Row ``r`` is awake at global column ``t`` iff ``t - offsets[r]`` is
    one of its positions. Base mode reports every column with >= 2
    awake rows; exclusive mode keeps only columns with exactly two
    (any third awake radio jams the channel). Meetings come out sorted
    by column, participants sorted by row index.
    """
    if m.offsets is None:
        raise ValueError("offsets must be set before detecting meetings")
    sizes = [len(row) for row in m.positions]
    if sum(sizes) == 0:
        return []
    cols = np.concatenate(
        [row + m.offsets[r] for r, row in enumerate(m.positions)]
    )
    owner = np.repeat(np.arange(m.n, dtype=np.int64), sizes)
    order = np.argsort(cols, kind="stable")
    cols = cols[order]
    owner = owner[order]
    boundaries = np.flatnonzero(np.diff(cols)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [cols.size]))
    meetings = []
    for lo, hi in zip(starts, ends):
        count = hi - lo
        if count < 2 or (exclusive and count != 2):
            continue
        meetings.append((int(cols[lo]), tuple(int(x) for x in owner[lo:hi])))
    return meetings


@dataclass(frozen=True, eq=True)
class CommGraph:
    """Undirected meeting graph; ``witness`` maps each edge (i < j) to
    the earliest global column establishing it."""

    n: int
    witness: dict[tuple[int, int], int]

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.witness)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.witness:
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def degrees(self) -> list[int]:
        return [len(nbrs) for nbrs in self.adjacency()]

    def neighbors(self, node: int) -> frozenset[int]:
        return frozenset(
            j if i == node else i for i, j in self.witness if node in (i, j)
        )


def build_comm_graph(m: ScheduleMatrix, exclusive: bool = False) -> CommGraph:
    """Graph whose edges are row pairs with at least one meeting."""
    witness: dict[tuple[int, int], int] = {}
    for col, participants in detect_meetings(m, exclusive=exclusive):
        for a in range(len(participants)):
            for b in range(a + 1, len(participants)):
                edge = (participants[a], participants[b])
                if edge not in witness:
                    witness[edge] = col
    return CommGraph(n=m.n, witness=witness)


def concat_in_time(blocks: Sequence[ScheduleMatrix]) -> ScheduleMatrix:
    """Append windows left-to-right; row offsets carry over unchanged.

    All blocks must agree on the row count and on offsets (the rows are
    the same physical radios). With uniform offsets the concatenated
    graph's edges are exactly the union of the block graphs' edges;
    rows offset against each other can additionally meet across a
    window seam, which only ever adds meetings.
    """
    if not blocks:
        raise ValueError("nothing to concatenate")
    n = blocks[0].n
    for b in blocks[1:]:
        if b.n != n:
            raise ValueError(f"row count mismatch: {b.n} != {n}")
        same = (b.offsets is None and blocks[0].offsets is None) or (
            b.offsets is not None
            and blocks[0].offsets is not None
            and np.array_equal(b.offsets, blocks[0].offsets)
        )
        if not same:
            raise ValueError("blocks disagree on row offsets")
    starts = np.cumsum([0] + [b.columns for b in blocks[:-1]])
    positions = [
        np.concatenate([b.positions[r] + start for b, start in zip(blocks, starts)])
        for r in range(n)
    ]
    return ScheduleMatrix(
        n=n,
        columns=int(sum(b.columns for b in blocks)),
        positions=positions,
        offsets=None if blocks[0].offsets is None else blocks[0].offsets.copy(),
    )


@dataclass(frozen=True)
class GraphStats:
    min_degree: int
    connected: bool
    diameter: float  # math.inf when disconnected
    spanning_tree: dict[int, Optional[int]]  # node -> BFS parent (root -> None)
    root: int


def _bfs_depths(adj: list[list[int]], source: int) -> list[int]:
    depth = [-1] * len(adj)
    depth[source] = 0
    frontier = [source]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if depth[v] < 0:
                    depth[v] = depth[u] + 1
                    nxt.append(v)
        frontier = nxt
    return depth


def graph_stats(g: CommGraph, root: int = 0) -> GraphStats:
    """Exact BFS statistics plus the BFS spanning tree from ``root``."""
    adj = g.adjacency()
    for nbrs in adj:
        nbrs.sort()
    min_degree = min((len(nbrs) for nbrs in adj), default=0)

    tree: dict[int, Optional[int]] = {root: None}
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in tree:
                    tree[v] = u
                    nxt.append(v)
        frontier = nxt

    connected = len(tree) == g.n
    diameter: float = 0.0
    if not connected:
        diameter = math.inf
    else:
        for src in range(g.n):
            depths = _bfs_depths(adj, src)
            diameter = max(diameter, max(depths))
    return GraphStats(
        min_degree=min_degree,
        connected=connected,
        diameter=diameter,
        spanning_tree=tree,
        root=root,
    )
