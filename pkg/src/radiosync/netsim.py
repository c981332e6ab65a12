"""Discrete radio medium: per-unit delivery resolution, back-off
contention, and the bounded-drift time-unit model.

The medium advances one global time unit at a time. Within a unit the
outcome is a pure function of who is awake: in the base model every
awake radio hears every other awake radio; in the interference model a
radio decodes a message only when exactly one other radio transmits,
and otherwise hears noise. Contention among >= 2 awake transmitters is
resolved by expanding a unit into consecutive back-off slots in which
each radio independently transmits with probability 1/2.

Clock drift is absorbed before any of this applies: when clock speeds
differ by a bounded ratio, each node groups enough of its own ticks
into a "time step" that any two nodes awake within the same rescaled
unit share a co-awake interval of at least half the shorter step,
which is enough to exchange one message. The discrete simulator then
works in rescaled units and never sees the drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .randsched import ScheduleMatrix, clamped_log2


class Noise:
    """Sentinel delivered to a receiver that hears garbled transmissions."""

    _instance: Optional["Noise"] = None

    def __new__(cls) -> "Noise":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NOISE"


NOISE = Noise()


class TxDecision(Enum):
    TRANSMIT = "transmit"
    LISTEN = "listen"


@dataclass(frozen=True)
class DriftParams:
    """Per-node clock speeds with a bounded ratio.

    ``speeds[i]`` is node i's tick rate; the fastest over the slowest
    may not exceed ``ratio_bound``. ``min_transmit_time`` is the global
    lower bound on the time one message exchange needs.
    """

    speeds: tuple[float, ...]
    ratio_bound: float
    min_transmit_time: float

    def __post_init__(self) -> None:
        if not self.speeds:
            raise ValueError("need at least one clock speed")
        if min(self.speeds) <= 0:
            raise ValueError("clock speeds must be positive")
        if self.min_transmit_time <= 0:
            raise ValueError("transmission time must be positive")
        ratio = max(self.speeds) / min(self.speeds)
        if ratio > self.ratio_bound * (1 + 1e-12):
            raise ValueError(
                f"speed ratio {ratio:.6g} exceeds declared bound {self.ratio_bound}"
            )

    def ticks_per_step(self, node: int) -> float:
        """Ticks node ``node`` counts as one time step."""
        return 2.0 * self.ratio_bound * self.speeds[node] * self.min_transmit_time

    def step_length(self, node: int) -> float:
        """Global duration of one of node's time steps (ticks / tick rate)."""
        return self.ticks_per_step(node) / self.speeds[node]

    @property
    def max_step(self) -> float:
        return max(self.step_length(i) for i in range(len(self.speeds)))

    @property
    def unit_length(self) -> float:
        """Global duration of one rescaled time unit: 5 * max step."""
        return 5.0 * self.max_step


def drift_time_step(p: DriftParams, node: int) -> float:
    """Global-time length of one of node's logical steps."""
    return p.step_length(node)


def complete_steps(p: DriftParams, node: int, phase: float) -> int:
    """Whole steps node fits into one unit when it starts at ``phase``.

    Always at least 3: the unit is 5 max-steps long and the start phase
    is below one step.
    """
    s = p.step_length(node)
    if not 0.0 <= phase < s:
        raise ValueError(f"phase must lie in [0, {s}), got {phase}")
    return int(math.floor((p.unit_length - phase) / s))


def max_step_overlap(
    step_i: float, step_j: float, phase_i: float, phase_j: float, unit: float
) -> float:
    """Longest single-step co-awake stretch of two step grids inside
    [0, unit].

    Grid x has awake intervals [phase_x + a*step_x, phase_x + (a+1)*step_x]
    for every complete step fitting in the unit. As long as each grid
    fits at least three complete steps, the result is at least
    min(step_i, step_j) / 2: the shorter grid has a step fully inside
    the longer grid's span, and that step straddles at most one
    boundary of the other grid, leaving a piece of at least half its
    length.
    """
    best = 0.0
    m_i = int(math.floor((unit - phase_i) / step_i))
    m_j = int(math.floor((unit - phase_j) / step_j))
    for a in range(m_i):
        lo_i = phase_i + a * step_i
        hi_i = lo_i + step_i
        for b in range(m_j):
            lo_j = phase_j + b * step_j
            hi_j = lo_j + step_j
            best = max(best, min(hi_i, hi_j, unit) - max(lo_i, lo_j))
    return best


def check_unit_overlap(
    p: DriftParams, phase_i: float, phase_j: float, i: int = 0, j: int = 1
) -> float:
    """Longest co-awake stretch of nodes i and j inside one unit.

    Both nodes start within their first step of the unit and work
    through it; the unit is long enough for at least three complete
    steps each, so the result is at least min(step_i, step_j) / 2.
    """
    s_i = p.step_length(i)
    s_j = p.step_length(j)
    if not 0.0 <= phase_i < s_i:
        raise ValueError(f"phase_i must lie in [0, {s_i}), got {phase_i}")
    if not 0.0 <= phase_j < s_j:
        raise ValueError(f"phase_j must lie in [0, {s_j}), got {phase_j}")
    return max_step_overlap(s_i, s_j, phase_i, phase_j, p.unit_length)


@dataclass(frozen=True)
class RadioEvent:
    """Resolution of one global time unit: who was awake, who
    transmitted, and what every awake receiver heard."""

    global_t: int
    awake: tuple[int, ...]
    transmitters: tuple[int, ...]
    delivered: dict[int, tuple | Noise]


@dataclass
class SimConfig:
    """Experiment parameters.

    Either ``n`` or ``beta`` fixes the processor count (n =
    ceil(d**beta)). Optional fields left as None are derived:
    window 4d, back-off slot count ceil(log2 n)**2, sync rounds
    ceil(log2 n) + 10.
    """

    d: int
    n: Optional[int] = None
    beta: Optional[float] = None
    scale: float = 1.82
    repetition_k: Optional[int] = None
    min_meetings: int = 10
    rounds: Optional[int] = None
    exclusive: bool = False
    backoff_rounds: Optional[int] = None
    seed: int = 0
    drift: Optional[DriftParams] = None
    transmit_delay: int = 0
    columns: Optional[int] = None
    polylog_exp: int = 2

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"offset bound must be positive, got {self.d}")
        if self.n is None and self.beta is not None:
            self.n = math.ceil(self.d**self.beta)
        # n may stay None: the count is then unknown and must be estimated
        if self.n is not None and self.n < 2:
            raise ValueError(f"need at least two processors, got {self.n}")
        if self.columns is None:
            self.columns = 4 * self.d
        if self.backoff_rounds is None:
            known = self.n if self.n is not None else self.d
            self.backoff_rounds = math.ceil(clamped_log2(known)) ** 2
        if self.rounds is not None and self.rounds < 1:
            raise ValueError(f"rounds must be positive, got {self.rounds}")


def awake_rows(m: ScheduleMatrix, global_t: int) -> tuple[int, ...]:
    """Rows whose radio is on at the given global column."""
    if m.offsets is None:
        raise ValueError("offsets must be set")
    out = []
    for r, row in enumerate(m.positions):
        local = global_t - int(m.offsets[r])
        if local >= 0:
            at = np.searchsorted(row, local)
            if at < len(row) and row[at] == local:
                out.append(r)
    return tuple(out)


def step(
    config: SimConfig,
    m: ScheduleMatrix,
    payloads: Sequence,
    global_t: int,
) -> RadioEvent:
    """Resolve one global time unit.

    ``payloads[r]`` is whatever row r would transmit. Base model: every
    awake radio receives every other awake radio's payload. Interference
    model: with exactly two awake, each hears the other; with three or
    more, everyone hears noise (back-off, when enabled, is applied by
    the caller via :func:`resolve_backoff_unit`).
    """
    if global_t < 0:
        raise ValueError(f"time must be non-negative, got {global_t}")
    awake = awake_rows(m, global_t)
    delivered: dict[int, tuple | Noise] = {}
    if len(awake) < 2:
        return RadioEvent(global_t, awake, awake, delivered)
    if not config.exclusive:
        for r in awake:
            delivered[r] = tuple(payloads[o] for o in awake if o != r)
    elif len(awake) == 2:
        a, b = awake
        delivered[a] = (payloads[b],)
        delivered[b] = (payloads[a],)
    else:
        for r in awake:
            delivered[r] = NOISE
    return RadioEvent(global_t, awake, awake, delivered)


def backoff_transmit_decision(rng: np.random.Generator) -> TxDecision:
    """Fair-coin slot decision, independent per node and slot."""
    return TxDecision.TRANSMIT if rng.integers(0, 2) else TxDecision.LISTEN


def resolve_backoff_unit(
    awake: Sequence[int], slots: int, rng: np.random.Generator
) -> list[tuple[int, int]]:
    """Deliveries (slot, transmitter) within one contended unit.

    The unit expands into ``slots`` consecutive physical slots; in each,
    every awake node transmits with probability 1/2, and the slot
    delivers iff exactly one node transmitted. Receivers are all other
    awake nodes. With two awake nodes a slot succeeds with probability
    1/2, so some delivery happens within r slots with probability
    1 - (1/2)**r.
    """
    out = []
    k = len(awake)
    if k < 2:
        return out
    coins = rng.integers(0, 2, size=(slots, k))
    hits = np.flatnonzero(coins.sum(axis=1) == 1)
    for slot in hits:
        out.append((int(slot), awake[int(np.flatnonzero(coins[slot])[0])]))
    return out


def radio_cost_units(
    m: ScheduleMatrix, copies: int, exclusive: bool, backoff_rounds: int
) -> np.ndarray:
    """Awake units per row for running ``copies`` repeats of the window.

    Every awake unit expands into ``backoff_rounds`` slots in
    interference mode (a node cannot know in advance which of its
    units are meetings).
    """
    expansion = backoff_rounds if exclusive else 1
    return m.densities() * copies * expansion
