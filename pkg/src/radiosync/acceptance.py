"""Acceptance suite: every release-gating check, one function each.

Each criterion pins its own parameters and tolerances; ``run_all``
executes them in order and prints one PASS/FAIL line per criterion
with the measured versus required values. Everything is driven by
fixed seeds, so the whole report is reproducible bit for bit.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import Optional

import numpy as np

from .birthday import BirthdayParams, estimate_prob_H, estimate_prob_T
from .bitstrings import (
    BitSchedule,
    ShiftAssignment,
    brute_force_min_overlap_shift,
    find_non_overlap_shift,
    pack_non_overlapping,
)
from .detsched import build_two_proc_schedule, ceil_sqrt, radio_cost, verify_self_overlap
from .netsim import DriftParams, SimConfig, check_unit_overlap
from .protocol import (
    build_pipeline_matrix,
    draw_offsets,
    estimate_n,
    make_node_states,
    pipeline_params,
    run_pipeline,
    run_sync,
)
from .randsched import ScheduleMatrix, build_comm_graph, graph_stats
from .seeding import derive_seed, spawn_rng

#: root seed for the whole suite; criteria derive their own streams
ACCEPT_SEED = 108_642


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    required: str
    measured: str
    seconds: float


def _result(name: str, passed: bool, required: str, measured: str, t0: float):
    return CriterionResult(
        name=name,
        passed=passed,
        required=required,
        measured=measured,
        seconds=time.perf_counter() - t0,
    )


def criterion_a1() -> CriterionResult:
    """Two-processor schedule: exact bounds and full self-overlap for
    every d in 1..2000 and {4096, 10**4, 10**5}."""
    t0 = time.perf_counter()
    ds = list(range(1, 2001)) + [4096, 10**4, 10**5]
    bad = []
    for d in ds:
        s = build_two_proc_schedule(d)
        cd = ceil_sqrt(d)
        if (
            s.length > 2 * d + 4 * cd + 2
            or radio_cost(s) > 4 * cd + 4
            or not verify_self_overlap(s, d)
        ):
            bad.append(d)
    return _result(
        "A1",
        not bad,
        "length<=2d+4ceil(sqrt d)+2, cost<=4ceil(sqrt d)+4, all shifts 1..d overlap",
        f"{len(ds) - len(bad)}/{len(ds)} values of d exact"
        + (f", failures at {bad[:5]}" if bad else ""),
        t0,
    )


def criterion_a2() -> CriterionResult:
    """Worked example d=36: window 98, at most 28 ones, 26 distinct."""
    t0 = time.perf_counter()
    s = build_two_proc_schedule(36)
    ok = s.length == 98 and radio_cost(s) == 26
    return _result(
        "A2",
        ok,
        "window length 98, <=28 ones, 26 distinct",
        f"window {s.length}, {radio_cost(s)} ones",
        t0,
    )


def criterion_a3() -> CriterionResult:
    """Constructive shift finder agrees with the brute-force oracle and
    always succeeds within ceil(L/C^2)+1 when densities allow; 10**4
    fuzzed pairs."""
    t0 = time.perf_counter()
    rng = spawn_rng(ACCEPT_SEED, 3)
    cases = 10_000
    failures = 0
    for idx in range(cases):
        L = int(rng.integers(64, 4097))
        c = 1.0 if idx % 2 == 0 else float(1.0 + rng.random())
        budget = max(1, math.floor(L / c**2))
        na = int(rng.integers(1, isqrt(budget) + 1))
        nb = int(rng.integers(1, max(2, budget // na + 1)))
        a = BitSchedule(L, tuple(sorted(map(int, rng.choice(L, na, replace=False)))))
        b = BitSchedule(L, tuple(sorted(map(int, rng.choice(L, nb, replace=False)))))
        bound = math.ceil(L / c**2) + 1
        found = find_non_overlap_shift(a, b, bound)
        oracle = brute_force_min_overlap_shift(a, b, bound)
        if found is None or found != oracle:
            failures += 1
    return _result(
        "A3",
        not failures,
        "success within ceil(L/C^2)+1 and oracle agreement in 100% of 10^4 cases",
        f"{cases - failures}/{cases} agree",
        t0,
    )


def criterion_a4() -> CriterionResult:
    """Sequential packing of ceil(d^beta) strings at the density for
    d=256, beta=1/2 succeeds with bound L/4 and verifies pairwise, over
    100 seeds."""
    t0 = time.perf_counter()
    d, beta = 256, 0.5
    count = math.ceil(d**beta)
    density = math.ceil(d ** ((1 - beta) / 2))
    L = 4 * d
    bound = L // 4
    bad = 0
    for seed in range(100):
        rng = spawn_rng(ACCEPT_SEED, 4, seed)
        strings = [
            BitSchedule(
                L, tuple(sorted(map(int, rng.choice(L, density, replace=False))))
            )
            for _ in range(count)
        ]
        assignment = pack_non_overlapping(strings, bound)
        if not isinstance(assignment, ShiftAssignment):
            bad += 1
            continue
        shifted = [
            {p + shift for p in s.ones}
            for s, shift in zip(strings, assignment.shifts)
        ]
        for i in range(count):
            for j in range(i + 1, count):
                if shifted[i] & shifted[j]:
                    bad += 1
    return _result(
        "A4",
        bad == 0,
        "pack succeeds and is pairwise non-overlapping in 100/100 seeds",
        f"{100 - bad}/100 clean",
        t0,
    )


def criterion_a5() -> CriterionResult:
    """Shared-bin probability at the threshold scale stays above 0.78
    (0.8 minus sampling tolerance)."""
    t0 = time.perf_counter()
    params = BirthdayParams.from_exponents(bins=10_000, red_exp=0.5, scale=1.82)
    est = estimate_prob_H(params, trials=10_000, seed=derive_seed(ACCEPT_SEED, 5))
    return _result(
        "A5",
        est.estimate >= 0.78,
        "P[shared bin] >= 0.78 at scale 1.82, 10^4 bins, 10^4 trials",
        f"{est.estimate:.4f} +/- {est.half_width:.4f}",
        t0,
    )


def criterion_a6() -> CriterionResult:
    """Exclusive-pair probability at scale 2 stays above 0.72 and never
    exceeds the shared-bin estimate on the same seed stream."""
    t0 = time.perf_counter()
    params = BirthdayParams.from_exponents(bins=10_000, red_exp=0.5, scale=2.0)
    seed = derive_seed(ACCEPT_SEED, 6)
    est_t = estimate_prob_T(params, trials=10_000, seed=seed)
    est_h = estimate_prob_H(params, trials=10_000, seed=seed)
    ok = est_t.estimate >= 0.72 and est_t.estimate <= est_h.estimate
    return _result(
        "A6",
        ok,
        "P[exclusive pair] >= 0.72 and <= P[shared bin] on the same seeds",
        f"T={est_t.estimate:.4f}, H={est_h.estimate:.4f}",
        t0,
    )


@dataclass
class _PipelineTrial:
    stage_min_degree: int
    full_min_degree: int
    connected: bool
    sync_exact: Optional[bool]  # None when the graph was disconnected


@lru_cache(maxsize=1)
def _pipeline_trials(seeds: int = 200) -> tuple[_PipelineTrial, ...]:
    """Shared context for A7/A8: 200 seeded runs at d=1024, beta=1/2.

    Per seed: build the full amplified schedule, grade the one-stage
    graph and the full graph, and (when connected) run the sync portion
    with the derived round budget. Cached so A7 pays for the batch and
    A8 reuses it.
    """
    d, n = 1024, 32
    params = pipeline_params(d, n)
    stage_cols = params.stage_windows * params.columns
    trials = []
    for seed in range(seeds):
        rng = spawn_rng(ACCEPT_SEED, 78, seed)
        config = SimConfig(d=d, n=n)
        matrix = build_pipeline_matrix(config, rng, params)
        offsets = draw_offsets(n, d, rng)
        matrix = matrix.with_offsets(offsets)
        stage = ScheduleMatrix(
            n=n,
            columns=stage_cols,
            positions=[row[row < stage_cols] for row in matrix.positions],
            offsets=offsets,
        )
        stage_deg = min(build_comm_graph(stage).degrees(), default=0)
        graph = build_comm_graph(matrix)
        full_deg = min(graph.degrees(), default=0)
        stats = graph_stats(graph)
        sync_exact = None
        if stats.connected:
            states = make_node_states(n, offsets, rng)
            result = run_sync(matrix, states, params.rounds)
            sync_exact = result.success
        trials.append(
            _PipelineTrial(
                stage_min_degree=stage_deg,
                full_min_degree=full_deg,
                connected=stats.connected,
                sync_exact=sync_exact,
            )
        )
    return tuple(trials)


def criterion_a7() -> CriterionResult:
    """Minimum degree 10 in more than half the one-stage graphs and in
    more than 95% after amplification (d=1024, beta=1/2, 200 seeds)."""
    t0 = time.perf_counter()
    trials = _pipeline_trials()
    stage_frac = sum(t.stage_min_degree >= 10 for t in trials) / len(trials)
    full_frac = sum(t.full_min_degree >= 10 for t in trials) / len(trials)
    ok = stage_frac > 0.5 and full_frac > 0.95
    return _result(
        "A7",
        ok,
        "min degree >=10: one stage >0.5 of seeds, amplified >0.95",
        f"stage {stage_frac:.3f}, amplified {full_frac:.3f}",
        t0,
    )


def criterion_a8() -> CriterionResult:
    """On every connected amplified graph, the sync pass ends with the
    global max identifier and identical adjusted clocks at all nodes."""
    t0 = time.perf_counter()
    connected = [t for t in _pipeline_trials() if t.connected]
    exact = sum(1 for t in connected if t.sync_exact)
    ok = bool(connected) and exact == len(connected)
    return _result(
        "A8",
        ok,
        "exact agreement on all connected graphs",
        f"{exact}/{len(connected)} connected runs exact",
        t0,
    )


def _fit_cost_exponent(costs_by_d: dict[int, list[float]]) -> float:
    xs, ys = [], []
    for d, costs in costs_by_d.items():
        for c in costs:
            xs.append(math.log(d))
            ys.append(math.log(c / math.log2(d) ** 3))
    slope, _intercept = np.polyfit(np.array(xs), np.array(ys), 1)
    return float(slope)


def criterion_a9() -> CriterionResult:
    """Max per-node radio cost scales like d**x (after removing the
    cubed log factor) with x in [0.15, 0.35]; interference mode agrees
    after dividing out its back-off expansion."""
    t0 = time.perf_counter()
    ds = [2**8, 2**10, 2**12, 2**14]
    seeds = 3
    base: dict[int, list[float]] = {}
    intf: dict[int, list[float]] = {}
    for d in ds:
        base[d], intf[d] = [], []
        for trial in range(seeds):
            seed = derive_seed(ACCEPT_SEED, 9, d, trial)
            result = run_pipeline(SimConfig(d=d, beta=0.5, seed=seed))
            base[d].append(float(result.per_node_radio_cost.max()))
            config = SimConfig(d=d, beta=0.5, seed=seed, exclusive=True)
            result = run_pipeline(config)
            intf[d].append(
                float(result.per_node_radio_cost.max()) / config.backoff_rounds
            )
    x_base = _fit_cost_exponent(base)
    x_intf = _fit_cost_exponent(intf)
    ok = 0.15 <= x_base <= 0.35 and 0.15 <= x_intf <= 0.35
    return _result(
        "A9",
        ok,
        "fitted exponent in [0.15, 0.35], base and interference",
        f"base x={x_base:.3f}, interference x={x_intf:.3f}",
        t0,
    )


def criterion_a10() -> CriterionResult:
    """Unknown-count loop at d=1024, true n=32, 100 seeds: accepted
    estimate within factor 2 in >=90% of seeds, synchronized fraction
    >=8/9 in every accepted run, and total cost <=4x the final epoch."""
    t0 = time.perf_counter()
    d, true_n, seeds = 1024, 32, 100
    within, accepted_runs = 0, 0
    frac_ok, cost_ok = True, True
    for seed in range(seeds):
        config = SimConfig(d=d, seed=derive_seed(ACCEPT_SEED, 10, seed))
        res = estimate_n(config, true_n)
        if res.accepted:
            accepted_runs += 1
            if true_n / 2 <= res.estimate <= true_n * 2:
                within += 1
            if res.synchronized_fraction < 8 / 9:
                frac_ok = False
            if res.total_max_cost > 4 * res.final_epoch_max_cost:
                cost_ok = False
    ok = within >= 0.9 * seeds and frac_ok and cost_ok
    return _result(
        "A10",
        ok,
        ">=90% within factor 2; sync fraction >=8/9 and cost sum <=4x final, all accepted runs",
        f"{within}/{seeds} within factor 2, {accepted_runs} accepted, "
        f"fraction_ok={frac_ok}, cost_ok={cost_ok}",
        t0,
    )


def criterion_a11() -> CriterionResult:
    """Drift model: co-awake overlap is at least half the shorter step
    in 100% of 10^5 sampled configurations for ratio bounds 1, 2, 5."""
    t0 = time.perf_counter()
    rng = spawn_rng(ACCEPT_SEED, 11)
    samples_per_c = 100_000 // 3 + 1
    violations = 0
    total = 0
    for c in (1.0, 2.0, 5.0):
        for _ in range(samples_per_c):
            speeds = (
                float(1.0 + rng.random() * (c - 1.0)),
                float(1.0 + rng.random() * (c - 1.0)),
            )
            tau_trans = float(0.1 + rng.random() * 1.9)
            p = DriftParams(speeds, c, tau_trans)
            s0, s1 = p.step_length(0), p.step_length(1)
            z0 = float(rng.random()) * s0
            z1 = float(rng.random()) * s1
            overlap = check_unit_overlap(p, z0, z1)
            total += 1
            if overlap < min(s0, s1) / 2 - 1e-9:
                violations += 1
    return _result(
        "A11",
        violations == 0,
        "overlap >= min(step_i, step_j)/2 in 100% of samples",
        f"{total - violations}/{total} satisfied",
        t0,
    )


def criterion_a12() -> CriterionResult:
    """Negative control: sparse random strings (<= ceil(sqrt(W)) ones)
    always admit a non-overlapping self-shift within ceil(W/2), so the
    self-overlap verifier fails for them in 100% of 10^3 cases."""
    t0 = time.perf_counter()
    rng = spawn_rng(ACCEPT_SEED, 12)
    cases, bad = 1_000, 0
    for _ in range(cases):
        W = int(rng.integers(64, 4097))
        m = math.ceil(math.sqrt(W))
        s = BitSchedule(W, tuple(sorted(map(int, rng.choice(W, m, replace=False)))))
        if verify_self_overlap(s, math.ceil(W / 2)):
            bad += 1
    return _result(
        "A12",
        bad == 0,
        "self-overlap verification fails in 100% of sparse strings",
        f"{cases - bad}/{cases} failed as required",
        t0,
    )


def run_all(stream=None) -> list[CriterionResult]:
    """Execute every criterion, printing one line per result."""
    if stream is None:
        stream = sys.stdout
    results = []

    def emit(res: CriterionResult) -> None:
        results.append(res)
        status = "PASS" if res.passed else "FAIL"
        print(
            f"{res.name:<4} {status}  required: {res.required}; "
            f"measured: {res.measured}  [{res.seconds:.1f}s]",
            file=stream,
        )

    for fn in (
        criterion_a1,
        criterion_a2,
        criterion_a3,
        criterion_a4,
        criterion_a5,
        criterion_a6,
        criterion_a7,
        criterion_a8,
        criterion_a9,
        criterion_a10,
        criterion_a11,
        criterion_a12,
    ):
        emit(fn())
    return results
