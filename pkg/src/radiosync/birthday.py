"""Monte-Carlo estimators for the two-color collision events.

Throw ceil(scale * bins**red_exp) red and ceil(scale * bins**blue_exp)
blue balls uniformly into ``bins`` bins (red_exp + blue_exp = 1). Two
events are read off each throw:

* shared bin    -- some bin holds at least one ball of each color;
  with scale above sqrt(1 - ln 0.1) ~ 1.8173 this happens with
  probability >= 0.8 for large bin counts.
* exclusive bin -- some bin holds exactly one red and exactly one
  blue ball; for scale <= 5 this exceeds 3/4 for large bin counts.

The shared-bin event models two radios being awake in the same time
unit; the exclusive variant is the interference-free meeting. Trials
are independently seeded from (root seed, trial index), so estimates
are reproducible and trivially parallelizable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .seeding import spawn_rng

#: two-sided 99% normal quantile used for every half-width below
Z99 = 2.5758293035489004


@dataclass(frozen=True)
class BirthdayParams:
    bins: int
    red_exp: float
    blue_exp: float
    scale: float
    n_red: int
    n_blue: int

    @classmethod
    def from_exponents(
        cls, bins: int, red_exp: float, scale: float, blue_exp: float | None = None
    ) -> "BirthdayParams":
        """Derive ball counts; ``blue_exp`` defaults to 1 - red_exp."""
        if blue_exp is None:
            blue_exp = 1.0 - red_exp
        if bins < 1:
            raise ValueError(f"bins must be positive, got {bins}")
        if not (0.0 < red_exp < 1.0 and 0.0 < blue_exp < 1.0):
            raise ValueError("exponents must lie in (0, 1)")
        if abs(red_exp + blue_exp - 1.0) > 1e-12:
            raise ValueError(f"exponents must sum to 1, got {red_exp + blue_exp}")
        if scale <= 0:
            raise ValueError(f"scale must be positive, got {scale}")
        n_red = math.ceil(scale * bins**red_exp)
        n_blue = math.ceil(scale * bins**blue_exp)
        return cls(bins, red_exp, blue_exp, scale, n_red, n_blue)


@dataclass(frozen=True)
class TrialOutcome:
    any_shared_bin: bool
    exclusive_pair_bin: bool

    def __post_init__(self) -> None:
        # an exclusive pair is in particular a shared bin
        if self.exclusive_pair_bin and not self.any_shared_bin:
            raise ValueError("exclusive pair implies a shared bin")


@dataclass(frozen=True)
class ProbEstimate:
    estimate: float
    half_width: float
    trials: int
    successes: int


def run_trial(params: BirthdayParams, rng: np.random.Generator) -> TrialOutcome:
    """One throw of all balls; reports both events from the same throw."""
    red = rng.integers(0, params.bins, size=params.n_red)
    blue = rng.integers(0, params.bins, size=params.n_blue)
    red_bins, red_counts = np.unique(red, return_counts=True)
    blue_bins, blue_counts = np.unique(blue, return_counts=True)
    shared = np.intersect1d(red_bins, blue_bins, assume_unique=True)
    exclusive = np.intersect1d(
        red_bins[red_counts == 1], blue_bins[blue_counts == 1], assume_unique=True
    )
    return TrialOutcome(
        any_shared_bin=bool(shared.size),
        exclusive_pair_bin=bool(exclusive.size),
    )


def _estimate(
    params: BirthdayParams, trials: int, seed: int, exclusive: bool
) -> ProbEstimate:
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    hits = 0
    for idx in range(trials):
        outcome = run_trial(params, spawn_rng(seed, idx))
        hits += outcome.exclusive_pair_bin if exclusive else outcome.any_shared_bin
    p = hits / trials
    half = Z99 * math.sqrt(p * (1.0 - p) / trials)
    return ProbEstimate(estimate=p, half_width=half, trials=trials, successes=hits)


def estimate_prob_H(params: BirthdayParams, trials: int, seed: int) -> ProbEstimate:
    """Sample probability of the shared-bin event, with 99% half-width."""
    return _estimate(params, trials, seed, exclusive=False)


def estimate_prob_T(params: BirthdayParams, trials: int, seed: int) -> ProbEstimate:
    """Sample probability of the exclusive-pair event, with 99% half-width.

    Consumes the same per-trial seed stream as :func:`estimate_prob_H`,
    so containment (T implies H) holds estimate-wise, not just in
    expectation.
    """
    return _estimate(params, trials, seed, exclusive=True)
