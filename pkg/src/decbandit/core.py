"""Shared domain types for decoupled bandit policies.

A decoupled bandit round produces two arm choices: one arm is exploited
(its loss is incurred but never observed) and one arm is explored (its
loss is observed but not incurred).  Everything downstream -- policies,
environments, the harness -- works in terms of the small value types
defined here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def validate_arm(arm: int, num_arms: int) -> int:
    """Check that ``arm`` is a valid index in ``[0, num_arms)``."""
    if not 0 <= arm < num_arms:
        raise ValueError(f"arm index {arm} out of range for {num_arms} arms")
    return int(arm)


@dataclass(frozen=True)
class DecoupledAction:
    """The pair of arms chosen in one round; they may coincide."""

    exploit: int
    explore: int


@dataclass(frozen=True)
class EnvironmentStep:
    """One round of environment output.

    ``losses`` are the realized per-arm losses in [0, 1].  ``means`` are
    the true conditional means, carried so pseudo-regret can be computed
    without averaging realized noise.
    """

    losses: np.ndarray
    means: np.ndarray


class CumulativeLossEstimate:
    """Importance-weighted cumulative loss estimate with its gap vector.

    ``total`` accumulates the IW estimates; ``gap`` is ``total`` shifted
    so its minimum is exactly zero.  Only one component of ``total``
    changes per round, so the gap is refreshed in O(K).
    """

    __slots__ = ("total", "gap")

    def __init__(self, num_arms: int):
        self.total = np.zeros(num_arms)
        self.gap = np.zeros(num_arms)

    def add(self, arm: int, amount: float) -> None:
        self.total[arm] += amount
        np.subtract(self.total, self.total.min(), out=self.gap)

    @property
    def num_arms(self) -> int:
        return self.total.shape[0]


@dataclass
class RegretAccumulator:
    """Running pseudo-regret against the best fixed arm in hindsight.

    Tracks the cumulative mean loss of the exploited arms and the
    cumulative mean of every arm; their difference at the current round
    is the pseudo-regret (best fixed arm taken over the rounds so far).
    """

    cum_exploit_mean: float = 0.0
    cum_arm_means: np.ndarray = field(default_factory=lambda: np.zeros(0))
    rounds: int = 0

    @classmethod
    def zeros(cls, num_arms: int) -> "RegretAccumulator":
        return cls(0.0, np.zeros(num_arms), 0)

    def record(self, means: np.ndarray, exploit_arm: int) -> None:
        validate_arm(exploit_arm, self.cum_arm_means.shape[0])
        self.cum_exploit_mean += float(means[exploit_arm])
        self.cum_arm_means += means
        self.rounds += 1

    @property
    def pseudo_regret(self) -> float:
        if self.rounds == 0:
            return 0.0
        return self.cum_exploit_mean - float(self.cum_arm_means.min())


def record_round(
    acc: RegretAccumulator, step: EnvironmentStep, action: DecoupledAction
) -> RegretAccumulator:
    """Fold one round into the accumulator (mutates and returns it)."""
    acc.record(step.means, action.exploit)
    return acc


def iw_estimate(
    observed_loss: float, explore_arm: int, probs: np.ndarray
) -> np.ndarray:
    """Importance-weighted loss estimate from a single observed arm.

    Returns the vector that is ``observed_loss / probs[explore_arm]`` at
    the explored arm and zero elsewhere.  Unbiased for the full loss
    vector when the explored arm is drawn from ``probs``.
    """
    validate_arm(explore_arm, probs.shape[0])
    p = float(probs[explore_arm])
    if p <= 0.0:
        raise ValueError(f"explored arm {explore_arm} has probability {p} <= 0")
    estimate = np.zeros(probs.shape[0])
    estimate[explore_arm] = observed_loss / p
    return estimate
