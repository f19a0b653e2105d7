"""Top-two exploration baseline and mixed decoupled policies.

The sampler is the fixed-split empirical-best / transportation-challenger
rule from best-arm identification: after one forced pull per arm it flips
a fair coin between the empirical leader and the challenger closest in
normalized mean gap.  Pure and mixed policies wrap it: the mixed variants
keep the sampler for exploration but pick the exploited arm with the
perturbed-leader or Tsallis rule, feeding importance-weighted losses back
through the sampler's atom probability.
"""

from __future__ import annotations

import numpy as np

from .core import DecoupledAction


class EbTcSampler:
    """Fixed-design top-two sampler over loss means (lower is better)."""

    def __init__(self, num_arms: int):
        if num_arms < 1:
            raise ValueError(f"need at least one arm, got {num_arms}")
        self.counts = np.zeros(num_arms, dtype=np.int64)
        self.sums = np.zeros(num_arms)

    @property
    def num_arms(self) -> int:
        return self.counts.shape[0]

    def means(self) -> np.ndarray:
        """Empirical mean losses; unsampled arms count as +inf."""
        with np.errstate(divide="ignore", invalid="ignore"):
            mu = self.sums / self.counts
        mu[self.counts == 0] = np.inf
        return mu

    def recommend(self) -> int:
        """Arm with smallest empirical mean loss, ties by lowest index."""
        return int(np.argmin(self.means()))

    def challenger(self, leader: int) -> int:
        """Arm closest to the leader in mean gap over combined-count scale."""
        mu = self.means()
        scores = (mu - mu[leader]) / np.sqrt(1.0 / self.counts[leader] + 1.0 / self.counts)
        scores[leader] = np.inf
        return int(np.argmin(scores))

    def explore(self, rng: np.random.Generator) -> tuple[int, float]:
        """Next arm to pull and the probability it was drawn with.

        The first K calls pull each arm once deterministically (probability
        one); afterwards the leader and challenger are distinct arms drawn
        with probability exactly one half each.
        """
        unsampled = np.flatnonzero(self.counts == 0)
        if unsampled.shape[0] > 0:
            return int(unsampled[0]), 1.0
        if self.num_arms == 1:
            return 0, 1.0
        leader = self.recommend()
        arm = leader if rng.random() < 0.5 else self.challenger(leader)
        return arm, 0.5

    def update(self, arm: int, loss: float) -> None:
        self.counts[arm] += 1
        self.sums[arm] += loss


class EbTcPolicy:
    """Decoupled policy exploiting the empirical best, exploring top-two."""

    def __init__(self, num_arms: int):
        self.sampler = EbTcSampler(num_arms)

    def step(self, rng: np.random.Generator) -> tuple[DecoupledAction, float]:
        explore, prob = self.sampler.explore(rng)
        return DecoupledAction(self.sampler.recommend(), explore), prob

    def update(self, action: DecoupledAction, observed_loss: float, prob: float) -> None:
        self.sampler.update(action.explore, observed_loss)


class MixedPolicy:
    """Top-two exploration driving another policy's exploitation rule.

    The wrapped policy never explores; its cumulative loss estimate is fed
    importance-weighted observations using the sampler's atom probability,
    so poor overlap between the two distributions shows up directly in the
    estimate's variance.
    """

    def __init__(self, exploit_policy):
        self.exploit_policy = exploit_policy
        self.sampler = EbTcSampler(exploit_policy.estimate.num_arms)

    def step(self, rng: np.random.Generator) -> tuple[DecoupledAction, float]:
        exploit = self.exploit_policy.exploit_arm(rng)
        explore, prob = self.sampler.explore(rng)
        return DecoupledAction(exploit, explore), prob

    def update(self, action: DecoupledAction, observed_loss: float, prob: float) -> None:
        self.exploit_policy.estimate.add(action.explore, observed_loss / prob)
        self.exploit_policy.round += 1
        self.sampler.update(action.explore, observed_loss)
