"""Loss-generating environments: stochastic, phase-alternating, drifting.

All three expose the true mean vector at round t via ``means_at`` and draw
Bernoulli losses from it in ``env_step``.  Means are pure functions of t,
so regret accounting can use them directly; only the realized losses
consume randomness.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import EnvironmentStep


@dataclass(frozen=True)
class StochasticEnv:
    """Fixed Bernoulli loss means, one per arm."""

    means: np.ndarray

    def __post_init__(self) -> None:
        means = np.asarray(self.means, dtype=float)
        object.__setattr__(self, "means", means)
        if means.ndim != 1 or means.shape[0] < 1:
            raise ValueError("means must be a nonempty vector")
        if means.min() < 0 or means.max() > 1:
            raise ValueError(f"means must lie in [0, 1], got {means}")
        if (means == means.min()).sum() > 1:
            warnings.warn("no strict best arm: regret gaps include zeros")

    def means_at(self, t: int) -> np.ndarray:
        return self.means


@dataclass(frozen=True)
class AlternatingAdversarialEnv:
    """Phase-wise alternating means with a fixed suboptimality gap.

    Phase n lasts floor(growth**n) rounds.  Odd phases give the optimal
    arm mean 0 and every other arm ``delta``; even phases give the optimal
    arm ``1 - delta`` and every other arm 1, so the gap is ``delta``
    throughout while the loss level swings between the extremes.
    """

    delta: float
    num_arms: int
    optimal_arm: int = 0
    growth: float = 1.6

    def __post_init__(self) -> None:
        if not 0 < self.delta < 1:
            raise ValueError(f"gap must lie in (0, 1), got {self.delta}")
        if self.num_arms < 1:
            raise ValueError(f"need at least one arm, got {self.num_arms}")
        if not 0 <= self.optimal_arm < self.num_arms:
            raise ValueError(f"optimal arm {self.optimal_arm} out of range")
        if self.growth <= 1:
            raise ValueError(f"phase growth must exceed 1, got {self.growth}")

    def phase_of(self, t: int) -> int:
        """1-based phase index containing round t."""
        if t < 1:
            raise ValueError(f"round index must be >= 1, got {t}")
        n, boundary = 1, math.floor(self.growth)
        while t > boundary:
            n += 1
            boundary += math.floor(self.growth**n)
        return n

    def means_at(self, t: int) -> np.ndarray:
        if self.phase_of(t) % 2 == 1:
            means = np.full(self.num_arms, self.delta)
            means[self.optimal_arm] = 0.0
        else:
            means = np.ones(self.num_arms)
            means[self.optimal_arm] = 1.0 - self.delta
        return means


def sinusoidal_offset(base_means: np.ndarray, amplitude: float = 0.1, period: float = 1000.0) -> Callable[[int], float]:
    """Offset schedule 0.5*a*(1 + sin(2*pi*t/period)), a clipped to keep means in [0, 1]."""
    headroom = 1.0 - float(np.max(base_means))
    a = min(amplitude, headroom)
    return lambda t: 0.5 * a * (1.0 + math.sin(2.0 * math.pi * t / period))


@dataclass(frozen=True)
class ScaEnv:
    """Drifting means with constant pairwise differences.

    Every arm's mean at round t is its base mean plus a shared offset
    o_t in [0, 1 - max(base_means)], so gaps never change while the
    overall loss level drifts.
    """

    base_means: np.ndarray
    offset: Callable[[int], float] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        base = np.asarray(self.base_means, dtype=float)
        object.__setattr__(self, "base_means", base)
        if base.ndim != 1 or base.shape[0] < 1:
            raise ValueError("base_means must be a nonempty vector")
        if base.min() < 0 or base.max() > 1:
            raise ValueError(f"base_means must lie in [0, 1], got {base}")
        if self.offset is None:
            object.__setattr__(self, "offset", sinusoidal_offset(base))

    def means_at(self, t: int) -> np.ndarray:
        o = self.offset(t)
        headroom = 1.0 - float(self.base_means.max())
        if not 0.0 <= o <= headroom + 1e-12:
            raise ValueError(f"offset {o} at t={t} leaves the mean range [0, 1]")
        return self.base_means + o


def env_step(env, t: int, rng: np.random.Generator) -> EnvironmentStep:
    """Bernoulli loss draws at round t's means (the means themselves are rng-free)."""
    if t < 1:
        raise ValueError(f"round index must be >= 1, got {t}")
    means = env.means_at(t)
    losses = (rng.random(means.shape[0]) < means).astype(float)
    return EnvironmentStep(losses, means)


DEFAULT_STOCHASTIC_MEANS = (0.4, 0.45, 0.55, 0.7, 0.8)


def make_env(name: str, **params):
    """Environment factory used by the harness config layer."""
    if name == "stochastic":
        means = params.get("means", DEFAULT_STOCHASTIC_MEANS)
        return StochasticEnv(np.asarray(means, dtype=float))
    if name == "alternating":
        return AlternatingAdversarialEnv(
            delta=params.get("delta", 0.125),
            num_arms=params.get("num_arms", 8),
            optimal_arm=params.get("optimal_arm", 0),
            growth=params.get("growth", 1.6),
        )
    if name == "sca":
        base = np.asarray(params.get("means", DEFAULT_STOCHASTIC_MEANS), dtype=float)
        return ScaEnv(base, sinusoidal_offset(base, params.get("amplitude", 0.1), params.get("period", 1000.0)))
    raise ValueError(f"unknown environment {name!r}")
