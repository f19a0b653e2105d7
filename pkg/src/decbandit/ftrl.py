"""Tsallis-entropy regularized baseline policy for decoupled bandits.

The exploitation distribution solves a convex program on the simplex each
round; the exploration distribution is a power transform of its weights.
The simplex solve reduces to a one-dimensional root find in the dual
variable, done by Newton iteration safeguarded by a bracketing interval
so convergence is guaranteed on any valid input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import CumulativeLossEstimate, DecoupledAction
from .ftpl import sample_categorical


@dataclass(frozen=True)
class FtrlParams:
    """Tsallis exponent in (0, 1), learning-rate constant, arm count."""

    beta: float
    c: float
    num_arms: int

    def __post_init__(self) -> None:
        if not 0 < self.beta < 1:
            raise ValueError(f"Tsallis exponent must lie in (0, 1), got {self.beta}")
        if not self.c > 0:
            raise ValueError(f"learning-rate constant must be positive, got {self.c}")
        if self.num_arms < 1:
            raise ValueError(f"need at least one arm, got {self.num_arms}")


def ftrl_learning_rate(t: int, params: FtrlParams) -> float:
    """Decreasing schedule c / sqrt(t), no arm-count dependence."""
    if t < 1:
        raise ValueError(f"round index must be >= 1, got {t}")
    return params.c / math.sqrt(t)


def solve_exploit_weights(
    gap: np.ndarray,
    eta: float,
    beta: float,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> np.ndarray:
    """Simplex weights minimizing perturbed-loss plus Tsallis regularizer.

    Stationarity gives w_i = (1 + eta*(1-beta)*(gap_i + nu))**(-1/(1-beta))
    for a unique dual variable nu >= 0 chosen so the weights sum to one.
    Safeguarded Newton: the root is first bracketed by geometric growth of
    the upper end (the residual at nu = 0 is nonnegative because some arm
    has zero gap), then Newton steps from nu = 0 run with the bracket as a
    safety net, falling back to its midpoint whenever a step would leave
    it.  Terminates when |sum(w) - 1| <= tol, raising after ``max_iter``
    residual evaluations.
    """
    if gap.shape[0] == 1:
        return np.ones(1)
    scale = eta * (1.0 - beta)
    expo = -1.0 / (1.0 - beta)
    dexpo = -(2.0 - beta) / (1.0 - beta)

    lo, hi = 0.0, 1.0
    evals = 0
    while ((1.0 + scale * (gap + hi)) ** expo).sum() > 1.0:
        lo, hi = hi, 2.0 * hi
        evals += 1
        if evals > max_iter:
            raise RuntimeError(f"failed to bracket the dual root below {hi}")

    nu = 0.0
    for _ in range(max_iter):
        base = 1.0 + scale * (gap + nu)
        w = base**expo
        resid = w.sum() - 1.0
        if abs(resid) <= tol:
            return w
        if resid > 0.0:
            lo = nu
        else:
            hi = nu
        deriv = -eta * (base**dexpo).sum()
        nu -= resid / deriv
        if not lo < nu < hi or not np.isfinite(nu):
            nu = 0.5 * (lo + hi)
    raise RuntimeError(
        f"simplex solve did not reach |sum(w) - 1| <= {tol} in {max_iter} iterations"
    )


def exploration_from_weights(weights: np.ndarray, beta: float) -> np.ndarray:
    """Exploration probabilities proportional to w**(1 - beta/2)."""
    q = weights ** (1.0 - beta / 2.0)
    return q / q.sum()


class TsallisFtrlPolicy:
    """Decoupled Tsallis-regularized policy (exploits by sampling weights)."""

    def __init__(self, params: FtrlParams):
        self.params = params
        self.estimate = CumulativeLossEstimate(params.num_arms)
        self.round = 1

    def exploit_weights(self) -> np.ndarray:
        eta = ftrl_learning_rate(self.round, self.params)
        return solve_exploit_weights(self.estimate.gap, eta, self.params.beta)

    def exploit_arm(self, rng: np.random.Generator) -> int:
        return sample_categorical(self.exploit_weights(), rng)

    def step(self, rng: np.random.Generator) -> tuple[DecoupledAction, np.ndarray]:
        weights = self.exploit_weights()
        probs = exploration_from_weights(weights, self.params.beta)
        exploit = sample_categorical(weights, rng)
        explore = sample_categorical(probs, rng)
        return DecoupledAction(exploit, explore), probs

    def update(
        self, action: DecoupledAction, observed_loss: float, probs: np.ndarray
    ) -> None:
        self.estimate.add(
            action.explore, observed_loss / float(probs[action.explore])
        )
        self.round += 1
