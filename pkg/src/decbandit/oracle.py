"""Independent oracles for quantities the policies never compute directly.

The perturbed-leader exploitation probabilities have no closed form, so
two unrelated estimators are kept side by side: empirical argmin
frequencies over fresh perturbations, and adaptive quadrature of the
defining integral after mapping the unbounded domain to (0, 1].  The
module also evaluates the separation event, the sandwich bounds on the
exploitation probabilities, the exploration-mass cap, and the constant
appearing in the regret analysis, each as a plain function of state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .ftpl import pareto_sample

_MC_CHUNK = 1 << 18


@dataclass(frozen=True)
class ProbEstimate:
    """Monte Carlo probability vector with per-component standard errors."""

    probs: np.ndarray
    stderr: np.ndarray
    samples: int


@dataclass(frozen=True)
class BoundReport:
    """Sandwich bounds on exploitation probabilities at one state.

    ``lower`` stores the suboptimal-arm bound for every index; the best
    arm's own bound, 1/(2e), is checked separately.
    """

    upper: np.ndarray
    lower: np.ndarray
    dt_holds: bool
    c_alpha: float


def estimate_w_montecarlo(
    gap: np.ndarray,
    eta: float,
    alpha: float,
    samples: int,
    rng: np.random.Generator,
) -> ProbEstimate:
    """Empirical frequencies of each arm minimizing the perturbed estimate.

    Draws ``samples`` fresh perturbation vectors in chunks and counts
    argmins of gap - r/eta; unbiased for the exploitation probabilities.
    """
    if samples < 10**4:
        raise ValueError(f"need at least 1e4 samples for a usable oracle, got {samples}")
    num_arms = gap.shape[0]
    counts = np.zeros(num_arms, dtype=np.int64)
    remaining = samples
    while remaining > 0:
        m = min(remaining, _MC_CHUNK)
        perturbations = pareto_sample(alpha, rng.random((m, num_arms)))
        counts += np.bincount(
            np.argmin(gap - perturbations / eta, axis=1), minlength=num_arms
        )
        remaining -= m
    probs = counts / samples
    return ProbEstimate(probs, np.sqrt(probs * (1.0 - probs) / samples), samples)


def integrate_w(gap: np.ndarray, eta: float, alpha: float) -> np.ndarray:
    """Adaptive quadrature of the exploitation-probability integral.

    Component i integrates the perturbation density at z shifted by the
    arm's scaled gap times the product of shifted CDFs of the other arms,
    over z in [1, inf).  The substitution z = 1/u maps the domain to
    (0, 1] with a bounded integrand; truncating at u = 1e-12 discards at
    most (1e-12)**alpha of mass, far below the 1e-8 tolerance.
    """
    num_arms = gap.shape[0]
    if num_arms > 64:
        raise ValueError(f"quadrature oracle is desk-scale, K <= 64, got {num_arms}")
    if num_arms == 1:
        return np.ones(1)
    scaled = eta * gap
    probs = np.empty(num_arms)
    for i in range(num_arms):
        own = scaled[i]
        others = np.delete(scaled, i)

        def integrand(u: float) -> float:
            cdfs = 1.0 - u**alpha / (1.0 + others * u) ** alpha
            return alpha * u ** (alpha - 1.0) / (1.0 + own * u) ** (alpha + 1.0) * cdfs.prod()

        value, abserr = integrate.quad(
            integrand, 1e-12, 1.0, epsabs=1e-10, epsrel=1e-10, limit=200
        )
        if abserr > 1e-8:
            raise RuntimeError(
                f"quadrature error {abserr:.3g} above 1e-8 for component {i}"
            )
        probs[i] = value
    if abs(probs.sum() - 1.0) > 1e-6:
        raise RuntimeError(f"quadrature components sum to {probs.sum()!r}, not 1")
    return probs


def event_dt_sum(gap: np.ndarray, eta: float, alpha: float, best: int) -> float:
    """Value of the separation-event sum over arms other than ``best``.

    Each term (2**(1/alpha) + eta*gap_i)**(-alpha) is evaluated in the
    factored form 0.5*(1 + eta*gap_i*2**(-1/alpha))**(-alpha) so a zero
    gap contributes exactly 0.5.
    """
    if not 0 <= best < gap.shape[0]:
        raise ValueError(f"arm {best} out of range for {gap.shape[0]} arms")
    others = np.delete(gap, best)
    terms = (1.0 + eta * others * 2.0 ** (-1.0 / alpha)) ** (-alpha)
    return 0.5 * float(terms.sum())


def event_dt(gap: np.ndarray, eta: float, alpha: float, best: int) -> bool:
    """Whether the separation event holds: the gap sum is at most one half."""
    return event_dt_sum(gap, eta, alpha, best) <= 0.5


def c_alpha(alpha: float) -> float:
    """Constant (2a^3 + (e-2)a^2) / ((a-1)(2a-1)) from the regret analysis."""
    if not alpha > 1:
        raise ValueError(f"constant is defined for shape > 1, got {alpha}")
    return (2.0 * alpha**3 + (math.e - 2.0) * alpha**2) / ((alpha - 1.0) * (2.0 * alpha - 1.0))


def sum_q_bound(num_arms: int, alpha: float) -> float:
    """Cap (2a/(a-1)) * K**((a-1)/(2a)) on the unnormalized exploration mass."""
    return 2.0 * alpha / (alpha - 1.0) * num_arms ** ((alpha - 1.0) / (2.0 * alpha))


def check_bounds(
    gap: np.ndarray,
    eta: float,
    alpha: float,
    samples: int,
    rng: np.random.Generator,
) -> BoundReport:
    """Assert the probability sandwich at one state against Monte Carlo.

    The upper bound (1 + eta*gap_i)**(-alpha) is checked for every arm;
    when the separation event holds, suboptimal arms are checked against
    1/(2e^2) times the upper bound and the best arm against 1/(2e), all
    with four-standard-error margins.  Violations raise AssertionError
    naming the arm and margin; the caller should choose ``samples`` large
    enough that the margins are small next to the bound gaps.
    """
    best = int(np.argmin(gap))
    upper = (1.0 + eta * gap) ** (-alpha)
    lower = upper / (2.0 * math.e**2)
    dt_holds = event_dt(gap, eta, alpha, best)
    est = estimate_w_montecarlo(gap, eta, alpha, samples, rng)
    margin = 4.0 * est.stderr
    for i in range(gap.shape[0]):
        if est.probs[i] > upper[i] + margin[i]:
            raise AssertionError(
                f"upper bound violated at arm {i}: {est.probs[i]} > {upper[i]} + {margin[i]}"
            )
    if dt_holds:
        for i in range(gap.shape[0]):
            if i == best:
                continue
            if est.probs[i] < lower[i] - margin[i]:
                raise AssertionError(
                    f"lower bound violated at arm {i}: {est.probs[i]} < {lower[i]} - {margin[i]}"
                )
        floor = 1.0 / (2.0 * math.e)
        if est.probs[best] < floor - margin[best]:
            raise AssertionError(
                f"best-arm bound violated: {est.probs[best]} < {floor} - {margin[best]}"
            )
    return BoundReport(upper, lower, dt_holds, c_alpha(alpha))


def solve_weights_bisection(
    gap: np.ndarray, eta: float, beta: float, width: float = 1e-13
) -> np.ndarray:
    """Reference simplex solve by pure interval bisection on the dual variable.

    Kept free of any code shared with the production Newton path so the
    two can disagree.  Brackets the root by doubling, then bisects until
    the interval is narrower than ``width`` times its scale.
    """
    if gap.shape[0] == 1:
        return np.ones(1)

    def total(nu: float) -> float:
        return float(((1.0 + eta * (1.0 - beta) * (gap + nu)) ** (-1.0 / (1.0 - beta))).sum())

    lo, hi = 0.0, 1.0
    while total(hi) > 1.0:
        lo, hi = hi, 2.0 * hi
    while hi - lo > width * (1.0 + hi):
        mid = 0.5 * (lo + hi)
        if total(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    return (1.0 + eta * (1.0 - beta) * (gap + mid)) ** (-1.0 / (1.0 - beta))
