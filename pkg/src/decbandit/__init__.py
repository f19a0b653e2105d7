"""Decoupled multi-armed bandits: policies, environments, oracles, harness.

The decoupled protocol picks two arms each round, one whose loss is
incurred but never seen and one whose loss is observed but not incurred.
The package centers on a perturbed-leader policy with Pareto noise whose
exploration distribution is available in closed form, alongside a
Tsallis-regularized baseline, a top-two exploration baseline, three loss
regimes, independent verification oracles, and a reproducible experiment
harness with a CSV interface.
"""

from .core import (
    CumulativeLossEstimate,
    DecoupledAction,
    EnvironmentStep,
    RegretAccumulator,
    iw_estimate,
    record_round,
    validate_arm,
)
from .ebtc import EbTcPolicy, EbTcSampler, MixedPolicy
from .envs import (
    DEFAULT_STOCHASTIC_MEANS,
    AlternatingAdversarialEnv,
    ScaEnv,
    StochasticEnv,
    env_step,
    make_env,
    sinusoidal_offset,
)
from .ftpl import (
    ExplorationDist,
    FtplParams,
    ParetoFtplPolicy,
    exploration_weights,
    learning_rate,
    pareto_sample,
    ranks_ascending,
    sample_categorical,
    select_exploit,
)
from .ftrl import (
    FtrlParams,
    TsallisFtrlPolicy,
    exploration_from_weights,
    ftrl_learning_rate,
    solve_exploit_weights,
)
from .harness import (
    BenchRow,
    ExperimentConfig,
    RunRecord,
    SuiteResult,
    bench_per_step,
    checkpoint_grid,
    regret_at,
    run_experiment,
    run_verification,
    write_bench_csv,
    write_run_csv,
)
from .oracle import (
    BoundReport,
    ProbEstimate,
    c_alpha,
    check_bounds,
    estimate_w_montecarlo,
    event_dt,
    event_dt_sum,
    integrate_w,
    solve_weights_bisection,
    sum_q_bound,
)

__all__ = [
    "AlternatingAdversarialEnv",
    "BenchRow",
    "BoundReport",
    "CumulativeLossEstimate",
    "DecoupledAction",
    "EbTcPolicy",
    "EbTcSampler",
    "EnvironmentStep",
    "ExperimentConfig",
    "ExplorationDist",
    "FtplParams",
    "FtrlParams",
    "MixedPolicy",
    "DEFAULT_STOCHASTIC_MEANS",
    "ParetoFtplPolicy",
    "ProbEstimate",
    "RegretAccumulator",
    "RunRecord",
    "ScaEnv",
    "StochasticEnv",
    "SuiteResult",
    "TsallisFtrlPolicy",
    "bench_per_step",
    "c_alpha",
    "check_bounds",
    "checkpoint_grid",
    "env_step",
    "estimate_w_montecarlo",
    "event_dt",
    "event_dt_sum",
    "exploration_from_weights",
    "exploration_weights",
    "ftrl_learning_rate",
    "integrate_w",
    "iw_estimate",
    "learning_rate",
    "make_env",
    "pareto_sample",
    "ranks_ascending",
    "record_round",
    "regret_at",
    "run_experiment",
    "run_verification",
    "sample_categorical",
    "select_exploit",
    "sinusoidal_offset",
    "solve_exploit_weights",
    "solve_weights_bisection",
    "sum_q_bound",
    "validate_arm",
    "write_bench_csv",
    "write_run_csv",
]
