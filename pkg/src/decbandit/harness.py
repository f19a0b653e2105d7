"""Experiment runner, benchmark, verification suites, and persistence.

Runs are fully determined by (config, seed): repetition r derives its
policy and environment generators from a seed sequence keyed by
(seed, r), so different policies see identical loss draws and reruns are
byte-identical. Results go to a stable CSV schema
``experiment,policy,env,repetition,t,pseudo_regret[,ns_per_step]`` with a
key=value manifest written next to each file.
"""

from __future__ import annotations

import csv
import math
import platform
import subprocess
import time
from dataclasses import dataclass, fields
from importlib.metadata import PackageNotFoundError, version as _pkg_version
from itertools import product
from pathlib import Path

import numpy as np

from . import oracle
from .core import RegretAccumulator, iw_estimate, record_round
from .ebtc import EbTcPolicy, MixedPolicy
from .envs import DEFAULT_STOCHASTIC_MEANS, StochasticEnv, env_step, make_env
from .ftpl import FtplParams, ParetoFtplPolicy, exploration_weights, learning_rate
from .ftrl import FtrlParams, TsallisFtrlPolicy, solve_exploit_weights

POLICIES = ("ftpl", "ftrl", "ebtc", "mixed-ftpl", "mixed-ftrl")
ENVS = ("stochastic", "alternating", "sca")

CSV_HEADER = ("experiment", "policy", "env", "repetition", "t", "pseudo_regret")
BENCH_HEADER = CSV_HEADER + ("ns_per_step",)


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved parameters of one experiment (policy, environment, scale)."""

    policy: str = "ftpl"
    env: str = "stochastic"
    horizon: int = 10_000
    repetitions: int = 200
    seed: int = 0
    alpha: float = 3.0
    beta: float = 2.0 / 3.0
    c: float = 2.0
    means: tuple = DEFAULT_STOCHASTIC_MEANS
    delta: float = 0.125
    num_arms: int = 8
    optimal_arm: int = 0
    amplitude: float = 0.1
    period: float = 1000.0
    experiment: str = "run"
    output: str = "results.csv"

    def __post_init__(self) -> None:
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        if self.env not in ENVS:
            raise ValueError(f"env must be one of {ENVS}, got {self.env!r}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")

    def build_env(self):
        if self.env == "stochastic":
            return make_env("stochastic", means=self.means)
        if self.env == "alternating":
            return make_env(
                "alternating",
                delta=self.delta,
                num_arms=self.num_arms,
                optimal_arm=self.optimal_arm,
            )
        return make_env(
            "sca", means=self.means, amplitude=self.amplitude, period=self.period
        )

    def build_policy(self, num_arms: int):
        if self.policy == "ftpl":
            return ParetoFtplPolicy(FtplParams(self.alpha, self.c, num_arms))
        if self.policy == "ftrl":
            return TsallisFtrlPolicy(FtrlParams(self.beta, self.c, num_arms))
        if self.policy == "ebtc":
            return EbTcPolicy(num_arms)
        if self.policy == "mixed-ftpl":
            return MixedPolicy(ParetoFtplPolicy(FtplParams(self.alpha, self.c, num_arms)))
        return MixedPolicy(TsallisFtrlPolicy(FtrlParams(self.beta, self.c, num_arms)))


@dataclass(frozen=True)
class RunRecord:
    """Per-repetition pseudo-regret at the checkpoint grid."""

    repetition: int
    checkpoints: tuple
    per_step_nanos: float | None = None


def checkpoint_grid(horizon: int) -> np.ndarray:
    """Powers of two up to the horizon, 100 evenly spaced rounds, and the horizon.

    The even spacing uses multiples of horizon/100 so that natural
    fractions of the horizon (T/2, T/10) are always recorded.
    """
    doubling = 2 ** np.arange(0, max(1, int(math.log2(horizon)) + 1))
    if horizon <= 100:
        linear = np.arange(1, horizon + 1)
    else:
        linear = np.maximum(1, np.rint(np.arange(1, 101) * (horizon / 100.0)))
    grid = np.union1d(np.union1d(doubling[doubling <= horizon], linear), [horizon])
    return grid.astype(np.int64)


def repetition_rngs(seed: int, repetition: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent (policy, environment) generators for one repetition.

    The environment stream depends only on (seed, repetition), so every
    policy run with the same base seed faces identical loss draws.
    """
    policy_seq, env_seq = np.random.SeedSequence([seed, repetition]).spawn(2)
    return np.random.default_rng(policy_seq), np.random.default_rng(env_seq)


def run_repetition(config: ExperimentConfig, repetition: int) -> RunRecord:
    env = config.build_env()
    num_arms = env.means_at(1).shape[0]
    policy = config.build_policy(num_arms)
    policy_rng, env_rng = repetition_rngs(config.seed, repetition)
    grid = set(checkpoint_grid(config.horizon).tolist())
    acc = RegretAccumulator.zeros(num_arms)
    checkpoints = []
    for t in range(1, config.horizon + 1):
        action, aux = policy.step(policy_rng)
        step = env_step(env, t, env_rng)
        policy.update(action, float(step.losses[action.explore]), aux)
        record_round(acc, step, action)
        if t in grid:
            checkpoints.append((t, acc.pseudo_regret))
    return RunRecord(repetition, tuple(checkpoints))


def run_experiment(config: ExperimentConfig) -> list[RunRecord]:
    """All repetitions in index order (single process; order is the contract)."""
    return [run_repetition(config, rep) for rep in range(config.repetitions)]


def regret_at(records: list[RunRecord], t: int) -> np.ndarray:
    """Pseudo-regret of every repetition at checkpoint t (must be on the grid)."""
    values = []
    for record in records:
        match = [r for (tc, r) in record.checkpoints if tc == t]
        if not match:
            raise ValueError(f"round {t} is not on the checkpoint grid")
        values.append(match[0])
    return np.asarray(values)


# ---------------------------------------------------------------------------
# Persistence


def git_revision() -> str:
    try:
        out = subprocess.run(
            ["git", "rev-parse", "HEAD"], capture_output=True, text=True, timeout=10
        )
        return out.stdout.strip() if out.returncode == 0 else "unknown"
    except OSError:
        return "unknown"


def package_version() -> str:
    try:
        return _pkg_version("decbandit")
    except PackageNotFoundError:
        return "unversioned"


def manifest_text(config: ExperimentConfig, extra: dict | None = None) -> str:
    lines = []
    for f in fields(config):
        value = getattr(config, f.name)
        if isinstance(value, tuple):
            value = ",".join(repr(v) for v in value)
        lines.append(f"{f.name} = {value}")
    lines.append(f"package_version = {package_version()}")
    lines.append(f"git_revision = {git_revision()}")
    for key, value in (extra or {}).items():
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def manifest_path(csv_path: str | Path) -> Path:
    path = Path(csv_path)
    return path.with_suffix(".manifest.txt")


def write_run_csv(path: str | Path, config: ExperimentConfig, records: list[RunRecord]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for record in records:
                for t, regret in record.checkpoints:
                    writer.writerow(
                        (config.experiment, config.policy, config.env,
                         record.repetition, t, repr(float(regret)))
                    )
    except OSError as exc:
        raise OSError(f"failed writing run CSV to {path}: {exc}") from exc
    manifest_path(path).write_text(manifest_text(config))
    return path


# ---------------------------------------------------------------------------
# Benchmark


@dataclass(frozen=True)
class BenchRow:
    policy: str
    num_arms: int
    repetition: int
    rounds: int
    final_regret: float
    ns_per_step: float


def bench_env(num_arms: int) -> StochasticEnv:
    """Synthetic stochastic instance with evenly spread means."""
    if num_arms == 1:
        return StochasticEnv(np.asarray([0.5]))
    return StochasticEnv(np.linspace(0.1, 0.9, num_arms))


def bench_one(
    config: ExperimentConfig, num_arms: int, repetition: int, rounds: int, warmup: int
) -> BenchRow:
    """Mean wall-clock nanoseconds per step+update, environment time excluded."""
    env = bench_env(num_arms)
    policy = config.build_policy(num_arms)
    policy_rng, env_rng = repetition_rngs(config.seed, repetition)
    acc = RegretAccumulator.zeros(num_arms)
    elapsed = 0
    for t in range(1, warmup + rounds + 1):
        start = time.perf_counter_ns()
        action, aux = policy.step(policy_rng)
        mid = time.perf_counter_ns()
        step = env_step(env, t, env_rng)
        before_update = time.perf_counter_ns()
        policy.update(action, float(step.losses[action.explore]), aux)
        end = time.perf_counter_ns()
        if t > warmup:
            elapsed += (mid - start) + (end - before_update)
        record_round(acc, step, action)
    return BenchRow(
        config.policy, num_arms, repetition, rounds, acc.pseudo_regret, elapsed / rounds
    )


def bench_per_step(
    policies: list[str],
    k_grid: list[int],
    rounds: int = 1000,
    repetitions: int = 30,
    seed: int = 0,
    warmup: int = 100,
) -> list[BenchRow]:
    if rounds < 1000:
        raise ValueError(f"need >= 1000 rounds for timer resolution, got {rounds}")
    rows = []
    for policy, num_arms in product(policies, k_grid):
        config = ExperimentConfig(policy=policy, seed=seed, experiment="bench")
        for rep in range(repetitions):
            rows.append(bench_one(config, num_arms, rep, rounds, warmup))
    return rows


def write_bench_csv(path: str | Path, rows: list[BenchRow], seed: int) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(BENCH_HEADER)
            for row in rows:
                writer.writerow(
                    ("bench", row.policy, f"synthetic-K{row.num_arms}",
                     row.repetition, row.rounds, repr(row.final_regret),
                     repr(row.ns_per_step))
                )
    except OSError as exc:
        raise OSError(f"failed writing bench CSV to {path}: {exc}") from exc
    machine = {
        "platform": platform.platform(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "bench_seed": seed,
    }
    config = ExperimentConfig(experiment="bench", seed=seed, output=str(path))
    manifest_path(path).write_text(manifest_text(config, machine))
    return path


def mean_ns_by_policy_and_k(rows: list[BenchRow]) -> dict[tuple[str, int], float]:
    sums: dict[tuple[str, int], list[float]] = {}
    for row in rows:
        sums.setdefault((row.policy, row.num_arms), []).append(row.ns_per_step)
    return {key: float(np.mean(vals)) for key, vals in sums.items()}


# ---------------------------------------------------------------------------
# Verification suites (desk-scale versions of the acceptance checks)


@dataclass(frozen=True)
class SuiteResult:
    suite: str
    passed: bool
    detail: str


def _random_state(rng: np.random.Generator, num_arms: int, low: float, high: float):
    """Gap vector with a random zero-gap arm and scaled gaps in [low, high]."""
    eta = float(rng.uniform(0.1, 2.0))
    scaled = rng.uniform(low, high, num_arms)
    scaled[rng.integers(num_arms)] = 0.0
    return scaled / eta, eta


def verify_sandwich(seed: int = 0, states: int = 20, samples: int = 200_000) -> SuiteResult:
    rng = np.random.default_rng(seed)
    checked = 0
    try:
        while checked < states:
            gap, eta = _random_state(rng, int(rng.integers(2, 9)), 1.5, 8.0)
            if not oracle.event_dt(gap, eta, 3.0, int(np.argmin(gap))):
                continue
            oracle.check_bounds(gap, eta, 3.0, samples, rng)
            checked += 1
    except AssertionError as exc:
        return SuiteResult("sandwich", False, str(exc))
    return SuiteResult("sandwich", True, f"{states} states at {samples} samples")


def verify_cross_oracle(seed: int = 0, states: int = 20, samples: int = 200_000) -> SuiteResult:
    rng = np.random.default_rng(seed)
    for index in range(states):
        alpha = (1.5, 2.0, 3.0)[index % 3]
        gap, eta = _random_state(rng, int(rng.integers(2, 9)), 0.0, 3.0)
        quad = oracle.integrate_w(gap, eta, alpha)
        mc = oracle.estimate_w_montecarlo(gap, eta, alpha, samples, rng)
        se = np.maximum(mc.stderr, np.sqrt(quad * (1.0 - quad) / samples))
        gap_abs = np.abs(mc.probs - quad)
        if np.any(gap_abs > 4.0 * se):
            arm = int(np.argmax(gap_abs - 4.0 * se))
            return SuiteResult(
                "cross-oracle", False,
                f"state {index} arm {arm}: |{mc.probs[arm]} - {quad[arm]}| > 4*{se[arm]}",
            )
    return SuiteResult("cross-oracle", True, f"{states} states at {samples} samples")


def verify_sum_q(seed: int = 0, states: int = 2000) -> SuiteResult:
    rng = np.random.default_rng(seed)
    grid = (2, 8, 64, 512)
    alphas = (1.5, 3.0)
    for index in range(states):
        num_arms = grid[index % len(grid)]
        alpha = alphas[(index // len(grid)) % len(alphas)]
        eta = float(10.0 ** rng.uniform(-2, 1))
        gap = rng.exponential(10.0 ** rng.uniform(-2, 2), num_arms)
        gap[rng.integers(num_arms)] = 0.0
        dist = exploration_weights(gap, eta, alpha)
        bound = oracle.sum_q_bound(num_arms, alpha)
        if not dist.weights.sum() <= bound:
            return SuiteResult(
                "sum-q", False,
                f"state {index}: sum q = {dist.weights.sum()} > {bound} (K={num_arms})",
            )
    return SuiteResult("sum-q", True, f"{states} states")


def verify_newton(seed: int = 0, states: int = 2000) -> SuiteResult:
    rng = np.random.default_rng(seed)
    beta = 2.0 / 3.0
    for index in range(states):
        num_arms = int(rng.integers(2, 17))
        eta = float(10.0 ** rng.uniform(-2, 1))
        gap = rng.exponential(10.0 ** rng.uniform(-2, 2), num_arms)
        gap[rng.integers(num_arms)] = 0.0
        w = solve_exploit_weights(gap, eta, beta)
        if abs(w.sum() - 1.0) > 1e-10:
            return SuiteResult("newton", False, f"state {index}: |sum w - 1| = {abs(w.sum() - 1.0)}")
        reference = oracle.solve_weights_bisection(gap, eta, beta)
        err = float(np.max(np.abs(w - reference)))
        if err > 1e-8:
            return SuiteResult("newton", False, f"state {index}: newton vs bisection {err}")
    uniform = solve_exploit_weights(np.zeros(8), 0.7, beta)
    if np.max(np.abs(uniform - 0.125)) > 1e-12:
        return SuiteResult("newton", False, f"uniform input gave {uniform}")
    return SuiteResult("newton", True, f"{states} states")


def verify_iw_identity(seed: int = 0, pairs: int = 200) -> SuiteResult:
    rng = np.random.default_rng(seed)
    for index in range(pairs):
        num_arms = int(rng.integers(1, 17))
        losses = rng.uniform(0.0, 1.0, num_arms)
        probs = rng.dirichlet(np.ones(num_arms))
        expectation = sum(
            probs[j] * iw_estimate(losses[j], j, probs) for j in range(num_arms)
        )
        if np.max(np.abs(expectation - losses)) > 1e-12:
            return SuiteResult(
                "iw-identity", False,
                f"pair {index}: max error {np.max(np.abs(expectation - losses))}",
            )
    return SuiteResult("iw-identity", True, f"{pairs} pairs")


def verify_constants() -> SuiteResult:
    expected = (2.0 * 27.0 + (math.e - 2.0) * 9.0) / 10.0
    if abs(oracle.c_alpha(3.0) - expected) > 1e-12:
        return SuiteResult("constants", False, f"c_alpha(3) = {oracle.c_alpha(3.0)}")
    boundary = oracle.event_dt_sum(np.zeros(2), 1.0, 3.0, 0)
    if boundary != 0.5 or not oracle.event_dt(np.zeros(2), 1.0, 3.0, 0):
        return SuiteResult("constants", False, f"boundary sum = {boundary!r}")
    if oracle.event_dt(np.zeros(3), 1.0, 3.0, 0):
        return SuiteResult("constants", False, "two zero-gap arms should break the event")
    return SuiteResult("constants", True, "c_alpha and separation boundary")


def verify_dt_identification(seed: int = 0, horizon: int = 3000) -> SuiteResult:
    """On a live run, the separation event only holds once the true best arm leads."""
    config = ExperimentConfig(policy="ftpl", horizon=horizon, repetitions=1, seed=seed)
    env = config.build_env()
    num_arms = env.means_at(1).shape[0]
    policy = config.build_policy(num_arms)
    policy_rng, env_rng = repetition_rngs(config.seed, 0)
    best = int(np.argmin(env.means_at(1)))
    for t in range(1, horizon + 1):
        eta = learning_rate(policy.round, policy.params)
        holds = oracle.event_dt_sum(policy.estimate.gap, eta, 3.0, best) <= 0.5
        if holds and policy.estimate.gap[best] != 0.0:
            return SuiteResult(
                "dt-identification", False,
                f"t={t}: event holds but best arm gap is {policy.estimate.gap[best]}",
            )
        action, aux = policy.step(policy_rng)
        step = env_step(env, t, env_rng)
        policy.update(action, float(step.losses[action.explore]), aux)
    return SuiteResult("dt-identification", True, f"{horizon} instrumented rounds")


def run_verification(seed: int = 0, states: int = 20, samples: int = 200_000) -> list[SuiteResult]:
    """All suites with fixed seeds; failures aggregate rather than short-circuit."""
    return [
        verify_sandwich(seed, states, samples),
        verify_cross_oracle(seed + 1, states, samples),
        verify_sum_q(seed + 2),
        verify_newton(seed + 3),
        verify_iw_identity(seed + 4),
        verify_constants(),
        verify_dt_identification(seed + 5),
    ]


def write_verify_csv(path: str | Path, results: list[SuiteResult]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("suite", "passed", "detail"))
        for result in results:
            writer.writerow((result.suite, str(result.passed).lower(), result.detail))
    return path


# ---------------------------------------------------------------------------
# Config files and sweeps


def parse_config_text(text: str) -> dict[str, str]:
    """Flat key = value lines; blank lines and # comments ignored."""
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno} is not key = value: {raw!r}")
        key, value = line.split("=", 1)
        mapping[key.strip()] = value.strip()
    return mapping


_INT_FIELDS = {"horizon", "repetitions", "seed", "num_arms", "optimal_arm"}
_FLOAT_FIELDS = {"alpha", "beta", "c", "delta", "amplitude", "period"}


def _coerce(key: str, value: str):
    if key in _INT_FIELDS:
        return int(value)
    if key in _FLOAT_FIELDS:
        return float(value)
    if key == "means":
        return tuple(float(v) for v in value.split(","))
    return value


def config_from_mapping(mapping: dict[str, str]) -> ExperimentConfig:
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(mapping) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**{k: _coerce(k, v) for k, v in mapping.items()})


def sweep_expand(mapping: dict[str, str]) -> list[dict[str, str]]:
    """Cartesian product over ;-separated alternatives in any value."""
    keys = list(mapping)
    choices = [[v.strip() for v in mapping[k].split(";")] for k in keys]
    return [dict(zip(keys, combo)) for combo in product(*choices)]


def sweep_output_path(base: str | Path, index: int, config: ExperimentConfig) -> Path:
    base = Path(base)
    return base.with_name(f"{base.stem}_{index:03d}_{config.policy}_{config.env}{base.suffix}")
