"""Command-line entry point: run, bench, verify, sweep subcommands."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import harness
from .oracle import c_alpha


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="key = value config file")
    parser.add_argument("--policy", choices=harness.POLICIES)
    parser.add_argument("--env", choices=harness.ENVS)
    parser.add_argument("--horizon", type=int)
    parser.add_argument("--repetitions", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--c", type=float)
    parser.add_argument("--means", help="comma-separated Bernoulli means")
    parser.add_argument("--delta", type=float)
    parser.add_argument("--num-arms", dest="num_arms", type=int)
    parser.add_argument("--optimal-arm", dest="optimal_arm", type=int)
    parser.add_argument("--amplitude", type=float)
    parser.add_argument("--period", type=float)
    parser.add_argument("--experiment")
    parser.add_argument("--output")


_CONFIG_KEYS = (
    "policy", "env", "horizon", "repetitions", "seed", "alpha", "beta", "c",
    "means", "delta", "num_arms", "optimal_arm", "amplitude", "period",
    "experiment", "output",
)


def _mapping_from_args(args: argparse.Namespace) -> dict[str, str]:
    mapping: dict[str, str] = {}
    if args.config is not None:
        mapping.update(harness.parse_config_text(args.config.read_text()))
    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            mapping[key] = str(value)
    return mapping


def cmd_run(args: argparse.Namespace) -> int:
    config = harness.config_from_mapping(_mapping_from_args(args))
    records = harness.run_experiment(config)
    path = harness.write_run_csv(config.output, config, records)
    final = harness.regret_at(records, config.horizon)
    print(f"wrote {path} ({config.policy} on {config.env}, "
          f"{config.repetitions} repetitions, mean final regret {final.mean():.3f})")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.config is None:
        print("sweep requires --config", file=sys.stderr)
        return 2
    base_mapping = _mapping_from_args(args)
    for index, combo in enumerate(harness.sweep_expand(base_mapping)):
        config = harness.config_from_mapping(combo)
        records = harness.run_experiment(config)
        path = harness.sweep_output_path(config.output, index, config)
        harness.write_run_csv(path, config, records)
        print(f"[{index}] wrote {path}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    policies = args.policies.split(",")
    k_grid = [int(v) for v in args.k_grid.split(",")]
    rows = harness.bench_per_step(
        policies, k_grid, rounds=args.rounds, repetitions=args.repetitions,
        seed=args.seed, warmup=args.warmup,
    )
    path = harness.write_bench_csv(args.output, rows, args.seed)
    for (policy, num_arms), ns in sorted(harness.mean_ns_by_policy_and_k(rows).items()):
        print(f"{policy:>12s} K={num_arms:<5d} {ns:12.0f} ns/step")
    print(f"wrote {path}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    results = harness.run_verification(args.seed, args.states, args.samples)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status} {result.suite}: {result.detail}")
    print(f"INFO regret-analysis constant at shape 3: {c_alpha(3.0):.6f}")
    if args.output:
        harness.write_verify_csv(args.output, results)
        print(f"wrote {args.output}")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decbandit",
        description="Decoupled bandit experiments: run, bench, verify, sweep.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment and write CSV")
    _add_config_flags(run_p)
    run_p.set_defaults(func=cmd_run)

    sweep_p = sub.add_parser("sweep", help="cartesian product of ;-separated config values")
    _add_config_flags(sweep_p)
    sweep_p.set_defaults(func=cmd_sweep)

    bench_p = sub.add_parser("bench", help="per-step runtime benchmark")
    bench_p.add_argument("--policies", default="ftpl,ftrl")
    bench_p.add_argument("--k-grid", dest="k_grid", default="2,4,8,16,32,64,128,256,512")
    bench_p.add_argument("--rounds", type=int, default=1000)
    bench_p.add_argument("--repetitions", type=int, default=30)
    bench_p.add_argument("--warmup", type=int, default=100)
    bench_p.add_argument("--seed", type=int, default=0)
    bench_p.add_argument("--output", default="bench.csv")
    bench_p.set_defaults(func=cmd_bench)

    verify_p = sub.add_parser("verify", help="oracle verification suites")
    verify_p.add_argument("--seed", type=int, default=0)
    verify_p.add_argument("--states", type=int, default=20)
    verify_p.add_argument("--samples", type=int, default=200_000)
    verify_p.add_argument("--output", default=None)
    verify_p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
