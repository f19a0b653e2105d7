#!/usr/bin/env python3
"""Run the full experiment grid and benchmark, writing CSVs for the figures.

Produces, under --out-dir (default results/):
  ftpl_stochastic.csv, ftrl_stochastic.csv, mixed_stochastic.csv   regret runs
  ftpl_alternating.csv                                             regret run
  bench.csv                                                        per-step timing
  verify.csv                                                       oracle suite results
  figures.json                                                     figure spec consumed by the plotting CLI

--quick shrinks horizons and repetition counts for a smoke run.
"""

import argparse
import json
import sys
import time
from pathlib import Path

from decbandit import harness

RUNS = (
    ("ftpl_stochastic", "ftpl", "stochastic"),
    ("ftrl_stochastic", "ftrl", "stochastic"),
    ("mixed_stochastic", "mixed-ftpl", "stochastic"),
    ("ftpl_alternating", "ftpl", "alternating"),
)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", type=Path, default=Path("results"))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--quick", action="store_true", help="small smoke-run sizes")
    args = parser.parse_args(argv)

    horizon = 1000 if args.quick else 10_000
    repetitions = 10 if args.quick else 200
    bench_reps = 3 if args.quick else 20
    args.out_dir.mkdir(parents=True, exist_ok=True)

    paths = {}
    for name, policy, env in RUNS:
        config = harness.ExperimentConfig(
            policy=policy, env=env, horizon=horizon, repetitions=repetitions,
            seed=args.seed, experiment=name,
            output=str(args.out_dir / f"{name}.csv"),
        )
        t0 = time.perf_counter()
        records = harness.run_experiment(config)
        paths[name] = harness.write_run_csv(config.output, config, records)
        final = harness.regret_at(records, horizon)
        print(f"{name}: mean regret {final.mean():.2f} "
              f"(sd {final.std(ddof=0):.2f}, {time.perf_counter() - t0:.1f}s)")

    t0 = time.perf_counter()
    rows = harness.bench_per_step(
        ["ftpl", "ftrl"], [2, 4, 8, 16, 32, 64, 128, 256, 512],
        rounds=1000, repetitions=bench_reps, seed=args.seed + 1,
    )
    bench_path = harness.write_bench_csv(args.out_dir / "bench.csv", rows, args.seed + 1)
    means = harness.mean_ns_by_policy_and_k(rows)
    ratio = means[("ftrl", 512)] / means[("ftpl", 512)]
    print(f"bench: FTRL/FTPL per-step ratio at K=512 is {ratio:.2f} "
          f"({time.perf_counter() - t0:.1f}s)")

    results = harness.run_verification(seed=args.seed, states=20, samples=200_000)
    harness.write_verify_csv(args.out_dir / "verify.csv", results)
    for result in results:
        print(f"{'PASS' if result.passed else 'FAIL'} {result.suite}: {result.detail}")

    figures = [
        {"kind": "regret", "xscale": "log",
         "inputs": [str(paths["ftpl_stochastic"]), str(paths["ftrl_stochastic"])],
         "output": str(args.out_dir / "stochastic.svg")},
        {"kind": "regret", "xscale": "log",
         "inputs": [str(paths["ftpl_alternating"])],
         "output": str(args.out_dir / "adversarial.svg")},
        {"kind": "regret", "xscale": "log",
         "inputs": [str(paths["mixed_stochastic"]), str(paths["ftpl_stochastic"])],
         "output": str(args.out_dir / "mixed.svg")},
        {"kind": "runtime", "xscale": "log", "yscale": "log",
         "inputs": [str(bench_path)],
         "output": str(args.out_dir / "runtime.svg")},
    ]
    spec_path = args.out_dir / "figures.json"
    spec_path.write_text(json.dumps(figures, indent=2) + "\n")
    print(f"figure spec written to {spec_path} "
          f"(render with: node frontend/dist/cli.js {spec_path})")
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
