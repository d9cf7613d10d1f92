"""Spread and selection time of every selector on a preferential-attachment graph.

    python3 scripts/desk_benchmark.py --n 5000 --attach 5 --p 0.01 --k 10 --out bench.csv

Writes one ReportRow per (algorithm, seed prefix) and prints a summary to stderr.
All selectors are evaluated with the same Monte-Carlo master seed.
"""

import argparse
import sys
import time

from imkit import harness


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--attach", type=int, default=5)
    ap.add_argument("--graph-seed", type=int, default=0)
    ap.add_argument("--p", type=float, default=0.01)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--T", type=int, default=4)
    ap.add_argument("--reps-select", type=int, default=5000)
    ap.add_argument("--reps-eval", type=int, default=5000)
    ap.add_argument("--eval-seed", type=int, default=12345)
    ap.add_argument("--algos", default="eaapc,aapc,greedy-mc,degree")
    ap.add_argument("--out", default=None, help="CSV or .jsonl path (stdout if omitted)")
    args = ap.parse_args()

    dataset = f"pa:{args.n}:{args.attach}:{args.graph_seed}"
    t0 = time.perf_counter()
    g = harness.load_dataset(dataset, args.p)
    print(f"graph {dataset}: n={g.n} arcs={g.m} ({time.perf_counter() - t0:.1f}s)", file=sys.stderr)

    rows = []
    for algo in args.algos.split(","):
        cfg = harness.ExperimentConfig(dataset, algorithm=algo, k=args.k, p=args.p, T=args.T,
                                       reps_select=args.reps_select, reps_eval=args.reps_eval,
                                       master_seed=args.eval_seed)
        res = harness.select_seeds(g, cfg)
        algo_rows = harness.evaluate_prefixes(g, res, args.reps_eval, args.eval_seed)
        last = algo_rows[-1]
        print(f"{algo:10s} select {res.wall_time:8.2f}s  spread@{args.k} {last.spread_mean:8.3f}"
              f" +- {last.spread_stderr:.3f}  seeds {[g.label_of(v) for v in res.seeds]}", file=sys.stderr)
        rows += algo_rows

    text = harness.format_rows(rows, harness.format_for_path(args.out or ""), timing=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
