"""Command-line interface: ``imkit {select,evaluate,probs,accuracy,bench}``.

Vertex ids on the command line and in output files are the ids used in the
input file. Exit codes: 0 success, 2 validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from imkit import harness
from imkit.aapc import DEFAULT_T, activation_probabilities, steady_state_probabilities
from imkit.eaapc import DEFAULT_EPS, combine_multi_seed, resolve_max_level, single_seed_probs
from imkit.errors import ValidationError
from imkit.oracle import DEFAULT_REPS, estimate_influence_mc

EXIT_OK, EXIT_VALIDATION, EXIT_IO = 0, 2, 3

log = logging.getLogger("imkit")


def _parse_seeds(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError:
        raise ValidationError(f"--seeds must be comma-separated integers, got {text!r}") from None


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _graph(args):
    return harness.load_dataset(args.input, args.p, getattr(args, "undirected", False))


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True,
                   help="edge-list path, fixture name (figure1, figure2) or pa:N:ATTACH:SEED")
    p.add_argument("--undirected", action="store_true", help="expand each edge into two arcs")
    p.add_argument("--p", type=float, default=None, help="uniform arc probability")


def _add_depth(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--eps", type=float, default=None, help=f"EAAPC tolerance (default {DEFAULT_EPS})")
    g.add_argument("--max-level", type=int, default=None, help="EAAPC BFS depth cutoff")


def cmd_select(args) -> int:
    g = _graph(args)
    cfg = harness.ExperimentConfig(
        dataset=args.input, algorithm=args.algo, k=args.k, p=args.p, undirected=args.undirected,
        T=args.T, eps=args.eps, max_level=args.max_level, reps_select=args.reps,
        master_seed=args.seed, lazy=args.lazy,
    )
    res = harness.select_seeds(g, cfg)
    fmt = harness.format_for_path(args.out)
    records = []
    for i, v in enumerate(res.seeds):
        records.append({
            "round": i + 1,
            "seed": g.label_of(v),
            "estimate": res.marginal_estimates[i] if res.marginal_estimates else None,
            "gain": res.gains[i] if res.gains else None,
        })
    if fmt == "json":
        text = "".join(json.dumps(r) + "\n" for r in records)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["round", "seed", "estimate", "gain"])
        for r in records:
            w.writerow([r["round"], r["seed"],
                        "" if r["estimate"] is None else repr(float(r["estimate"])),
                        "" if r["gain"] is None else repr(float(r["gain"]))])
        text = buf.getvalue()
    if args.record_timing:
        text += f"# wall_time={res.wall_time!r}\n" if fmt == "csv" else json.dumps({"wall_time": res.wall_time}) + "\n"
    _write(text, args.out)
    log.info("%s selected %d seeds in %.3fs", res.algorithm, len(res.seeds), res.wall_time)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    g = _graph(args)
    seeds = g.indices_of(_parse_seeds(args.seeds))
    est = estimate_influence_mc(g, seeds, args.reps, args.seed)
    out = {"seeds": [g.label_of(v) for v in seeds], "mean": est.mean,
           "std_error": est.std_error, "replications": est.replications}
    _write(json.dumps(out) + "\n", args.out)
    return EXIT_OK


def cmd_probs(args) -> int:
    g = _graph(args)
    seeds = g.indices_of(_parse_seeds(args.seeds))
    if args.algo == "aapc":
        probs = activation_probabilities(g, seeds, args.T).probtill[:, args.T]
    elif args.algo == "steady-state":
        probs = steady_state_probabilities(g, seeds).probs
    else:
        L = args.max_level if args.max_level is not None else resolve_max_level(g, args.eps or DEFAULT_EPS)
        probs = np.zeros(g.n)
        blocked = np.zeros(g.n, dtype=bool)
        for s in seeds:
            if blocked[s]:
                continue
            probs = combine_multi_seed(probs, single_seed_probs(g, s, L, blocked))
            blocked[s] = True
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vertex", "prob"])
    for v in range(g.n):
        w.writerow([g.label_of(v), repr(float(probs[v]))])
    _write(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_accuracy(args) -> int:
    g = harness.load_dataset(args.fixture, args.p)
    table = harness.accuracy_report(g, harness.fixture_seeds(args.fixture, g), args.T)
    _write(table.to_csv(args.digits), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    g = _graph(args)
    rows = []
    for algo in args.algos.split(","):
        cfg = harness.ExperimentConfig(
            dataset=args.input, algorithm=algo, k=args.k, p=args.p, undirected=args.undirected,
            T=args.T, eps=args.eps, max_level=args.max_level, reps_select=args.reps_select,
            reps_eval=args.reps_eval, master_seed=args.seed,
        )
        algo_rows = harness.run_experiment(cfg, graph=g)
        last = algo_rows[-1]
        print(f"{algo:10s} select {last.select_time:9.3f}s  spread@{last.k_prefix} "
              f"{last.spread_mean:.4f} +- {last.spread_stderr:.4f}", file=sys.stderr)
        rows += algo_rows
    text = harness.format_rows(rows, harness.format_for_path(args.out or ""), timing=args.record_timing)
    _write(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imkit", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="select k seeds")
    _add_input(p)
    p.add_argument("--algo", required=True, choices=harness.SELECTORS)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--T", type=int, default=DEFAULT_T, help="AAPC horizon")
    _add_depth(p)
    p.add_argument("--reps", type=int, default=DEFAULT_REPS, help="greedy-mc replications")
    p.add_argument("--seed", type=int, default=0, help="master RNG seed")
    p.add_argument("--lazy", action="store_true", help="CELF re-evaluation for aapc")
    p.add_argument("--out", required=True)
    p.add_argument("--record-timing", action="store_true", help="append wall time to the output")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("evaluate", help="Monte-Carlo spread of a seed set")
    _add_input(p)
    p.add_argument("--seeds", required=True)
    p.add_argument("--reps", type=int, default=DEFAULT_REPS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("probs", help="per-vertex activation probabilities")
    _add_input(p)
    p.add_argument("--seeds", required=True)
    p.add_argument("--algo", required=True, choices=("aapc", "steady-state", "eaapc"))
    p.add_argument("--T", type=int, default=DEFAULT_T)
    _add_depth(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_probs)

    p = sub.add_parser("accuracy", help="AAPC / steady-state / exact table for a fixture")
    p.add_argument("--fixture", required=True, choices=harness.FIXTURES)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--T", type=int, default=6)
    p.add_argument("--digits", type=int, default=None, help="round printed values")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_accuracy)

    p = sub.add_parser("bench", help="run every selector and evaluate seed prefixes")
    _add_input(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--algos", default="aapc,eaapc,greedy-mc,degree")
    p.add_argument("--T", type=int, default=4)
    _add_depth(p)
    p.add_argument("--reps-select", type=int, default=DEFAULT_REPS)
    p.add_argument("--reps-eval", type=int, default=DEFAULT_REPS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--record-timing", action="store_true", help="write timing columns")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"imkit: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"imkit: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
