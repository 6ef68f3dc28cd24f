"""Command-line entry point.

    fairsub run --config cfg --out results.csv [--full-samples] [--strict-fair]
    fairsub validate --graph edges --labels labels [--trials N] [--seed S]
    fairsub gen --kind {twitch-like|corel-like} --n N --seed S --out-prefix P

Exit codes: 0 success, 1 config error, 2 dataset error, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import sys

from .bench import ExperimentConfig, emit_csv, fairness_verdict, run_experiment
from .datasets import (
    generate_skewed_instance,
    generate_tagged_instance,
    load_coverage_instance,
    write_edge_list,
    write_labels,
    write_tags,
)
from .errors import ConfigError, DatasetError, InvariantError
from .oracles import validate_oracle
from .rng import make_rng

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATASET = 2
EXIT_INVARIANT = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairsub")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute an experiment config")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True)
    run.add_argument("--full-samples", action="store_true",
                     help="disable the desk-scale sample divisor")
    run.add_argument("--strict-fair", action="store_true",
                     help="report the exact share bounds instead of the "
                          "relaxed inequality")

    val = sub.add_parser("validate", help="check a graph dataset and its oracle")
    val.add_argument("--graph", required=True)
    val.add_argument("--labels", required=True)
    val.add_argument("--trials", type=int, default=200)
    val.add_argument("--seed", type=int, default=0)

    gen = sub.add_parser("gen", help="write a synthetic dataset to files")
    gen.add_argument("--kind", required=True, choices=["twitch-like", "corel-like"])
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out-prefix", required=True)
    gen.add_argument("--colors", type=int, default=6)
    gen.add_argument("--skew", type=float, default=0.6)
    gen.add_argument("--degree", type=float, default=10.0)
    gen.add_argument("--vocabulary", type=int, default=374)
    gen.add_argument("--tags-per-item", type=float, default=4.0)
    return parser


def _cmd_run(args) -> int:
    config = ExperimentConfig.from_file(args.config)
    records, errors = run_experiment(config, full_samples=args.full_samples)
    for err in errors:
        print(
            f"error: {err.algorithm} tau={err.tau} seed={err.seed}: {err.message}",
            file=sys.stderr,
        )
    label = "strict" if args.strict_fair else "relaxed"
    for rec in records:
        fair = fairness_verdict(rec, config, strict=args.strict_fair)
        print(
            f"{rec.algorithm} tau={rec.tau:g} seed={rec.seed}: "
            f"f={rec.f_value:g} cost={rec.cost} "
            f"fairness_diff={rec.fairness_diff:.4f} "
            f"{label}-fair={'yes' if fair else 'no'}"
        )
    emit_csv(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    universe, oracle, names = load_coverage_instance(args.graph, args.labels)
    sizes = universe.group_sizes()
    print(f"{universe.n} vertices, {universe.num_colors} colors {dict(zip(names, sizes))}")
    report = validate_oracle(oracle, universe.n, args.trials, make_rng(args.seed, 42))
    if report.ok:
        print(f"oracle clean over {report.trials} sampled chains")
        return EXIT_OK
    for v in report.violations:
        print(f"violation: {v}", file=sys.stderr)
    raise InvariantError(f"{len(report.violations)} oracle violations")


def _cmd_gen(args) -> int:
    prefix = args.out_prefix
    if args.kind == "twitch-like":
        universe, oracle = generate_skewed_instance(
            n=args.n, num_colors=args.colors, skew=args.skew,
            degree=args.degree, seed=args.seed,
        )
        edges = sorted(
            (u, int(v))
            for u in range(universe.n)
            for v in oracle.adjacency[u]
            if u <= v
        )
        write_edge_list(f"{prefix}.edges", edges)
        write_labels(
            f"{prefix}.labels",
            [universe.color_of(e) for e in universe.elements()],
        )
        print(f"wrote {prefix}.edges ({len(edges)} edges) and {prefix}.labels")
    else:
        universe, oracle = generate_tagged_instance(
            n=args.n, seed=args.seed, num_colors=args.colors,
            vocabulary_size=args.vocabulary, tags_per_item=args.tags_per_item,
        )
        vocab = oracle.vocabulary
        tags = []
        for mask in oracle.masks:
            tags.append([vocab[i] for i in range(len(vocab)) if mask >> i & 1])
        write_tags(f"{prefix}.tags", tags)
        write_labels(
            f"{prefix}.labels",
            [universe.color_of(e) for e in universe.elements()],
        )
        print(f"wrote {prefix}.tags and {prefix}.labels")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_gen(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DatasetError as exc:
        print(f"dataset error: {exc}", file=sys.stderr)
        return EXIT_DATASET
    except (InvariantError, AssertionError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_DATASET


if __name__ == "__main__":
    sys.exit(main())
