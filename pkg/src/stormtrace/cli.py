"""``stormtrace`` command line entry point."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from stormtrace.corpus import RedirectMap, iter_records, load_corpus, merge_posts, parse_record
from stormtrace.errors import StormtraceError
from stormtrace.fixtures import generate_posts, generate_viral_posts, write_jsonl
from stormtrace.pipeline import PipelineConfig, StageError, run_pipeline

log = logging.getLogger("stormtrace")


def _unit_interval(text: str) -> float:
    value = float(text)
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"{text} is not in (0, 1]")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stormtrace",
        description="Elect key posts, key authors and boost authors from a post corpus.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the full pipeline")
    run.add_argument("--input", required=True, type=Path)
    run.add_argument("--redirect-map", type=Path)
    run.add_argument("--stopwords", type=Path)
    run.add_argument("--gamma", type=_positive, default=7, help="window size in days")
    run.add_argument("--delta", type=_positive, default=1, help="window step in days")
    run.add_argument("--topics", type=_positive, default=10, help="LDA topics per window")
    run.add_argument("--seed", type=int, default=42)
    run.add_argument("--lda-iters", type=_positive, default=500)
    run.add_argument("--lda-burnin", type=int, default=100)
    run.add_argument("--top-x", type=_positive, default=1)
    run.add_argument("--elect-mode", choices=("top", "percent"), default="top")
    run.add_argument("--percent-theta", type=_unit_interval, default=0.8)
    run.add_argument("--boost-theta", type=_unit_interval, default=0.8)
    run.add_argument("--out-dir", type=Path, default=Path("out"))

    val = sub.add_parser("validate", help="check an input file against the record schema")
    val.add_argument("--input", required=True, type=Path)
    val.add_argument("--redirect-map", type=Path)

    gen = sub.add_parser("gen-fixture", help="write a synthetic corpus")
    gen.add_argument("--seed", type=int, default=42)
    gen.add_argument("--out", required=True, type=Path)
    gen.add_argument("--kind", choices=("standard", "viral"), default="standard")
    gen.add_argument("--posts", type=_positive, default=30)
    gen.add_argument("--days", type=_positive, default=10)
    return parser


def _run(args: argparse.Namespace) -> int:
    try:
        cfg = PipelineConfig(
            input_path=args.input,
            redirect_map_path=args.redirect_map,
            stopwords_path=args.stopwords,
            gamma_days=args.gamma,
            delta_days=args.delta,
            k=args.topics,
            seed=args.seed,
            lda_iters=args.lda_iters,
            lda_burnin=args.lda_burnin,
            top_x=args.top_x,
            elect_mode=args.elect_mode,
            percent_theta=args.percent_theta,
            boost_theta=args.boost_theta,
            out_dir=args.out_dir,
        )
    except ValueError as exc:
        print(f"stormtrace: error in stage 'config': {exc}", file=sys.stderr)
        return 1
    try:
        report = run_pipeline(cfg)
    except StageError as exc:
        print(f"stormtrace: error in stage {exc.stage!r}: {exc.cause}", file=sys.stderr)
        return 1
    n_key = sum(len(t["key_posts"]) for w in report.windows for t in w["topics"])
    print(
        f"{report.corpus['posts']} posts, {len(report.windows)} windows, "
        f"{n_key} key-post elections, {report.graph['nodes']} graph nodes "
        f"-> {cfg.out_dir}"
    )
    return 0


def _validate(args: argparse.Namespace) -> int:
    try:
        redirects = RedirectMap.load(args.redirect_map) if args.redirect_map else None
        posts = [parse_record(rec, redirects, line) for line, rec in iter_records(args.input)]
    except (StormtraceError, OSError) as exc:
        print(f"stormtrace: error in stage 'ingest': {exc}", file=sys.stderr)
        return 1
    print(f"ok: {len(posts)} records, {len(merge_posts(posts))} distinct posts")
    return 0


def _gen_fixture(args: argparse.Namespace) -> int:
    if args.kind == "viral":
        records, _, _ = generate_viral_posts(args.seed)
    else:
        records = generate_posts(args.seed, n_posts=args.posts, days=args.days)
    write_jsonl(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    handlers = {"run": _run, "validate": _validate, "gen-fixture": _gen_fixture}
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
