"""Command line entry point: ``steinlab <command> [options]``."""
from __future__ import annotations

import argparse
import sys

from steinlab.harness import COMMANDS, ExperimentConfig, run, serialize
from steinlab.parallel import default_workers

HELP = {
    "sample": "Draw uniform random chord diagrams (each of the (2n-1)!! diagrams equally likely) "
              "and report their crossing counts.",
    "stats": "Crossings, nestings, simple chords, chord lengths and components of a diagram given by "
             "--pairs (e.g. the 12-point example with 4 crossings, 4 nestings, 3 components, "
             "2 simple chords), or Monte Carlo means over --samples random diagrams.",
    "exact-crossings": "Exact law of the crossing count; checks mean n(n-1)/6, variance "
                       "n(n-1)(n+3)/45 and the Catalan count of noncrossing diagrams.",
    "exact-simple": "Exact law of the simple-chord count; checks the mean 2n/(2n-1).",
    "scfree": "Exact number s(n) of diagrams without simple chords, checked against "
              "(2n-1)!!/e * (exp(-1/(2n-1)) -/+ 10/n).",
    "sb-verify": "Exact check that the size-bias coupling for crossings or simple chords "
                 "produces the size-bias law.",
    "stein-bound": "Evaluate the size-bias Stein bound on the Kolmogorov distance of the "
                   "standardized crossing count (theoretical: <= 12920 n^(-1/2); empirical: "
                   "must dominate the exact distance).",
    "distance": "Kolmogorov distance of standardized crossings to N(0,1) (bound 12920 n^(-1/2)) "
                "or total variation of simple chords to Poisson(2n/(2n-1)) (bound 10n/(2n-1)^2).",
    "report": "Run every exact check for 2 <= n <= --n and report one row per claim.",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: usage error: {message}\n")


def _pairs(text: str) -> list:
    """Parse ``"1-8,2-9,3-4"`` into ``[(1, 8), (2, 9), (3, 4)]``."""
    try:
        return [tuple(int(x) for x in chunk.split("-")) for chunk in text.split(",") if chunk]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad chord list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="steinlab", description="Random chord diagram experiments.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, help=HELP[name], description=HELP[name])
        p.add_argument("--n", type=int, default=2, help="number of chords (default 2)")
        p.add_argument("--samples", type=int, default=0, help="Monte Carlo sample count")
        p.add_argument("--seed", type=int, default=0, help="64-bit master seed")
        p.add_argument("--workers", type=int, default=None,
                       help="worker processes (default $STEINLAB_THREADS or 1)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        if name in ("sb-verify",):
            p.add_argument("--statistic", choices=("crossings", "simple_chords"), default="crossings")
        if name == "stein-bound":
            p.add_argument("--mode", choices=("theoretical", "empirical"), default="theoretical")
        if name == "distance":
            p.add_argument("--kind", choices=("kolmogorov-normal", "tv-poisson"),
                           default="kolmogorov-normal")
            p.add_argument("--inject-corrupt-pmf", action="store_true", help=argparse.SUPPRESS)
        if name == "stats":
            p.add_argument("--pairs", type=_pairs, default=None,
                           help="chords as 1-based point pairs, e.g. 1-8,2-9,3-4,5-7,6-10,11-12")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    workers = args.workers if args.workers is not None else default_workers()
    return ExperimentConfig(
        command=args.command,
        n=args.n,
        samples=args.samples,
        seed=args.seed,
        workers=workers,
        format=args.format,
        out=args.out,
        statistic=getattr(args, "statistic", "crossings"),
        kind=getattr(args, "kind", "kolmogorov-normal"),
        mode=getattr(args, "mode", "theoretical"),
        pairs=getattr(args, "pairs", None),
        inject_corrupt_pmf=getattr(args, "inject_corrupt_pmf", False),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except ValueError as exc:
        print(f"steinlab: usage error: {exc}", file=sys.stderr)
        return 1
    result = run(config)
    for msg in result.messages:
        print(f"steinlab: {msg}", file=sys.stderr)
    if result.records:
        text = serialize(result.records, config.format)
        if config.out:
            with open(config.out, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
