"""``factor`` command line entry point."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import QSError
from .factor import SieveOptions, factorize
from .mapreduce import default_workers
from .number_theory import is_probable_prime
from .sieve import DEFAULT_MULTIPLIER

log = logging.getLogger("mrqs")

EXIT_OK, EXIT_ERROR, EXIT_PARTIAL = 0, 1, 2


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="factor",
        description="Factor an integer with a quadratic sieve whose sieving runs as local map-reduce jobs.",
    )
    parser.add_argument("n", help="integer to factor (decimal)")
    parser.add_argument("--bound", type=_positive_int, help="smoothness bound B")
    parser.add_argument("--half-width", type=_positive_int, help="sieve half-width M")
    parser.add_argument(
        "--sieve-size", type=_positive_int, help="exact number of x values in the first round"
    )
    parser.add_argument(
        "--multiplier", type=float, default=DEFAULT_MULTIPLIER, help="scale factor for the default bound"
    )
    parser.add_argument("--workers", type=_positive_int, default=default_workers())
    parser.add_argument("--shard-size", type=_positive_int, default=65536)
    parser.add_argument(
        "--record-mode",
        choices=("value", "interval"),
        default="interval",
        help="'value' writes one x per line, 'interval' one 'start count' line per shard",
    )
    parser.add_argument("--workdir", type=Path, help="keep job files here instead of a temp dir")
    parser.add_argument("--max-rounds", type=_positive_int, default=8)
    parser.add_argument("--stats", action="store_true", help="print sieve statistics")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        n = int(args.n)
    except ValueError:
        print(f"factor: not an integer: {args.n!r}", file=sys.stderr)
        return EXIT_ERROR
    if n < 2:
        print(f"factor: expected an integer >= 2, got {n}", file=sys.stderr)
        return EXIT_ERROR
    if is_probable_prime(n):
        print(f"{n} is prime")
        return EXIT_OK

    options = SieveOptions(
        bound=args.bound,
        half_width=args.half_width,
        sieve_size=args.sieve_size,
        multiplier=args.multiplier,
        workers=args.workers,
        shard_size=args.shard_size,
        record_mode="per_value" if args.record_mode == "value" else "interval",
        workdir=args.workdir,
        max_rounds=args.max_rounds,
    )
    try:
        result = factorize(n, options)
    except QSError as exc:
        print(f"factor: {exc}", file=sys.stderr)
        return EXIT_ERROR

    product = 1
    for f, m in result.factors:
        product *= f**m
    assert product == n, "factors do not multiply back to the input"

    print(result.format())
    if args.stats:
        if not options.stats:
            print("stats: no sieving needed")
        for stats in options.stats:
            for key, value in stats.as_dict().items():
                print(f"  {key} = {value}")
    return EXIT_OK if result.complete else EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
