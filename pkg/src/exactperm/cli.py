"""Command-line interface: ``test``, ``bench`` and ``gen``.

Exit codes: 0 success, 2 invalid input, 3 resource limit, 1 anything else
raised by the library.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import List, Optional

from . import __version__
from .bench import BenchConfig, generate_synthetic, run_benchmark, write_csv
from .convolution import ConvolutionEngine
from .dataio import ENTRY_TSV, FORMATS, JSON, CorpusFile, load_paired, save_paired
from .errors import InvalidInputError, PermTestError, ResourceLimitError
from .pmf import DEFAULT_MEMORY_CAP
from .runner import brute_force, exact_perm_test, monte_carlo
from .statistics import STATISTICS

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID = 2
EXIT_RESOURCE = 3

METHODS = ("exact-dp", "exact-fft", "mc", "brute")
_EXTENSIONS = {ENTRY_TSV: "tsv", "token-tsv": "tsv", JSON: "json"}


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"seed must be non-negative, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exactperm", description="Exact paired-permutation significance tests."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="run a significance test on two system output files")
    t.add_argument("u_path", help="outputs of system U")
    t.add_argument("v_path", help="outputs of system V")
    t.add_argument("--format", choices=FORMATS, default=ENTRY_TSV)
    t.add_argument("--stat", choices=sorted(STATISTICS), default="acc-diff")
    t.add_argument("--tails", choices=("one", "two"), default="two")
    t.add_argument("--method", choices=METHODS, default="exact-fft")
    t.add_argument("--mc-samples", type=_positive, default=10000, metavar="K")
    t.add_argument("--seed", type=_seed, default=0, metavar="S")
    t.add_argument("--fft-threshold", type=_positive, default=32,
                   help="sublists at or below this size are convolved by DP")
    t.add_argument("--memory-cap", type=_positive, default=DEFAULT_MEMORY_CAP,
                   help="maximum number of PMF cells")

    b = sub.add_parser("bench", help="runtime sweep of exact and Monte Carlo tests")
    b.add_argument("--n-values", type=_positive, nargs="+", default=list(BenchConfig.n_values))
    b.add_argument("--mc-samples", type=_positive, nargs="+", default=list(BenchConfig.mc_sample_counts))
    b.add_argument("--trials", type=_positive, default=1)
    b.add_argument("--seed", type=_seed, default=0, metavar="S")
    b.add_argument("--tails", choices=("one", "two"), default="two")
    b.add_argument("--correlation", type=float, default=0.0)
    b.add_argument("--fft-threshold", type=_positive, default=32)
    b.add_argument("--out", metavar="PATH", help="CSV destination (default: stdout)")

    g = sub.add_parser("gen", help="write a synthetic pair of system outputs")
    g.add_argument("--n", type=_positive, required=True, help="number of entries")
    g.add_argument("--seed", type=_seed, default=0, metavar="S")
    g.add_argument("--format", choices=FORMATS, default=ENTRY_TSV)
    g.add_argument("--correlation", type=float, default=0.0)
    g.add_argument("--out", metavar="PATH", required=True,
                   help="output prefix; writes PATH_u.<ext> and PATH_v.<ext>")
    return parser


def _cmd_test(args) -> int:
    data = load_paired(CorpusFile(args.format, args.u_path), CorpusFile(args.format, args.v_path))
    stat = STATISTICS[args.stat](args.tails)
    if args.method == "mc":
        report = monte_carlo(data, stat, args.mc_samples, args.seed)
    elif args.method == "brute":
        report = brute_force(data, stat)
    else:
        engine = ConvolutionEngine(
            args.method.split("-")[1],
            fft_base_case_threshold=args.fft_threshold,
            memory_cap=args.memory_cap,
        )
        report = exact_perm_test(data, stat, engine)
    print(json.dumps(report.to_dict()))
    print(
        f"{args.stat} ({args.tails}-tailed), N={report.n_entries}: "
        f"observed effect {report.observed_effect:g}, p = {report.p_value:.6g} "
        f"[{report.method}, {report.elapsed * 1000:.1f} ms]",
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_bench(args) -> int:
    config = BenchConfig(
        n_values=tuple(args.n_values),
        mc_sample_counts=tuple(args.mc_samples),
        trials=args.trials,
        seed=args.seed,
        tails=args.tails,
        correlation=args.correlation,
        fft_base_case_threshold=args.fft_threshold,
        output_path=args.out,
    )
    rows = run_benchmark(config)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
        print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    else:
        write_csv(rows, sys.stdout)
    return EXIT_OK


def _cmd_gen(args) -> int:
    config = BenchConfig(correlation=args.correlation)
    data = generate_synthetic(args.n, config, seed=args.seed)
    ext = _EXTENSIONS[args.format]
    u_path, v_path = f"{args.out}_u.{ext}", f"{args.out}_v.{ext}"
    save_paired(data, CorpusFile(args.format, u_path), CorpusFile(args.format, v_path))
    print(u_path)
    print(v_path)
    return EXIT_OK


_COMMANDS = {"test": _cmd_test, "bench": _cmd_bench, "gen": _cmd_gen}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _COMMANDS[args.command](args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except PermTestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
