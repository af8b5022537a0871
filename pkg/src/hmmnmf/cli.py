"""Command line interface: ``hmmnmf <subcommand> ...``.

Exit codes: 0 on success, 1 for invalid input, 2 for numerical failures.
Errors are reported on stderr as a single ``error=<kind> message=<text>`` line.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings
from importlib import resources

from . import __version__
from .evaluation import divergence_curve, prank_counterexample_check, prank_gt_rank_model_check
from .exceptions import NumericalError, ValidationError
from .extract import INIT_C_CHOICES, learn
from .model import format_model, read_model, simulate
from .nmf import NmfConfig
from .spectral import DEFAULT_THRESHOLD, spectrum_report
from .stats import build_stats, format_observations, format_stats, read_observations

BUNDLED = ("even", "dhmm-equivalent", "no-finite-dhmm", "dhmm-equivalent-estimate",
           "prank-counterexample", "prank-gt-rank")


def _resolve_model(path):
    if os.path.exists(path) or path not in BUNDLED:
        return read_model(path)
    with resources.as_file(resources.files("hmmnmf") / "data" / f"{path}.hmm") as p:
        return read_model(p)


def _emit(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _order_arg(value):
    if value == "auto":
        return value
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"order must be 'auto' or a positive integer, got {value!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("order must be positive")
    return n


def _positive_int(value):
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return n


def _non_negative_int(value):
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return n


def _positive_float(value):
    x = float(value)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return x


def cmd_simulate(args):
    model = _resolve_model(args.model)
    obs = simulate(model, args.length, args.seed)
    _emit(format_observations(obs), args.out)


def cmd_stats(args):
    stats = build_stats(read_observations(args.input), args.p, args.s)
    _emit(format_stats(stats), args.out)


def cmd_order(args):
    stats = build_stats(read_observations(args.input), args.p, args.s)
    report = spectrum_report(stats, args.threshold, args.weighted, not args.no_noise_floor)
    lines = [f"{x:.12g}" for x in report.singular_values]
    lines.append(f"N {report.chosen_order}")
    _emit("\n".join(lines) + "\n", None)


def cmd_learn(args):
    obs = read_observations(args.input)
    config = NmfConfig(args.nmf_iters, args.nmf_tol, seed=args.seed)
    result = learn(obs, args.p, args.s, args.order, args.outer, config, args.threshold,
                   args.weighted, not args.no_noise_floor, args.init_c, args.seed)
    if result.spectrum is not None:
        print(f"order={result.spectrum.chosen_order}", file=sys.stderr)
    for rec in result.history:
        print(f"{rec.format()} nmf_iters={rec.nmf_iterations}", file=sys.stderr)
    _emit(format_model(result.model), args.out)


def cmd_eval(args):
    curve = divergence_curve(_resolve_model(args.true), _resolve_model(args.learned), args.nmax)
    lines = [f"{n}\t{r:.12g}" for n, r in zip(curve.n_values, curve.rates)]
    _emit("\n".join(lines) + "\n", args.out)
    if curve.clamp_flag:
        print("warning=clamped message=learned model assigns zero probability to "
              "strings the true model emits", file=sys.stderr)


def cmd_check_prank(args):
    ok = True
    for title, report in (("counterexample", prank_counterexample_check()),
                          ("prank-gt-rank", prank_gt_rank_model_check(args.length, args.seed))):
        for line in report.lines():
            print(f"{title} {line}")
        ok = ok and report.passed
    return 0 if ok else 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser():
    parser = _Parser(
        prog="hmmnmf",
        description="Learn HMMs from prefix-suffix statistics by I-divergence NMF.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    seed_kw = dict(type=int, default=argparse.SUPPRESS, help="random seed (overrides the global one)")

    p = sub.add_parser("simulate", help="draw an observation sequence from a model")
    p.add_argument("--model", required=True,
                   help=f"model file, or a bundled model name: {', '.join(BUNDLED)}")
    p.add_argument("--length", type=_non_negative_int, required=True, help="number of symbols")
    p.add_argument("--seed", **seed_kw)
    p.add_argument("--out", help="output observation file (default stdout)")
    p.set_defaults(func=cmd_simulate)

    def window_args(q):
        q.add_argument("--in", dest="input", required=True, help="observation file")
        q.add_argument("--p", type=_positive_int, required=True, help="prefix length")
        q.add_argument("--s", type=_positive_int, required=True, help="suffix length")

    def spectrum_args(q):
        q.add_argument("--threshold", type=_positive_float, default=DEFAULT_THRESHOLD,
                       help="singular value ratio-to-largest cut (default 0.05)")
        q.add_argument("--weighted", action="store_true",
                       help="analyse diag(G) F instead of F")
        q.add_argument("--no-noise-floor", action="store_true",
                       help="ignore the sampling noise floor; use the ratio cut alone")

    p = sub.add_parser("stats", help="dump the sparse prefix-suffix counts")
    window_args(p)
    p.add_argument("--out", help="output file (default stdout)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("order", help="print the singular values of F and the order estimate")
    window_args(p)
    spectrum_args(p)
    p.set_defaults(func=cmd_order)

    p = sub.add_parser("learn", help="learn a model from an observation file")
    window_args(p)
    spectrum_args(p)
    p.add_argument("--order", type=_order_arg, default="auto", help="number of states or 'auto'")
    p.add_argument("--outer", type=_positive_int, default=2, help="outer iterations (default 2)")
    p.add_argument("--nmf-iters", type=_positive_int, default=500,
                   help="NMF iteration cap per pass (default 500)")
    p.add_argument("--nmf-tol", type=_positive_float, default=1e-7,
                   help="NMF relative improvement tolerance (default 1e-7)")
    p.add_argument("--init-c", choices=INIT_C_CHOICES, default="from-lp",
                   help="how to reseed the prefix factor between passes")
    p.add_argument("--seed", **seed_kw)
    p.add_argument("--out", help="output model file (default stdout)")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("eval", help="I-divergence rate of a learned model from the true one")
    p.add_argument("--true", required=True, help="reference model file or bundled name")
    p.add_argument("--learned", required=True, help="learned model file or bundled name")
    p.add_argument("--nmax", type=_positive_int, default=15, help="largest string length (default 15)")
    p.add_argument("--out", help="output TSV file (default stdout)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check-prank", help="run the rank versus positive-rank checks")
    p.add_argument("--length", type=_positive_int, default=10000,
                   help="simulated length for the empirical spectrum (default 10000)")
    p.add_argument("--seed", **seed_kw)
    p.set_defaults(func=cmd_check_prank)
    return parser


def _fail(kind, message, code):
    message = " ".join(str(message).split())
    print(f"error={kind} message={message}", file=sys.stderr)
    return code


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail("UsageError", exc, 1)
    except SystemExit as exc:
        # --help and --version
        return exc.code or 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return args.func(args) or 0
    except ValidationError as exc:
        return _fail(type(exc).__name__, exc, 1)
    except NumericalError as exc:
        return _fail(type(exc).__name__, exc, 2)
    except (OSError, ValueError) as exc:
        return _fail(type(exc).__name__, exc, 1)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
