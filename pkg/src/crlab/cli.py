"""``crlab`` command line: run a sweep and write CSV or JSON.

Exit codes: 0 success, 2 I/O failure, 64 usage error, 65 invalid data
(the fixed-latency target was unreachable on every row).
"""
import argparse
import json
import math
import sys

import numpy as np

from .detector import RadioScenario
from .errors import DomainError
from .experiments import SweepKind, SweepSpec, emit, run_sweep
from .latency import SchemeKind
from .rng import SeedSpec

EXIT_OK = 0
EXIT_IO = 2
EXIT_USAGE = 64
EXIT_DATA = 65

SUBCOMMANDS = {
    "threshold-sweep": SweepKind.THRESHOLD,
    "quantiles": SweepKind.QUANTILE,
    "inr-latency": SweepKind.INR_FIXED_THROUGHPUT,
    "inr-throughput": SweepKind.INR_FIXED_LATENCY,
}

DEFAULT_TARGETS = {
    SweepKind.INR_FIXED_THROUGHPUT: 0.9,
    SweepKind.INR_FIXED_LATENCY: 16.0,
}
DEFAULT_INR_GRID = "0:10:1"
DEFAULT_PF_GRID = "0.01,0.02,0.05,0.1,0.2,0.3,0.5"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_values(text):
    """Parse ``a,b,c`` lists and inclusive ``start:stop:step`` ranges (mixable)."""
    values = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            try:
                start, stop, step = (float(x) for x in part.split(":"))
            except ValueError:
                raise UsageError(f"bad range {part!r}; expected start:stop:step") from None
            if not step > 0 or stop < start or not all(map(math.isfinite, (start, stop))):
                raise UsageError(f"bad range {part!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values.extend(float(v) for v in np.round(start + step * np.arange(count), 12))
        else:
            try:
                values.append(float(part))
            except ValueError:
                raise UsageError(f"not a number: {part!r}") from None
    return values


def _collect(chunks):
    if not chunks:
        return None
    out = []
    for chunk in chunks:
        out.extend(parse_values(chunk))
    return out


def build_parser():
    parser = _Parser(prog="crlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, kind in SUBCOMMANDS.items():
        p = sub.add_parser(name, help=kind.value)
        p.add_argument("--config", help="JSON file mirroring SweepSpec; flags override it")
        p.add_argument("--ns", type=int, help="sensing window, samples (default 16)")
        p.add_argument("--n", type=int, help="SU frame length, samples (default 128)")
        p.add_argument("--snr-db", type=float, help="PU SNR in dB (default 0)")
        p.add_argument("--inr-db", action="append",
                       help="residual SI in dB; repeatable, lists or a:b:step, '-inf' allowed")
        p.add_argument("--epsilon", action="append", help="threshold grid (list or a:b:step)")
        p.add_argument("--pf", action="append", help="false-alarm grid, instead of --epsilon")
        p.add_argument("--trials", type=int, help="Monte-Carlo trials per point")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--schemes", help="comma list of hd, slotted, sliding")
        p.add_argument("--target", type=float, help="throughput (inr-latency) or latency (inr-throughput)")
        p.add_argument("--iterations", type=int, help="bisection iterations (inr-throughput)")
        p.add_argument("--probe-trials", type=int, help="trials per bisection probe")
        p.add_argument("--workers", type=int, help="threads for Monte-Carlo batches")
        p.add_argument("--out", default="-", help="output path, '-' for stdout")
        p.add_argument("--format", choices=("csv", "json"), help="default: from --out suffix, else csv")
    return parser


def _load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from None


def spec_from_args(args):
    kind = SUBCOMMANDS[args.command]
    data = _load_config(args.config) if args.config else {}
    if data.get("kind", kind.value) != kind.value:
        raise UsageError(f"config kind {data['kind']!r} does not match {args.command}")
    data["kind"] = kind.value

    scenario = dict(data.get("scenario", {}))
    for flag, key in (("ns", "n_s"), ("n", "n_frame"), ("snr_db", "snr_pu_db")):
        if getattr(args, flag) is not None:
            scenario[key] = getattr(args, flag)
    inr = _collect(args.inr_db)
    eps = _collect(args.epsilon)
    pf = _collect(args.pf)
    if eps is not None and pf is not None:
        raise UsageError("give --epsilon or --pf, not both")

    if kind in (SweepKind.INR_FIXED_THROUGHPUT, SweepKind.INR_FIXED_LATENCY):
        if eps is not None or pf is not None:
            raise UsageError(f"{args.command} sweeps INR; --epsilon/--pf do not apply")
        if inr is not None:
            data["grid"] = inr
        data.setdefault("grid", parse_values(DEFAULT_INR_GRID))
        data.setdefault("target", DEFAULT_TARGETS[kind])
    else:
        if inr is not None:
            if len(inr) != 1:
                raise UsageError(f"{args.command} takes a single --inr-db value")
            scenario["inr_db"] = inr[0]
        if eps is not None:
            data["grid"], data["grid_unit"] = eps, "epsilon"
        elif pf is not None:
            data["grid"], data["grid_unit"] = pf, "pf"
        elif "grid" not in data:
            data["grid"], data["grid_unit"] = parse_values(DEFAULT_PF_GRID), "pf"
        if kind is SweepKind.THRESHOLD:
            data.setdefault("schemes", [s.value for s in SchemeKind])
    if args.target is not None:
        data["target"] = args.target
    if args.schemes is not None:
        data["schemes"] = [s for s in args.schemes.split(",") if s.strip()]
    if args.trials is not None:
        data["trials"] = args.trials
    if args.seed is not None:
        data["seed"] = {"master_seed": args.seed, "trial_index": 0}
    for flag, key in (("iterations", "bisection_iterations"), ("probe_trials", "probe_trials"),
                      ("workers", "workers")):
        if getattr(args, flag) is not None:
            data[key] = getattr(args, flag)
    data["scenario"] = scenario
    return SweepSpec.from_dict(data)


def _output_format(args):
    if args.format:
        return args.format
    return "json" if str(args.out).endswith(".json") else "csv"


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = spec_from_args(args)
    except (UsageError, DomainError, TypeError, ValueError) as exc:
        print(f"crlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"crlab: {exc}", file=sys.stderr)
        return EXIT_IO

    result = run_sweep(spec)
    try:
        emit(result, args.out, _output_format(args))
    except OSError as exc:
        print(f"crlab: cannot write {args.out}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    if result.rows and all(r.status == "unreachable" for r in result.rows):
        print("crlab: target unreachable on every row", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
