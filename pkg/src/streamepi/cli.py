"""Command-line entry point: ``generate``, ``mine``, ``compare`` and ``bounds``."""

import argparse
import csv
import dataclasses
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import harness
from .datagen import GenConfig, export_ground_truth, generate_stream
from .errors import StreamEpiError
from .events import batchify, read_events, write_events
from .miner import VARIANTS
from .thresholds import bounds
from .variants import make_miner


def _gen_flags(parser, defaults=True):
    for f in dataclasses.fields(GenConfig):
        if f.name == "batch_span":
            continue
        kind = f.type if f.type in (int, float) else str
        default = f.default if defaults else None
        extra = {"choices": ("none", "random_walk")} if f.name == "drift" else {}
        parser.add_argument("--" + f.name.replace("_", "-"), type=kind, default=default, **extra)


def _miner_flags(parser, variant=True):
    parser.add_argument("--input", help="event file: timestamp<TAB>event_type per line")
    parser.add_argument("--batch-span", type=float, help="batch span in seconds")
    parser.add_argument("--origin", type=float, help="start time of batch 1 (default: first event)")
    if variant:
        parser.add_argument("--variant", choices=VARIANTS, default="alg3")
    parser.add_argument("--k", type=int)
    parser.add_argument("--l", type=int, help="episode size")
    parser.add_argument("--m", type=int, help="batches per window")
    parser.add_argument("--v", type=int, help="persistence parameter")
    parser.add_argument("--delta", help="'auto' or a fixed rate of change")
    parser.add_argument("--delta0-frac", type=float)
    parser.add_argument("--epsilon-step", type=float)
    parser.add_argument("--report-dir")


def build_parser():
    parser = argparse.ArgumentParser(prog="streamepi", description=__doc__)
    parser.add_argument("-q", "--quiet", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic event stream and its ground truth")
    _gen_flags(p)
    p.add_argument("--batch-span", type=float, default=GenConfig.batch_span)
    p.add_argument("--output", required=True, help="event file to write")
    p.add_argument("--truth", help="ground-truth CSV (default: <output>.truth.csv)")

    p = sub.add_parser("mine", help="run one variant and write its ranked window reports")
    _miner_flags(p)
    p.add_argument("--max-window-events", type=int, default=harness.DEFAULT_MAX_WINDOW_EVENTS)

    p = sub.add_parser("compare", help="run several variants against Alg 0")
    p.add_argument("--config", help="key = value experiment file")
    _miner_flags(p, variant=False)
    p.add_argument("--variants", help="comma list, e.g. alg0,alg1,alg3,alg4:5")
    p.add_argument("--truth", help="ground-truth CSV for an --input stream")
    p.add_argument("--max-window-events", type=int)
    _gen_flags(p, defaults=False)

    p = sub.add_parser("bounds", help="window-frequency bounds and top-k error guarantee")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--delta", type=Fraction, required=True)
    p.add_argument("--phi", type=Fraction, required=True)
    p.add_argument("--eps", type=Fraction, required=True)
    p.add_argument("--fk", type=Fraction, nargs="+", required=True,
                   help="f_k of each batch; a single value is repeated m times")
    return parser


def cmd_generate(args):
    fields = {f.name for f in dataclasses.fields(GenConfig)}
    cfg = GenConfig(**{k: v for k, v in vars(args).items() if k in fields})
    events, truth = generate_stream(cfg)
    symbols = cfg.symbols()
    write_events(events, symbols, args.output)
    truth_path = args.truth or f"{args.output}.truth.csv"
    export_ground_truth(truth, truth_path, symbols)
    print(f"wrote {len(events)} events to {args.output} and ground truth to {truth_path}")


def _overrides(args, exclude=()):
    keys = ("input", "batch_span", "origin", "k", "l", "m", "v", "delta", "delta0_frac",
            "epsilon_step", "report_dir", "variants", "truth", "max_window_events")
    gen = {f.name for f in dataclasses.fields(GenConfig)}
    out = {}
    for key, val in vars(args).items():
        if key in exclude or val is None:
            continue
        if key in keys or key in gen:
            out[key] = val
    return out


def cmd_mine(args):
    if not args.input:
        raise StreamEpiError("mine needs --input")
    over = _overrides(args, exclude=("report_dir",))
    cfg = harness.load_config(over)
    events, symbols = read_events(args.input)
    batches = batchify(events, cfg.batch_span, cfg.origin)
    miner = make_miner(cfg.miner_config(args.variant), args.max_window_events)
    reports = [miner.process(b) for b in batches]
    if args.report_dir:
        out = Path(args.report_dir)
        out.mkdir(parents=True, exist_ok=True)
        harness.write_variant_csv(reports, out / f"{args.variant}.csv", symbols)
        print(f"wrote {len(reports)} windows to {out / (args.variant + '.csv')}")
    else:
        harness.write_variant_csv(reports, sys.stdout, symbols)


def cmd_compare(args):
    over = _overrides(args)
    out = harness.run_experiment(harness.load_config(args.config, over))
    print(f"wrote report to {out}")
    with open(out / "averages.csv", encoding="utf-8") as fh:
        sys.stdout.write(fh.read())


def cmd_bounds(args):
    fk = args.fk * args.m if len(args.fk) == 1 else args.fk
    b = bounds(args.k, args.m, args.v, args.delta, args.phi, args.eps, fk)
    w = csv.writer(sys.stdout)
    w.writerow(["quantity", "value", "decimal"])
    rows = [("f_lower", b.f_lower), ("f_upper", b.f_upper), ("valid", b.valid),
            ("mu", b.mu), ("max_errors", b.max_errors)]
    rows += [(f"corollary_case_{case}", val) for case, val in sorted(b.corollary.items())]
    for name, val in rows:
        dec = f"{float(val):.6g}" if not isinstance(val, bool) else ""
        w.writerow([name, val, dec])


COMMANDS = {"generate": cmd_generate, "mine": cmd_mine, "compare": cmd_compare, "bounds": cmd_bounds}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(levelname)s %(message)s")
    try:
        COMMANDS[args.command](args)
    except (StreamEpiError, OSError, ValueError) as exc:
        print(f"streamepi: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
