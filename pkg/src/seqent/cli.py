"""Command-line interface.

Subcommands: gen, dist, entropy, perturb, induce, abramov, continuity, plot.
Exit codes: 0 on success/pass, 2 when a criterion-bearing run fails its
threshold, 1 on usage or input errors.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from . import harness, metrics, wordio
from .channels import indel_channel, substitute_channel
from .entropy import estimate_entropy_rate
from .harness import ExperimentConfig, _write_csv
from .induced import MarkedSet, ReturnTimeCensus, induce
from .plots import continuity_figure, return_time_figure, save_svg

LOG2 = math.log(2.0)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the CLI contract reserves 2 for
    # criterion failures and 1 for usage problems
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _unit_scale(unit):
    return 1.0 if unit == "nats" else 1.0 / LOG2


def _parse_int_list(text):
    return [int(tok) for tok in text.split(",") if tok]


def build_parser():
    p = _Parser(prog="seqent", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a word from a process spec")
    g.add_argument("--spec", required=True, help="process spec JSON file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--schedule", type=int, default=32, help="quasi-generic block growth L")
    g.add_argument("--out", required=True)
    g.add_argument("--format", choices=("bytes", "rle"), default=None)

    d = sub.add_parser("dist", help="distance profile of two word files")
    d.add_argument("u")
    d.add_argument("w")
    d.add_argument("--metric", choices=("dbar", "fbar"), default="fbar")
    d.add_argument("--checkpoints", default=None, help="comma-separated prefix lengths")
    d.add_argument("--emit", choices=("csv",), default="csv")
    d.add_argument("--out", default="-", help="CSV path or - for stdout")

    e = sub.add_parser("entropy", help="entropy-rate estimates of a word file")
    e.add_argument("word")
    e.add_argument("--m", type=int, required=True)
    e.add_argument("--unit", choices=("nats", "bits"), default="nats")
    e.add_argument("--emit", choices=("csv",), default="csv")
    e.add_argument("--out", default="-")

    pe = sub.add_parser("perturb", help="run a word through a perturbation channel")
    pe.add_argument("word")
    pe.add_argument("--channel", choices=("sub", "indel"), required=True)
    pe.add_argument("--eps", type=float, required=True)
    pe.add_argument("--seed", type=int, default=0)
    pe.add_argument("--out", required=True)
    pe.add_argument("--cert-out", default=None, help="certificate file (index pairs, one per line)")
    pe.add_argument("--format", choices=("bytes", "rle"), default=None)

    i = sub.add_parser("induce", help="return-time histogram of a word file")
    i.add_argument("word")
    i.add_argument("--mark", required=True, help="comma-separated marked symbols, e.g. 1,2")
    i.add_argument("--emit", choices=("csv",), default="csv")
    i.add_argument("--out", default="-")

    a = sub.add_parser("abramov", help="entropy product check across seeds")
    a.add_argument("--spec", required=True)
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--m", type=int, default=8)
    a.add_argument("--seeds", type=int, default=20, help="number of seeds (seed, seed+1, ...)")
    a.add_argument("--seed", type=int, default=0, help="first seed")
    a.add_argument("--mark", default="1")
    a.add_argument("--rmax", type=int, default=32)
    a.add_argument("--tolerance", type=float, default=0.02, help="median residual gate (nats)")
    a.add_argument("--unit", choices=("nats", "bits"), default="nats")
    a.add_argument("--out", default="abramov.csv")

    c = sub.add_parser("continuity", help="entropy continuity experiment from a config")
    c.add_argument("--config", required=True, help="experiment config JSON")
    c.add_argument("--emit", choices=("csv", "svg"), default="csv",
                   help="svg also renders figures next to the CSV")
    c.add_argument("--out-dir", default=".")
    c.add_argument("--unit", choices=("nats", "bits"), default=None,
                   help="override the config's output unit")

    pl = sub.add_parser("plot", help="render SVG figures from report CSVs")
    pl.add_argument("--continuity", default=None, help="continuity CSV")
    pl.add_argument("--returns", default=None, help="return-time histogram CSV")
    pl.add_argument("--out-dir", default=".")
    return p


def _emit_rows(out, columns, rows):
    if out == "-":
        writer = csv.writer(sys.stdout)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([harness._csv_cell(v) for v in row])
    else:
        _write_csv(out, columns, rows)


def _cmd_gen(args):
    spec = wordio.load_process_spec(args.spec)
    w = harness.generate_path(spec, args.n, args.seed, args.schedule)
    wordio.write_word(w, args.out, args.format)
    return 0


def _cmd_dist(args):
    u = wordio.read_word(args.u)
    w = wordio.read_word(args.w)
    limit = min(len(u), len(w))
    if args.checkpoints:
        cps = _parse_int_list(args.checkpoints)
    else:
        cps = [limit]
    profile = metrics.distance_profile(u, w, cps)
    _emit_rows(args.out, ("n", "dbar_n", "fbar_n"),
               [(n, d, f) for n, d, f in profile.checkpoints])
    est = profile.limsup_estimate_d if args.metric == "dbar" else profile.limsup_estimate_f
    print(f"limsup_estimate_{args.metric[0]} = {est!r}", file=sys.stderr)
    return 0


def _cmd_entropy(args):
    w = wordio.read_word(args.word)
    scale = _unit_scale(args.unit)
    rows = []
    for m in range(1, args.m + 1):
        est = estimate_entropy_rate(w, m)
        rows.append((m, est.h_m * scale, est.ratio * scale, est.slope * scale,
                     est.n, est.flagged))
    _emit_rows(args.out, ("m", "H_m", "ratio", "slope", "n", "flag"), rows)
    return 0


def _cmd_perturb(args):
    x = wordio.read_word(args.word)
    if args.channel == "sub":
        y, changed = substitute_channel(x, args.eps, args.seed)
        cert_pairs = None
    else:
        y, cert = indel_channel(x, args.eps, args.seed)
        cert_pairs = zip(cert.I, cert.I_prime)
    wordio.write_word(y, args.out, args.format)
    if args.cert_out:
        if cert_pairs is None:
            raise SystemExit("--cert-out only applies to the indel channel")
        with open(args.cert_out, "w") as f:
            for i, j in cert_pairs:
                f.write(f"{i} {j}\n")
    return 0


def _cmd_induce(args):
    w = wordio.read_word(args.word)
    marked = MarkedSet(frozenset(_parse_int_list(args.mark)), w.alphabet)
    rtc = induce(w, marked).return_time_census()
    _emit_rows(args.out, harness.RETURNS_COLUMNS,
               [(int(t), int(c), int(c) / rtc.total) for t, c in zip(rtc.times, rtc.counts)])
    return 0


def _cmd_abramov(args):
    spec = wordio.load_process_spec(args.spec)
    cfg = ExperimentConfig(
        spec=spec, n=args.n, m=max(2, min(args.m, args.n - 1)),
        seeds=tuple(range(args.seed, args.seed + args.seeds)),
        marked_symbols=tuple(_parse_int_list(args.mark)),
        abramov_m=args.m, r_max=args.rmax, unit=args.unit,
        abramov_tolerance=args.tolerance,
    )
    report = harness.run_abramov(cfg)
    report.write_csv(args.out)
    median = report.median_residual()
    ok = median <= args.tolerance
    print(f"median residual = {median!r} nats; gate {args.tolerance!r}: "
          f"{'PASS' if ok else 'FAIL'}")
    return 0 if ok else 2


def _cmd_continuity(args):
    cfg = ExperimentConfig.from_json(args.config)
    if args.unit:
        cfg = ExperimentConfig.from_dict(
            {**_cfg_dict(cfg), "unit": args.unit})
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = harness.run_continuity(cfg)
    report.write_csv(out_dir / "continuity.csv")
    if args.emit == "svg":
        harness.emit_plots(out_dir, continuity_report=report)
    ok = report.all_pass_hard()
    print(f"{len(report.rows)} rows; hard criterion: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 2


def _cfg_dict(cfg):
    d = {f: getattr(cfg, f) for f in cfg.__dataclass_fields__}
    return d


def _cmd_plot(args):
    if not args.continuity and not args.returns:
        raise SystemExit("plot needs --continuity and/or --returns")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.continuity:
        rows = _read_continuity_csv(args.continuity)
        if not rows:
            raise SystemExit(f"no rows in {args.continuity}")
        save_svg(continuity_figure(rows), out_dir / "continuity.svg")
        print(out_dir / "continuity.svg")
    if args.returns:
        rtc = _read_returns_csv(args.returns)
        save_svg(return_time_figure(rtc), out_dir / "returns.svg")
        print(out_dir / "returns.svg")
    return 0


def _read_continuity_csv(path):
    rows = []
    with open(path) as f:
        for rec in csv.DictReader(f):
            rows.append(harness.ContinuityRow(
                eps=float(rec["eps"]), seed=int(rec["seed"]),
                distance=float(rec["distance"]),
                h_x=float(rec["h_x"]), h_y=float(rec["h_y"]),
                abs_dh=float(rec["abs_dh"]), budget=float(rec["budget"]),
                pass_hard=rec["pass_hard"] == "true",
                pass_soft=rec["pass_soft"] == "true",
            ))
    return rows


def _read_returns_csv(path):
    times, counts = [], []
    with open(path) as f:
        for rec in csv.DictReader(f):
            times.append(int(rec["return_time"]))
            counts.append(int(rec["count"]))
    if not times:
        raise SystemExit(f"no rows in {path}")
    return ReturnTimeCensus(
        times=np.asarray(times), counts=np.asarray(counts), total=sum(counts)
    )


_COMMANDS = {
    "gen": _cmd_gen,
    "dist": _cmd_dist,
    "entropy": _cmd_entropy,
    "perturb": _cmd_perturb,
    "induce": _cmd_induce,
    "abramov": _cmd_abramov,
    "continuity": _cmd_continuity,
    "plot": _cmd_plot,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SystemExit:
        raise
    except (OSError, ValueError, TypeError) as exc:
        print(f"seqent {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
