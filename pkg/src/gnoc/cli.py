"""Batch command-line front end: characterize, analyze, synthesize, validate, dse.

Reports go to stdout, diagnostics to stderr.  Exit status: 0 clean, 1 when
violations or validation failures were found (reports are still complete),
2 for usage/format errors, 3 for internal failures.
"""

from __future__ import annotations

import argparse
import sys

from . import characterize as chz
from . import dse as dse_mod
from .errors import ClockUnsatisfiable, GnocError, NoValidCandidate
from .golden import Corner, golden_path_analyze
from .grammar import parse_link, serialize_link
from .hasta import LookupMode, LookupPurpose, analyze_link, analyze_path, render_report
from .synthesize import LinkSpec, synthesize_link
from .techlib import ClockSpec, load_tech_config

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _load_cfg(path: str):
    with open(path) as fh:
        return load_tech_config(fh.read())


def _load_tables(path: str, cfg):
    return chz.load_tables(path, expect_digest=cfg.digest())


def _read_link(path: str):
    with open(path) as fh:
        return parse_link(fh.read())


def cmd_characterize(args) -> int:
    cfg = _load_cfg(args.tech)
    ts = chz.build_tables(cfg)
    chz.save_tables(ts, args.out)
    print(f"cells={ts.cell_count} corners={len(chz.TABLE_CORNERS)}")
    print(f"cfg={ts.cfg_digest} K={ts.K} L={ts.L}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    cfg = _load_cfg(args.tech)
    ts = _load_tables(args.tables, cfg)
    link = _read_link(args.link)
    clk = ClockSpec(period=args.period, jitter=args.jitter)
    report = analyze_link(link, ts, cfg, clk, mode=LookupMode(args.mode),
                          launch_slew=args.launch_slew)
    sys.stdout.write(render_report(report))
    return EXIT_OK if report.ok else EXIT_VIOLATIONS


def cmd_synthesize(args) -> int:
    cfg = _load_cfg(args.tech)
    ts = _load_tables(args.tables, cfg)
    spec = LinkSpec(length_slots=args.length, period=args.period,
                    jitter=args.jitter)
    result = synthesize_link(spec, ts, cfg)
    for line in result.log:
        print(f"try: {line}")
    if not result.valid:
        print(f"unsynthesizable: {'; '.join(result.reasons)}")
        return EXIT_VIOLATIONS
    with open(args.out, "w") as fh:
        fh.write(serialize_link(result.link) + "\n")
    w, b, r = result.counts
    print(f"result: {serialize_link(result.link)}")
    print(f"cost={result.cost:.6g} W={w} B={b} R={r} "
          f"iterations={result.iterations}")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _load_cfg(args.tech)
    ts = _load_tables(args.tables, cfg)
    link = _read_link(args.link)
    mode = LookupMode(args.mode)
    slew = args.launch_slew if args.launch_slew is not None else 4.0

    print("pass,index,table_arrival,golden_arrival,rel_err")
    worst = 0.0
    for purpose, corner, label in ((LookupPurpose.SETUP_MAX, Corner.MAX, "setup"),
                                   (LookupPurpose.HOLD_MIN, Corner.MIN, "hold")):
        table_side = analyze_path(link, ts, slew, mode, purpose)
        golden_side = golden_path_analyze(link, slew, corner, cfg)
        for i, (t, g) in enumerate(zip(table_side.arrivals, golden_side.arrivals)):
            err = (t - g) / g
            worst = max(worst, abs(err))
            print(f"{label},{i},{t:.9g},{g:.9g},{err:.3e}")
    print(f"max_rel_err={worst:.3e} tol={args.tol:.3e}")
    return EXIT_OK if worst <= args.tol else EXIT_VIOLATIONS


def cmd_dse(args) -> int:
    cfg = _load_cfg(args.tech)
    ts = _load_tables(args.tables, cfg)
    if args.candidates:
        with open(args.candidates) as fh:
            candidates = dse_mod.parse_candidates(fh.read())
    else:
        candidates = dse_mod.random_candidates(args.seed, args.count)
    result = dse_mod.dse_loop(candidates, ts, cfg)
    print("name,valid,cost,detail")
    for ev in result.ledger:
        detail = "" if ev.valid else "; ".join(ev.reasons)
        cost = f"{ev.cost:.6g}" if ev.valid else "inf"
        print(f"{ev.name},{int(ev.valid)},{cost},{detail}")
    print(f"best={result.best_name} cost={result.best_cost:.6g} "
          f"evaluated={result.evaluated}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gnoc",
                                 description="Grid-abutted NoC link timing "
                                             "and synthesis toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("characterize", help="build segment tables from a tech config")
    p.add_argument("--tech", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("analyze", help="timing-analyze a link sentence")
    p.add_argument("--tech", required=True)
    p.add_argument("--tables", required=True)
    p.add_argument("--link", required=True)
    p.add_argument("--period", type=float, required=True)
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--mode", choices=[m.value for m in LookupMode],
                   default=LookupMode.PESSIMISTIC.value)
    p.add_argument("--launch-slew", type=float, default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synthesize", help="synthesize a minimal-cost link")
    p.add_argument("--tech", required=True)
    p.add_argument("--tables", required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--period", type=float, required=True)
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("validate", help="compare table analysis against the oracle")
    p.add_argument("--tech", required=True)
    p.add_argument("--tables", required=True)
    p.add_argument("--link", required=True)
    p.add_argument("--period", type=float, default=1000.0)
    p.add_argument("--mode", choices=[m.value for m in LookupMode],
                   default=LookupMode.INTERPOLATE.value)
    p.add_argument("--launch-slew", type=float, default=None)
    p.add_argument("--tol", type=float, default=0.02)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("dse", help="evaluate chip-level candidates")
    p.add_argument("--tech", required=True)
    p.add_argument("--tables", required=True)
    p.add_argument("--candidates", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.set_defaults(func=cmd_dse)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NoValidCandidate, ClockUnsatisfiable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATIONS
    except (GnocError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # pragma: no cover - internal invariant failures
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
