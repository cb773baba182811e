"""Command-line entry point.

Exit codes: 0 success, 1 undecided/holdouts/failed verification, 2 usage
error.  Results go to stdout or ``--out``; progress goes to stderr.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import far, wfar
from .diagram import DiagramSpec, render_spacetime
from .machine import Halted, MachineFormatError, parse_machine, simulate, tm_to_1rb, tnf_normalize
from .pipeline import (BUILTIN_NAMES, grid_search_repwl, resolve_pipeline, run_pipeline,
                       run_value)
from .verdict import HALT, UNKNOWN

JOBS_ENV = "BUSYBEAVER_JOBS"


def default_jobs() -> int:
    env = os.environ.get(JOBS_ENV)
    if env:
        return max(1, int(env))
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)


def _machine(text):
    try:
        return parse_machine(text)
    except (MachineFormatError, ValueError) as e:
        raise argparse.ArgumentTypeError(str(e))


def _emit(args, text):
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n")
    else:
        print(text)


def cmd_enumerate(args):
    pl = resolve_pipeline(args.pipeline)
    n = args.states or (pl.dims[0] if pl.dims else None)
    s = args.symbols or (pl.dims[1] if pl.dims else 2)
    if n is None:
        raise SystemExit("enumerate: --states is required for a pipeline file")
    if args.symbol_order:
        pl.symbol_order = args.symbol_order

    def progress(k):
        print(f"... {k:,d} machines", file=sys.stderr, flush=True)
    out = open(args.out, "w") if args.out else None
    try:
        summary = run_value(n, s, pl, jobs=args.jobs, out=out, limit=args.limit, progress=progress)
    finally:
        if out:
            out.close()
    print(summary.to_text())
    if args.summary_json:
        Path(args.summary_json).write_text(summary.to_json() + "\n")
    return 1 if summary.holdouts else 0


def cmd_decide(args):
    pl = resolve_pipeline(args.pipeline)
    rec = run_pipeline(args.machine, pl.stages, pl.tables)
    line = f"{rec.status},{rec.decider_id}"
    if rec.status == HALT:
        line += f",steps={rec.steps}"
        print(f"sigma={rec.sigma} space={rec.space}", file=sys.stderr)
    print(line)
    return 1 if rec.status == UNKNOWN else 0


def cmd_simulate(args):
    out = simulate(args.machine, args.max_steps)
    if isinstance(out, Halted):
        print(f"halt,steps={out.steps},sigma={out.sigma},space={out.space}")
        return 0
    print(f"running,steps={out.steps}")
    return 1


def cmd_normalize(args):
    if args.one_rb:
        red = tm_to_1rb(args.machine)
        if red is None:
            print("no 1RB reduction", file=sys.stderr)
            return 1
        print(red)
        return 0
    print(tnf_normalize(args.machine, symbol_order=args.symbol_order))
    return 0


def cmd_render(args):
    data = render_spacetime(args.machine, DiagramSpec(args.steps, args.width, args.offset,
                                                      args.colored))
    Path(args.out).write_bytes(data)
    return 0


def cmd_verify_far(args):
    cert = far.NfaCertificate.from_json(Path(args.cert).read_text())
    res = far.check_far(args.machine, cert)
    print(res)
    return 0 if res.verified else 1


def cmd_verify_wfar(args):
    cert = wfar.WfarCertificate.from_json(Path(args.cert).read_text())
    res = wfar.check_wfar(args.machine, cert, max_classes=args.max_classes)
    print(res)
    if args.show_classes and res.verified:
        for c in res.closure.members():
            print(" ", c.show())
    return 0 if res.verified else 1


def cmd_search(args):
    if args.method == "repwl-grid":
        found = grid_search_repwl(args.machine, range(1, args.l_max + 1), range(2, args.t_max + 1),
                                  args.block_budget, args.max_nodes)
        if found is None:
            print("none")
            return 1
        print(f"l={found[0]} T={found[1]}")
        return 0
    cert = far.search_far(args.machine, args.max_dfa_states, args.budget)
    if cert is None:
        print("none")
        return 1
    _emit(args, cert.to_json(args.machine))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="busybeaver", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    pipeline_help = f"built-in ({', '.join(BUILTIN_NAMES)}) or config file path (default: %(default)s)"

    e = sub.add_parser("enumerate", help="enumerate TNF machines and decide each one")
    e.add_argument("--states", type=int, help="number of states (default: from the pipeline)")
    e.add_argument("--symbols", type=int, help="number of symbols (default: from the pipeline, else 2)")
    e.add_argument("--pipeline", default="s4", help=pipeline_help)
    e.add_argument("--symbol-order", choices=["strict", "quasi"],
                   help="override the pipeline's symbol ordering")
    e.add_argument("--out", help="record list output path (default: none)")
    e.add_argument("--summary-json", help="write the JSON summary here (default: none)")
    e.add_argument("--limit", type=int, help="stop after this many machines (default: no limit)")
    e.add_argument("--jobs", type=int, default=default_jobs(),
                   help=f"worker processes (default: ${JOBS_ENV} or available cores)")
    e.set_defaults(func=cmd_enumerate)

    d = sub.add_parser("decide", help="decide one machine")
    d.add_argument("--machine", type=_machine, required=True)
    d.add_argument("--pipeline", default="s5-partial", help=pipeline_help)
    d.set_defaults(func=cmd_decide)

    s = sub.add_parser("simulate", help="run one machine from the blank tape")
    s.add_argument("--machine", type=_machine, required=True)
    s.add_argument("--max-steps", type=int, default=47_176_870, help="step bound (default: %(default)s)")
    s.set_defaults(func=cmd_simulate)

    n = sub.add_parser("normalize", help="print the tree normal form of a machine")
    n.add_argument("--machine", type=_machine, required=True)
    n.add_argument("--symbol-order", choices=["strict", "quasi"], default="strict",
                   help="rename non-zero symbols too (strict) or not (default: %(default)s)")
    n.add_argument("--1rb", dest="one_rb", action="store_true",
                   help="print the 1RB reduction instead")
    n.set_defaults(func=cmd_normalize)

    r = sub.add_parser("render", help="write a space-time diagram (PGM, or PPM with --colored)")
    r.add_argument("--machine", type=_machine, required=True)
    r.add_argument("--steps", type=int, default=1000, help="default: %(default)s")
    r.add_argument("--width", type=int, default=400, help="default: %(default)s")
    r.add_argument("--offset", type=int, default=0,
                   help="shift of the starting cell from the centre (default: %(default)s)")
    r.add_argument("--colored", action="store_true", help="paint the head in state colors")
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_render)

    for name, fn in (("verify-far", cmd_verify_far), ("verify-wfar", cmd_verify_wfar)):
        v = sub.add_parser(name, help=f"check a {name[7:].upper()} certificate")
        v.add_argument("--machine", type=_machine, required=True)
        v.add_argument("--cert", required=True, help="certificate JSON file")
        if name == "verify-wfar":
            v.add_argument("--max-classes", type=int, default=10**6, help="default: %(default)s")
            v.add_argument("--show-classes", action="store_true")
        v.set_defaults(func=fn)

    q = sub.add_parser("search", help="search for decider parameters or certificates")
    q.add_argument("method", choices=["repwl-grid", "far"])
    q.add_argument("--machine", type=_machine, required=True)
    q.add_argument("--l-max", type=int, default=38, help="repwl-grid: default %(default)s")
    q.add_argument("--t-max", type=int, default=4, help="repwl-grid: default %(default)s")
    q.add_argument("--block-budget", type=int, default=320, help="repwl-grid: default %(default)s")
    q.add_argument("--max-nodes", type=int, default=150_001, help="repwl-grid: default %(default)s")
    q.add_argument("--max-dfa-states", type=int, default=6, help="far: default %(default)s")
    q.add_argument("--budget", type=int, default=100_000, help="far: DFAs tried (default %(default)s)")
    q.add_argument("--out", help="far: certificate output path (default: stdout)")
    q.set_defaults(func=cmd_search)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        parser.print_help(sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
