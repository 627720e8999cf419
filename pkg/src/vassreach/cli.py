"""Command line: ``vassreach reach|oracle|hilbert|lps-enum|decompose``.

Exit codes: 0 Reachable, 1 UnreachableProven, 2 Unknown (or not found within a bound), 3 error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .diophantine import hilbert_basis, minimal_solutions
from .errors import VassError
from .io import emit_witness, parse_config, parse_vass
from .klm import KlmSequence
from .lps import enumerate_lps
from .oracle import bfs_oracle
from .solver import REACHABLE, UNREACHABLE, SolverConfig, Stats, expand, reach3

EXIT = {REACHABLE: 0, UNREACHABLE: 1}


def _instance(args):
    with open(args.input, encoding="utf-8") as fh:
        g = parse_vass(fh.read())
    src = parse_config(args.source, g.dim)
    dst = parse_config(args.target, g.dim)
    for c in (src, dst):
        if c.state not in g.states:
            raise VassError(f"unknown state {c.state!r}")
    return g, src, dst


def _matrix(text: str):
    return [[int(x) for x in row.split()] for row in text.split(";") if row.strip()]


def cmd_reach(args) -> int:
    g, src, dst = _instance(args)
    cfg = SolverConfig(c=args.c, depth_cap=args.max_depth, band_cap=args.band_cap,
                       oracle_box=args.oracle_box, fast_path=not args.no_fast_path,
                       cross_check=args.cross_check)
    res = reach3(g, src.state, src.location, dst.state, dst.location, cfg)
    if args.json:
        print(emit_witness(res, g, steps=args.steps))
    else:
        print(res.decision)
        if res.witness is not None:
            print("witness:", " ".join(g.transitions[t].name for t in res.witness))
        print("stats:", json.dumps(res.stats))
    return EXIT.get(res.decision, 2)


def cmd_oracle(args) -> int:
    g, src, dst = _instance(args)
    res = bfs_oracle(g, src.state, src.location, dst.state, dst.location, args.box)
    print(res.verdict + ("" if res.reachable else f" (exact={res.exact})"))
    if res.walk is not None:
        print("walk:", " ".join(g.transitions[t].name for t in res.walk))
    return 0 if res.reachable else (1 if res.exact else 2)


def cmd_hilbert(args) -> int:
    a = _matrix(args.matrix)
    if args.rhs is None:
        for v in hilbert_basis(a).vectors:
            print(" ".join(map(str, v)))
        return 0
    rhs = [int(x) for x in args.rhs.split()]
    s_r, s_0 = minimal_solutions(a, rhs)
    print("minimal:")
    for v in s_r:
        print(" ", " ".join(map(str, v)))
    print("homogeneous:")
    for v in s_0:
        print(" ", " ".join(map(str, v)))
    return 0


def cmd_lps_enum(args) -> int:
    with open(args.input, encoding="utf-8") as fh:
        g = parse_vass(fh.read())
    for s in enumerate_lps(g, args.from_state, args.to_state, args.length, args.cycles):
        print(s.serialize())
    return 0


def cmd_decompose(args) -> int:
    g, src, dst = _instance(args)
    xi = KlmSequence.single(src.location, g.with_endpoints(src.state, dst.state), dst.location)
    for _ in range(args.steps):
        kind, out = expand(xi, SolverConfig(band_cap=args.band_cap), Stats())
        if kind == "normal":
            print("normal:", xi.serialize())
            return 0
        print(f"{kind}: {len(out)} branch(es)")
        for child in out[: args.show]:
            print("  ", child.serialize())
        if not out:
            return 1
        xi = out[0]
    return 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="vassreach", description="Reachability in 3-dimensional VASS")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def instance_args(p):
        p.add_argument("--input", required=True, help="instance file")
        p.add_argument("--from", dest="source", required=True, help='source, e.g. "p 0 0 0"')
        p.add_argument("--to", dest="target", required=True, help='target, e.g. "q 1 2 3"')

    r = sub.add_parser("reach", help="decide reachability")
    instance_args(r)
    r.add_argument("--c", type=int, default=3)
    r.add_argument("--max-depth", type=int, default=200)
    r.add_argument("--band-cap", type=int, default=64)
    r.add_argument("--oracle-box", type=int, default=40)
    r.add_argument("--json", action="store_true")
    r.add_argument("--steps", action="store_true", help="include per-step locations in JSON")
    r.add_argument("--no-fast-path", action="store_true")
    r.add_argument("--cross-check", action="store_true")
    r.set_defaults(fn=cmd_reach)

    o = sub.add_parser("oracle", help="breadth-first search inside a box")
    instance_args(o)
    o.add_argument("--box", type=int, default=40)
    o.set_defaults(fn=cmd_oracle)

    h = sub.add_parser("hilbert", help="minimal solutions of A x = b")
    h.add_argument("--matrix", required=True, help='rows separated by ";", e.g. "1 -1; 2 -3"')
    h.add_argument("--rhs", help="right-hand side; omit for the homogeneous Hilbert basis")
    h.set_defaults(fn=cmd_hilbert)

    e = sub.add_parser("lps-enum", help="list linear path schemes")
    e.add_argument("--input", required=True)
    e.add_argument("--from-state", required=True)
    e.add_argument("--to-state", required=True)
    e.add_argument("--length", type=int, default=4)
    e.add_argument("--cycles", type=int, default=2)
    e.set_defaults(fn=cmd_lps_enum)

    d = sub.add_parser("decompose", help="show the first rewrites of the initial sequence")
    instance_args(d)
    d.add_argument("--steps", type=int, default=1)
    d.add_argument("--show", type=int, default=3)
    d.add_argument("--band-cap", type=int, default=64)
    d.set_defaults(fn=cmd_decompose)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (VassError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
