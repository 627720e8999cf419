"""Text format for VASS instances and JSON witnesses.

Instance files::

    dim 3
    state p
    state q
    init p
    final p
    trans t1 p q 0 -1 -2

``#`` starts a comment. Configurations are written ``"p 1 2 3"``.
"""
from __future__ import annotations

import json

from .core import Configuration, Domain, Path, VassGraph, run_path
from .errors import ParseError


def _ints(tokens, line, col0, what):
    out = []
    for j, tok in enumerate(tokens):
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError(f"{what}: expected an integer, got {tok!r}", line, col0 + j) from None
    return tuple(out)


def parse_vass(text: str) -> VassGraph:
    dim = None
    states: list[str] = []
    init = final = None
    trans = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = line.split()
        if not toks:
            continue
        kw, args = toks[0], toks[1:]
        if kw == "dim":
            if dim is not None or len(args) != 1:
                raise ParseError("expected one 'dim <n>' line", ln, 1)
            dim = _ints(args, ln, 2, "dim")[0]
            if dim <= 0:
                raise ParseError("dimension must be positive", ln, 2)
        elif dim is None:
            raise ParseError("the first line must be 'dim <n>'", ln, 1)
        elif kw == "state":
            if len(args) != 1:
                raise ParseError("expected 'state <name>'", ln, 1)
            if args[0] in states:
                raise ParseError(f"duplicate state {args[0]!r}", ln, 2)
            states.append(args[0])
        elif kw in ("init", "final"):
            if len(args) != 1:
                raise ParseError(f"expected '{kw} <name>'", ln, 1)
            if kw == "init":
                init = args[0]
            else:
                final = args[0]
        elif kw == "trans":
            if len(args) != 3 + dim:
                raise ParseError(f"expected 'trans <id> <src> <dst>' and {dim} integers", ln, 1)
            name, src, dst = args[:3]
            if any(name == t[0] for t in trans):
                raise ParseError(f"duplicate transition id {name!r}", ln, 2)
            trans.append((name, src, dst, _ints(args[3:], ln, 5, "displacement"), ln))
        else:
            raise ParseError(f"unknown keyword {kw!r}", ln, 1)
    if dim is None:
        raise ParseError("missing 'dim' line", 1, 1)
    if not states:
        raise ParseError("no states declared", 1, 1)
    for name, src, dst, _, ln in trans:
        for s, col in ((src, 3), (dst, 4)):
            if s not in states:
                raise ParseError(f"unknown state {s!r}", ln, col)
    for s in (init, final):
        if s is not None and s not in states:
            raise ParseError(f"unknown state {s!r}")
    return VassGraph.build(dim, states, [t[:4] for t in trans], init or states[0], final or states[0])


def emit_vass(graph: VassGraph) -> str:
    """Canonical text of ``graph``; ``parse_vass(emit_vass(g)) == g`` for parsed graphs."""
    lines = [f"dim {graph.dim}"]
    lines += [f"state {s}" for s in graph.states]
    lines += [f"init {graph.q_in}", f"final {graph.q_out}"]
    for t in graph.transitions:
        lines.append(" ".join(["trans", t.name or f"t{t.id}", t.src, t.dst, *map(str, t.delta)]))
    return "\n".join(lines) + "\n"


def parse_config(text: str, dim: int | None = None) -> Configuration:
    toks = text.split()
    if not toks:
        raise ParseError("empty configuration", 1, 1)
    loc = _ints(toks[1:], 1, 2, "location")
    if dim is not None and len(loc) != dim:
        raise ParseError(f"expected {dim} coordinates, got {len(loc)}", 1, 2)
    if any(x < 0 for x in loc):
        raise ParseError("locations must be nonnegative", 1, 2)
    return Configuration(toks[0], loc)


def parse_query(text: str, dim: int | None = None) -> tuple[Configuration, Configuration]:
    """Two lines ``from <state> <coords>`` and ``to <state> <coords>``."""
    found = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        if toks[0] not in ("from", "to") or toks[0] in found:
            raise ParseError("expected one 'from' line and one 'to' line", ln, 1)
        try:
            found[toks[0]] = parse_config(" ".join(toks[1:]), dim)
        except ParseError as e:
            raise ParseError(str(e).split(": ", 1)[-1], ln, (e.column or 1) + 1) from None
    if set(found) != {"from", "to"}:
        raise ParseError("query needs both 'from' and 'to'")
    return found["from"], found["to"]


def emit_witness(result, graph: VassGraph, steps: bool = False) -> str:
    """JSON for a solver result; transitions are named by their ids in the instance file."""
    w = None
    if result.witness is not None:
        w = {"transitions": [graph.transitions[t].name or str(t) for t in result.witness],
             "start": [result.start.state, *result.start.location],
             "end": [result.end.state, *result.end.location]}
        if steps:
            cur = result.start
            locs = [[cur.state, *cur.location]]
            for t in result.witness:
                cur = run_path(cur, Path(graph, (t,), cur.state), Domain.NAT)
                locs.append([cur.state, *cur.location])
            w["steps"] = locs
    doc = {"decision": result.decision, "witness": w, "bound_relative": result.bound_relative,
           "stats": result.stats}
    return json.dumps(doc, indent=2)


def read_witness(text: str, graph: VassGraph) -> tuple[int, ...]:
    """Transition ids of a JSON witness (inverse of :func:`emit_witness`)."""
    doc = json.loads(text)
    if doc.get("witness") is None:
        return ()
    by_name = {t.name: t.id for t in graph.transitions}
    return tuple(by_name[n] for n in doc["witness"]["transitions"])
