"""Command-line front door over .sill session files.

Subcommands: check, reduce, graph, translate, disentangle, internalize, fuzz.
Exit codes: 0 success / all-pass, 1 type or simulation failure, 2 usage or
parse error.  --json switches to JSON-lines output where available.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import bridge, congruence, cp, harness, hcp, reduction, surface
from . import types as ty
from .translate import cp_to_hcp
from .typecheck import (Derivation, TypeCheckError, check_cp, check_hcp,
                        derivation_json_lines, render_derivation)


def _load(path: str) -> surface.SessionFile:
    with open(path, "r", encoding="utf-8") as fh:
        return surface.parse_file(fh.read(), filename=path)


def _pick(f: surface.SessionFile, name: str | None, *, dialect: str | None = None) -> surface.Decl:
    decls = f.decls if name is None else [f.get(name)]
    if dialect is not None:
        decls = [d for d in decls if d.dialect == dialect]
    if not decls:
        raise KeyError(name or "<any>")
    return decls[0]


def _emit(records: list[dict]) -> None:
    for r in records:
        print(json.dumps(r, ensure_ascii=False))


def _check_decl(d: surface.Decl):
    if d.dialect == "cp":
        deriv = check_cp(d.term, d.env)
        return deriv, None
    deriv, part = check_hcp(d.term, d.env)
    return deriv, part


def cmd_check(args) -> int:
    f = _load(args.file)
    decls = f.decls if args.proc is None else [f.get(args.proc)]
    status = 0
    for d in decls:
        try:
            deriv, part = _check_decl(d)
        except TypeCheckError as e:
            if args.json:
                _emit([{"proc": d.name, **e.json_record()}])
            else:
                print(f"{e.render(args.file)}")
            status = 1
            continue
        shown = surface.print_env(d.env) if part is None else surface.print_hyper_env(part)
        if args.json:
            rec = {"proc": d.name, "ok": True, "env": shown}
            _emit([rec])
            if args.show_derivation:
                _emit(derivation_json_lines(deriv))
        else:
            print(f"⊢ {d.name} : {shown}")
            if args.show_derivation:
                print(render_derivation(deriv))
    return status


def cmd_reduce(args) -> int:
    f = _load(args.file)
    d = f.get(args.proc)
    try:
        _check_decl(d)
    except TypeCheckError as e:
        print(e.render(args.file))
        return 1
    fuel = args.fuel if args.fuel is not None else reduction.fuel_bound(d.term)
    trace = reduction.reduce(d.term, fuel=fuel)
    if args.json:
        _emit(reduction.trace_json_lines(trace))
    elif args.trace:
        print(reduction.render_trace(trace))
    else:
        print(f"{trace.status} after {len(trace.steps)} steps: {surface.print_term(trace.final)}")
    return 0 if trace.status == "canonical" else 1


def cmd_graph(args) -> int:
    f = _load(args.file)
    d = f.get(args.proc)
    try:
        _check_decl(d)
    except TypeCheckError as e:
        print(e.render(args.file))
        return 1
    g = reduction.reduction_graph(d.term, cap=args.cap)
    if args.dot:
        print("digraph reduction {")
        for i, t in enumerate(g.nodes):
            shape = "doublecircle" if i in g.terminals else "circle"
            label = surface.print_term(t).replace('"', "'")
            print(f'  n{i} [shape={shape}, label="{label}"];')
        for src, dst, rule, chan in g.edges:
            print(f'  n{src} -> n{dst} [label="{rule} {chan}"];')
        print("}")
    elif args.json:
        recs = [{"node": i, "term": surface.print_term(t), "terminal": i in g.terminals}
                for i, t in enumerate(g.nodes)]
        recs += [{"edge": [src, dst], "rule": rule, "channel": chan} for src, dst, rule, chan in g.edges]
        _emit(recs)
    else:
        for i, t in enumerate(g.nodes):
            mark = " (terminal)" if i in g.terminals else ""
            print(f"node {i}{mark}: {surface.print_term(t)}")
        for src, dst, rule, chan in g.edges:
            print(f"edge {src} -> {dst}: {rule} on {chan}")
        print(f"{len(g.nodes)} nodes, {len(g.edges)} edges, {len(g.terminals)} terminal")
    return 0


def cmd_translate(args) -> int:
    f = _load(args.file)
    d = f.get(args.proc)
    if d.dialect != "cp":
        print(f"{args.file}: {d.name} is not a CP declaration")
        return 2
    try:
        deriv = check_cp(d.term, d.env)
    except TypeCheckError as e:
        print(e.render(args.file))
        return 1
    image = cp_to_hcp(d.term)
    hd = bridge.translate_typed(deriv)
    if args.json:
        _emit([{"proc": d.name, "term": surface.print_term(image),
                "env": surface.print_hyper_env(hd.env)}])
    else:
        print(surface.print_term(image))
        if args.show_derivation:
            print(render_derivation(hd))
    return 0


def cmd_disentangle(args) -> int:
    f = _load(args.file)
    d = f.get(args.proc)
    if d.dialect != "hcp":
        print(f"{args.file}: {d.name} is not an HCP declaration")
        return 2
    try:
        deriv, part = check_hcp(d.term, d.env)
    except TypeCheckError as e:
        print(e.render(args.file))
        return 1
    res = bridge.disentangle(deriv)
    if args.json:
        recs = [{"component": i, "term": surface.print_term(c.term), "env": surface.print_env(c.env)}
                for i, c in enumerate(res.components)]
        recs.append({"recombined": surface.print_term(res.recombined)})
        _emit(recs)
    else:
        for c in res.components:
            print(f"⊢ {surface.print_term(c.term)} : {surface.print_env(c.env)}")
        print(f"recombined: {surface.print_term(res.recombined)}")
        if args.show_derivation:
            for c in res.components:
                print(render_derivation(c))
    return 0


def cmd_internalize(args) -> int:
    f = _load(args.file)
    d = f.get(args.proc)
    if d.dialect != "hcp":
        print(f"{args.file}: {d.name} is not an HCP declaration")
        return 2
    try:
        deriv, part = check_hcp(d.term, d.env)
    except TypeCheckError as e:
        print(e.render(args.file))
        return 1
    out = bridge.tens_internalize(deriv)
    if args.json:
        _emit([{"proc": d.name, "term": surface.print_term(out.term), "env": surface.print_env(out.env)}])
    else:
        print(f"⊢ {surface.print_term(out.term)} : {surface.print_env(out.env)}")
        if args.show_derivation:
            print(render_derivation(out))
    return 0


def cmd_fuzz(args) -> int:
    cfg = harness.GenConfig(seed=args.seed, count=args.count)
    suites = harness.SUITE_NAMES if args.suite == "all" else [args.suite]
    ok = True
    for name in suites:
        report = harness.run_suite(name, cfg)
        if args.json:
            _emit(report.json_lines())
        else:
            print(report.text())
        ok = ok and report.ok
    return 0 if ok else 1


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="sill", description="CP/HCP session-calculus toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="typecheck the declarations of a .sill file")
    p.add_argument("file")
    p.add_argument("--proc", default=None)
    p.add_argument("--show-derivation", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("reduce", help="run the deterministic reduction strategy")
    p.add_argument("file")
    p.add_argument("--proc", required=True)
    p.add_argument("--fuel", type=int, default=None)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("graph", help="explore the full reduction graph")
    p.add_argument("file")
    p.add_argument("--proc", required=True)
    p.add_argument("--cap", type=int, default=10000)
    p.add_argument("--dot", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_graph)

    p = sub.add_parser("translate", help="print the HCP image of a CP declaration")
    p.add_argument("file")
    p.add_argument("--proc", required=True)
    p.add_argument("--show-derivation", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("disentangle", help="split an HCP derivation into CP components")
    p.add_argument("file")
    p.add_argument("--proc", required=True)
    p.add_argument("--show-derivation", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_disentangle)

    p = sub.add_parser("internalize", help="collapse a hyper-environment to one tensor formula")
    p.add_argument("file")
    p.add_argument("--proc", required=True)
    p.add_argument("--show-derivation", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_internalize)

    p = sub.add_parser("fuzz", help="run a metatheory property suite")
    p.add_argument("--suite", default="all", choices=["all"] + harness.SUITE_NAMES)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_fuzz)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except surface.ParseError as e:
        print(str(e))
        return 2
    except (KeyError, FileNotFoundError) as e:
        print(f"error: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
