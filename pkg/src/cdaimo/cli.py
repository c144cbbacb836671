"""Command-line entry points.

Subcommands:
    check <file>              load and validate; exit 0 clean, 1 warnings, 2 errors
    reason <file>             saturate and print the assessment report
    seed [--dump]             show the built-in schema
    whatif <file> --set ...   report diff under ephemeral data overrides
    serve                     start the what-if HTTP service

Exit code 2 always means a hard failure with a positioned diagnostic on
stderr. Set CDAIMO_NO_COLOR to disable ANSI styling of text reports.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .metrics import report_jsonable
from .scenario import (
    ScenarioDoc,
    ScenarioError,
    format_scenario,
    format_traces,
    load_scenario,
    reason,
    whatif,
    write_report,
)
from .seed import MANIFEST, builtin_axioms, seed_kb
from . import scenario as scenario_mod
from . import dsl

EXIT_OK = 0
EXIT_WARNINGS = 1
EXIT_ERRORS = 2


def _color_enabled() -> bool:
    return sys.stdout.isatty() and not os.environ.get("CDAIMO_NO_COLOR")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        print(f"{path}: {e}", file=sys.stderr)
        raise SystemExit(EXIT_ERRORS)


def _diag(path: str, e: ScenarioError):
    print(f"{path}:{e.line}:{e.column}: {e.code}: {e.message}", file=sys.stderr)


def _emit(data: bytes, out: str | None):
    if out:
        Path(out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def cmd_check(args) -> int:
    text = _read(args.file)
    try:
        load = load_scenario(text)
    except ScenarioError as e:
        _diag(args.file, e)
        return EXIT_ERRORS
    for w in load.warnings:
        print(f"{args.file}: warning: {w.kind}: {w.message}", file=sys.stderr)
    if load.warnings:
        return EXIT_WARNINGS
    print(f"{args.file}: ok ({load.doc.id}: {len(load.kb.individuals)} individuals, "
          f"{len(load.axioms)} rules)")
    return EXIT_OK


def cmd_reason(args) -> int:
    text = _read(args.file)
    try:
        load = load_scenario(text)
    except ScenarioError as e:
        _diag(args.file, e)
        return EXIT_ERRORS
    result, report = reason(load)
    if args.format == "json":
        obj = report_jsonable(report)
        if args.trace:
            obj["traces"] = [
                {"step": s.id, "tree": _trace_tree(result, s)} for s in result.steps
            ]
        data = (json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode()
    else:
        data = write_report(report, "text", color=_color_enabled() and not args.output)
        if args.trace:
            trails = format_traces(result)
            data += ("\naudit trails\n" + (trails or "  (none)\n")).encode()
    _emit(data, args.output)
    return EXIT_OK


def _trace_tree(result, step):
    from .reasoner import IndividualCreated, LinkAdded, MembershipAdded, explain

    e = step.effect
    if isinstance(e, MembershipAdded):
        tree = explain(result, step.subject, ("class", e.cls))
    elif isinstance(e, LinkAdded):
        tree = explain(result, step.subject, ("link", e.prop, e.object))
    else:
        tree = explain(result, e.name, ("class", e.cls))
    return tree.to_jsonable()


def cmd_seed(args) -> int:
    if args.dump:
        doc = seed_doc()
        sys.stdout.write(format_scenario(doc))
        return EXIT_OK
    kb = seed_kb()
    print(
        f"seeded schema: {len(kb.classes)} classes, {len(kb.properties)} properties, "
        f"{len(kb.enums)} enums, {len(builtin_axioms())} built-in rules"
    )
    return EXIT_OK


def seed_doc() -> ScenarioDoc:
    """The seeded schema rendered as a scenario document (for diffing; it is
    not loadable, since loading would re-declare every seed name)."""
    directives = []
    for name, members in MANIFEST.enums:
        directives.append(scenario_mod.EnumDirective(name=name, members=tuple(members)))
    for name, parents in MANIFEST.classes:
        directives.append(
            scenario_mod.ClassDirective(name=name, parents=tuple(sorted(parents)))
        )
    for name, kind, rng, domain in MANIFEST.properties:
        directives.append(
            scenario_mod.PropertyDirective(
                name=name,
                kind=kind,
                range=rng if kind == "data" else tuple(sorted(rng)),
                domain=tuple(sorted(domain)),
            )
        )
    kb = seed_kb()
    for rule_id, ax in builtin_axioms():
        bound = dsl.bind_axiom(kb, ax)
        directives.append(
            scenario_mod.AxiomDirective(
                rule_id=rule_id, axiom=dsl.parse_axiom(dsl.render(bound))
            )
        )
    return ScenarioDoc(id="seed", directives=tuple(directives))


def cmd_whatif(args) -> int:
    text = _read(args.file)
    try:
        load = load_scenario(text)
        base, after, diff = whatif(load, args.set or [])
    except ScenarioError as e:
        _diag(args.file, e)
        return EXIT_ERRORS
    if args.format == "json":
        obj = {
            "base": report_jsonable(base),
            "whatif": report_jsonable(after),
            "diff": diff,
        }
        data = (json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode()
        _emit(data, args.output)
        return EXIT_OK
    if not diff:
        print("no report changes under the given overrides")
        return EXIT_OK
    print(f"report changes under {', '.join(args.set or [])}:")
    for d in diff:
        print(f"  {d['decision']}.{d['field']}: {_short(d['base'])} -> {_short(d['whatif'])}")
    return EXIT_OK


def _short(v) -> str:
    return json.dumps(v, sort_keys=True)


def cmd_serve(args) -> int:
    from .service import run_server

    run_server(bind=args.bind, port=args.port, session_ttl=args.session_ttl)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cdaimo", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="load and validate a scenario file")
    c.add_argument("file")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("reason", help="saturate a scenario and print the report")
    r.add_argument("file")
    r.add_argument("--trace", action="store_true", help="append full audit trails")
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.add_argument("-o", "--output", help="write the report to a file")
    r.set_defaults(func=cmd_reason)

    s = sub.add_parser("seed", help="show the built-in schema")
    s.add_argument("--dump", action="store_true", help="print it in scenario format")
    s.set_defaults(func=cmd_seed)

    w = sub.add_parser("whatif", help="report diff under ephemeral overrides")
    w.add_argument("file")
    w.add_argument(
        "--set",
        action="append",
        metavar="SUBJECT.PROPERTY=VALUE",
        help="replace a data value (repeatable)",
    )
    w.add_argument("--format", choices=("text", "json"), default="text")
    w.add_argument("-o", "--output", help="write the diff to a file")
    w.set_defaults(func=cmd_whatif)

    v = sub.add_parser("serve", help="start the what-if HTTP service")
    v.add_argument("--port", type=int, default=8787)
    v.add_argument("--bind", default="127.0.0.1")
    v.add_argument("--session-ttl", type=int, default=3600, help="idle expiry, seconds")
    v.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
