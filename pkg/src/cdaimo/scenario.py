"""Scenario text format, loader, and report serialization.

A scenario file is UTF-8, LF line endings, one directive per line, with `#`
comments. Directives apply in order on top of the built-in schema, so every
name must be declared before use. The grammar (EBNF):

    file       := { line }
    line       := comment | blank | directive
    directive  := "scenario" NAME
                | "class" NAME [ ":" NAME { NAME } ]
                | "enum" NAME NAME { "<" NAME }
                | "property" NAME "data" data-range [ "domain" NAME { NAME } ]
                | "property" NAME "object" [ "range" NAME { NAME } ]
                                           [ "domain" NAME { NAME } ]
                | "individual" NAME ":" NAME { NAME }
                | "data" NAME NAME literal
                | "object" NAME NAME NAME
                | "axiom" NAME axiom-text          ; rule-DSL, see dsl module
                | "config" "likelihood_bands" NUMBER NUMBER NUMBER NUMBER
                | "config" "disable_rule" NAME
    data-range := "string" | "int" | "double" | "bool" | "enum" NAME
    literal    := NUMBER | "true" | "false" | QUOTED_STRING | NAME

Names are matched case-insensitively against declared spellings and are
canonicalized on load. Loading is deterministic: identical bytes produce a
structurally equal result.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional, Union

from . import dsl
from .kb import (
    NS_CLASS,
    NS_ENUM,
    NS_INDIVIDUAL,
    NS_PROPERTY,
    BoolV,
    DoubleV,
    EnumV,
    IntV,
    KbError,
    KnowledgeBase,
    PropertyDef,
    StringV,
    Value,
    Violation,
    render_value,
)
from .metrics import (
    DEFAULT_LIKELIHOOD_CUTS,
    CDAReport,
    compose_report,
    report_jsonable,
)
from .reasoner import (
    IndividualCreated,
    LinkAdded,
    MembershipAdded,
    SaturationResult,
    explain,
    saturate,
)
from .seed import builtin_axioms, seed_kb

SCENARIO_EXTENSION = ".cdaimo"


class ScenarioError(Exception):
    """Positioned load/parse failure."""

    def __init__(self, line: int, column: int, code: str, message: str):
        self.line = line
        self.column = column
        self.code = code
        super().__init__(message)
        self.message = message

    def __str__(self):
        return f"{self.line}:{self.column}: {self.code}: {self.message}"


# ---------------------------------------------------------------------------
# Directives


@dataclass(frozen=True)
class ClassDirective:
    name: str
    parents: tuple[str, ...]
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class EnumDirective:
    name: str
    members: tuple[str, ...]
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class PropertyDirective:
    name: str
    kind: str  # "data" | "object"
    range: Union[str, tuple[str, ...]]
    domain: tuple[str, ...]
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class IndividualDirective:
    name: str
    classes: tuple[str, ...]
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class DataDirective:
    subject: str
    property: str
    literal: object  # parse-level value, typed against the range on load
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class ObjectDirective:
    subject: str
    property: str
    object: str
    line: int = field(compare=False, default=0)


@dataclass(frozen=True)
class AxiomDirective:
    rule_id: str
    axiom: dsl.Axiom
    line: int = field(compare=False, default=0)
    column: int = field(compare=False, default=0)


@dataclass(frozen=True)
class ConfigDirective:
    key: str
    args: tuple[str, ...]
    line: int = field(compare=False, default=0)


Directive = Union[
    ClassDirective,
    EnumDirective,
    PropertyDirective,
    IndividualDirective,
    DataDirective,
    ObjectDirective,
    AxiomDirective,
    ConfigDirective,
]


@dataclass(frozen=True)
class ScenarioDoc:
    id: str
    directives: tuple[Directive, ...]


@dataclass
class Config:
    likelihood_cuts: tuple[float, ...] = DEFAULT_LIKELIHOOD_CUTS
    disabled_rules: tuple[str, ...] = ()


@dataclass
class LoadResult:
    kb: KnowledgeBase
    axioms: list  # (rule_id, BoundAxiom), builtins first, disabled removed
    config: Config
    warnings: list[Violation]
    doc: ScenarioDoc


# ---------------------------------------------------------------------------
# Line tokenizer

_LINE_TOKEN_RE = re.compile(r'"(?:[^"\\\n]|\\.)*"?|[:<]|[^\s:<]+')
_NUMBER_RE = re.compile(r"^-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?$")
_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class _Line:
    def __init__(self, lineno: int, text: str):
        self.lineno = lineno
        self.tokens = [
            (m.group(), m.start() + 1) for m in _LINE_TOKEN_RE.finditer(text)
        ]
        self.i = 0

    def error(self, code: str, message: str, column: Optional[int] = None):
        if column is None:
            column = self.tokens[self.i][1] if self.i < len(self.tokens) else (
                self.tokens[-1][1] + len(self.tokens[-1][0]) if self.tokens else 1
            )
        raise ScenarioError(self.lineno, column, code, message)

    def done(self) -> bool:
        return self.i >= len(self.tokens)

    def peek(self) -> Optional[str]:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def take(self, what: str) -> tuple[str, int]:
        if self.done():
            self.error("SyntaxError", f"expected {what}")
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def name(self, what: str = "a name") -> tuple[str, int]:
        tok, col = self.take(what)
        if not _NAME_RE.match(tok):
            raise ScenarioError(self.lineno, col, "SyntaxError", f"expected {what}, found {tok!r}")
        return tok, col

    def names_until(self, stop_words: set[str]) -> list[tuple[str, int]]:
        out = []
        while not self.done() and self.peek() not in stop_words:
            out.append(self.name())
        return out

    def expect_end(self):
        if not self.done():
            self.error("SyntaxError", f"unexpected trailing {self.peek()!r}")


def _parse_literal(line: _Line) -> tuple[object, int]:
    tok, col = line.take("a literal")
    if tok.startswith('"'):
        if len(tok) < 2 or not tok.endswith('"'):
            raise ScenarioError(line.lineno, col, "SyntaxError", "unterminated string literal")
        body = tok[1:-1]
        out, i = [], 0
        while i < len(body):
            if body[i] == "\\":
                esc = body[i + 1] if i + 1 < len(body) else ""
                if esc not in ('"', "\\", "n"):
                    raise ScenarioError(
                        line.lineno, col + 1 + i, "SyntaxError", f"bad escape \\{esc}"
                    )
                out.append({'"': '"', "\\": "\\", "n": "\n"}[esc])
                i += 2
            else:
                out.append(body[i])
                i += 1
        return StringV("".join(out)), col
    if _NUMBER_RE.match(tok):
        if any(c in tok for c in ".eE"):
            return DoubleV(float(tok)), col
        return IntV(int(tok)), col
    if tok.lower() in ("true", "false"):
        return BoolV(tok.lower() == "true"), col
    if _NAME_RE.match(tok):
        return dsl.NameV(tok), col
    raise ScenarioError(line.lineno, col, "SyntaxError", f"not a literal: {tok!r}")


# ---------------------------------------------------------------------------
# Parsing


def parse_scenario(text: str) -> ScenarioDoc:
    scenario_id: Optional[str] = None
    directives: list[Directive] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        line = _Line(lineno, raw)
        keyword, col = line.take("a directive keyword")
        keyword = keyword.lower()
        if keyword == "scenario":
            if scenario_id is not None:
                line.error("SyntaxError", "duplicate scenario line", col)
            scenario_id = line.name("the scenario id")[0]
            line.expect_end()
            continue
        if scenario_id is None:
            raise ScenarioError(
                lineno, col, "SyntaxError", "the first directive must be 'scenario <id>'"
            )
        if keyword == "class":
            name = line.name("a class name")[0]
            parents: tuple[str, ...] = ()
            if not line.done():
                if line.take("':'")[0] != ":":
                    line.error("SyntaxError", "expected ':' before parent classes")
                got = line.names_until(set())
                if not got:
                    line.error("SyntaxError", "expected at least one parent after ':'")
                parents = tuple(sorted(t for t, _ in got))
            directives.append(ClassDirective(name=name, parents=parents, line=lineno))
        elif keyword == "enum":
            name = line.name("an enum name")[0]
            members = [line.name("an enum member")[0]]
            while not line.done():
                if line.take("'<'")[0] != "<":
                    line.error("SyntaxError", "enum members are separated by '<'")
                members.append(line.name("an enum member")[0])
            directives.append(EnumDirective(name=name, members=tuple(members), line=lineno))
        elif keyword == "property":
            directives.append(_parse_property(line))
        elif keyword == "individual":
            name = line.name("an individual name")[0]
            if line.take("':'")[0] != ":":
                line.error("SyntaxError", "expected ':' before the class list")
            got = line.names_until(set())
            if not got:
                line.error("SyntaxError", "expected at least one class")
            directives.append(
                IndividualDirective(
                    name=name, classes=tuple(sorted(t for t, _ in got)), line=lineno
                )
            )
        elif keyword == "data":
            subject = line.name("a subject individual")[0]
            prop = line.name("a property name")[0]
            literal, _ = _parse_literal(line)
            line.expect_end()
            directives.append(
                DataDirective(subject=subject, property=prop, literal=literal, line=lineno)
            )
        elif keyword == "object":
            subject = line.name("a subject individual")[0]
            prop = line.name("a property name")[0]
            obj = line.name("an object individual")[0]
            line.expect_end()
            directives.append(
                ObjectDirective(subject=subject, property=prop, object=obj, line=lineno)
            )
        elif keyword == "axiom":
            rule_id, _ = line.name("a rule id")
            if line.done():
                line.error("SyntaxError", "expected the axiom text")
            start_col = line.tokens[line.i][1]
            axiom_text = raw[start_col - 1 :]
            try:
                axiom = dsl.parse_axiom(axiom_text)
            except dsl.ParseError as e:
                raise ScenarioError(
                    lineno, start_col + e.offset, "SyntaxError", str(e)
                ) from e
            except dsl.IllegalHeadShape as e:
                raise ScenarioError(lineno, start_col, "IllegalHeadShape", str(e)) from e
            directives.append(
                AxiomDirective(rule_id=rule_id, axiom=axiom, line=lineno, column=start_col)
            )
        elif keyword == "config":
            key = line.name("a config key")[0]
            args = []
            while not line.done():
                args.append(line.take("a config argument")[0])
            directives.append(ConfigDirective(key=key, args=tuple(args), line=lineno))
        else:
            raise ScenarioError(
                lineno,
                col,
                "SyntaxError",
                f"unknown directive {keyword!r} (expected class, enum, property,"
                " individual, data, object, axiom, or config)",
            )
    if scenario_id is None:
        raise ScenarioError(1, 1, "SyntaxError", "missing 'scenario <id>' line")
    return ScenarioDoc(id=scenario_id, directives=tuple(directives))


def _parse_property(line: _Line) -> PropertyDirective:
    name = line.name("a property name")[0]
    kind, kcol = line.take("'data' or 'object'")
    kind = kind.lower()
    if kind == "data":
        rng, rcol = line.take("a range (string, int, double, bool, enum <name>)")
        rng = rng.lower()
        if rng == "enum":
            enum_name = line.name("an enum name")[0]
            range_spec: Union[str, tuple[str, ...]] = f"enum:{enum_name}"
        elif rng in ("string", "int", "double", "bool"):
            range_spec = rng
        else:
            raise ScenarioError(
                line.lineno, rcol, "SyntaxError", f"unknown data range {rng!r}"
            )
        domain: tuple[str, ...] = ()
        if not line.done():
            word, wcol = line.take("'domain'")
            if word.lower() != "domain":
                raise ScenarioError(line.lineno, wcol, "SyntaxError", "expected 'domain'")
            domain = tuple(sorted(t for t, _ in line.names_until(set())))
        line.expect_end()
        return PropertyDirective(
            name=name, kind="data", range=range_spec, domain=domain, line=line.lineno
        )
    if kind == "object":
        rng_classes: tuple[str, ...] = ()
        domain = ()
        while not line.done():
            word, wcol = line.take("'range' or 'domain'")
            if word.lower() == "range":
                rng_classes = tuple(sorted(t for t, _ in line.names_until({"domain"})))
            elif word.lower() == "domain":
                domain = tuple(sorted(t for t, _ in line.names_until({"range"})))
            else:
                raise ScenarioError(
                    line.lineno, wcol, "SyntaxError", "expected 'range' or 'domain'"
                )
        return PropertyDirective(
            name=name, kind="object", range=rng_classes, domain=domain, line=line.lineno
        )
    raise ScenarioError(
        line.lineno, kcol, "SyntaxError", f"property kind must be data or object, got {kind!r}"
    )


# ---------------------------------------------------------------------------
# Formatting


def format_scenario(doc: ScenarioDoc) -> str:
    lines = [f"scenario {doc.id}"]
    for d in doc.directives:
        if isinstance(d, ClassDirective):
            suffix = f" : {' '.join(d.parents)}" if d.parents else ""
            lines.append(f"class {d.name}{suffix}")
        elif isinstance(d, EnumDirective):
            lines.append(f"enum {d.name} {' < '.join(d.members)}")
        elif isinstance(d, PropertyDirective):
            if d.kind == "data":
                rng = d.range
                rng_text = f"enum {rng[5:]}" if rng.startswith("enum:") else rng
                parts = [f"property {d.name} data {rng_text}"]
            else:
                parts = [f"property {d.name} object"]
                if d.range:
                    parts.append(f"range {' '.join(d.range)}")
            if d.domain:
                parts.append(f"domain {' '.join(d.domain)}")
            lines.append(" ".join(parts))
        elif isinstance(d, IndividualDirective):
            lines.append(f"individual {d.name} : {' '.join(d.classes)}")
        elif isinstance(d, DataDirective):
            lines.append(f"data {d.subject} {d.property} {_format_literal(d.literal)}")
        elif isinstance(d, ObjectDirective):
            lines.append(f"object {d.subject} {d.property} {d.object}")
        elif isinstance(d, AxiomDirective):
            lines.append(f"axiom {d.rule_id} {dsl.render(d.axiom)}")
        elif isinstance(d, ConfigDirective):
            lines.append(f"config {d.key} {' '.join(d.args)}".rstrip())
        else:
            raise TypeError(f"unknown directive {d!r}")
    return "\n".join(lines) + "\n"


def _format_literal(v) -> str:
    if isinstance(v, dsl.NameV):
        return v.name
    return render_value(v)


# ---------------------------------------------------------------------------
# Loading


def load_scenario(text: str) -> LoadResult:
    """Apply a scenario document onto the seeded kb and bind all axioms.

    Raises ScenarioError (with position) on the first hard error; validation
    warnings are collected, not raised.
    """
    doc = parse_scenario(text)
    kb = seed_kb()
    config = Config()
    scenario_axioms: list[tuple[str, dsl.BoundAxiom]] = []
    rule_ids = {rid for rid, _ in builtin_axioms()}
    disable_requests: list[tuple[str, int]] = []

    def resolve(ns: str, name: str, line: int) -> str:
        try:
            return kb.resolve(ns, name)
        except KbError as e:
            raise ScenarioError(line, 1, e.code, str(e)) from e

    for d in doc.directives:
        try:
            if isinstance(d, ClassDirective):
                parents = [resolve(NS_CLASS, p, d.line) for p in d.parents]
                kb.declare_class(d.name, parents)
            elif isinstance(d, EnumDirective):
                kb.declare_enum(d.name, d.members)
            elif isinstance(d, PropertyDirective):
                domain = frozenset(resolve(NS_CLASS, c, d.line) for c in d.domain)
                if d.kind == "data":
                    rng = d.range
                    if rng.startswith("enum:"):
                        rng = "enum:" + resolve(NS_ENUM, rng[5:], d.line)
                    kb.declare_property(
                        PropertyDef(name=d.name, kind="data", range=rng, domain=domain)
                    )
                else:
                    rng_classes = frozenset(resolve(NS_CLASS, c, d.line) for c in d.range)
                    kb.declare_property(
                        PropertyDef(
                            name=d.name, kind="object", range=rng_classes, domain=domain
                        )
                    )
            elif isinstance(d, IndividualDirective):
                classes = [resolve(NS_CLASS, c, d.line) for c in d.classes]
                kb.assert_individual(d.name, classes, source_line=d.line)
            elif isinstance(d, DataDirective):
                subject = resolve(NS_INDIVIDUAL, d.subject, d.line)
                prop = resolve(NS_PROPERTY, d.property, d.line)
                value = _type_literal(kb, prop, d.literal, d.line)
                kb.assert_data(subject, prop, value, origin=("line", d.line))
            elif isinstance(d, ObjectDirective):
                subject = resolve(NS_INDIVIDUAL, d.subject, d.line)
                prop = resolve(NS_PROPERTY, d.property, d.line)
                obj = resolve(NS_INDIVIDUAL, d.object, d.line)
                kb.assert_object(subject, prop, obj, origin=("line", d.line))
            elif isinstance(d, AxiomDirective):
                if d.rule_id in rule_ids:
                    raise ScenarioError(
                        d.line, 1, "DuplicateName", f"rule id {d.rule_id!r} already used"
                    )
                try:
                    bound = dsl.bind_axiom(kb, d.axiom)
                except dsl.BindErrors as e:
                    first = e.issues[0]
                    raise ScenarioError(d.line, d.column, first.code, first.message) from e
                rule_ids.add(d.rule_id)
                scenario_axioms.append((d.rule_id, bound))
            elif isinstance(d, ConfigDirective):
                _apply_config(config, d, disable_requests)
        except ScenarioError:
            raise
        except KbError as e:
            raise ScenarioError(d.line, 1, e.code, str(e)) from e

    for rid, line in disable_requests:
        if rid not in rule_ids:
            raise ScenarioError(line, 1, "UnknownName", f"cannot disable unknown rule {rid!r}")
    config.disabled_rules = tuple(rid for rid, _ in disable_requests)

    axioms: list[tuple[str, dsl.BoundAxiom]] = []
    for rid, ax in builtin_axioms():
        if rid not in config.disabled_rules:
            axioms.append((rid, dsl.bind_axiom(kb, ax)))
    for rid, bound in scenario_axioms:
        if rid not in config.disabled_rules:
            axioms.append((rid, bound))

    violations = kb.validate()
    errors = [v for v in violations if v.severity == "error"]
    if errors:
        first = errors[0]
        raise ScenarioError(0, 0, first.kind, first.message)
    warnings = [v for v in violations if v.severity == "warning"]
    return LoadResult(kb=kb, axioms=axioms, config=config, warnings=warnings, doc=doc)


def _type_literal(kb: KnowledgeBase, prop: str, literal, line: int) -> Value:
    """Type a parse-level literal against the property's declared range."""
    pdef = kb.properties[prop]
    if pdef.kind != "data":
        raise ScenarioError(
            line, 1, "KindMismatch", f"{prop} is an object property; use an 'object' directive"
        )
    rng = pdef.range
    v = literal
    if rng == "double" and isinstance(v, IntV):
        v = DoubleV(float(v.value))
    if rng.startswith("enum:"):
        enum_name = rng[5:]
        text = None
        if isinstance(v, dsl.NameV):
            text = v.name
        elif isinstance(v, StringV):
            text = v.text
        if text is None:
            raise ScenarioError(
                line, 1, "KindMismatch",
                f"{prop} expects a member of enum {enum_name}, got {_format_literal(v)}",
            )
        try:
            member = kb.resolve_enum_member(enum_name, text)
        except KbError as e:
            raise ScenarioError(line, 1, e.code, str(e)) from e
        return EnumV(enum_name=enum_name, member=member)
    if isinstance(v, dsl.NameV):
        if rng == "string":
            return StringV(v.name)  # bare single-word strings are accepted
        raise ScenarioError(
            line, 1, "KindMismatch", f"{prop} expects {rng}, got the name {v.name!r}"
        )
    return v


def _apply_config(config: Config, d: ConfigDirective, disable_requests: list):
    if d.key == "likelihood_bands":
        if len(d.args) != 4:
            raise ScenarioError(
                d.line, 1, "SyntaxError", "likelihood_bands needs exactly 4 cut points"
            )
        try:
            cuts = tuple(float(a) for a in d.args)
        except ValueError as e:
            raise ScenarioError(d.line, 1, "SyntaxError", f"bad cut point: {e}") from e
        if list(cuts) != sorted(cuts) or cuts[0] <= 0.0 or cuts[-1] >= 1.0 or len(set(cuts)) != 4:
            raise ScenarioError(
                d.line, 1, "SyntaxError", "cut points must be strictly ascending within (0, 1)"
            )
        config.likelihood_cuts = cuts
    elif d.key == "disable_rule":
        if len(d.args) != 1:
            raise ScenarioError(d.line, 1, "SyntaxError", "disable_rule takes one rule id")
        disable_requests.append((d.args[0], d.line))
    else:
        raise ScenarioError(d.line, 1, "SyntaxError", f"unknown config key {d.key!r}")


# ---------------------------------------------------------------------------
# Reasoning pipeline helpers


def reason(load: LoadResult) -> tuple[SaturationResult, CDAReport]:
    result = saturate(load.kb, load.axioms)
    report = compose_report(
        result,
        load.doc.id,
        likelihood_cuts=load.config.likelihood_cuts,
        disabled_rules=load.config.disabled_rules,
    )
    return result, report


def parse_override(text: str) -> tuple[str, str, object]:
    """Parse 'subject.property=value' into its parts (value stays raw)."""
    m = re.match(r"^([A-Za-z_][A-Za-z0-9_]*)\.([A-Za-z_][A-Za-z0-9_]*)=(.+)$", text)
    if not m:
        raise ScenarioError(
            0, 0, "SyntaxError", f"override must look like subject.property=value: {text!r}"
        )
    line = _Line(0, m.group(3))
    literal, _ = _parse_literal(line)
    line.expect_end()
    return m.group(1), m.group(2), literal


def apply_overrides(load: LoadResult, overrides: list[str]) -> KnowledgeBase:
    """What-if kb: each override replaces the subject's current data
    assertions for that property."""
    kb = load.kb.clone()
    for text in overrides:
        subject, prop, literal = parse_override(text)
        try:
            subject = kb.resolve(NS_INDIVIDUAL, subject)
            prop = kb.resolve(NS_PROPERTY, prop)
        except KbError as e:
            raise ScenarioError(0, 0, e.code, f"override {text!r}: {e}") from e
        value = _type_literal(kb, prop, literal, 0)
        kb.replace_data(subject, prop, value, origin=("api",))
    return kb


def whatif(load: LoadResult, overrides: list[str]):
    """(base report, what-if report, field diff) without touching `load`."""
    _, base_report = reason(load)
    kb2 = apply_overrides(load, overrides)
    result2 = saturate(kb2, load.axioms)
    whatif_report = compose_report(
        result2,
        load.doc.id,
        likelihood_cuts=load.config.likelihood_cuts,
        disabled_rules=load.config.disabled_rules,
    )
    return base_report, whatif_report, diff_reports(base_report, whatif_report)


_DIFF_FIELDS = (
    "collateral_risk_flag",
    "mitigation_required",
    "escalated",
    "severity_raw",
    "severity_reported",
    "likelihood",
    "likelihood_band",
    "data_quality",
    "engagements",
    "effects",
    "mitigation_via",
)


def diff_reports(base: CDAReport, other: CDAReport) -> list[dict]:
    """Field-level differences between two reports, keyed by decision."""
    a = {e["decision"]: e for e in report_jsonable(base)["decisions"]}
    b = {e["decision"]: e for e in report_jsonable(other)["decisions"]}
    out: list[dict] = []
    for decision in sorted(set(a) | set(b)):
        if decision not in a or decision not in b:
            out.append(
                {
                    "decision": decision,
                    "field": "present",
                    "base": decision in a,
                    "whatif": decision in b,
                }
            )
            continue
        for f in _DIFF_FIELDS:
            if a[decision][f] != b[decision][f]:
                out.append(
                    {
                        "decision": decision,
                        "field": f,
                        "base": a[decision][f],
                        "whatif": b[decision][f],
                    }
                )
    return out


# ---------------------------------------------------------------------------
# Report serialization


def write_report(report: CDAReport, fmt: str, color: bool = False) -> bytes:
    """Serialize a report. 'machine' is canonical JSON (sorted keys, LF,
    UTF-8, trailing newline); 'text' is the human-readable layout."""
    if fmt in ("machine", "json"):
        doc = json.dumps(report_jsonable(report), sort_keys=True, indent=2, ensure_ascii=False)
        return (doc + "\n").encode("utf-8")
    if fmt == "text":
        return _text_report(report, color).encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")


def _ansi(color: bool, code: str, text: str) -> str:
    return f"\x1b[{code}m{text}\x1b[0m" if color else text


def _text_report(report: CDAReport, color: bool) -> str:
    bold = lambda s: _ansi(color, "1", s)
    red = lambda s: _ansi(color, "31", s)
    green = lambda s: _ansi(color, "32", s)
    flag = lambda b: red("YES") if b else green("no")

    lines = [bold(f"CDA assessment report: {report.scenario}")]
    if not report.entries:
        lines.append("  (no assessment decisions in scenario)")
    for e in report.entries:
        lines.append("")
        lines.append(bold(f"decision {e.decision}"))
        lines.append(f"  collateral damage risk: {flag(e.collateral_risk_flag)}")
        mit = f"  mitigation required:    {flag(e.mitigation_required)}"
        if e.mitigation_via:
            mit += f"  (via {', '.join(e.mitigation_via)})"
        lines.append(mit)
        lines.append(f"  escalated:              {flag(e.escalated)}")
        if e.severity_raw is not None:
            sev = e.severity_raw
            if e.severity_reported != e.severity_raw:
                sev += f" -> {e.severity_reported} (escalation promotion)"
            lines.append(f"  severity:               {sev}")
        if e.likelihood is not None:
            lines.append(f"  likelihood:             {e.likelihood!r} ({e.likelihood_band})")
        if e.data_quality is not None:
            lines.append(f"  data quality:           {e.data_quality!r}")
        if e.engagements:
            lines.append(f"  engagements:            {', '.join(e.engagements)}")
            for name in e.engagements:
                m = e.engagement_metrics[name]
                bits = []
                if m.temporal:
                    bits.append(f"temporal={m.temporal}")
                if m.spatial:
                    bits.append(f"spatial={m.spatial}")
                if m.force:
                    bits.append(f"force={'|'.join(m.force)}")
                if m.severity:
                    bits.append(f"severity={m.severity}")
                if m.likelihood is not None:
                    bits.append(f"likelihood={m.likelihood!r}")
                if m.data_quality is not None:
                    bits.append(f"data_quality={m.data_quality!r}")
                lines.append(f"    {name}: {' '.join(bits) if bits else '(no metrics)'}")
        if e.effects:
            lines.append("  effects:")
            for eff in e.effects:
                lines.append(f"    {eff['individual']} ({', '.join(eff['classes'])})")
        lines.append(
            f"  audit steps:            {', '.join(str(i) for i in e.audit_steps) or '(none)'}"
        )
    lines.append("")
    lines.append(bold("inference steps"))
    if not report.steps:
        lines.append("  (none)")
    for s in report.steps:
        lines.append(f"  {s.describe()}")
    return "\n".join(lines) + "\n"


def format_traces(result: SaturationResult) -> str:
    """Full audit trails: one explain tree per inference step."""
    blocks = []
    for s in result.steps:
        e = s.effect
        if isinstance(e, MembershipAdded):
            tree = explain(result, s.subject, ("class", e.cls))
        elif isinstance(e, LinkAdded):
            tree = explain(result, s.subject, ("link", e.prop, e.object))
        else:
            tree = explain(result, e.name, ("class", e.cls))
        blocks.append(s.describe() + "\n" + tree.format(indent=1))
    return "\n".join(blocks) + ("\n" if blocks else "")


def parse_fact_query(kb: KnowledgeBase, text: str) -> tuple[str, tuple]:
    """Parse an explain query: '<ind> is <Class>' or '<subj> <prop> <value>'.

    The three-token form resolves to a link fact for object properties and a
    data fact for data properties.
    """
    line = _Line(0, text)
    try:
        ind = kb.resolve(NS_INDIVIDUAL, line.name("an individual")[0])
        word, _ = line.take("'is' or a property name")
        if word.lower() == "is":
            cls = kb.resolve(NS_CLASS, line.name("a class")[0])
            line.expect_end()
            return ind, ("class", cls)
        prop = kb.resolve(NS_PROPERTY, word)
        if kb.properties[prop].kind == "object":
            obj = kb.resolve(NS_INDIVIDUAL, line.name("an object individual")[0])
            line.expect_end()
            return ind, ("link", prop, obj)
        literal, _ = _parse_literal(line)
        line.expect_end()
        return ind, ("data", prop, _type_literal(kb, prop, literal, 0))
    except KbError as e:
        raise ScenarioError(0, 0, e.code, str(e)) from e
