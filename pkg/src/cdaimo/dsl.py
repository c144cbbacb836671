"""Rule-expression language: parser, AST, canonical printer, and binder.

Grammar (EBNF, keywords case-insensitive, names case-preserved):

    axiom   := expr 'SubClassOf' expr
    expr    := term ('and' term)*
    term    := NAME
             | NAME 'some' '(' expr ')'
             | NAME 'some' NAME
             | '(' expr ')'
             | NAME facet
    facet   := ('min' | 'max') literal
             | 'value' literal
    literal := NUMBER | BOOL | QUOTED_STRING | NAME

Conjunctions are flattened (an `and` list never directly contains another),
`min`/`max` facets are inclusive, and an axiom's right-hand side must be a
bare class name or a single existential with a named filler; those are the
only head shapes the reasoner can materialize.

Parsing knows nothing about any knowledge base. bind() resolves every name
against a kb (case-insensitively, canonicalizing the spelling), checks that
property kinds match the node kinds, and types facet literals against the
property ranges, reporting all problems at once with node paths.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .kb import (
    NS_CLASS,
    NS_PROPERTY,
    BoolV,
    DoubleV,
    EnumV,
    IntV,
    KnowledgeBase,
    StringV,
    UnknownName,
    Value,
    render_value,
)

KEYWORDS = {"and", "some", "min", "max", "value", "subclassof", "true", "false"}


@dataclass(frozen=True)
class NameV:
    """A bare-name literal; resolved to an enum member (or rejected) at bind time."""

    name: str


LiteralValue = Union[StringV, IntV, DoubleV, BoolV, NameV, EnumV]


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Named:
    name: str


@dataclass(frozen=True)
class And:
    parts: tuple  # length >= 2, no nested And

    def __post_init__(self):
        assert len(self.parts) >= 2
        assert not any(isinstance(p, And) for p in self.parts)


@dataclass(frozen=True)
class ObjectSome:
    prop: str
    filler: "ClassExpr"


@dataclass(frozen=True)
class MinInclusive:
    value: LiteralValue


@dataclass(frozen=True)
class MaxInclusive:
    value: LiteralValue


@dataclass(frozen=True)
class ValueEq:
    value: LiteralValue


Facet = Union[MinInclusive, MaxInclusive, ValueEq]


@dataclass(frozen=True)
class DataSome:
    prop: str
    facet: Facet


ClassExpr = Union[Named, And, ObjectSome, DataSome]


@dataclass(frozen=True)
class Axiom:
    lhs: ClassExpr
    rhs: ClassExpr


def conjoin(parts) -> ClassExpr:
    """Build a flattened conjunction; a single part collapses to itself."""
    flat: list[ClassExpr] = []
    for p in parts:
        if isinstance(p, And):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if len(flat) == 1:
        return flat[0]
    return And(parts=tuple(flat))


# ---------------------------------------------------------------------------
# Errors


class ParseError(Exception):
    def __init__(self, offset: int, line: int, column: int, expected: str, found: str):
        self.offset = offset
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found
        super().__init__(
            f"{line}:{column}: expected {expected}, found {found or 'end of input'}"
        )


class IllegalHeadShape(Exception):
    """Axiom head is neither a named class nor a single `p some C`."""

    code = "IllegalHeadShape"


@dataclass(frozen=True)
class BindIssue:
    code: str  # UnknownName | KindMismatch | EnumMemberUnknown
    path: tuple[int, ...]
    message: str


class BindErrors(Exception):
    def __init__(self, issues: list[BindIssue]):
        self.issues = issues
        super().__init__("; ".join(i.message for i in issues))


@dataclass(frozen=True)
class BoundExpr:
    """A class expression whose names are canonical for some kb and whose
    facet literals are typed against the property ranges."""

    expr: ClassExpr


@dataclass(frozen=True)
class BoundAxiom:
    lhs: BoundExpr
    rhs: BoundExpr


# ---------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<badstring>"(?:[^"\\\n]|\\.)*)
  | (?P<lparen>\()
  | (?P<rparen>\))
    """,
    re.VERBOSE,
)

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n"}


@dataclass(frozen=True)
class Token:
    kind: str  # NAME KW NUMBER STRING BOOL LPAREN RPAREN EOF
    text: str
    offset: int
    line: int
    column: int


def _unescape(raw: str, tok_offset: int, line: int, col: int) -> str:
    body = raw[1:-1]
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            esc = body[i + 1]
            if esc not in _ESCAPES:
                raise ParseError(
                    tok_offset + 1 + i, line, col + 1 + i, "escape (\\\" \\\\ \\n)", "\\" + esc
                )
            out.append(_ESCAPES[esc])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line, col = 1, 1

    def advance(s: str):
        nonlocal line, col
        n = s.count("\n")
        if n:
            line += n
            col = len(s) - s.rindex("\n")
        else:
            col += len(s)

    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(pos, line, col, "a token", text[pos])
        kind = m.lastgroup
        s = m.group()
        if kind == "ws":
            pass
        elif kind == "number":
            tokens.append(Token("NUMBER", s, pos, line, col))
        elif kind == "name":
            lowered = s.lower()
            if lowered in ("true", "false"):
                tokens.append(Token("BOOL", s, pos, line, col))
            elif lowered in KEYWORDS:
                tokens.append(Token("KW", s, pos, line, col))
            else:
                tokens.append(Token("NAME", s, pos, line, col))
        elif kind == "string":
            tokens.append(Token("STRING", s, pos, line, col))
        elif kind == "badstring":
            raise ParseError(pos, line, col, "closing '\"'", s)
        elif kind == "lparen":
            tokens.append(Token("LPAREN", s, pos, line, col))
        elif kind == "rparen":
            tokens.append(Token("RPAREN", s, pos, line, col))
        pos = m.end()
        advance(s)
    tokens.append(Token("EOF", "", pos, line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.i]

    def _kw(self, tok: Token) -> Optional[str]:
        return tok.text.lower() if tok.kind == "KW" else None

    def fail(self, expected: str):
        t = self.cur
        raise ParseError(t.offset, t.line, t.column, expected, t.text)

    def eat(self) -> Token:
        t = self.cur
        self.i += 1
        return t

    def expect_kw(self, word: str) -> Token:
        if self._kw(self.cur) == word:
            return self.eat()
        self.fail(f"'{word}'")

    def literal(self) -> LiteralValue:
        t = self.cur
        if t.kind == "NUMBER":
            self.eat()
            if any(c in t.text for c in ".eE"):
                return DoubleV(float(t.text))
            return IntV(int(t.text))
        if t.kind == "BOOL":
            self.eat()
            return BoolV(t.text.lower() == "true")
        if t.kind == "STRING":
            self.eat()
            return StringV(_unescape(t.text, t.offset, t.line, t.column))
        if t.kind == "NAME":
            self.eat()
            return NameV(t.text)
        self.fail("a literal (number, boolean, quoted string, or name)")

    def term(self) -> ClassExpr:
        t = self.cur
        if t.kind == "LPAREN":
            self.eat()
            inner = self.expr()
            if self.cur.kind != "RPAREN":
                self.fail("')'")
            self.eat()
            return inner
        if t.kind != "NAME":
            self.fail("a class or property name, or '('")
        name = self.eat().text
        kw = self._kw(self.cur)
        if kw == "some":
            self.eat()
            if self.cur.kind == "LPAREN":
                self.eat()
                filler = self.expr()
                if self.cur.kind != "RPAREN":
                    self.fail("')'")
                self.eat()
            elif self.cur.kind == "NAME":
                filler = Named(self.eat().text)
            else:
                self.fail("a class name or '(' after 'some'")
            return ObjectSome(prop=name, filler=filler)
        if kw in ("min", "max", "value"):
            self.eat()
            lit = self.literal()
            facet = {"min": MinInclusive, "max": MaxInclusive, "value": ValueEq}[kw](lit)
            return DataSome(prop=name, facet=facet)
        return Named(name)

    def expr(self) -> ClassExpr:
        parts = [self.term()]
        while self._kw(self.cur) == "and":
            self.eat()
            parts.append(self.term())
        return conjoin(parts)

    def parse_expr(self) -> ClassExpr:
        e = self.expr()
        if self.cur.kind != "EOF":
            self.fail("'and' or end of input")
        return e

    def parse_axiom(self) -> Axiom:
        lhs = self.expr()
        if self._kw(self.cur) != "subclassof":
            self.fail("'SubClassOf'")
        self.eat()
        rhs = self.expr()
        if self.cur.kind != "EOF":
            self.fail("end of input after the axiom head")
        _check_head_shape(rhs)
        return Axiom(lhs=lhs, rhs=rhs)


def _check_head_shape(rhs: ClassExpr):
    if isinstance(rhs, Named):
        return
    if isinstance(rhs, ObjectSome) and isinstance(rhs.filler, Named):
        return
    raise IllegalHeadShape(
        "axiom head must be a named class or a single 'property some Class'"
    )


def parse_expr(text: str) -> ClassExpr:
    return _Parser(text).parse_expr()


def parse_axiom(text: str) -> Axiom:
    return _Parser(text).parse_axiom()


# ---------------------------------------------------------------------------
# Canonical printer


def render(node: Union[ClassExpr, Axiom, BoundExpr, BoundAxiom]) -> str:
    if isinstance(node, BoundExpr):
        return render(node.expr)
    if isinstance(node, BoundAxiom):
        return render(Axiom(lhs=node.lhs.expr, rhs=node.rhs.expr))
    if isinstance(node, Axiom):
        head = render(node.rhs)
        if isinstance(node.rhs, ObjectSome):
            head = f"({head})"
        return f"{render(node.lhs)} SubClassOf {head}"
    if isinstance(node, Named):
        return node.name
    if isinstance(node, And):
        return " and ".join(render(p) for p in node.parts)
    if isinstance(node, ObjectSome):
        return f"{node.prop} some ({render(node.filler)})"
    if isinstance(node, DataSome):
        op = {MinInclusive: "min", MaxInclusive: "max", ValueEq: "value"}[type(node.facet)]
        return f"{node.prop} {op} {_render_literal(node.facet.value)}"
    raise TypeError(f"cannot render {node!r}")


def _render_literal(v: LiteralValue) -> str:
    if isinstance(v, NameV):
        return v.name
    return render_value(v)


# ---------------------------------------------------------------------------
# Binder


def bind(kb: KnowledgeBase, expr: ClassExpr) -> BoundExpr:
    """Resolve all names in `expr` against `kb` and type its facet literals.

    Raises BindErrors carrying every problem found, each with the path of the
    offending node (child indices from the root).
    """
    issues: list[BindIssue] = []
    bound = _bind_node(kb, expr, (), issues)
    if issues:
        raise BindErrors(issues)
    return BoundExpr(expr=bound)


def bind_axiom(kb: KnowledgeBase, axiom: Axiom) -> BoundAxiom:
    issues: list[BindIssue] = []
    lhs = _bind_node(kb, axiom.lhs, (0,), issues)
    rhs = _bind_node(kb, axiom.rhs, (1,), issues)
    if issues:
        raise BindErrors(issues)
    return BoundAxiom(lhs=BoundExpr(expr=lhs), rhs=BoundExpr(expr=rhs))


def _bind_node(kb, node: ClassExpr, path: tuple, issues: list) -> ClassExpr:
    if isinstance(node, Named):
        try:
            return Named(kb.resolve(NS_CLASS, node.name))
        except UnknownName:
            issues.append(
                BindIssue("UnknownName", path, f"unknown class {node.name!r}")
            )
            return node
    if isinstance(node, And):
        return And(
            parts=tuple(
                _bind_node(kb, p, path + (i,), issues)
                for i, p in enumerate(node.parts)
            )
        )
    if isinstance(node, ObjectSome):
        prop = node.prop
        try:
            prop = kb.resolve(NS_PROPERTY, node.prop)
            if kb.properties[prop].kind != "object":
                issues.append(
                    BindIssue(
                        "KindMismatch",
                        path,
                        f"{prop} is a data property but is used with 'some'",
                    )
                )
        except UnknownName:
            issues.append(
                BindIssue("UnknownName", path, f"unknown property {node.prop!r}")
            )
        filler = _bind_node(kb, node.filler, path + (0,), issues)
        return ObjectSome(prop=prop, filler=filler)
    if isinstance(node, DataSome):
        prop = node.prop
        facet = node.facet
        try:
            prop = kb.resolve(NS_PROPERTY, node.prop)
            pdef = kb.properties[prop]
            if pdef.kind != "data":
                issues.append(
                    BindIssue(
                        "KindMismatch",
                        path,
                        f"{prop} is an object property but is used with a facet",
                    )
                )
            else:
                facet = _bind_facet(kb, prop, pdef.range, node.facet, path, issues)
        except UnknownName:
            issues.append(
                BindIssue("UnknownName", path, f"unknown property {node.prop!r}")
            )
        return DataSome(prop=prop, facet=facet)
    raise TypeError(f"not a class expression: {node!r}")


def _bind_facet(kb, prop: str, rng: str, facet: Facet, path: tuple, issues: list) -> Facet:
    v = facet.value
    ordered = isinstance(facet, (MinInclusive, MaxInclusive))

    def reject(code, msg):
        issues.append(BindIssue(code, path, msg))
        return facet

    if rng == "double":
        if isinstance(v, IntV):
            v = DoubleV(float(v.value))
        if not isinstance(v, DoubleV):
            return reject("KindMismatch", f"{prop} expects a double, got {_render_literal(v)}")
    elif rng == "int":
        if not isinstance(v, IntV):
            return reject("KindMismatch", f"{prop} expects an integer, got {_render_literal(v)}")
    elif rng == "bool":
        if ordered:
            return reject("KindMismatch", f"{prop} is boolean; only 'value' facets apply")
        if not isinstance(v, BoolV):
            return reject("KindMismatch", f"{prop} expects a boolean, got {_render_literal(v)}")
    elif rng == "string":
        if ordered:
            return reject("KindMismatch", f"{prop} is a string; only 'value' facets apply")
        if not isinstance(v, StringV):
            return reject("KindMismatch", f"{prop} expects a quoted string, got {_render_literal(v)}")
    elif rng.startswith("enum:"):
        enum_name = rng[5:]
        text = None
        if isinstance(v, NameV):
            text = v.name
        elif isinstance(v, StringV):
            text = v.text
        elif isinstance(v, EnumV) and v.enum_name == enum_name:
            text = v.member
        if text is None:
            return reject(
                "KindMismatch",
                f"{prop} expects a member of enum {enum_name}, got {_render_literal(v)}",
            )
        members = kb.enums[enum_name]
        hit = next((m for m in members if m == text or m.lower() == text.lower()), None)
        if hit is None:
            return reject(
                "EnumMemberUnknown",
                f"{text!r} is not a member of enum {enum_name} (members: {', '.join(members)})",
            )
        v = EnumV(enum_name=enum_name, member=hit)
    else:
        return reject("KindMismatch", f"{prop} has unsupported range {rng!r}")
    return type(facet)(v)
