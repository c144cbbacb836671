"""Typed closed-world knowledge base.

A knowledge base holds four kinds of declarations (classes with a subclass
DAG, property schema, ordered enums, individuals) plus two kinds of facts
(data assertions and object assertions). All mutation goes through checked
operations; structural problems that cannot be rejected eagerly are reported
by validate() as violation records.

Knowledge bases are values: mutating operations require exclusive ownership
of the instance, and clone() produces an independent snapshot that any number
of readers may share.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

# Namespaces for name resolution. Class, property, individual and enum names
# live in disjoint namespaces; the same token may appear in more than one.
NS_CLASS = "class"
NS_PROPERTY = "property"
NS_INDIVIDUAL = "individual"
NS_ENUM = "enum"


class KbError(Exception):
    """Base class for knowledge-base rejections. `code` names the diagnostic."""

    code = "KbError"

    def __init__(self, message: str, **info):
        super().__init__(message)
        self.message = message
        self.info = info


class DuplicateName(KbError):
    code = "DuplicateName"


class UnknownName(KbError):
    code = "UnknownName"


class CycleDetected(KbError):
    code = "CycleDetected"


class EmptyClassSet(KbError):
    code = "EmptyClassSet"


class KindMismatch(KbError):
    code = "KindMismatch"


class RangeViolation(KbError):
    code = "RangeViolation"


class BadName(KbError):
    code = "BadName"


# ---------------------------------------------------------------------------
# Values


@dataclass(frozen=True)
class StringV:
    text: str


@dataclass(frozen=True)
class IntV:
    value: int

    def __post_init__(self):
        if isinstance(self.value, bool):
            raise KindMismatch("IntV requires an integer, got a boolean")


@dataclass(frozen=True)
class DoubleV:
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise RangeViolation("DoubleV must be finite (no NaN or infinity)")


@dataclass(frozen=True)
class BoolV:
    value: bool


@dataclass(frozen=True)
class EnumV:
    enum_name: str
    member: str


Value = Union[StringV, IntV, DoubleV, BoolV, EnumV]


def value_kind(v: Value) -> str:
    """Kind tag of a value: 'string', 'int', 'double', 'bool' or 'enum:<Name>'."""
    if isinstance(v, StringV):
        return "string"
    if isinstance(v, IntV):
        return "int"
    if isinstance(v, DoubleV):
        return "double"
    if isinstance(v, BoolV):
        return "bool"
    if isinstance(v, EnumV):
        return f"enum:{v.enum_name}"
    raise KindMismatch(f"not a value: {v!r}")


def render_value(v: Value) -> str:
    """Literal spelling of a value, matching the rule-DSL literal syntax."""
    if isinstance(v, StringV):
        escaped = v.text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{escaped}"'
    if isinstance(v, IntV):
        return str(v.value)
    if isinstance(v, DoubleV):
        return repr(v.value)
    if isinstance(v, BoolV):
        return "true" if v.value else "false"
    if isinstance(v, EnumV):
        return v.member
    raise KindMismatch(f"not a value: {v!r}")


# ---------------------------------------------------------------------------
# Declarations and facts


@dataclass(frozen=True)
class ClassDef:
    name: str
    parents: frozenset[str] = frozenset()


@dataclass(frozen=True)
class PropertyDef:
    """Schema entry for one property.

    For kind 'data', `range` is one of 'string', 'int', 'double', 'bool' or
    'enum:<EnumName>'. For kind 'object', `range` is a (possibly empty) set
    of class names. An empty domain or object range means unconstrained.
    """

    name: str
    kind: str  # "data" | "object"
    range: Union[str, frozenset[str]]
    domain: frozenset[str] = frozenset()


@dataclass
class Individual:
    name: str
    asserted: set[str] = field(default_factory=set)
    # class name -> ("step", step_id, rule_id) | ("closure",)
    derived: dict[str, tuple] = field(default_factory=dict)
    skolem: bool = False
    created_by: Optional[tuple] = None  # ("step", step_id, rule_id) for skolems
    source_line: Optional[int] = None

    @property
    def derived_classes(self) -> set[str]:
        return set(self.derived)

    @property
    def classes(self) -> set[str]:
        return self.asserted | set(self.derived)


@dataclass(frozen=True)
class DataAssertion:
    subject: str
    property: str
    value: Value


@dataclass(frozen=True)
class ObjectAssertion:
    subject: str
    property: str
    object: str


# Fact origins: ("line", n) for scenario-sourced facts, ("step", id) for
# reasoner-derived links, ("api",) for programmatic insertion.
Origin = tuple


@dataclass(frozen=True)
class Violation:
    kind: str
    severity: str  # "error" | "warning"
    names: tuple[str, ...]
    message: str


class KnowledgeBase:
    """The closed-world store. See module docstring for the ownership rules."""

    def __init__(self):
        self.classes: dict[str, ClassDef] = {}
        self.properties: dict[str, PropertyDef] = {}
        self.enums: dict[str, tuple[str, ...]] = {}
        self.individuals: dict[str, Individual] = {}
        self.data_assertions: dict[DataAssertion, Origin] = {}
        self.object_assertions: dict[ObjectAssertion, Origin] = {}
        self._ci: dict[str, dict[str, str]] = {
            NS_CLASS: {},
            NS_PROPERTY: {},
            NS_INDIVIDUAL: {},
            NS_ENUM: {},
        }
        self._aliases: dict[str, dict[str, str]] = {NS_CLASS: {}, NS_PROPERTY: {}}

    # -- equality / snapshots ------------------------------------------------

    def __eq__(self, other) -> bool:
        """Logical equality: declarations, memberships and facts.

        Provenance metadata (source lines, producing step ids) is excluded so
        that saturations reaching the same fixpoint compare equal regardless
        of the order steps were emitted in.
        """
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return (
            self.classes == other.classes
            and self.properties == other.properties
            and self.enums == other.enums
            and {
                n: (i.asserted, set(i.derived), i.skolem)
                for n, i in self.individuals.items()
            }
            == {
                n: (i.asserted, set(i.derived), i.skolem)
                for n, i in other.individuals.items()
            }
            and set(self.data_assertions) == set(other.data_assertions)
            and set(self.object_assertions) == set(other.object_assertions)
        )

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def clone(self) -> "KnowledgeBase":
        kb = KnowledgeBase()
        kb.classes = dict(self.classes)
        kb.properties = dict(self.properties)
        kb.enums = dict(self.enums)
        kb.individuals = {
            n: Individual(
                name=i.name,
                asserted=set(i.asserted),
                derived=dict(i.derived),
                skolem=i.skolem,
                created_by=i.created_by,
                source_line=i.source_line,
            )
            for n, i in self.individuals.items()
        }
        kb.data_assertions = dict(self.data_assertions)
        kb.object_assertions = dict(self.object_assertions)
        kb._ci = {ns: dict(table) for ns, table in self._ci.items()}
        kb._aliases = {ns: dict(table) for ns, table in self._aliases.items()}
        return kb

    # -- name handling ---------------------------------------------------------

    def _check_token(self, name: str):
        if not isinstance(name, str) or not _NAME_RE.match(name):
            raise BadName(
                f"invalid name {name!r}: expected letters, digits or underscore, "
                "not starting with a digit"
            )

    def _register(self, ns: str, name: str):
        self._check_token(name)
        lowered = name.lower()
        if lowered in self._ci[ns]:
            raise DuplicateName(
                f"{ns} name {name!r} clashes with declared {self._ci[ns][lowered]!r}"
                " (names are matched case-insensitively)"
            )
        self._ci[ns][lowered] = name

    def register_alias(self, ns: str, alias: str, canonical: str):
        """Accept `alias` as an alternate spelling of an existing name."""
        if ns not in self._aliases:
            raise KbError(f"aliases unsupported for namespace {ns}")
        self.resolve(ns, canonical)
        self._aliases[ns][alias.lower()] = canonical

    def resolve(self, ns: str, name: str) -> str:
        """Canonical declared spelling for `name`, matched case-insensitively."""
        if name in self._names_of(ns):
            return name
        hit = self._ci[ns].get(name.lower())
        if hit is not None:
            return hit
        alias = self._aliases.get(ns, {}).get(name.lower())
        if alias is not None:
            return alias
        raise UnknownName(f"unknown {ns} name {name!r}", namespace=ns, name=name)

    def _names_of(self, ns: str):
        return {
            NS_CLASS: self.classes,
            NS_PROPERTY: self.properties,
            NS_INDIVIDUAL: self.individuals,
            NS_ENUM: self.enums,
        }[ns]

    def resolve_enum_member(self, enum_name: str, member: str) -> str:
        members = self.enums[enum_name]
        for m in members:
            if m == member or m.lower() == member.lower():
                return m
        raise RangeViolation(
            f"{member!r} is not a member of enum {enum_name} "
            f"(members: {', '.join(members)})",
            enum=enum_name,
            member=member,
        )

    # -- declarations ------------------------------------------------------------

    def declare_class(self, name: str, parents: Iterable[str] = ()) -> "KnowledgeBase":
        parents = frozenset(parents)
        for p in parents:
            if p not in self.classes:
                raise UnknownName(
                    f"unknown parent class {p!r}", namespace=NS_CLASS, name=p
                )
        # Cycle check comes first: a re-declaration that would close a loop is
        # a cycle, not a duplicate.
        for p in parents:
            if name in self.classes and self._reaches(p, name):
                raise CycleDetected(
                    f"declaring {name!r} under {p!r} would create a subclass cycle"
                )
        if name in self.classes:
            if parents <= self.classes[name].parents:
                return self  # identical re-declaration is a no-op
            raise DuplicateName(f"class {name!r} already declared")
        self._register(NS_CLASS, name)
        self.classes[name] = ClassDef(name=name, parents=parents)
        return self

    def declare_enum(self, name: str, members: Iterable[str]) -> "KnowledgeBase":
        members = tuple(members)
        if name in self.enums:
            if members == self.enums[name]:
                return self
            raise DuplicateName(f"enum {name!r} already declared")
        if not members:
            raise KbError(f"enum {name!r} must have at least one member")
        if len(set(m.lower() for m in members)) != len(members):
            raise DuplicateName(f"enum {name!r} has duplicate members")
        for m in members:
            self._check_token(m)
        self._register(NS_ENUM, name)
        self.enums[name] = members
        return self

    def declare_property(self, pdef: PropertyDef) -> "KnowledgeBase":
        if pdef.name in self.properties:
            raise DuplicateName(f"property {pdef.name!r} already declared")
        if pdef.kind not in ("data", "object"):
            raise KindMismatch(f"property kind must be 'data' or 'object', got {pdef.kind!r}")
        for c in pdef.domain:
            if c not in self.classes:
                raise UnknownName(
                    f"unknown domain class {c!r}", namespace=NS_CLASS, name=c
                )
        if pdef.kind == "data":
            rng = pdef.range
            if not isinstance(rng, str):
                raise KindMismatch("data property range must be a range string")
            if rng.startswith("enum:"):
                if rng[5:] not in self.enums:
                    raise UnknownName(
                        f"unknown enum {rng[5:]!r}", namespace=NS_ENUM, name=rng[5:]
                    )
            elif rng not in ("string", "int", "double", "bool"):
                raise KindMismatch(f"unknown data range {rng!r}")
        else:
            if not isinstance(pdef.range, frozenset):
                pdef = PropertyDef(
                    name=pdef.name,
                    kind=pdef.kind,
                    range=frozenset(pdef.range),
                    domain=pdef.domain,
                )
            for c in pdef.range:
                if c not in self.classes:
                    raise UnknownName(
                        f"unknown range class {c!r}", namespace=NS_CLASS, name=c
                    )
        self._register(NS_PROPERTY, pdef.name)
        self.properties[pdef.name] = pdef
        return self

    def assert_individual(
        self,
        name: str,
        classes: Iterable[str],
        source_line: Optional[int] = None,
        skolem: bool = False,
        created_by: Optional[tuple] = None,
    ) -> "KnowledgeBase":
        classes = set(classes)
        if not classes:
            raise EmptyClassSet(f"individual {name!r} needs at least one class")
        for c in classes:
            if c not in self.classes:
                raise UnknownName(f"unknown class {c!r}", namespace=NS_CLASS, name=c)
        if name in self.individuals:
            if classes <= self.individuals[name].asserted:
                return self
            raise DuplicateName(f"individual {name!r} already declared")
        self._register(NS_INDIVIDUAL, name)
        ind = Individual(
            name=name,
            asserted=classes,
            skolem=skolem,
            created_by=created_by,
            source_line=source_line,
        )
        self.individuals[name] = ind
        if skolem:
            # skolems are born into closure-materialized KBs; keep them closed
            for c in classes:
                for sup in self.ancestors(c):
                    if sup not in ind.asserted:
                        ind.derived.setdefault(sup, ("closure",))
        return self

    # -- facts ----------------------------------------------------------------------

    def assert_data(
        self, subject: str, prop: str, value: Value, origin: Origin = ("api",)
    ) -> "KnowledgeBase":
        if subject not in self.individuals:
            raise UnknownName(
                f"unknown subject individual {subject!r}",
                namespace=NS_INDIVIDUAL,
                name=subject,
            )
        pdef = self.properties.get(prop)
        if pdef is None:
            raise UnknownName(
                f"unknown property {prop!r}", namespace=NS_PROPERTY, name=prop
            )
        if pdef.kind != "data":
            raise KindMismatch(f"{prop} is an object property, not a data property")
        self._check_value_against_range(prop, pdef.range, value)
        fact = DataAssertion(subject=subject, property=prop, value=value)
        self.data_assertions.setdefault(fact, origin)
        return self

    def _check_value_against_range(self, prop: str, rng: str, value: Value):
        kind = value_kind(value)
        if rng.startswith("enum:"):
            enum_name = rng[5:]
            if not isinstance(value, EnumV) or value.enum_name != enum_name:
                raise KindMismatch(
                    f"{prop} expects a member of enum {enum_name}, got {kind}"
                )
            if value.member not in self.enums.get(enum_name, ()):
                raise RangeViolation(
                    f"{value.member!r} is not a member of enum {enum_name}"
                )
        elif kind != rng:
            raise KindMismatch(f"{prop} expects {rng}, got {kind}")

    def assert_object(
        self, subject: str, prop: str, obj: str, origin: Origin = ("api",)
    ) -> "KnowledgeBase":
        for role, name in (("subject", subject), ("object", obj)):
            if name not in self.individuals:
                raise UnknownName(
                    f"unknown {role} individual {name!r}",
                    namespace=NS_INDIVIDUAL,
                    name=name,
                )
        pdef = self.properties.get(prop)
        if pdef is None:
            raise UnknownName(
                f"unknown property {prop!r}", namespace=NS_PROPERTY, name=prop
            )
        if pdef.kind != "object":
            raise KindMismatch(f"{prop} is a data property, not an object property")
        fact = ObjectAssertion(subject=subject, property=prop, object=obj)
        self.object_assertions.setdefault(fact, origin)
        return self

    # -- queries -------------------------------------------------------------------

    def _reaches(self, start: str, goal: str) -> bool:
        """True iff `goal` is reachable from `start` via parent edges (reflexive)."""
        seen = set()
        stack = [start]
        while stack:
            c = stack.pop()
            if c == goal:
                return True
            if c in seen:
                continue
            seen.add(c)
            stack.extend(self.classes[c].parents)
        return False

    def is_subclass_of(self, sub: str, sup: str) -> bool:
        for c in (sub, sup):
            if c not in self.classes:
                raise UnknownName(f"unknown class {c!r}", namespace=NS_CLASS, name=c)
        return self._reaches(sub, sup)

    def ancestors(self, cls: str) -> set[str]:
        """All superclasses of `cls`, including itself."""
        out: set[str] = set()
        stack = [cls]
        while stack:
            c = stack.pop()
            if c in out:
                continue
            out.add(c)
            stack.extend(self.classes[c].parents)
        return out

    def member_of(self, individual: str, cls: str) -> bool:
        """Closed-world membership: some asserted or derived class of the
        individual is a subclass of `cls`."""
        ind = self.individuals[individual]
        return any(cls in self.ancestors(c) for c in ind.classes)

    def instances_of(self, cls: str) -> set[str]:
        if cls not in self.classes:
            raise UnknownName(f"unknown class {cls!r}", namespace=NS_CLASS, name=cls)
        return {n for n in self.individuals if self.member_of(n, cls)}

    def object_links(self, subject: str, prop: str) -> list[tuple[str, Origin]]:
        """(target, origin) pairs for `subject --prop--> target`, sorted by target."""
        hits = [
            (a.object, origin)
            for a, origin in self.object_assertions.items()
            if a.subject == subject and a.property == prop
        ]
        return sorted(hits, key=lambda t: t[0])

    def incoming_links(self, obj: str, prop: str) -> list[tuple[str, Origin]]:
        hits = [
            (a.subject, origin)
            for a, origin in self.object_assertions.items()
            if a.object == obj and a.property == prop
        ]
        return sorted(hits, key=lambda t: t[0])

    def data_values(self, subject: str, prop: str) -> list[tuple[Value, Origin]]:
        hits = [
            (a.value, origin)
            for a, origin in self.data_assertions.items()
            if a.subject == subject and a.property == prop
        ]
        return sorted(hits, key=lambda t: render_value(t[0]))

    # -- reasoner support -------------------------------------------------------

    def add_derived(self, individual: str, cls: str, origin: tuple):
        """Record a derived class membership plus its superclass closure."""
        ind = self.individuals[individual]
        if cls not in ind.asserted and cls not in ind.derived:
            ind.derived[cls] = origin
        for sup in self.ancestors(cls):
            if sup not in ind.asserted and sup not in ind.derived:
                ind.derived[sup] = ("closure",)

    def materialize_closure(self):
        """Fill every individual's derived set with the superclass closure of
        its current memberships."""
        for ind in self.individuals.values():
            for c in list(ind.classes):
                for sup in self.ancestors(c):
                    if sup not in ind.asserted and sup not in ind.derived:
                        ind.derived[sup] = ("closure",)

    def replace_data(self, subject: str, prop: str, value: Value, origin: Origin = ("api",)):
        """What-if support: drop all (subject, prop) data assertions, then
        assert the replacement value. Not part of the monotone reasoning API."""
        for a in [
            a
            for a in self.data_assertions
            if a.subject == subject and a.property == prop
        ]:
            del self.data_assertions[a]
        self.assert_data(subject, prop, value, origin)

    # -- validation ------------------------------------------------------------------

    def validate(self) -> list[Violation]:
        out: list[Violation] = []

        def err(kind, names, msg):
            out.append(Violation(kind=kind, severity="error", names=tuple(names), message=msg))

        def warn(kind, names, msg):
            out.append(Violation(kind=kind, severity="warning", names=tuple(names), message=msg))

        for cname in sorted(self.classes):
            for p in sorted(self.classes[cname].parents):
                if p not in self.classes:
                    err("UnknownClass", (cname, p), f"class {cname} has undeclared parent {p}")
        cycle = self._find_cycle()
        if cycle:
            err("CycleDetected", cycle, "subclass graph has a cycle: " + " -> ".join(cycle))

        for pname in sorted(self.properties):
            pdef = self.properties[pname]
            for c in sorted(pdef.domain):
                if c not in self.classes:
                    err("UnknownClass", (pname, c), f"property {pname} domain names undeclared class {c}")
            if pdef.kind == "object":
                for c in sorted(pdef.range):
                    if c not in self.classes:
                        err("UnknownClass", (pname, c), f"property {pname} range names undeclared class {c}")
            elif isinstance(pdef.range, str) and pdef.range.startswith("enum:"):
                if pdef.range[5:] not in self.enums:
                    err("UnknownEnum", (pname, pdef.range[5:]), f"property {pname} range names undeclared enum {pdef.range[5:]}")

        for iname in sorted(self.individuals):
            ind = self.individuals[iname]
            if not ind.asserted:
                err("EmptyClassSet", (iname,), f"individual {iname} has no asserted class")
            for c in sorted(ind.asserted | set(ind.derived)):
                if c not in self.classes:
                    err("UnknownClass", (iname, c), f"individual {iname} typed with undeclared class {c}")

        for a in sorted(self.data_assertions, key=lambda a: (a.subject, a.property, render_value(a.value))):
            pdef = self.properties.get(a.property)
            if a.subject not in self.individuals:
                err("UnknownName", (a.subject,), f"data assertion subject {a.subject} undeclared")
                continue
            if pdef is None:
                err("UnknownName", (a.property,), f"data assertion property {a.property} undeclared")
                continue
            if pdef.kind != "data":
                err("KindMismatch", (a.property,), f"object property {a.property} used in a data assertion")
                continue
            try:
                self._check_value_against_range(a.property, pdef.range, a.value)
            except KbError as e:
                err(e.code, (a.subject, a.property), str(e))
            if pdef.domain and not any(self.member_of(a.subject, d) for d in pdef.domain if d in self.classes):
                warn(
                    "DomainWarning",
                    (a.subject, a.property),
                    f"{a.subject} is not an instance of any domain class of {a.property}"
                    f" ({', '.join(sorted(pdef.domain))})",
                )

        for a in sorted(self.object_assertions, key=lambda a: (a.subject, a.property, a.object)):
            pdef = self.properties.get(a.property)
            missing = [n for n in (a.subject, a.object) if n not in self.individuals]
            if missing:
                err("UnknownName", tuple(missing), f"object assertion references undeclared individual(s): {', '.join(missing)}")
                continue
            if pdef is None:
                err("UnknownName", (a.property,), f"object assertion property {a.property} undeclared")
                continue
            if pdef.kind != "object":
                err("KindMismatch", (a.property,), f"data property {a.property} used in an object assertion")
                continue
            if pdef.domain and not any(self.member_of(a.subject, d) for d in pdef.domain if d in self.classes):
                warn(
                    "DomainWarning",
                    (a.subject, a.property),
                    f"{a.subject} is not an instance of any domain class of {a.property}"
                    f" ({', '.join(sorted(pdef.domain))})",
                )
            rng = pdef.range
            if isinstance(rng, frozenset) and rng and not any(
                self.member_of(a.object, r) for r in rng if r in self.classes
            ):
                warn(
                    "RangeWarning",
                    (a.object, a.property),
                    f"{a.object} is not an instance of any range class of {a.property}"
                    f" ({', '.join(sorted(rng))})",
                )
        return out

    def _find_cycle(self) -> Optional[tuple[str, ...]]:
        WHITE, GREY, BLACK = 0, 1, 2
        color = {c: WHITE for c in self.classes}
        path: list[str] = []

        def visit(c: str) -> Optional[tuple[str, ...]]:
            color[c] = GREY
            path.append(c)
            for p in sorted(self.classes[c].parents):
                if p not in color:
                    continue
                if color[p] == GREY:
                    return tuple(path[path.index(p):] + [p])
                if color[p] == WHITE:
                    found = visit(p)
                    if found:
                        return found
            path.pop()
            color[c] = BLACK
            return None

        for c in sorted(self.classes):
            if color[c] == WHITE:
                found = visit(c)
                if found:
                    return found
        return None
