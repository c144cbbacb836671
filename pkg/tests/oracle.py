"""Independent oracles and random generators.

The brute-force evaluators here re-implement subclass reachability, facet
comparison and restriction matching from scratch over the kb's raw data, so
they share no code path with the engine they cross-check.
"""

from __future__ import annotations

import random
import string

from cdaimo.dsl import (
    And,
    BoundAxiom,
    BoundExpr,
    DataSome,
    MaxInclusive,
    MinInclusive,
    Named,
    ObjectSome,
    ValueEq,
    conjoin,
)
from cdaimo.kb import (
    BoolV,
    DoubleV,
    EnumV,
    IntV,
    KnowledgeBase,
    PropertyDef,
    StringV,
)

# ---------------------------------------------------------------------------
# Brute-force evaluation


def brute_subclass(kb: KnowledgeBase, sub: str, sup: str) -> bool:
    """Reflexive-transitive reachability over parent edges, re-implemented."""
    frontier = {sub}
    seen = set()
    while frontier:
        if sup in frontier:
            return True
        seen |= frontier
        frontier = {
            p for c in frontier for p in kb.classes[c].parents if p not in seen
        }
    return False


def brute_member(kb: KnowledgeBase, individual: str, cls: str) -> bool:
    ind = kb.individuals[individual]
    return any(brute_subclass(kb, c, cls) for c in ind.asserted | set(ind.derived))


def _brute_facet(kb: KnowledgeBase, facet, value) -> bool:
    fv = facet.value
    if isinstance(facet, ValueEq):
        return value == fv
    if type(value) is not type(fv):
        if not (isinstance(value, (IntV, DoubleV)) and isinstance(fv, (IntV, DoubleV))):
            return False
    if isinstance(fv, EnumV):
        if not isinstance(value, EnumV) or value.enum_name != fv.enum_name:
            return False
        order = list(kb.enums[fv.enum_name])
        a, b = order.index(value.member), order.index(fv.member)
    else:
        a, b = value.value, fv.value
    return a <= b if isinstance(facet, MaxInclusive) else a >= b


def brute_holds(kb: KnowledgeBase, individual: str, expr) -> bool:
    """Naive closed-world evaluation enumerating every assertion witness."""
    node = expr.expr if isinstance(expr, BoundExpr) else expr
    if isinstance(node, Named):
        return brute_member(kb, individual, node.name)
    if isinstance(node, And):
        return all(brute_holds(kb, individual, p) for p in node.parts)
    if isinstance(node, ObjectSome):
        return any(
            a.subject == individual
            and a.property == node.prop
            and brute_holds(kb, a.object, node.filler)
            for a in kb.object_assertions
        )
    if isinstance(node, DataSome):
        return any(
            a.subject == individual
            and a.property == node.prop
            and _brute_facet(kb, node.facet, a.value)
            for a in kb.data_assertions
        )
    raise TypeError(f"unexpected node {node!r}")


# ---------------------------------------------------------------------------
# Random knowledge bases


def random_kb(
    rng: random.Random,
    max_classes: int = 8,
    max_properties: int = 10,
    max_individuals: int = 30,
) -> KnowledgeBase:
    kb = KnowledgeBase()
    n_classes = rng.randint(3, max_classes)
    classes = [f"C{i}" for i in range(n_classes)]
    for i, name in enumerate(classes):
        parents = rng.sample(classes[:i], k=min(i, rng.randint(0, 2)))
        kb.declare_class(name, parents)

    enum_members = tuple(f"M{j}" for j in range(rng.randint(3, 5)))
    kb.declare_enum("E0", enum_members)

    n_props = rng.randint(2, max_properties)
    data_ranges = ["string", "int", "double", "bool", "enum:E0"]
    for i in range(n_props):
        name = f"p{i}"
        domain = frozenset(rng.sample(classes, k=rng.randint(0, 1)))
        if rng.random() < 0.5:
            kb.declare_property(
                PropertyDef(name=name, kind="data", range=rng.choice(data_ranges), domain=domain)
            )
        else:
            rng_classes = frozenset(rng.sample(classes, k=rng.randint(0, 2)))
            kb.declare_property(
                PropertyDef(name=name, kind="object", range=rng_classes, domain=domain)
            )

    n_inds = rng.randint(1, max_individuals)
    individuals = [f"x{i}" for i in range(n_inds)]
    for name in individuals:
        kb.assert_individual(name, rng.sample(classes, k=rng.randint(1, 2)))

    data_props = [p for p in kb.properties.values() if p.kind == "data"]
    object_props = [p for p in kb.properties.values() if p.kind == "object"]
    for name in individuals:
        for p in data_props:
            if rng.random() < 0.4:
                kb.assert_data(name, p.name, random_value(rng, kb, p.range))
        for p in object_props:
            for _ in range(rng.randint(0, 2)):
                kb.assert_object(name, p.name, rng.choice(individuals))
    return kb


def random_value(rng: random.Random, kb: KnowledgeBase, rng_spec: str):
    if rng_spec == "string":
        return StringV("".join(rng.choices(string.ascii_lowercase, k=4)))
    if rng_spec == "int":
        return IntV(rng.randint(-5, 10))
    if rng_spec == "double":
        return DoubleV(round(rng.uniform(0.0, 1.0), 3))
    if rng_spec == "bool":
        return BoolV(rng.random() < 0.5)
    enum_name = rng_spec[5:]
    return EnumV(enum_name=enum_name, member=rng.choice(kb.enums[enum_name]))


def random_expr(rng: random.Random, kb: KnowledgeBase, depth: int = 3):
    """A bound-by-construction expression over the kb's vocabulary."""
    classes = sorted(kb.classes)
    data_props = sorted(p for p, d in kb.properties.items() if d.kind == "data")
    object_props = sorted(p for p, d in kb.properties.items() if d.kind == "object")
    choices = ["named"]
    if depth > 0:
        choices += ["and", "and"]
        if object_props:
            choices += ["objectsome", "objectsome"]
    if data_props:
        choices += ["datasome", "datasome"]
    kind = rng.choice(choices)
    if kind == "named":
        return Named(rng.choice(classes))
    if kind == "and":
        parts = [random_expr(rng, kb, depth - 1) for _ in range(rng.randint(2, 3))]
        return conjoin(parts)
    if kind == "objectsome":
        return ObjectSome(
            prop=rng.choice(object_props), filler=random_expr(rng, kb, depth - 1)
        )
    prop = rng.choice(data_props)
    rng_spec = kb.properties[prop].range
    value = random_value(rng, kb, rng_spec)
    if rng_spec in ("bool", "string"):
        facet = ValueEq(value)
    else:
        facet = rng.choice([MinInclusive, MaxInclusive, ValueEq])(value)
    return DataSome(prop=prop, facet=facet)


def random_bound_expr(rng: random.Random, kb: KnowledgeBase, depth: int = 3) -> BoundExpr:
    return BoundExpr(expr=random_expr(rng, kb, depth))


def random_axioms(rng: random.Random, kb: KnowledgeBase, count: int) -> list:
    """(rule_id, BoundAxiom) pairs with legal head shapes."""
    object_props = sorted(p for p, d in kb.properties.items() if d.kind == "object")
    out = []
    for i in range(count):
        lhs = random_expr(rng, kb, depth=2)
        if object_props and rng.random() < 0.4:
            rhs = ObjectSome(
                prop=rng.choice(object_props), filler=Named(rng.choice(sorted(kb.classes)))
            )
        else:
            rhs = Named(rng.choice(sorted(kb.classes)))
        out.append((f"A{i}", BoundAxiom(lhs=BoundExpr(expr=lhs), rhs=BoundExpr(expr=rhs))))
    return out


# ---------------------------------------------------------------------------
# Random parse-level ASTs (for printer/parser round-trips)

from cdaimo.dsl import KEYWORDS, Axiom, NameV  # noqa: E402


def random_token(rng: random.Random) -> str:
    while True:
        head = rng.choice(string.ascii_letters + "_")
        tail = "".join(
            rng.choices(string.ascii_letters + string.digits + "_", k=rng.randint(0, 9))
        )
        name = head + tail
        if name.lower() not in KEYWORDS:
            return name


def random_literal(rng: random.Random):
    kind = rng.randint(0, 4)
    if kind == 0:
        return IntV(rng.randint(-10_000, 10_000))
    if kind == 1:
        mag = rng.choice([1.0, 1e3, 1e-4, 1e12])
        return DoubleV(rng.uniform(-1.0, 1.0) * mag)
    if kind == 2:
        return BoolV(rng.random() < 0.5)
    if kind == 3:
        alphabet = string.ascii_letters + string.digits + ' .,;-_()[]{}!?/\\"\n'
        return StringV("".join(rng.choices(alphabet, k=rng.randint(0, 12))))
    return NameV(random_token(rng))


def random_ast(rng: random.Random, depth: int = 4):
    """Parse-level class expression (NameV literals, unresolved names)."""
    kind = rng.choice(
        ["named", "datasome"] + (["and", "and", "objectsome"] if depth > 0 else [])
    )
    if kind == "named":
        return Named(random_token(rng))
    if kind == "and":
        return conjoin(random_ast(rng, depth - 1) for _ in range(rng.randint(2, 3)))
    if kind == "objectsome":
        return ObjectSome(prop=random_token(rng), filler=random_ast(rng, depth - 1))
    facet_type = rng.choice([MinInclusive, MaxInclusive, ValueEq])
    lit = random_literal(rng)
    if facet_type is not ValueEq and isinstance(lit, (BoolV, StringV)):
        facet_type = ValueEq  # ordered facets carry numbers or names only
    return DataSome(prop=random_token(rng), facet=facet_type(lit))


def random_parse_axiom(rng: random.Random) -> Axiom:
    lhs = random_ast(rng, depth=3)
    if rng.random() < 0.4:
        rhs = ObjectSome(prop=random_token(rng), filler=Named(random_token(rng)))
    else:
        rhs = Named(random_token(rng))
    return Axiom(lhs=lhs, rhs=rhs)
