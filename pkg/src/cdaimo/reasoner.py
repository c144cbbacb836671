"""Closed-world instance checking and forward-chaining saturation.

holds() evaluates a bound class expression against one individual and, when
satisfied, returns a match trace whose leaves cite the exact assertions (or
earlier inference steps) that witnessed each restriction. apply_axiom() turns
matches into effects: named heads add class memberships, existential heads
link the subject to a witness, creating a deterministic skolem individual
(`sk_<rule>_<subject>`) when none exists. saturate() applies the axiom list
round-robin until a full round adds nothing.

Everything added is recorded as an InferenceStep, so a saturation can be
replayed onto the starting kb and any derived fact can be expanded by
explain() into a proof tree bottoming out in asserted facts.

Termination guard: an existential head never creates a fresh skolem for a
subject that is itself a skolem. Without that, a rule set like
`A SubClassOf (p some A)` would chase new witnesses forever; with it, the
individual count is bounded and saturation always reaches a fixpoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .dsl import (
    And,
    BoundAxiom,
    BoundExpr,
    DataSome,
    IllegalHeadShape,
    MaxInclusive,
    MinInclusive,
    Named,
    ObjectSome,
    ValueEq,
)
from .kb import (
    NS_INDIVIDUAL,
    DoubleV,
    EnumV,
    IntV,
    KnowledgeBase,
    ObjectAssertion,
    DataAssertion,
    UnknownName,
    Value,
    render_value,
)


class UnboundExpr(Exception):
    code = "UnboundExpr"


class UnknownFact(Exception):
    code = "UnknownFact"


# ---------------------------------------------------------------------------
# Traces


@dataclass(frozen=True)
class NamedTrace:
    individual: str
    path: tuple[int, ...]
    cls: str
    via_cls: str  # the membership that witnessed cls (a subclass of it)
    source: tuple  # ("asserted",) | ("step", id, rule)


@dataclass(frozen=True)
class AndTrace:
    individual: str
    path: tuple[int, ...]
    parts: tuple


@dataclass(frozen=True)
class ObjectSomeTrace:
    individual: str
    path: tuple[int, ...]
    prop: str
    witness: str
    link_source: tuple  # assertion origin: ("line", n) | ("step", id) | ("api",)
    filler: "MatchTrace"


@dataclass(frozen=True)
class DataSomeTrace:
    individual: str
    path: tuple[int, ...]
    prop: str
    value: Value
    comparison: str
    source: tuple


MatchTrace = Union[NamedTrace, AndTrace, ObjectSomeTrace, DataSomeTrace]


# ---------------------------------------------------------------------------
# Steps


@dataclass(frozen=True)
class MembershipAdded:
    cls: str


@dataclass(frozen=True)
class LinkAdded:
    prop: str
    object: str


@dataclass(frozen=True)
class IndividualCreated:
    name: str
    cls: str


Effect = Union[MembershipAdded, LinkAdded, IndividualCreated]


@dataclass(frozen=True)
class InferenceStep:
    id: int
    rule: str
    subject: str
    effect: Effect
    trace: MatchTrace

    def describe(self) -> str:
        e = self.effect
        if isinstance(e, MembershipAdded):
            what = f"{self.subject} classified as {e.cls}"
        elif isinstance(e, LinkAdded):
            what = f"{self.subject} {e.prop} {e.object}"
        else:
            what = f"created {e.name} as {e.cls} for {self.subject}"
        return f"[{self.id}] {self.rule}: {what}"


@dataclass
class SaturationResult:
    kb_after: KnowledgeBase
    steps: list[InferenceStep]
    iterations: int


# ---------------------------------------------------------------------------
# Instance checking


def _membership_witness(kb: KnowledgeBase, name: str, cls: str):
    """(via_class, source) for the individual's membership in cls, or None.

    Closure-propagated entries are skipped; the witness is always an asserted
    class or one added by an inference step, so trace leaves stay auditable.
    A skolem's asserted class is sourced to the step that created it.
    """
    ind = kb.individuals[name]

    def source_of_asserted():
        return ind.created_by if ind.skolem and ind.created_by else ("asserted",)

    if cls in ind.asserted:
        return cls, source_of_asserted()
    origin = ind.derived.get(cls)
    if origin and origin[0] == "step":
        return cls, origin
    for d in sorted(ind.asserted):
        if cls in kb.ancestors(d):
            return d, source_of_asserted()
    for d in sorted(ind.derived):
        origin = ind.derived[d]
        if origin[0] == "step" and cls in kb.ancestors(d):
            return d, origin
    return None


def _facet_check(kb: KnowledgeBase, facet, value: Value):
    """(satisfied, comparison text). Facet and value kinds were aligned at bind."""
    fv = facet.value
    if isinstance(facet, ValueEq):
        return value == fv, f"{render_value(value)} == {render_value(fv)}"
    op = "<=" if isinstance(facet, MaxInclusive) else ">="
    if isinstance(fv, (DoubleV, IntV)) and isinstance(value, (DoubleV, IntV)):
        a, b = value.value, fv.value
        ok = a <= b if op == "<=" else a >= b
        return ok, f"{render_value(value)} {op} {render_value(fv)}"
    if isinstance(fv, EnumV) and isinstance(value, EnumV) and value.enum_name == fv.enum_name:
        order = kb.enums[fv.enum_name]
        a, b = order.index(value.member), order.index(fv.member)
        ok = a <= b if op == "<=" else a >= b
        return ok, f"{value.member} {op} {fv.member} (by {fv.enum_name} order)"
    return False, f"{render_value(value)} not comparable with {render_value(fv)}"


def holds(kb: KnowledgeBase, individual: str, expr: BoundExpr):
    """Closed-world evaluation of a bound expression for one individual.

    Returns (True, MatchTrace) or (False, None). Unstated facts are false.
    """
    if not isinstance(expr, BoundExpr):
        raise UnboundExpr("holds() requires an expression bound with dsl.bind()")
    if individual not in kb.individuals:
        raise UnknownName(
            f"unknown individual {individual!r}", namespace=NS_INDIVIDUAL, name=individual
        )
    return _holds(kb, individual, expr.expr, ())


def _holds(kb, name: str, node, path: tuple):
    if isinstance(node, Named):
        hit = _membership_witness(kb, name, node.name)
        if hit is None:
            return False, None
        via, source = hit
        return True, NamedTrace(
            individual=name, path=path, cls=node.name, via_cls=via, source=source
        )
    if isinstance(node, And):
        parts = []
        for i, p in enumerate(node.parts):
            ok, tr = _holds(kb, name, p, path + (i,))
            if not ok:
                return False, None
            parts.append(tr)
        return True, AndTrace(individual=name, path=path, parts=tuple(parts))
    if isinstance(node, ObjectSome):
        for target, origin in kb.object_links(name, node.prop):
            ok, sub = _holds(kb, target, node.filler, path + (0,))
            if ok:
                return True, ObjectSomeTrace(
                    individual=name,
                    path=path,
                    prop=node.prop,
                    witness=target,
                    link_source=origin,
                    filler=sub,
                )
        return False, None
    if isinstance(node, DataSome):
        for value, origin in kb.data_values(name, node.prop):
            ok, desc = _facet_check(kb, node.facet, value)
            if ok:
                return True, DataSomeTrace(
                    individual=name,
                    path=path,
                    prop=node.prop,
                    value=value,
                    comparison=desc,
                    source=origin,
                )
        return False, None
    raise UnboundExpr(f"not a class expression node: {node!r}")


# ---------------------------------------------------------------------------
# Rule application


def apply_axiom(
    kb: KnowledgeBase,
    rule_id: str,
    axiom: BoundAxiom,
    next_step_id: int = 0,
) -> list[InferenceStep]:
    """Fire one axiom across all current individuals, record the new facts in
    `kb`, and return the emitted steps (empty when nothing was new).

    Bodies and witness checks are evaluated against the kb as it stood when
    the call started, so firing order inside one application cannot influence
    what matches."""
    return _apply_axiom(kb, kb.clone(), rule_id, axiom, next_step_id)


def _apply_axiom(
    kb: KnowledgeBase,
    snapshot: KnowledgeBase,
    rule_id: str,
    axiom: BoundAxiom,
    next_step_id: int,
) -> list[InferenceStep]:
    """Evaluate on `snapshot`, apply new effects to `kb`.

    Splitting evaluation from application makes each saturation round a
    parallel step: the set of facts a round adds depends only on the
    round-start kb, never on the order axioms are listed in, which is what
    makes the fixpoint axiom-order invariant."""
    if not isinstance(axiom, BoundAxiom):
        raise UnboundExpr("apply_axiom() requires an axiom bound with dsl.bind_axiom()")
    head = axiom.rhs.expr
    if not (isinstance(head, Named) or (isinstance(head, ObjectSome) and isinstance(head.filler, Named))):
        raise IllegalHeadShape(
            "axiom head must be a named class or a single 'property some Class'"
        )
    steps: list[InferenceStep] = []
    sid = next_step_id
    for x in sorted(snapshot.individuals):
        ok, trace = _holds(snapshot, x, axiom.lhs.expr, ())
        if not ok:
            continue
        if isinstance(head, Named):
            if kb.member_of(x, head.name):  # novelty is judged on the live kb
                continue
            step = InferenceStep(
                id=sid, rule=rule_id, subject=x, effect=MembershipAdded(head.name), trace=trace
            )
            kb.add_derived(x, head.name, ("step", sid, rule_id))
            steps.append(step)
            sid += 1
        else:
            prop, cls = head.prop, head.filler.name
            if any(snapshot.member_of(t, cls) for t, _ in snapshot.object_links(x, prop)):
                continue  # witness existed at round start
            if snapshot.individuals[x].skolem:
                continue  # termination guard, see module docstring
            sk = f"sk_{rule_id}_{x}"
            try:
                sk = kb.resolve(NS_INDIVIDUAL, sk)
                exists = True
            except UnknownName:
                exists = False
            if not exists:
                step = InferenceStep(
                    id=sid, rule=rule_id, subject=x, effect=IndividualCreated(sk, cls), trace=trace
                )
                kb.assert_individual(sk, {cls}, skolem=True, created_by=("step", sid, rule_id))
                steps.append(step)
                sid += 1
            elif not kb.member_of(sk, cls):
                step = InferenceStep(
                    id=sid, rule=rule_id, subject=sk, effect=MembershipAdded(cls), trace=trace
                )
                kb.add_derived(sk, cls, ("step", sid, rule_id))
                steps.append(step)
                sid += 1
            link = ObjectAssertion(subject=x, property=prop, object=sk)
            if link not in kb.object_assertions:
                step = InferenceStep(
                    id=sid, rule=rule_id, subject=x, effect=LinkAdded(prop, sk), trace=trace
                )
                kb.assert_object(x, prop, sk, origin=("step", sid))
                steps.append(step)
                sid += 1
    return steps


def saturate(kb: KnowledgeBase, axioms: list[tuple[str, BoundAxiom]]) -> SaturationResult:
    """Run the axioms to fixpoint on a private copy of `kb`.

    Each round evaluates every axiom against the round-start snapshot and
    applies the union of new effects; rounds repeat until one adds nothing.
    `iterations` counts rounds, including the final quiescent one.
    """
    work = kb.clone()
    work.materialize_closure()
    steps: list[InferenceStep] = []
    iterations = 0
    while True:
        iterations += 1
        snapshot = work.clone()
        round_steps: list[InferenceStep] = []
        for rule_id, axiom in axioms:
            round_steps.extend(
                _apply_axiom(
                    work, snapshot, rule_id, axiom, len(steps) + len(round_steps)
                )
            )
        if not round_steps:
            break
        steps.extend(round_steps)
    return SaturationResult(kb_after=work, steps=steps, iterations=iterations)


def replay(kb_before: KnowledgeBase, steps: list[InferenceStep]) -> KnowledgeBase:
    """Re-apply recorded steps onto the starting kb; the result equals the
    saturation's kb_after."""
    kb = kb_before.clone()
    kb.materialize_closure()
    for s in steps:
        e = s.effect
        if isinstance(e, MembershipAdded):
            kb.add_derived(s.subject, e.cls, ("step", s.id, s.rule))
        elif isinstance(e, IndividualCreated):
            kb.assert_individual(e.name, {e.cls}, skolem=True, created_by=("step", s.id, s.rule))
        elif isinstance(e, LinkAdded):
            kb.assert_object(s.subject, e.prop, e.object, origin=("step", s.id))
    return kb


# ---------------------------------------------------------------------------
# Explanation


@dataclass
class ProofNode:
    statement: str
    kind: str  # "asserted" | "derived" | "subclass"
    source_line: Optional[int] = None
    rule: Optional[str] = None
    step: Optional[int] = None
    children: list = field(default_factory=list)

    def leaves(self):
        if not self.children:
            yield self
        for c in self.children:
            yield from c.leaves()

    def format(self, indent: int = 0) -> str:
        parts = []
        tag = ""
        if self.kind == "asserted":
            tag = f" [asserted{f', line {self.source_line}' if self.source_line else ''}]"
        elif self.kind == "derived":
            tag = f" [derived by {self.rule}, step {self.step}]"
        parts.append("  " * indent + "- " + self.statement + tag)
        for c in self.children:
            parts.append(c.format(indent + 1))
        return "\n".join(parts)

    def to_jsonable(self) -> dict:
        return {
            "statement": self.statement,
            "kind": self.kind,
            "source_line": self.source_line,
            "rule": self.rule,
            "step": self.step,
            "children": [c.to_jsonable() for c in self.children],
        }


def explain(result: SaturationResult, individual: str, fact: tuple) -> ProofNode:
    """Proof tree for an asserted or derived fact in result.kb_after.

    `fact` is ("class", C), ("link", property, object) or
    ("data", property, Value). Raises UnknownFact when the fact is absent.
    """
    kb = result.kb_after
    if individual not in kb.individuals:
        raise UnknownFact(f"unknown individual {individual!r}")
    kind = fact[0]
    if kind == "class":
        return _explain_membership(result, individual, fact[1])
    if kind == "link":
        return _explain_link(result, individual, fact[1], fact[2])
    if kind == "data":
        a = DataAssertion(subject=individual, property=fact[1], value=fact[2])
        origin = kb.data_assertions.get(a)
        if origin is None:
            raise UnknownFact(f"no data assertion {individual} {fact[1]} {render_value(fact[2])}")
        return _leaf(
            f"{individual} {fact[1]} {render_value(fact[2])}", origin
        )
    raise UnknownFact(f"unsupported fact kind {kind!r}")


def _leaf(statement: str, origin: tuple) -> ProofNode:
    line = origin[1] if origin and origin[0] == "line" else None
    return ProofNode(statement=statement, kind="asserted", source_line=line)


def _explain_membership(result: SaturationResult, name: str, cls: str) -> ProofNode:
    kb = result.kb_after
    if cls not in kb.classes:
        raise UnknownFact(f"unknown class {cls!r}")
    hit = _membership_witness(kb, name, cls)
    if hit is None:
        raise UnknownFact(f"{name} is not an instance of {cls}")
    via, source = hit
    node = _membership_node(result, name, via, source)
    if via != cls:
        return ProofNode(
            statement=f"{name} is a {cls} because {via} is a subclass of {cls}",
            kind="subclass",
            children=[node],
        )
    return node


def _membership_node(result: SaturationResult, name: str, cls: str, source: tuple) -> ProofNode:
    kb = result.kb_after
    if source == ("asserted",):
        line = kb.individuals[name].source_line
        return ProofNode(
            statement=f"{name} is a {cls}", kind="asserted", source_line=line
        )
    _tag, step_id, rule = source
    step = result.steps[step_id]
    return ProofNode(
        statement=f"{name} is a {cls}",
        kind="derived",
        rule=rule,
        step=step_id,
        children=_trace_proof(result, step.trace),
    )


def _explain_link(result: SaturationResult, subject: str, prop: str, obj: str) -> ProofNode:
    kb = result.kb_after
    origin = kb.object_assertions.get(
        ObjectAssertion(subject=subject, property=prop, object=obj)
    )
    if origin is None:
        raise UnknownFact(f"no link {subject} {prop} {obj}")
    statement = f"{subject} {prop} {obj}"
    if origin[0] == "step":
        step = result.steps[origin[1]]
        return ProofNode(
            statement=statement,
            kind="derived",
            rule=step.rule,
            step=step.id,
            children=_trace_proof(result, step.trace),
        )
    return _leaf(statement, origin)


def _trace_proof(result: SaturationResult, trace: MatchTrace) -> list[ProofNode]:
    if isinstance(trace, AndTrace):
        out = []
        for p in trace.parts:
            out.extend(_trace_proof(result, p))
        return out
    if isinstance(trace, NamedTrace):
        node = _membership_node(result, trace.individual, trace.via_cls, trace.source)
        if trace.via_cls != trace.cls:
            node = ProofNode(
                statement=(
                    f"{trace.individual} is a {trace.cls} because "
                    f"{trace.via_cls} is a subclass of {trace.cls}"
                ),
                kind="subclass",
                children=[node],
            )
        return [node]
    if isinstance(trace, DataSomeTrace):
        return [
            _leaf(
                f"{trace.individual} {trace.prop} {render_value(trace.value)}"
                f" satisfies the restriction ({trace.comparison})",
                trace.source,
            )
        ]
    if isinstance(trace, ObjectSomeTrace):
        statement = f"{trace.individual} {trace.prop} {trace.witness}"
        children = _trace_proof(result, trace.filler)
        if trace.link_source and trace.link_source[0] == "step":
            step = result.steps[trace.link_source[1]]
            node = ProofNode(
                statement=statement,
                kind="derived",
                rule=step.rule,
                step=step.id,
                children=_trace_proof(result, step.trace) + children,
            )
        else:
            node = ProofNode(
                statement=statement,
                kind="asserted",
                source_line=trace.link_source[1] if trace.link_source[0] == "line" else None,
                children=children,
            )
        return [node]
    raise UnknownFact(f"unsupported trace node {trace!r}")
