import random

import pytest

from cdaimo.dsl import (
    BoundAxiom,
    BoundExpr,
    Named,
    ObjectSome,
    bind,
    bind_axiom,
    parse_axiom,
    parse_expr,
)
from cdaimo.kb import DoubleV
from cdaimo.reasoner import (
    IndividualCreated,
    LinkAdded,
    MembershipAdded,
    UnboundExpr,
    UnknownFact,
    apply_axiom,
    explain,
    holds,
    replay,
    saturate,
)
from cdaimo.scenario import load_scenario
from cdaimo.seed import builtin_axioms, seed_kb

from oracle import brute_holds, random_axioms, random_bound_expr, random_kb


def bound(kb, text):
    return bind(kb, parse_expr(text))


class TestHolds:
    def test_data_quality_facet_true(self, usecase_load):
        kb = usecase_load.kb
        ok, trace = holds(kb, "dq1", bound(kb, "DataQualityMetric and (hasDataQuality max 0.5)"))
        assert ok
        leafs = trace.parts
        assert leafs[1].comparison == "0.45 <= 0.5"

    def test_asserted_membership(self, usecase_load):
        kb = usecase_load.kb
        ok, trace = holds(kb, "sys1", bound(kb, "AIDSS"))
        assert ok and trace.source == ("asserted",)

    def test_facet_false_above_threshold(self, usecase_load):
        kb = usecase_load.kb.clone()
        kb.replace_data("dq1", "hasDataQuality", DoubleV(0.55))
        expr = bound(kb, "DataQualityMetric and (hasDataQuality max 0.5)")
        assert holds(kb, "dq1", expr) == (False, None)
        assert not brute_holds(kb, "dq1", expr)

    def test_membership_via_subclass(self, usecase_load):
        kb = usecase_load.kb
        ok, trace = holds(kb, "eng1", bound(kb, "TargetEngagement"))
        assert ok and trace.via_cls == "CyberAttack"

    def test_requires_bound_expr(self, usecase_load):
        with pytest.raises(UnboundExpr):
            holds(usecase_load.kb, "sys1", parse_expr("AIDSS"))

    def test_closed_world_negative(self, usecase_load):
        kb = usecase_load.kb
        assert holds(kb, "dm1", bound(kb, "TargetEngagement")) == (False, None)


class TestApplyAxiom:
    def test_rule2_creates_skolem_and_link(self, usecase_load):
        kb = usecase_load.kb.clone()
        ax = dict(usecase_load.axioms)["R2"]
        steps = apply_axiom(kb, "R2", ax)
        assert [type(s.effect) for s in steps] == [IndividualCreated, LinkAdded]
        assert steps[0].effect == IndividualCreated("sk_R2_dec1", "CDMitigationMethod")
        assert steps[1].effect == LinkAdded("hasAssessmentDecision", "sk_R2_dec1")
        assert kb.individuals["sk_R2_dec1"].skolem

    def test_no_matches_no_steps(self):
        kb = seed_kb()
        ax = bind_axiom(kb, builtin_axioms()[0][1])
        assert apply_axiom(kb, "R1", ax) == []

    def test_second_application_is_empty(self, usecase_load):
        kb = usecase_load.kb.clone()
        ax = dict(usecase_load.axioms)["R2"]
        first = apply_axiom(kb, "R2", ax)
        assert first
        assert apply_axiom(kb, "R2", ax, next_step_id=len(first)) == []

    def test_existing_witness_reused(self):
        kb = seed_kb()
        kb.assert_individual("d", {"AssessmentDecision"})
        kb.assert_individual("m", {"CDMitigationMethod"})
        kb.assert_object("d", "hasAssessmentDecision", "m")
        ax = bind_axiom(kb, parse_axiom(
            "AssessmentDecision SubClassOf (hasAssessmentDecision some CDMitigationMethod)"
        ))
        assert apply_axiom(kb, "X", ax) == []

    def test_membership_head_skips_existing_members(self):
        kb = seed_kb()
        kb.assert_individual("a", {"CyberAttack"})
        ax = bind_axiom(kb, parse_axiom("CyberAttack SubClassOf TargetEngagement"))
        assert apply_axiom(kb, "X", ax) == []  # already a member via the DAG


class TestSaturate:
    def test_usecase_steps(self, usecase_load):
        result = saturate(usecase_load.kb, usecase_load.axioms)
        effects = {(s.rule, type(s.effect).__name__, s.subject) for s in result.steps}
        assert ("R1", "MembershipAdded", "dec1") in effects
        assert ("R2", "IndividualCreated", "dec1") in effects
        assert ("R2", "LinkAdded", "dec1") in effects
        assert ("R3", "MembershipAdded", "eng1") in effects
        assert result.kb_after.member_of("dec1", "Effect")

    def test_empty_axiom_list(self, usecase_load):
        result = saturate(usecase_load.kb, [])
        assert result.steps == []
        kb_clone = usecase_load.kb.clone()
        kb_clone.materialize_closure()
        assert result.kb_after == kb_clone

    def test_idempotent(self, usecase_load):
        first = saturate(usecase_load.kb, usecase_load.axioms)
        second = saturate(first.kb_after, usecase_load.axioms)
        assert second.steps == []
        assert second.kb_after == first.kb_after

    def test_monotone(self, usecase_load):
        result = saturate(usecase_load.kb, usecase_load.axioms)
        before, after = usecase_load.kb, result.kb_after
        assert set(before.data_assertions) <= set(after.data_assertions)
        assert set(before.object_assertions) <= set(after.object_assertions)
        for name, ind in before.individuals.items():
            assert ind.asserted <= after.individuals[name].asserted

    def test_replay_reproduces(self, usecase_load):
        result = saturate(usecase_load.kb, usecase_load.axioms)
        assert replay(usecase_load.kb, result.steps) == result.kb_after

    def test_order_invariance(self, usecase_load):
        base = saturate(usecase_load.kb, usecase_load.axioms)
        rng = random.Random(11)
        for _ in range(5):
            perm = usecase_load.axioms[:]
            rng.shuffle(perm)
            assert saturate(usecase_load.kb, perm).kb_after == base.kb_after

    def test_derived_closure_invariant(self, usecase_load):
        result = saturate(usecase_load.kb, usecase_load.axioms)
        kb = result.kb_after
        for ind in kb.individuals.values():
            for c in ind.asserted:
                assert kb.ancestors(c) <= ind.asserted | set(ind.derived)

    def test_derived_membership_feeds_later_rules(self):
        kb = seed_kb()
        kb.declare_class("Stage1")
        kb.declare_class("Stage2")
        kb.assert_individual("x", {"AssessmentDecision"})
        axioms = [
            ("S2", bind_axiom(kb, parse_axiom("Stage1 SubClassOf Stage2"))),
            ("S1", bind_axiom(kb, parse_axiom("AssessmentDecision SubClassOf Stage1"))),
        ]
        result = saturate(kb, axioms)
        assert result.kb_after.member_of("x", "Stage2")
        assert result.iterations >= 2

    def test_cyclic_existential_terminates(self):
        kb = seed_kb()
        kb.declare_class("Node")
        kb.declare_property(
            __import__("cdaimo.kb", fromlist=["PropertyDef"]).PropertyDef(
                name="next", kind="object", range=frozenset({"Node"})
            )
        )
        kb.assert_individual("n0", {"Node"})
        axioms = [("LOOP", bind_axiom(kb, parse_axiom("Node SubClassOf (next some Node)")))]
        result = saturate(kb, axioms)
        # one skolem for the base individual, none for the skolem itself
        assert set(result.kb_after.individuals) == {"n0", "sk_LOOP_n0"}
        assert saturate(result.kb_after, axioms).steps == []


class TestExplain:
    def test_derived_membership_reaches_data_leaf(self, usecase_reasoned):
        result, _report = usecase_reasoned
        tree = explain(result, "dec1", ("class", "Effect"))
        statements = [leaf.statement for leaf in tree.leaves()]
        assert any("hasDataQuality 0.45" in s for s in statements)
        assert all(leaf.kind == "asserted" for leaf in tree.leaves())

    def test_asserted_membership_single_leaf(self, usecase_reasoned):
        result, _ = usecase_reasoned
        tree = explain(result, "sys1", ("class", "AIDSS"))
        assert tree.children == []
        assert tree.kind == "asserted"
        assert tree.source_line is not None

    def test_derived_link(self, usecase_reasoned):
        result, _ = usecase_reasoned
        tree = explain(result, "dec1", ("link", "hasAssessmentDecision", "sk_R2_dec1"))
        assert tree.kind == "derived" and tree.rule == "R2"
        assert all(leaf.kind == "asserted" for leaf in tree.leaves())

    def test_unknown_fact(self, usecase_reasoned):
        result, _ = usecase_reasoned
        with pytest.raises(UnknownFact):
            explain(result, "dm1", ("class", "Effect"))


# ---------------------------------------------------------------------------
# Randomized cross-checks (small versions; the acceptance suite scales up)


def test_oracle_equivalence_sample():
    rng = random.Random(99)
    for _ in range(60):
        kb = random_kb(rng, max_individuals=12)
        exprs = [random_bound_expr(rng, kb) for _ in range(5)]
        for name in kb.individuals:
            for expr in exprs:
                got, trace = holds(kb, name, expr)
                assert got == brute_holds(kb, name, expr)
                if got:
                    assert trace is not None

def test_saturation_properties_sample():
    rng = random.Random(41)
    for _ in range(25):
        kb = random_kb(rng, max_individuals=8)
        axioms = random_axioms(rng, kb, rng.randint(1, 4))
        result = saturate(kb, axioms)
        again = saturate(result.kb_after, axioms)
        assert again.steps == []
        assert replay(kb, result.steps) == result.kb_after
        perm = axioms[:]
        rng.shuffle(perm)
        assert saturate(kb, perm).kb_after == result.kb_after
        ids = [s.id for s in result.steps]
        assert ids == list(range(len(ids)))  # dense, ordered


def test_explain_leaves_asserted_in_random_saturations():
    rng = random.Random(17)
    for _ in range(15):
        kb = random_kb(rng, max_individuals=6)
        axioms = random_axioms(rng, kb, rng.randint(1, 3))
        result = saturate(kb, axioms)
        for s in result.steps:
            e = s.effect
            if isinstance(e, MembershipAdded):
                tree = explain(result, s.subject, ("class", e.cls))
            elif isinstance(e, LinkAdded):
                tree = explain(result, s.subject, ("link", e.prop, e.object))
            else:
                tree = explain(result, e.name, ("class", e.cls))
            assert all(leaf.kind == "asserted" for leaf in tree.leaves()), s
