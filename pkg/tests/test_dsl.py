import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cdaimo.dsl import (
    And,
    BindErrors,
    DataSome,
    DoubleV,
    IllegalHeadShape,
    MaxInclusive,
    MinInclusive,
    Named,
    ObjectSome,
    ParseError,
    ValueEq,
    bind,
    bind_axiom,
    parse_axiom,
    parse_expr,
    render,
)
from cdaimo.kb import EnumV, StringV
from cdaimo.seed import RULE_1, RULE_2, RULE_3, builtin_axioms, seed_kb

from oracle import random_ast, random_parse_axiom


class TestParse:
    def test_single_name(self):
        assert parse_expr("Effect") == Named("Effect")

    def test_conjunction_flattens(self):
        assert parse_expr("A and (B and C)") == parse_expr("A and B and C")
        expr = parse_expr("A and (B and C)")
        assert isinstance(expr, And) and len(expr.parts) == 3

    def test_rule1_structure(self):
        lhs = parse_axiom(RULE_1).lhs
        assert isinstance(lhs, And)
        assert lhs.parts[0] == Named("AssessmentDecision")
        some = lhs.parts[1]
        assert isinstance(some, ObjectSome) and some.prop == "isassessedBy"
        filler = some.filler
        assert isinstance(filler, And)
        assert filler.parts[0] == Named("TargetEngagement")
        assert {p.prop for p in filler.parts[1:]} == {"hasTargetAISystem", "isProducingEffect"}

    def test_rule2_head(self):
        ax = parse_axiom(RULE_2)
        assert ax.rhs == ObjectSome(prop="hasAssessmentDecision", filler=Named("CDMitigationMethod"))

    def test_simple_axiom(self):
        ax = parse_axiom("A SubClassOf B")
        assert ax.lhs == Named("A")
        assert ax.rhs == Named("B")

    def test_illegal_head_conjunction(self):
        with pytest.raises(IllegalHeadShape):
            parse_axiom("A SubClassOf (B and C)")

    def test_illegal_head_nested_some(self):
        with pytest.raises(IllegalHeadShape):
            parse_axiom("A SubClassOf (p some (B and C))")

    def test_bare_some_sugar(self):
        assert parse_expr("p some C") == parse_expr("p some (C)")

    def test_keywords_case_insensitive(self):
        assert parse_expr("A AND B") == parse_expr("A and B")
        assert parse_axiom("A subclassof B") == parse_axiom("A SubClassOf B")

    def test_facet_literals(self):
        assert parse_expr("p max 0.5") == DataSome(prop="p", facet=MaxInclusive(DoubleV(0.5)))
        assert parse_expr('p value "Severe"') == DataSome(prop="p", facet=ValueEq(StringV("Severe")))

    def test_parse_is_pure(self):
        assert parse_axiom(RULE_2) == parse_axiom(RULE_2)


class TestParseErrors:
    @pytest.mark.parametrize(
        "text",
        [
            "A and",
            "and A",
            "p some",
            "(A",
            "A)",
            "p min",
            'p value "unterminated',
            "A SubClassOf",
            "SubClassOf B",
            "A B",
            "",
        ],
    )
    def test_rejected_with_position(self, text):
        with pytest.raises(ParseError) as info:
            parse_axiom(text)
        e = info.value
        assert 0 <= e.offset <= len(text)
        if e.found:
            assert text[e.offset:].startswith(e.found)

    def test_no_partial_results(self):
        with pytest.raises(ParseError):
            parse_expr("A and (B and")


class TestRender:
    def test_named(self):
        assert render(Named("Effect")) == "Effect"

    def test_rule2_contains_published_fragments(self):
        text = render(parse_axiom(RULE_2))
        assert 'hasSeverity value "Severe"' in text
        assert "hasProbability min 0.75" in text

    def test_rule3_enum_facet(self):
        text = render(parse_axiom(RULE_3))
        assert "hasSpread min Regional" in text

    def test_random_round_trip(self):
        rng = random.Random(20260808)
        for _ in range(300):
            ast = random_ast(rng)
            assert parse_expr(render(ast)) == ast

    def test_axiom_round_trip(self):
        rng = random.Random(4)
        for _ in range(200):
            ax = random_parse_axiom(rng)
            assert parse_axiom(render(ax)) == ax

    def test_seeded_axioms_round_trip(self):
        for rule_id, ax in builtin_axioms():
            assert parse_axiom(render(ax)) == ax, rule_id


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_hypothesis(seed):
    ast = random_ast(random.Random(seed))
    assert parse_expr(render(ast)) == ast


class TestBind:
    def test_rule1_canonicalizes_property_case(self):
        kb = seed_kb()
        bound = bind_axiom(kb, parse_axiom(RULE_1))
        text = render(bound)
        assert "isAssessedBy some" in text
        assert "isassessedBy" not in text

    def test_all_builtins_bind_cleanly(self):
        kb = seed_kb()
        for rule_id, ax in builtin_axioms():
            bind_axiom(kb, ax)

    def test_enum_property_rejects_numeric_facet(self):
        kb = seed_kb()
        with pytest.raises(BindErrors) as info:
            bind(kb, DataSome(prop="hasSeverity", facet=MinInclusive(DoubleV(0.5))))
        assert info.value.issues[0].code == "KindMismatch"

    def test_unknown_class(self):
        kb = seed_kb()
        with pytest.raises(BindErrors) as info:
            bind(kb, Named("Nonexistent"))
        assert info.value.issues[0].code == "UnknownName"

    def test_enum_member_unknown(self):
        kb = seed_kb()
        with pytest.raises(BindErrors) as info:
            bind(kb, parse_expr('hasSeverity value "Armageddon"'))
        assert info.value.issues[0].code == "EnumMemberUnknown"

    def test_object_property_in_facet_position(self):
        kb = seed_kb()
        with pytest.raises(BindErrors) as info:
            bind(kb, parse_expr("hasTargetAISystem min 3"))
        assert info.value.issues[0].code == "KindMismatch"

    def test_data_property_with_some(self):
        kb = seed_kb()
        with pytest.raises(BindErrors) as info:
            bind(kb, parse_expr("hasAccuracy some Effect"))
        assert info.value.issues[0].code == "KindMismatch"

    def test_connection_alias_accepted(self):
        kb = seed_kb()
        bound = bind(kb, parse_expr("Coonection"))
        assert bound.expr == Named("Connection")

    def test_enum_facet_types_to_member(self):
        kb = seed_kb()
        bound = bind(kb, parse_expr("hasSpread min Regional"))
        assert bound.expr.facet == MinInclusive(EnumV("SpreadLevel", "Regional"))

    def test_multiple_issues_reported_together(self):
        kb = seed_kb()
        with pytest.raises(BindErrors) as info:
            bind(kb, parse_expr("Ghost1 and Ghost2"))
        assert len(info.value.issues) == 2
        assert [i.path for i in info.value.issues] == [(0,), (1,)]
