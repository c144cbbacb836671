import pytest

from cdaimo.kb import DoubleV, EnumV
from cdaimo.metrics import (
    OutOfRange,
    compose_report,
    extract_metrics,
    likelihood_band,
    promote_severity,
    report_jsonable,
)
from cdaimo.reasoner import saturate
from cdaimo.seed import LIKELIHOOD_BANDS, SEVERITY_LEVELS


class TestLikelihoodBand:
    @pytest.mark.parametrize(
        "p,band",
        [
            (0.81, "VeryHigh"),
            (0.0, "VeryLow"),
            (0.75, "VeryHigh"),  # lower-inclusive boundary, matching the rule facet
            (0.7499, "High"),
            (0.05, "Low"),
            (0.25, "Medium"),
            (0.5, "High"),
            (1.0, "VeryHigh"),
            (0.049999, "VeryLow"),
        ],
    )
    def test_bands(self, p, band):
        assert likelihood_band(p) == band

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            likelihood_band(1.5)
        with pytest.raises(OutOfRange):
            likelihood_band(-0.1)

    def test_monotone(self):
        probs = [i / 200 for i in range(201)]
        bands = [LIKELIHOOD_BANDS.index(likelihood_band(p)) for p in probs]
        assert bands == sorted(bands)

    def test_custom_cuts(self):
        assert likelihood_band(0.3, cuts=(0.1, 0.2, 0.4, 0.9)) == "Medium"


class TestPromoteSeverity:
    def test_severe_to_catastrophic(self):
        assert promote_severity("Severe") == "Catastrophic"

    def test_cap(self):
        assert promote_severity("Catastrophic") == "Catastrophic"

    def test_negligible_to_minor(self):
        assert promote_severity("Negligible") == "Minor"

    def test_monotone_and_cap_only_fixpoint(self):
        idx = {s: i for i, s in enumerate(SEVERITY_LEVELS)}
        for s in SEVERITY_LEVELS:
            promoted = promote_severity(s)
            assert idx[promoted] >= idx[s]
            if s != "Catastrophic":
                assert promoted != s


class TestExtractMetrics:
    def test_usecase_engagement(self, usecase_load):
        view = extract_metrics(usecase_load.kb, "eng1")
        assert view.temporal == "ShortTerm"
        assert view.spatial == "Regional"
        assert view.likelihood == 0.81
        assert view.severity == "Severe"
        assert view.data_quality == 0.45
        assert view.force == (
            "CivilianDataDestruction",
            "CivilianDigitalSystemDisruption",
            "CollateralDamage",
        )

    def test_sources_cite_assertions(self, usecase_load):
        view = extract_metrics(usecase_load.kb, "eng1")
        assert view.sources["likelihood"] == "lm1 hasProbability 0.81"
        assert view.sources["severity"] == "sev1 hasSeverity Severe"
        assert view.sources["data_quality"] == "dq1 hasDataQuality 0.45"

    def test_no_links_all_absent(self, usecase_load):
        view = extract_metrics(usecase_load.kb, "dm1")
        assert (view.temporal, view.spatial, view.severity) == (None, None, None)
        assert (view.likelihood, view.data_quality, view.force) == (None, None, ())

    def test_matches_scenario_file_walk(self, usecase_load, usecase_text):
        # independent walk of the parsed scenario text
        import re

        values = dict(
            re.findall(r"^data (\w+) (?:hasProbability|hasDataQuality) ([\d.]+)$",
                       usecase_text, re.M)
        )
        view = extract_metrics(usecase_load.kb, "eng1")
        assert view.likelihood == float(values["lm1"])
        assert view.data_quality == float(values["dq1"])

    def test_worst_case_wins(self, usecase_load):
        kb = usecase_load.kb.clone()
        kb.assert_individual("lm2", {"LikelihoodMetric"})
        kb.assert_data("lm2", "hasProbability", DoubleV(0.2))
        kb.assert_object("lm2", "isMetricUsedForAssessingEngagement", "eng1")
        view = extract_metrics(kb, "eng1")
        assert view.likelihood == 0.81  # the higher reading stays

    def test_out_of_range_probability(self, usecase_load):
        kb = usecase_load.kb.clone()
        kb.replace_data("lm1", "hasProbability", DoubleV(1.5))
        with pytest.raises(OutOfRange):
            extract_metrics(kb, "eng1")


class TestComposeReport:
    def test_usecase_entry(self, usecase_reasoned):
        _result, report = usecase_reasoned
        assert len(report.entries) == 1
        e = report.entries[0]
        assert e.decision == "dec1"
        assert e.collateral_risk_flag is True
        assert e.mitigation_required is True
        assert e.escalated is True
        assert e.likelihood_band == "VeryHigh"
        assert e.severity_raw == "Severe"
        assert e.severity_reported == "Catastrophic"
        assert e.engagements == ("eng1",)
        assert e.mitigation_via == ("sk_R2_dec1",)

    def test_empty_kb_empty_report(self):
        from cdaimo.seed import seed_kb

        result = saturate(seed_kb(), [])
        report = compose_report(result, "empty")
        assert report.entries == []

    def test_flags_match_independent_queries(self, usecase_load, usecase_reasoned):
        result, report = usecase_reasoned
        kb = result.kb_after
        from oracle import brute_member

        for e in report.entries:
            assert e.collateral_risk_flag == brute_member(kb, e.decision, "Effect")
            has_mitigation = any(
                a.subject == e.decision
                and a.property == "hasAssessmentDecision"
                and brute_member(kb, a.object, "CDMitigationMethod")
                for a in kb.object_assertions
            )
            assert e.mitigation_required == has_mitigation
            escalated = any(
                a.subject == e.decision
                and a.property == "isAssessedBy"
                and brute_member(kb, a.object, "TargetEngagement")
                and brute_member(kb, a.object, "EscalatedRiskEngagement")
                for a in kb.object_assertions
            )
            assert e.escalated == escalated

    def test_severity_promotion_only_when_escalated(self, usecase_reasoned):
        _result, report = usecase_reasoned
        for e in report.entries:
            raw = SEVERITY_LEVELS.index(e.severity_raw)
            reported = SEVERITY_LEVELS.index(e.severity_reported)
            assert reported >= raw
            if not e.escalated:
                assert reported == raw

    def test_audit_refs_include_r2_when_mitigating(self, usecase_reasoned):
        result, report = usecase_reasoned
        by_id = {s.id: s for s in result.steps}
        for e in report.entries:
            if e.mitigation_required:
                assert any(by_id[i].rule == "R2" for i in e.audit_steps)

    def test_jsonable_is_plain_data(self, usecase_reasoned):
        import json

        _result, report = usecase_reasoned
        obj = report_jsonable(report)
        json.dumps(obj)  # raises on anything non-serializable
        assert obj["decisions"][0]["likelihood"] == 0.81
