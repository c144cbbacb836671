"""Assessment dimensions and report composition.

A MetricView gathers the temporal, spatial, force, severity, likelihood and
data-quality readings attached to one individual. Values are extracted from
the kb, never invented: every populated field records the assertion it came
from. compose_report() turns a saturation into one CDAReport entry per
assessment decision, with flags recomputed directly from the saturated kb
and severity promoted one level when the assessed engagement was escalated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .kb import (
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
from .reasoner import (
    IndividualCreated,
    LinkAdded,
    MembershipAdded,
    SaturationResult,
)
from .seed import LIKELIHOOD_BANDS, SEVERITY_LEVELS

DEFAULT_LIKELIHOOD_CUTS = (0.05, 0.25, 0.5, 0.75)

# metric class -> the data property read from its instances
_METRIC_PROPS = {
    "SeverityMetric": "hasSeverity",
    "LikelihoodMetric": "hasProbability",
    "DataQualityMetric": "hasDataQuality",
    "TemporalMetric": "hasDuration",
    "SpatialMetric": "hasSpread",
}


class OutOfRange(Exception):
    code = "OutOfRange"


@dataclass
class MetricView:
    individual: str
    temporal: Optional[str] = None  # DurationBand member
    spatial: Optional[str] = None  # SpreadLevel member
    force: tuple[str, ...] = ()  # Effect subclasses instantiated
    severity: Optional[str] = None  # SeverityLevel member
    likelihood: Optional[float] = None
    data_quality: Optional[float] = None
    sources: dict[str, str] = field(default_factory=dict)


@dataclass
class DecisionEntry:
    decision: str
    engagements: tuple[str, ...]
    collateral_risk_flag: bool
    mitigation_required: bool
    escalated: bool
    severity_raw: Optional[str]
    severity_reported: Optional[str]
    likelihood: Optional[float]
    likelihood_band: Optional[str]
    data_quality: Optional[float]
    effects: tuple  # ({"individual": ..., "classes": [...]}) per effect
    mitigation_via: tuple[str, ...]
    engagement_metrics: dict[str, MetricView]
    audit_steps: tuple[int, ...]


@dataclass
class CDAReport:
    scenario: str
    entries: list[DecisionEntry]
    steps: list  # InferenceStep list from the saturation
    likelihood_cuts: tuple[float, ...]
    disabled_rules: tuple[str, ...]


def likelihood_band(p: float, cuts: tuple[float, ...] = DEFAULT_LIKELIHOOD_CUTS) -> str:
    """Band for a probability. Boundaries are lower-inclusive, so each cut
    point belongs to the band above it; 0.75 is VeryHigh."""
    if not 0.0 <= p <= 1.0:
        raise OutOfRange(f"probability {p!r} outside [0, 1]")
    for i, cut in enumerate(cuts):
        if p < cut:
            return LIKELIHOOD_BANDS[i]
    return LIKELIHOOD_BANDS[len(cuts)]


def promote_severity(level: str) -> str:
    """One step up the severity scale; the top level maps to itself."""
    i = SEVERITY_LEVELS.index(level)
    return SEVERITY_LEVELS[min(i + 1, len(SEVERITY_LEVELS) - 1)]


def _plain(value: Value):
    if isinstance(value, EnumV):
        return value.member
    if isinstance(value, (DoubleV, IntV, BoolV)):
        return value.value
    if isinstance(value, StringV):
        return value.text
    raise OutOfRange(f"unexpected value {value!r}")


def extract_metrics(kb: KnowledgeBase, individual: str) -> MetricView:
    """Collect the metric readings linked to `individual`.

    Linked means: any outgoing object link to a metric-class instance, plus
    incoming isMetricUsedForAssessingEngagement links. When several readings
    of one dimension are linked, the worst case wins (highest severity,
    likelihood, duration and spread; lowest data quality).
    """
    if individual not in kb.individuals:
        raise UnknownName(
            f"unknown individual {individual!r}", namespace="individual", name=individual
        )
    view = MetricView(individual=individual)

    linked: list[str] = []
    for a in kb.object_assertions:
        if a.subject == individual:
            linked.append(a.object)
        elif a.object == individual and a.property == "isMetricUsedForAssessingEngagement":
            linked.append(a.subject)

    for target in sorted(set(linked)):
        for metric_cls, prop in _METRIC_PROPS.items():
            if metric_cls not in kb.classes or not kb.member_of(target, metric_cls):
                continue
            for value, _origin in kb.data_values(target, prop):
                _take(kb, view, metric_cls, target, prop, value)

    if "isProducingEffect" in kb.properties and "Effect" in kb.classes:
        force: set[str] = set()
        produced = list(kb.object_links(individual, "isProducingEffect"))
        for eff, _ in produced:
            for c in kb.individuals[eff].asserted:
                if kb.is_subclass_of(c, "Effect"):
                    force.add(c)
        view.force = tuple(sorted(force))
        if produced:
            view.sources["force"] = ", ".join(
                f"{individual} isProducingEffect {t}" for t, _ in produced
            )
    return view


def _take(kb, view: MetricView, metric_cls: str, target: str, prop: str, value: Value):
    cite = f"{target} {prop} {render_value(value)}"
    plain = _plain(value)
    if metric_cls == "SeverityMetric":
        if view.severity is None or SEVERITY_LEVELS.index(plain) > SEVERITY_LEVELS.index(view.severity):
            view.severity, view.sources["severity"] = plain, cite
    elif metric_cls == "LikelihoodMetric":
        if not 0.0 <= plain <= 1.0:
            raise OutOfRange(f"{cite}: probability outside [0, 1]")
        if view.likelihood is None or plain > view.likelihood:
            view.likelihood, view.sources["likelihood"] = plain, cite
    elif metric_cls == "DataQualityMetric":
        if not 0.0 <= plain <= 1.0:
            raise OutOfRange(f"{cite}: data quality outside [0, 1]")
        if view.data_quality is None or plain < view.data_quality:
            view.data_quality, view.sources["data_quality"] = plain, cite
    elif metric_cls == "TemporalMetric":
        order = kb.enums["DurationBand"]
        if view.temporal is None or order.index(plain) > order.index(view.temporal):
            view.temporal, view.sources["temporal"] = plain, cite
    elif metric_cls == "SpatialMetric":
        order = kb.enums["SpreadLevel"]
        if view.spatial is None or order.index(plain) > order.index(view.spatial):
            view.spatial, view.sources["spatial"] = plain, cite


def compose_report(
    result: SaturationResult,
    scenario_id: str,
    likelihood_cuts: tuple[float, ...] = DEFAULT_LIKELIHOOD_CUTS,
    disabled_rules: tuple[str, ...] = (),
) -> CDAReport:
    """One report entry per AssessmentDecision instance in the saturated kb,
    ordered by individual name. All flags are recomputed from kb_after."""
    kb = result.kb_after
    entries: list[DecisionEntry] = []
    decisions = (
        sorted(kb.instances_of("AssessmentDecision"))
        if "AssessmentDecision" in kb.classes
        else []
    )
    for d in decisions:
        view = extract_metrics(kb, d)
        engagements = tuple(
            t
            for t, _ in kb.object_links(d, "isAssessedBy")
            if "TargetEngagement" in kb.classes and kb.member_of(t, "TargetEngagement")
        )
        mitigation_via = tuple(
            t
            for t, _ in kb.object_links(d, "hasAssessmentDecision")
            if "CDMitigationMethod" in kb.classes and kb.member_of(t, "CDMitigationMethod")
        )
        escalated = any(
            kb.member_of(e, "EscalatedRiskEngagement")
            for e in engagements
            if "EscalatedRiskEngagement" in kb.classes
        )
        severity_raw = view.severity
        severity_reported = (
            promote_severity(severity_raw) if escalated and severity_raw else severity_raw
        )
        engagement_metrics = {e: extract_metrics(kb, e) for e in engagements}

        dq_candidates = [view.data_quality] + [
            m.data_quality for m in engagement_metrics.values()
        ]
        dq_candidates = [q for q in dq_candidates if q is not None]
        data_quality = min(dq_candidates) if dq_candidates else None

        effect_names: set[str] = set()
        for subject in (d, *engagements):
            for t, _ in kb.object_links(subject, "isProducingEffect"):
                effect_names.add(t)
        effects = tuple(
            {"individual": e, "classes": sorted(kb.individuals[e].asserted)}
            for e in sorted(effect_names)
        )

        related = {d, *engagements, *mitigation_via}
        audit_steps = tuple(s.id for s in result.steps if s.subject in related)

        entries.append(
            DecisionEntry(
                decision=d,
                engagements=engagements,
                collateral_risk_flag=kb.member_of(d, "Effect") if "Effect" in kb.classes else False,
                mitigation_required=bool(mitigation_via),
                escalated=escalated,
                severity_raw=severity_raw,
                severity_reported=severity_reported,
                likelihood=view.likelihood,
                likelihood_band=(
                    likelihood_band(view.likelihood, likelihood_cuts)
                    if view.likelihood is not None
                    else None
                ),
                data_quality=data_quality,
                effects=effects,
                mitigation_via=mitigation_via,
                engagement_metrics=engagement_metrics,
                audit_steps=audit_steps,
            )
        )
    return CDAReport(
        scenario=scenario_id,
        entries=entries,
        steps=list(result.steps),
        likelihood_cuts=tuple(likelihood_cuts),
        disabled_rules=tuple(disabled_rules),
    )


def report_jsonable(report: CDAReport) -> dict:
    """Plain-data form of a report; the canonical wire and file format."""

    def effect_desc(step) -> dict:
        e = step.effect
        if isinstance(e, MembershipAdded):
            return {"kind": "membership", "class": e.cls}
        if isinstance(e, LinkAdded):
            return {"kind": "link", "property": e.prop, "object": e.object}
        if isinstance(e, IndividualCreated):
            return {"kind": "created", "individual": e.name, "class": e.cls}
        raise OutOfRange(f"unexpected effect {e!r}")

    def view_jsonable(m: MetricView) -> dict:
        return {
            "temporal": m.temporal,
            "spatial": m.spatial,
            "force": list(m.force),
            "severity": m.severity,
            "likelihood": m.likelihood,
            "data_quality": m.data_quality,
        }

    return {
        "scenario": report.scenario,
        "config": {
            "likelihood_cuts": list(report.likelihood_cuts),
            "disabled_rules": list(report.disabled_rules),
        },
        "decisions": [
            {
                "decision": e.decision,
                "engagements": list(e.engagements),
                "collateral_risk_flag": e.collateral_risk_flag,
                "mitigation_required": e.mitigation_required,
                "escalated": e.escalated,
                "severity_raw": e.severity_raw,
                "severity_reported": e.severity_reported,
                "likelihood": e.likelihood,
                "likelihood_band": e.likelihood_band,
                "data_quality": e.data_quality,
                "effects": list(e.effects),
                "mitigation_via": list(e.mitigation_via),
                "engagement_metrics": {
                    name: view_jsonable(m) for name, m in e.engagement_metrics.items()
                },
                "audit_steps": list(e.audit_steps),
            }
            for e in report.entries
        ],
        "steps": [
            {
                "id": s.id,
                "rule": s.rule,
                "subject": s.subject,
                "effect": effect_desc(s),
            }
            for s in report.steps
        ],
    }
