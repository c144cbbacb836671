"""Built-in assessment schema and rules.

seed_kb() ships the domain vocabulary every scenario starts from: the four
upper classes (TargetAISystem, MilitaryOperation, TargetEngagement, Effect)
with their named sub-classes, the rule-support classes, the data and object
properties, and the ordered enums. builtin_axioms() ships the three built-in
rules:

    R1  classifies an assessment decision into Effect (collateral-damage
        risk) when the engaged AI system's data-quality score is at most 0.5
        and the engagement produces collateral damage.
    R2  attaches a mitigation-method requirement to a decision whose
        collateral-damage probability is at least 0.75 and whose expected
        severity is Severe.
    R3  flags an engagement as EscalatedRiskEngagement when the target AI
        system shares computational resources with civilian infrastructure
        and the spatial assessment is Regional or wider; the report layer
        promotes severity one level for flagged engagements.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dsl import Axiom, parse_axiom
from .kb import NS_CLASS, KnowledgeBase, PropertyDef

UPPER_CLASSES = ("TargetAISystem", "MilitaryOperation", "TargetEngagement", "Effect")

SEVERITY_LEVELS = ("Negligible", "Minor", "Moderate", "Severe", "Catastrophic")
SPREAD_LEVELS = ("Local", "Regional", "National", "Transnational")
DURATION_BANDS = ("ShortTerm", "MediumTerm", "LongTerm")
LIKELIHOOD_BANDS = ("VeryLow", "Low", "Medium", "High", "VeryHigh")
ALTERATION_LEVELS = ("very_low", "low", "medium", "high")
CYBER_ATTACK_STATUS = ("active", "inactive", "disabled")

_ENUMS = (
    ("SeverityLevel", SEVERITY_LEVELS),
    ("SpreadLevel", SPREAD_LEVELS),
    ("DurationBand", DURATION_BANDS),
    ("LikelihoodBand", LIKELIHOOD_BANDS),
    ("AlterationLevel", ALTERATION_LEVELS),
    ("CyberAttackStatus", CYBER_ATTACK_STATUS),
)

# (class, parents)
_CLASSES = (
    ("TargetAISystem", ()),
    ("MilitaryOperation", ()),
    ("TargetEngagement", ()),
    ("Effect", ()),
    # under TargetAISystem: system categories, architecture types, components
    ("AIDSS", ("TargetAISystem",)),
    ("AIEnabledSystem", ("TargetAISystem",)),
    ("AIEnabledWeaponSystem", ("TargetAISystem",)),
    ("DataDriven", ("TargetAISystem",)),
    ("KnowledgeDriven", ("TargetAISystem",)),
    ("NeuroSymbolic", ("TargetAISystem",)),
    ("Dataset", ("TargetAISystem",)),
    ("Precision", ("TargetAISystem",)),
    ("Rule", ("TargetAISystem",)),
    ("InferenceEngine", ("TargetAISystem",)),
    ("AutonomyLevel", ("TargetAISystem",)),
    # under MilitaryOperation
    ("AssessmentMethod", ("MilitaryOperation",)),
    ("RuleQuality", ("MilitaryOperation",)),
    ("InterpretationClarity", ("MilitaryOperation",)),
    ("OnTarget", ("MilitaryOperation",)),
    # under TargetEngagement
    ("AttackVector", ("TargetEngagement",)),
    ("EngagementDecision", ("TargetEngagement",)),
    ("CyberAttack", ("TargetEngagement",)),
    ("EWAttack", ("TargetEngagement",)),
    ("PhysicalAttack", ("TargetEngagement",)),
    # under Effect
    ("MilitaryAdvantage", ("Effect",)),
    ("CollateralDamage", ("Effect",)),
    ("CollateralDamageLevel", ("Effect",)),
    ("CollateralDamageMitigationAction", ("Effect",)),
    ("CivilianPhysicalInjury", ("Effect",)),
    ("CivilianDataDestruction", ("Effect",)),
    ("CivilianDigitalSystemDisruption", ("Effect",)),
    ("CollateralDamageTolerance", ("Effect",)),
    # rule-support classes
    ("AssessmentDecision", ()),
    ("DecisionMaker", ()),
    ("RoE", ()),
    ("ModelPerformance", ()),
    ("Vulnerability", ()),
    ("Exploit", ()),
    ("Connection", ()),
    ("EngagementMethod", ()),
    ("DataQualityMetric", ()),
    ("LikelihoodMetric", ()),
    ("SeverityMetric", ()),
    ("TemporalMetric", ()),
    ("SpatialMetric", ()),
    ("ForceMetric", ()),
    ("CDMitigationMethod", ()),
    ("EscalatedRiskEngagement", ()),
    ("AISystemType", ()),
    ("AISystemCategory", ()),
    ("AITechnique", ()),
)

# (name, kind, range, domain)
_PROPERTIES = (
    ("hasAccuracy", "data", "double", ("TargetAISystem",)),
    ("hasAITechnique", "data", "string", ("TargetAISystem",)),
    ("hasDefenseMechanism", "data", "bool", ("TargetAISystem",)),
    ("hasAttackVectorID", "data", "int", ("TargetEngagement",)),
    ("hasCyberAttackStatus", "data", "enum:CyberAttackStatus", ("CyberAttack",)),
    ("hasCDOnCivilianDigitalSystemInfo", "data", "string", ("Effect",)),
    ("hasCivilianDataAlterationLevel", "data", "enum:AlterationLevel", ("Effect",)),
    ("hasConsistency", "data", "double", ()),
    ("hasLongTermImpact", "data", "double", ("Effect",)),
    ("hasDataQuality", "data", "double", ("DataQualityMetric",)),
    ("hasProbability", "data", "double", ("LikelihoodMetric",)),
    ("hasSeverity", "data", "enum:SeverityLevel", ("SeverityMetric",)),
    ("isSharedWithCivilianInfrastructure", "data", "bool", ("Connection",)),
    ("hasSpread", "data", "enum:SpreadLevel", ("SpatialMetric",)),
    ("hasDuration", "data", "enum:DurationBand", ("TemporalMetric",)),
    ("isAssessedBy", "object", (), ("AssessmentDecision",)),
    ("isUsingRoE", "object", ("RoE",), ("MilitaryOperation",)),
    (
        "hasModelPerformance",
        "object",
        ("ModelPerformance",),
        ("AITechnique", "AISystemType", "AISystemCategory"),
    ),
    ("hasVulnerability", "object", ("Vulnerability",), ("TargetAISystem",)),
    ("isExploitingVulnerability", "object", ("Vulnerability",), ("Exploit",)),
    ("isContributingToCollateralDamage", "object", ("CollateralDamage",), ("Connection",)),
    (
        "isMetricUsedForAssessingEngagement",
        "object",
        ("TargetEngagement", "EngagementMethod"),
        (
            "SpatialMetric",
            "TemporalMetric",
            "ForceMetric",
            "SeverityMetric",
            "DataQualityMetric",
            "LikelihoodMetric",
        ),
    ),
    ("isProducingEffect", "object", ("Effect",), ("TargetEngagement", "MilitaryOperation")),
    ("hasTemporalAssessment", "object", ("TemporalMetric",), ("TargetEngagement",)),
    ("hasSpatialAssessment", "object", ("SpatialMetric",), ("TargetEngagement",)),
    ("hasTargetAISystem", "object", ("TargetAISystem",), ("TargetEngagement",)),
    ("isValidatedBy", "object", ("DataQualityMetric",), ("TargetAISystem",)),
    ("hasLikelihoodMetric", "object", ("LikelihoodMetric",), ("AssessmentDecision",)),
    ("hasSeverityMetric", "object", ("SeverityMetric",), ("AssessmentDecision",)),
    ("hasAssessmentDecision", "object", ("CDMitigationMethod",), ("AssessmentDecision",)),
    ("hasConnection", "object", ("Connection",), ("TargetAISystem",)),
)

# Rule text is kept in its published spelling; the binder canonicalizes the
# lowercase "isassessedBy" when the rule is bound against a kb.
RULE_1 = (
    "AssessmentDecision and (isassessedBy some (TargetEngagement"
    " and (hasTargetAISystem some (TargetAISystem and isValidatedBy some"
    " (DataQualityMetric and (hasDataQuality max 0.5))))"
    " and (isProducingEffect some CollateralDamage)))"
    " SubClassOf Effect"
)

RULE_2 = (
    "AssessmentDecision"
    " and (hasLikelihoodMetric some (LikelihoodMetric and (hasProbability min 0.75)))"
    ' and (hasSeverityMetric some (SeverityMetric and (hasSeverity value "Severe")))'
    " SubClassOf (hasAssessmentDecision some CDMitigationMethod)"
)

RULE_3 = (
    "TargetEngagement"
    " and (hasTargetAISystem some (TargetAISystem and (hasConnection some"
    " (Connection and (isSharedWithCivilianInfrastructure value true)))))"
    " and (hasSpatialAssessment some (SpatialMetric and (hasSpread min Regional)))"
    " SubClassOf EscalatedRiskEngagement"
)

_AXIOMS = (
    ("R1", RULE_1, "low data quality plus collateral damage marks the decision as an Effect"),
    ("R2", RULE_2, "very likely and Severe harm requires a mitigation method"),
    ("R3", RULE_3, "shared civilian infrastructure with regional spread escalates the engagement"),
)


@dataclass(frozen=True)
class SeedManifest:
    upper_classes: tuple[str, ...]
    classes: tuple
    properties: tuple
    enums: tuple
    axioms: tuple  # (rule id, text, provenance note)


MANIFEST = SeedManifest(
    upper_classes=UPPER_CLASSES,
    classes=_CLASSES,
    properties=_PROPERTIES,
    enums=_ENUMS,
    axioms=_AXIOMS,
)


def seed_kb() -> KnowledgeBase:
    """Fresh knowledge base holding the full seeded schema and no individuals."""
    kb = KnowledgeBase()
    for name, members in MANIFEST.enums:
        kb.declare_enum(name, members)
    for name, parents in MANIFEST.classes:
        kb.declare_class(name, parents)
    for name, kind, rng, domain in MANIFEST.properties:
        kb.declare_property(
            PropertyDef(
                name=name,
                kind=kind,
                range=rng if kind == "data" else frozenset(rng),
                domain=frozenset(domain),
            )
        )
    # The source material misspells Connection once; accept it on input.
    kb.register_alias(NS_CLASS, "Coonection", "Connection")
    return kb


def builtin_axioms() -> list[tuple[str, Axiom]]:
    """The three built-in rules as parsed, unbound ASTs, in application order."""
    return [(rule_id, parse_axiom(text)) for rule_id, text, _note in MANIFEST.axioms]
