"""Collateral-damage assessment for AI-system target engagement.

Public surface: the knowledge-base types and operations (kb), the built-in
schema and rules (seed), the rule-expression DSL (dsl), the forward-chaining
reasoner (reasoner), assessment metrics and reports (metrics), the scenario
file format and CLI (scenario, cli), and the what-if HTTP service (service).
"""

from .kb import (
    BoolV,
    CycleDetected,
    DataAssertion,
    DoubleV,
    DuplicateName,
    EmptyClassSet,
    EnumV,
    IntV,
    KbError,
    KindMismatch,
    KnowledgeBase,
    ObjectAssertion,
    PropertyDef,
    RangeViolation,
    StringV,
    UnknownName,
    Violation,
)
from .dsl import (
    And,
    Axiom,
    BindErrors,
    BoundAxiom,
    BoundExpr,
    DataSome,
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
from .seed import builtin_axioms, seed_kb
from .reasoner import (
    InferenceStep,
    SaturationResult,
    UnknownFact,
    apply_axiom,
    explain,
    holds,
    replay,
    saturate,
)
from .metrics import (
    CDAReport,
    MetricView,
    compose_report,
    extract_metrics,
    likelihood_band,
    promote_severity,
    report_jsonable,
)
from .scenario import (
    LoadResult,
    ScenarioDoc,
    ScenarioError,
    format_scenario,
    load_scenario,
    parse_scenario,
    whatif,
    write_report,
)

__version__ = "0.1.0"
