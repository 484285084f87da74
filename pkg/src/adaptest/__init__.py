"""Adaptive testing engine built on the three-parameter logistic model."""

from .irt import (
    EstimationResult,
    ItemParameters,
    estimate_ability,
    icc,
    icc_derivative,
    item_information,
    score_contribution,
    standard_error,
    test_information,
)
from .selection import ItemPool, SelectionStrategy, StrategyKind
from .session import (
    FinishReason,
    KnowledgeReport,
    Phase,
    TerminationConfig,
    TestSession,
    start_session,
    submit_answer,
)

__version__ = "0.1.0"

__all__ = [
    "EstimationResult",
    "FinishReason",
    "ItemParameters",
    "ItemPool",
    "KnowledgeReport",
    "Phase",
    "SelectionStrategy",
    "StrategyKind",
    "TerminationConfig",
    "TestSession",
    "estimate_ability",
    "icc",
    "icc_derivative",
    "item_information",
    "score_contribution",
    "standard_error",
    "start_session",
    "submit_answer",
    "test_information",
]
