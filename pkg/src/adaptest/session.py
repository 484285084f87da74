"""Adaptive test sessions.

A session walks through a fixed five-item warmup covering every difficulty
level, seeds the ability estimate from the warmup score, then alternates
ability re-estimation and informative item selection until a termination
rule fires. All randomness flows from the session's recorded seed.
"""

from __future__ import annotations

import random
import uuid
from dataclasses import dataclass, field
from enum import Enum

from .bank import BankFile
from .irt import estimate_ability, standard_error, test_information
from .selection import ItemPool, SelectionStrategy, select_next

# Warmup spans all tutor difficulty levels, easiest first.
WARMUP_LEVELS = (1, 2, 3, 4, 5)


class InsufficientBankError(ValueError):
    """The bank cannot cover the warmup plan."""

    def __init__(self, missing_levels: list[int]):
        self.missing_levels = missing_levels
        super().__init__(
            "bank has no active items at difficulty level(s) "
            + ", ".join(str(level) for level in missing_levels)
        )


class OutOfOrderAnswerError(ValueError):
    """An answer arrived for an item other than the pending one."""


class SessionFinishedError(RuntimeError):
    """An answer arrived after the session terminated."""


class Phase(str, Enum):
    WARMUP = "warmup"
    ADAPTIVE = "adaptive"
    FINISHED = "finished"


class FinishReason(str, Enum):
    MAX_ITEMS = "max_items"
    THETA_OUT_OF_RANGE = "theta_out_of_range"
    SE_REACHED = "se_reached"
    POOL_EXHAUSTED = "pool_exhausted"


@dataclass(frozen=True)
class TerminationConfig:
    """Stopping rules; max_items counts adaptive items, warmup is on top."""

    max_items: int = 30
    min_items: int = 5
    se_threshold: float | None = None
    theta_guard: float = 4.0

    def __post_init__(self) -> None:
        if self.min_items > self.max_items:
            raise ValueError(
                f"min_items={self.min_items} exceeds max_items={self.max_items}"
            )
        if self.se_threshold is not None and self.se_threshold <= 0:
            raise ValueError(f"se_threshold must be positive, got {self.se_threshold}")
        if self.theta_guard <= 0:
            raise ValueError(f"theta_guard must be positive, got {self.theta_guard}")


@dataclass(frozen=True)
class ItemOutcome:
    item_id: str
    u: int
    difficulty_level: int


@dataclass(frozen=True)
class KnowledgeReport:
    """What the examinee sees after the test: score, error, and breakdown."""

    theta: float
    standard_error: float | None
    finish_reason: FinishReason
    items: tuple[ItemOutcome, ...]
    level_correct_ratios: dict[int, float]


@dataclass(frozen=True)
class NextItem:
    item_id: str


@dataclass(frozen=True)
class Finished:
    report: KnowledgeReport


@dataclass
class TestSession:
    """Full adaptive-test state; mutated only through submit_answer.

    A session is a unit of serialization: callers must not submit answers
    to the same session concurrently. Distinct sessions are independent.
    """

    id: str
    examinee_id: str
    config: TerminationConfig
    strategy: SelectionStrategy
    rng_seed: int
    phase: Phase
    warmup_plan: tuple[str, ...]
    pending_item: str | None
    administered: list[tuple[str, int]] = field(default_factory=list)
    theta: float = 0.0
    se: float | None = None
    theta_history: list[float] = field(default_factory=list)
    estimate_diverged: bool = False
    estimate_converged: bool = False
    finish_reason: FinishReason | None = None
    report: KnowledgeReport | None = None
    rng: random.Random = field(default_factory=random.Random, repr=False)

    @property
    def adaptive_count(self) -> int:
        return max(0, len(self.administered) - len(self.warmup_plan))

    @property
    def administered_ids(self) -> set[str]:
        return {item_id for item_id, _ in self.administered}


def initial_theta(correct_count: int) -> float:
    """Ability seed from the warmup score: -2.5 + count, symmetric around 0."""
    if correct_count not in range(6):
        raise ValueError(f"warmup correct count must be 0..5, got {correct_count}")
    return -2.5 + correct_count


def start_session(
    bank: BankFile,
    config: TerminationConfig | None = None,
    strategy: SelectionStrategy | None = None,
    seed: int | None = None,
    examinee_id: str = "",
    session_id: str | None = None,
) -> tuple[TestSession, str]:
    """Create a session with its warmup plan and return it with the first item.

    The plan holds one item per difficulty level (easiest to hardest), each
    drawn uniformly within its level from the session's seeded generator.
    """
    config = config or TerminationConfig()
    strategy = strategy or SelectionStrategy()
    if seed is None:
        seed = random.SystemRandom().randrange(2**63)
    rng = random.Random(seed)

    by_level: dict[int, list[str]] = {level: [] for level in WARMUP_LEVELS}
    for item in bank.active_items():
        if item.difficulty_level in by_level:
            by_level[item.difficulty_level].append(item.id)

    missing = [level for level in WARMUP_LEVELS if not by_level[level]]
    if missing:
        raise InsufficientBankError(missing)

    plan = tuple(rng.choice(sorted(by_level[level])) for level in WARMUP_LEVELS)
    session = TestSession(
        id=session_id or uuid.uuid4().hex,
        examinee_id=examinee_id,
        config=config,
        strategy=strategy,
        rng_seed=seed,
        phase=Phase.WARMUP,
        warmup_plan=plan,
        pending_item=plan[0],
        rng=rng,
    )
    return session, plan[0]


def submit_answer(
    session: TestSession, bank: BankFile, item_id: str, u: int
) -> NextItem | Finished:
    """Record one scored answer and advance the session.

    Warmup answers step through the plan; completing warmup seeds theta
    from the correct count. Adaptive answers re-estimate theta over the
    whole response history (warm-started from the current estimate), run
    the termination rules, and select the next item if the test goes on.
    """
    if session.phase is Phase.FINISHED:
        raise SessionFinishedError(f"session {session.id} is already finished")
    if item_id != session.pending_item:
        raise OutOfOrderAnswerError(
            f"expected answer for item {session.pending_item!r}, got {item_id!r}"
        )
    if u not in (0, 1):
        raise ValueError(f"answer correctness must be 0 or 1, got {u}")

    session.administered.append((item_id, u))
    session.pending_item = None

    if session.phase is Phase.WARMUP:
        answered = len(session.administered)
        if answered < len(session.warmup_plan):
            session.pending_item = session.warmup_plan[answered]
            return NextItem(session.pending_item)
        correct = sum(answer for _, answer in session.administered)
        session.theta = initial_theta(correct)
        session.theta_history.append(session.theta)
        session.se = standard_error(
            test_information(_administered_params(session, bank), session.theta)
        )
        session.phase = Phase.ADAPTIVE
    else:
        responses = [
            (bank.item(answered_id).params, answer)
            for answered_id, answer in session.administered
        ]
        result = estimate_ability(
            responses,
            theta0=session.theta,
            theta_guard=session.config.theta_guard,
        )
        session.theta = result.theta
        session.se = result.standard_error
        session.estimate_diverged = result.diverged
        session.estimate_converged = result.converged
        session.theta_history.append(session.theta)

    reason = check_termination(session, bank)
    if reason is not None:
        return Finished(_finish(session, bank, reason))

    pool = _remaining_pool(session, bank)
    session.pending_item = select_next(
        pool, session.theta, session.strategy, session.rng
    )
    return NextItem(session.pending_item)


def check_termination(session: TestSession, bank: BankFile) -> FinishReason | None:
    """First matching stopping rule, in fixed precedence order.

    Out-of-range theta (including a diverged estimate clamped at the
    guard), then the adaptive item cap, then the standard-error target,
    then pool exhaustion.
    """
    if session.phase is not Phase.ADAPTIVE:
        raise ValueError("termination rules apply only to the adaptive phase")
    config = session.config
    if session.estimate_diverged or abs(session.theta) > config.theta_guard:
        return FinishReason.THETA_OUT_OF_RANGE
    if session.adaptive_count >= config.max_items:
        return FinishReason.MAX_ITEMS
    if (
        config.se_threshold is not None
        and len(session.administered) >= config.min_items
        and session.se is not None
        and session.se <= config.se_threshold
    ):
        return FinishReason.SE_REACHED
    if not _remaining_pool_ids(session, bank):
        return FinishReason.POOL_EXHAUSTED
    return None


def build_report(session: TestSession, bank: BankFile) -> KnowledgeReport:
    """Knowledge report over everything administered so far."""
    outcomes = tuple(
        ItemOutcome(item_id, u, bank.item(item_id).difficulty_level)
        for item_id, u in session.administered
    )
    totals: dict[int, list[int]] = {}
    for outcome in outcomes:
        totals.setdefault(outcome.difficulty_level, []).append(outcome.u)
    ratios = {
        level: sum(answers) / len(answers) for level, answers in sorted(totals.items())
    }
    assert session.finish_reason is not None
    return KnowledgeReport(
        theta=session.theta,
        standard_error=session.se,
        finish_reason=session.finish_reason,
        items=outcomes,
        level_correct_ratios=ratios,
    )


def _finish(session: TestSession, bank: BankFile, reason: FinishReason) -> KnowledgeReport:
    session.phase = Phase.FINISHED
    session.finish_reason = reason
    session.pending_item = None
    session.report = build_report(session, bank)
    return session.report


def _administered_params(session: TestSession, bank: BankFile):
    return (bank.item(item_id).params for item_id, _ in session.administered)


def _remaining_pool_ids(session: TestSession, bank: BankFile) -> list[str]:
    administered = session.administered_ids
    return [item.id for item in bank.active_items() if item.id not in administered]


def _remaining_pool(session: TestSession, bank: BankFile) -> ItemPool:
    administered = session.administered_ids
    return ItemPool(
        tuple(
            (item.id, item.params)
            for item in bank.active_items()
            if item.id not in administered
        )
    )
