"""Seeded Monte Carlo harness for exposure experiments and curve sampling.

Simulated examinees answer either by coin flip or according to the response
model at a fixed true ability. Per-session seeds derive from the master
seed by session index, so every selection strategy faces the same answer
streams and a report is a pure function of its inputs.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .bank import BankFile
from .irt import ItemParameters, icc, test_information
from .selection import SelectionStrategy
from .session import (
    Finished,
    KnowledgeReport,
    TerminationConfig,
    TestSession,
    start_session,
    submit_answer,
)

# Spreads master seed -> per-session seed pairs without collisions for any
# realistic examinee count.
_SEED_STRIDE = 1_000_003


class ModelKind(str, Enum):
    COIN = "coin"
    IRT = "irt"


@dataclass(frozen=True)
class ExamineeModel:
    """How simulated answers are drawn: fair-coin style or model-conforming."""

    kind: ModelKind
    true_theta: float | None = None
    p_correct: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_correct <= 1.0:
            raise ValueError(f"p_correct must lie in [0, 1], got {self.p_correct}")
        if self.kind is ModelKind.IRT and self.true_theta is None:
            raise ValueError("model-conforming examinee needs a true_theta")

    @classmethod
    def coin(cls, p_correct: float = 0.5) -> "ExamineeModel":
        return cls(kind=ModelKind.COIN, p_correct=p_correct)

    @classmethod
    def conforming(cls, true_theta: float) -> "ExamineeModel":
        return cls(kind=ModelKind.IRT, true_theta=true_theta)


@dataclass(frozen=True)
class ExposureReport:
    """Per-item administration counts over a simulated population."""

    strategy: SelectionStrategy
    n_examinees: int
    seed: int
    counts: dict[str, int]
    sigma: float
    total_administered: int
    finish_reasons: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.kind.value,
            "k": self.strategy.k,
            "n_examinees": self.n_examinees,
            "seed": self.seed,
            "sigma": self.sigma,
            "total_administered": self.total_administered,
            "finish_reasons": dict(sorted(self.finish_reasons.items())),
            "counts": dict(sorted(self.counts.items())),
        }


def simulate_answer(
    model: ExamineeModel, item: ItemParameters, rng: random.Random
) -> int:
    """One Bernoulli answer: p_correct for coins, the model probability otherwise."""
    if model.kind is ModelKind.COIN:
        p = model.p_correct
    else:
        assert model.true_theta is not None
        p = icc(item, model.true_theta)
    return 1 if rng.random() < p else 0


def session_seeds(master_seed: int, index: int) -> tuple[int, int]:
    """(answer_seed, session_seed) for one simulated examinee.

    Depends only on (master_seed, index), never on the strategy, so
    strategies being compared see identical answer streams.
    """
    base = master_seed * _SEED_STRIDE + index
    return 2 * base, 2 * base + 1


def run_simulated_session(
    bank: BankFile,
    model: ExamineeModel,
    strategy: SelectionStrategy,
    config: TerminationConfig,
    session_seed: int,
    answer_rng: random.Random,
    examinee_id: str = "sim",
) -> tuple[TestSession, KnowledgeReport]:
    """Drive one session to completion with simulated answers."""
    session, item_id = start_session(
        bank, config=config, strategy=strategy, seed=session_seed, examinee_id=examinee_id
    )
    while True:
        u = simulate_answer(model, bank.item(item_id).params, answer_rng)
        step = submit_answer(session, bank, item_id, u)
        if isinstance(step, Finished):
            return session, step.report
        item_id = step.item_id


def run_exposure_experiment(
    bank: BankFile,
    n_examinees: int,
    strategy: SelectionStrategy,
    model: ExamineeModel,
    config: TerminationConfig | None = None,
    seed: int = 0,
) -> ExposureReport:
    """Administer full simulated tests to a population and count exposures.

    Counts cover every bank item, zero-exposure items included; sigma is
    the population standard deviation of those counts.
    """
    if n_examinees < 1:
        raise ValueError(f"need at least one examinee, got {n_examinees}")
    config = config or TerminationConfig()

    counts = {item.id: 0 for item in bank.items}
    finish_reasons: dict[str, int] = {}
    total = 0
    for index in range(n_examinees):
        answer_seed, session_seed = session_seeds(seed, index)
        session, report = run_simulated_session(
            bank,
            model,
            strategy,
            config,
            session_seed,
            random.Random(answer_seed),
            examinee_id=f"sim-{index}",
        )
        for item_id, _ in session.administered:
            counts[item_id] += 1
            total += 1
        reason = report.finish_reason.value
        finish_reasons[reason] = finish_reasons.get(reason, 0) + 1

    return ExposureReport(
        strategy=strategy,
        n_examinees=n_examinees,
        seed=seed,
        counts=counts,
        sigma=statistics.pstdev(counts.values()),
        total_administered=total,
        finish_reasons=finish_reasons,
    )


def sample_test_information(
    items: Iterable[ItemParameters], theta_grid: Sequence[float]
) -> list[tuple[float, float]]:
    """(theta, summed information) pairs over an ascending ability grid."""
    grid = list(theta_grid)
    if not grid:
        raise ValueError("theta grid must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("theta grid must be strictly ascending")
    item_list = list(items)
    return [(theta, test_information(item_list, theta)) for theta in grid]
