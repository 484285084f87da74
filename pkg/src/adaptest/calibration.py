"""Item parameter initialization and difficulty estimation from answer logs.

Guessing comes from the item's option structure, difficulty from the tutor
level or, once self-assessment data exists, from the proportion of
incorrect first answers per item.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from math import comb
from pathlib import Path
from typing import Iterable, Mapping, Sequence

# Tutor difficulty levels span very easy (1) to very difficult (5),
# mapped linearly onto the ability scale.
DIFFICULTY_LEVELS = (1, 2, 3, 4, 5)

# Estimates built from fewer first answers than this are kept but flagged.
MIN_CONFIDENT_SAMPLE = 5

# Entries whose tutor-assigned and observed difficulty differ by a full
# level step on the unit scale get flagged in the comparison report.
FLAG_DISCREPANCY = 0.25

RESPONSE_LOG_FIELDS = ("user_id", "item_id", "correct", "timestamp")


class AmbiguousLogError(ValueError):
    """Two log records collide on (user, item, timestamp)."""


class NoOverlapError(ValueError):
    """The tutor levels and the estimates have no item ids in common."""


class ResponseLogFormatError(ValueError):
    """The response-log text does not match the documented record layout."""


@dataclass(frozen=True)
class ResponseLogRecord:
    user_id: str
    item_id: str
    correct: int
    timestamp: int


@dataclass(frozen=True)
class DifficultyEstimate:
    """Per-item difficulty from first answers: p_incorrect and its b-scale value."""

    item_id: str
    p_incorrect: float
    n_first_answers: int
    b_estimate: float
    low_confidence: bool


@dataclass(frozen=True)
class CalibrationEntry:
    item_id: str
    original_difficulty: float
    estimated_difficulty: float

    @property
    def discrepancy(self) -> float:
        return abs(self.original_difficulty - self.estimated_difficulty)


@dataclass(frozen=True)
class CalibrationReport:
    """Tutor-assigned vs observed difficulty, both on the [0, 1] scale."""

    entries: tuple[CalibrationEntry, ...]
    mean_original: float
    mean_estimated: float
    flagged: tuple[CalibrationEntry, ...]


def guessing_from_structure(n_options: int, n_correct: int) -> float:
    """Probability of blindly guessing the exact correct option subset.

    1 / C(n_options, n_correct): 0.5 for true/false, 0.1 for two correct
    out of five.
    """
    if n_options < 2 or not 1 <= n_correct < n_options:
        raise ValueError(
            f"need 1 <= n_correct < n_options with n_options >= 2, "
            f"got n_options={n_options}, n_correct={n_correct}"
        )
    return 1.0 / comb(n_options, n_correct)


def level_to_b(level: int) -> float:
    """Difficulty level 1..5 mapped linearly onto [-3, 3]."""
    if level not in DIFFICULTY_LEVELS:
        raise ValueError(f"difficulty level must be 1..5, got {level}")
    return -3.0 + 1.5 * (level - 1)


def level_to_unit(level: int) -> float:
    """Difficulty level 1..5 on the unit scale: (level - 1) / 4."""
    if level not in DIFFICULTY_LEVELS:
        raise ValueError(f"difficulty level must be 1..5, got {level}")
    return (level - 1) / 4


def unit_to_b(x: float) -> float:
    """Unit-scale difficulty onto the ability scale: 6x - 3."""
    return 6.0 * x - 3.0


def first_answers(log: Iterable[ResponseLogRecord]) -> dict[str, list[int]]:
    """Each user's earliest answer per item, grouped by item.

    Re-attempts are dropped; only the record with the smallest timestamp
    per (user, item) pair counts. Lists are ordered by (timestamp, user).
    """
    earliest: dict[tuple[str, str], ResponseLogRecord] = {}
    seen: set[tuple[str, str, int]] = set()
    for record in log:
        triple = (record.user_id, record.item_id, record.timestamp)
        if triple in seen:
            raise AmbiguousLogError(
                f"duplicate record for user {record.user_id!r}, item "
                f"{record.item_id!r} at timestamp {record.timestamp}"
            )
        seen.add(triple)
        key = (record.user_id, record.item_id)
        current = earliest.get(key)
        if current is None or record.timestamp < current.timestamp:
            earliest[key] = record

    firsts: dict[str, list[ResponseLogRecord]] = {}
    for record in earliest.values():
        firsts.setdefault(record.item_id, []).append(record)
    return {
        item_id: [
            r.correct for r in sorted(records, key=lambda r: (r.timestamp, r.user_id))
        ]
        for item_id, records in sorted(firsts.items())
    }


def estimate_difficulty(
    firsts: Mapping[str, Sequence[int]],
) -> tuple[list[DifficultyEstimate], list[str]]:
    """Difficulty per item as the incorrect share of first answers.

    Returns (estimates, skipped) where skipped lists items that had no
    first answers to estimate from. b_estimate maps p_incorrect through
    6p - 3, matching the level endpoints.
    """
    estimates: list[DifficultyEstimate] = []
    skipped: list[str] = []
    for item_id in sorted(firsts):
        answers = firsts[item_id]
        if not answers:
            skipped.append(item_id)
            continue
        n = len(answers)
        p_incorrect = sum(1 for u in answers if u == 0) / n
        estimates.append(
            DifficultyEstimate(
                item_id=item_id,
                p_incorrect=p_incorrect,
                n_first_answers=n,
                b_estimate=unit_to_b(p_incorrect),
                low_confidence=n < MIN_CONFIDENT_SAMPLE,
            )
        )
    return estimates, skipped


def calibration_report(
    original: Mapping[str, int],
    estimates: Iterable[DifficultyEstimate],
) -> CalibrationReport:
    """Compare tutor levels against estimated difficulties on the unit scale.

    Covers the items present in both inputs; raises NoOverlapError when
    there are none. Entries a full level step apart are flagged.
    """
    by_id = {e.item_id: e for e in estimates}
    shared = sorted(set(original) & set(by_id))
    if not shared:
        raise NoOverlapError("tutor levels and estimates share no item ids")

    entries = tuple(
        CalibrationEntry(
            item_id=item_id,
            original_difficulty=level_to_unit(original[item_id]),
            estimated_difficulty=by_id[item_id].p_incorrect,
        )
        for item_id in shared
    )
    flagged = tuple(e for e in entries if e.discrepancy >= FLAG_DISCREPANCY)
    return CalibrationReport(
        entries=entries,
        mean_original=sum(e.original_difficulty for e in entries) / len(entries),
        mean_estimated=sum(e.estimated_difficulty for e in entries) / len(entries),
        flagged=flagged,
    )


def parse_response_log(text: str) -> list[ResponseLogRecord]:
    """Parse the delimited response-log format.

    One record per line with a mandatory header row naming the fields
    user_id, item_id, correct (0 or 1), timestamp (epoch seconds).
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ResponseLogFormatError("response log is empty; header row required")
    if [h.strip() for h in header] != list(RESPONSE_LOG_FIELDS):
        raise ResponseLogFormatError(
            f"header must be {','.join(RESPONSE_LOG_FIELDS)}, got {','.join(header)}"
        )

    records: list[ResponseLogRecord] = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise ResponseLogFormatError(f"line {line_no}: expected 4 fields, got {len(row)}")
        user_id, item_id, correct_text, ts_text = (f.strip() for f in row)
        if correct_text not in ("0", "1"):
            raise ResponseLogFormatError(
                f"line {line_no}: correct must be 0 or 1, got {correct_text!r}"
            )
        try:
            timestamp = int(ts_text)
        except ValueError:
            raise ResponseLogFormatError(
                f"line {line_no}: timestamp must be an integer, got {ts_text!r}"
            ) from None
        records.append(ResponseLogRecord(user_id, item_id, int(correct_text), timestamp))
    return records


def load_response_log(path: str | Path) -> list[ResponseLogRecord]:
    return parse_response_log(Path(path).read_text(encoding="utf-8"))
