"""Item bank files: a versioned JSON document, validated on load.

The file is meant to be tutor-editable, so validation is total (an invalid
bank never reaches the engine) and every violation is reported at once
with the offending item named. Saving emits a canonical form that
round-trips byte for byte.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .calibration import guessing_from_structure
from .irt import DEFAULT_SCALE, ItemParameters, PRACTICAL_ABILITY_RANGE

KNOWN_FORMAT_VERSIONS = (1,)

DIFFICULTY_LEVELS = (1, 2, 3, 4, 5)


class BankParseError(ValueError):
    """The bank file is not syntactically valid JSON of the expected shape."""


class BankValidationError(ValueError):
    """One or more items violate the bank invariants."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("invalid bank:\n" + "\n".join(f"  - {p}" for p in problems))


@dataclass(frozen=True)
class ItemRecord:
    """An authored test item: text, scored options, and its 3PL parameters."""

    id: str
    stem: str
    options: tuple[str, ...]
    correct_options: frozenset[int]
    difficulty_level: int
    topic: str
    params: ItemParameters
    c_overridden: bool = False
    active: bool = True


@dataclass
class BankFile:
    """A whole item bank plus the global logistic scale constant."""

    format_version: int = 1
    scale: float = DEFAULT_SCALE
    items: list[ItemRecord] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def item(self, item_id: str) -> ItemRecord:
        record = self._index().get(item_id)
        if record is None:
            raise KeyError(f"no item {item_id!r} in bank")
        return record

    def has_item(self, item_id: str) -> bool:
        return item_id in self._index()

    def active_items(self) -> list[ItemRecord]:
        return [item for item in self.items if item.active]

    def replace_item(self, record: ItemRecord) -> None:
        for i, existing in enumerate(self.items):
            if existing.id == record.id:
                self.items[i] = record
                self._by_id = None
                return
        raise KeyError(f"no item {record.id!r} in bank")

    def add_item(self, record: ItemRecord) -> None:
        if self.has_item(record.id):
            raise ValueError(f"duplicate item id {record.id!r}")
        self.items.append(record)
        self._by_id = None

    def remove_item(self, item_id: str) -> None:
        record = self.item(item_id)
        self.items.remove(record)
        self._by_id = None

    _by_id: dict[str, ItemRecord] | None = field(default=None, repr=False)

    def _index(self) -> dict[str, ItemRecord]:
        if self._by_id is None or len(self._by_id) != len(self.items):
            self._by_id = {item.id: item for item in self.items}
        return self._by_id


def parse_bank(text: str, source: str = "<string>") -> BankFile:
    """Parse and fully validate a bank document.

    Raises BankParseError with position information on malformed JSON,
    and BankValidationError listing every offending item otherwise.
    Practical-range and guessing-consistency issues are warnings collected
    on the returned bank, not errors.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BankParseError(
            f"{source}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise BankParseError(f"{source}: top level must be an object")

    version = doc.get("format_version")
    if version not in KNOWN_FORMAT_VERSIONS:
        raise BankParseError(
            f"{source}: unknown format_version {version!r}; known: {KNOWN_FORMAT_VERSIONS}"
        )
    scale = doc.get("scale_constant", DEFAULT_SCALE)
    if not isinstance(scale, (int, float)) or not scale > 0:
        raise BankParseError(f"{source}: scale_constant must be a positive number")

    raw_items = doc.get("items")
    if not isinstance(raw_items, list):
        raise BankParseError(f"{source}: 'items' must be a list")

    problems: list[str] = []
    warnings: list[str] = []
    items: list[ItemRecord] = []
    seen_ids: set[str] = set()

    for position, raw in enumerate(raw_items):
        label = f"item #{position}"
        if not isinstance(raw, dict):
            problems.append(f"{label}: not an object")
            continue
        item_id = raw.get("id")
        if isinstance(item_id, str) and item_id:
            label = f"item {item_id!r}"
        else:
            problems.append(f"{label}: missing or empty 'id'")
            continue
        if item_id in seen_ids:
            problems.append(f"{label}: duplicate id")
            continue
        seen_ids.add(item_id)

        record, item_problems, item_warnings = _parse_item(raw, label, float(scale))
        problems.extend(item_problems)
        warnings.extend(item_warnings)
        if record is not None:
            items.append(record)

    if problems:
        raise BankValidationError(problems)
    return BankFile(format_version=version, scale=float(scale), items=items, warnings=warnings)


def _parse_item(
    raw: dict, label: str, scale: float
) -> tuple[ItemRecord | None, list[str], list[str]]:
    problems: list[str] = []
    warnings: list[str] = []

    stem = raw.get("stem")
    if not isinstance(stem, str) or not stem:
        problems.append(f"{label}: missing or empty 'stem'")
        stem = ""

    options = raw.get("options")
    if (
        not isinstance(options, list)
        or len(options) < 2
        or not all(isinstance(o, str) for o in options)
    ):
        problems.append(f"{label}: 'options' must be a list of at least two strings")
        options = []

    correct = raw.get("correct_options")
    if (
        not isinstance(correct, list)
        or not correct
        or not all(isinstance(i, int) for i in correct)
    ):
        problems.append(f"{label}: 'correct_options' must be a non-empty list of indices")
        correct = []
    elif options:
        out_of_range = [i for i in correct if not 0 <= i < len(options)]
        if out_of_range:
            problems.append(
                f"{label}: correct option index(es) {out_of_range} outside 0..{len(options) - 1}"
            )
        if len(set(correct)) >= len(options):
            problems.append(f"{label}: every option marked correct")

    level = raw.get("difficulty_level")
    if level not in DIFFICULTY_LEVELS:
        problems.append(f"{label}: 'difficulty_level' must be one of {DIFFICULTY_LEVELS}")
        level = 3

    topic = raw.get("topic", "")
    if not isinstance(topic, str):
        problems.append(f"{label}: 'topic' must be a string")
        topic = ""

    a = raw.get("a", 1.0)
    b = raw.get("b", 0.0)
    c = raw.get("c", 0.0)
    c_overridden = bool(raw.get("c_overridden", False))
    active = raw.get("active", True)
    if not isinstance(active, bool):
        problems.append(f"{label}: 'active' must be a boolean")
        active = True

    params = None
    if all(isinstance(v, (int, float)) for v in (a, b, c)):
        try:
            params = ItemParameters(a=float(a), b=float(b), c=float(c), scale=scale)
        except ValueError as exc:
            problems.append(f"{label}: {exc}")
    else:
        problems.append(f"{label}: parameters a, b, c must be numbers")

    if problems:
        return None, problems, warnings

    assert params is not None
    lo, hi = PRACTICAL_ABILITY_RANGE
    if not lo <= params.b <= hi:
        warnings.append(
            f"{label}: difficulty b={params.b} outside practical range [{lo}, {hi}]"
        )
    structural_c = guessing_from_structure(len(options), len(set(correct)))
    if not c_overridden and not math.isclose(params.c, structural_c, abs_tol=1e-9):
        warnings.append(
            f"{label}: c={params.c} inconsistent with {len(set(correct))} correct of "
            f"{len(options)} options; suggest c={structural_c:g} or set c_overridden"
        )

    record = ItemRecord(
        id=raw["id"],
        stem=stem,
        options=tuple(options),
        correct_options=frozenset(correct),
        difficulty_level=level,
        topic=topic,
        params=params,
        c_overridden=c_overridden,
        active=active,
    )
    return record, problems, warnings


def load_bank(path: str | Path) -> BankFile:
    path = Path(path)
    return parse_bank(path.read_text(encoding="utf-8"), source=str(path))


def bank_to_canonical_json(bank: BankFile) -> str:
    """Canonical serialization: fixed key order, UTF-8, newline-terminated."""
    doc = {
        "format_version": bank.format_version,
        "scale_constant": bank.scale,
        "items": [
            {
                "id": item.id,
                "stem": item.stem,
                "options": list(item.options),
                "correct_options": sorted(item.correct_options),
                "difficulty_level": item.difficulty_level,
                "topic": item.topic,
                "a": item.params.a,
                "b": item.params.b,
                "c": item.params.c,
                "c_overridden": item.c_overridden,
                "active": item.active,
            }
            for item in bank.items
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def save_bank(bank: BankFile, path: str | Path) -> None:
    Path(path).write_text(bank_to_canonical_json(bank), encoding="utf-8")


def with_scale(bank: BankFile, scale: float) -> BankFile:
    """Copy of the bank with every item's parameters rescaled to ``scale``."""
    items = [
        replace(item, params=replace(item.params, scale=scale)) for item in bank.items
    ]
    return BankFile(format_version=bank.format_version, scale=scale, items=items)
