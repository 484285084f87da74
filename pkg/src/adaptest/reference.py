"""The synthetic 171-item reference bank shipped with the package.

Difficulty cycles through all five tutor levels, discrimination is fixed
at 1, and guessing follows each item's option structure. The build is
fully deterministic so the committed bank file can always be regenerated.
"""

from __future__ import annotations

from importlib import resources
from random import Random

from .bank import BankFile, ItemRecord, parse_bank
from .calibration import guessing_from_structure, level_to_b
from .irt import DEFAULT_SCALE, ItemParameters

REFERENCE_BANK_SIZE = 171
REFERENCE_BANK_SEED = 2010

# Easy items are true/false style; harder ones get more options and
# multi-select, so guessing falls as the level rises.
_STRUCTURE_BY_LEVEL = {1: (2, 1), 2: (4, 1), 3: (5, 1), 4: (5, 2), 5: (4, 2)}
_TOPICS = ("arithmetic", "algebra", "geometry", "logic", "statistics")


def build_reference_bank(
    size: int = REFERENCE_BANK_SIZE, seed: int = REFERENCE_BANK_SEED
) -> BankFile:
    rng = Random(seed)
    items = []
    for i in range(1, size + 1):
        level = (i - 1) % 5 + 1
        n_options, n_correct = _STRUCTURE_BY_LEVEL[level]
        correct = sorted(rng.sample(range(n_options), n_correct))
        items.append(
            ItemRecord(
                id=f"item-{i:03d}",
                stem=f"Practice question {i:03d}: mark every correct option.",
                options=tuple(f"Option {chr(ord('A') + j)}" for j in range(n_options)),
                correct_options=frozenset(correct),
                difficulty_level=level,
                topic=_TOPICS[i % len(_TOPICS)],
                params=ItemParameters(
                    a=1.0,
                    b=level_to_b(level),
                    c=guessing_from_structure(n_options, n_correct),
                    scale=DEFAULT_SCALE,
                ),
            )
        )
    return BankFile(items=items)


def reference_bank() -> BankFile:
    """Load the bank file packaged under adaptest/data."""
    text = (
        resources.files("adaptest").joinpath("data/reference_bank.json").read_text("utf-8")
    )
    return parse_bank(text, source="adaptest/data/reference_bank.json")
