#!/usr/bin/env python3
"""Regenerate the packaged reference bank from its deterministic builder."""

from pathlib import Path

from adaptest.bank import save_bank
from adaptest.reference import build_reference_bank

target = Path(__file__).resolve().parent.parent / "src/adaptest/data/reference_bank.json"
save_bank(build_reference_bank(), target)
print(f"wrote {target}")
