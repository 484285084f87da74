"""Tests for bank file loading, validation, canonical saving, and session
snapshots."""

import json
import random

import pytest

from adaptest.bank import (
    BankParseError,
    BankValidationError,
    bank_to_canonical_json,
    load_bank,
    parse_bank,
    save_bank,
)
from adaptest.reference import build_reference_bank, reference_bank
from adaptest.selection import SelectionStrategy
from adaptest.session import (
    Finished,
    SessionFinishedError,
    TerminationConfig,
    start_session,
    submit_answer,
)
from adaptest.store import (
    SessionNotFoundError,
    SessionStore,
    SessionStoreError,
    session_from_snapshot,
    session_to_snapshot,
)


def item_doc(item_id="q1", **overrides):
    doc = {
        "id": item_id,
        "stem": "What is 2 + 2?",
        "options": ["3", "4", "5", "22"],
        "correct_options": [1],
        "difficulty_level": 1,
        "topic": "arithmetic",
        "a": 1.0,
        "b": -3.0,
        "c": 0.25,
        "c_overridden": False,
        "active": True,
    }
    doc.update(overrides)
    return doc


def bank_doc(*items):
    return {"format_version": 1, "scale_constant": 1.7, "items": list(items)}


class TestParseBank:
    def test_loads_reference_bank(self, ref_bank):
        assert len(ref_bank.items) == 171
        assert ref_bank.scale == 1.7
        assert ref_bank.warnings == []

    def test_committed_file_matches_generator(self, ref_bank):
        regenerated = build_reference_bank()
        assert bank_to_canonical_json(regenerated) == bank_to_canonical_json(ref_bank)

    def test_malformed_json_reports_position(self):
        with pytest.raises(BankParseError, match="line 2"):
            parse_bank('{\n  "format_version": 1,,\n}')

    def test_unknown_version_rejected(self):
        doc = bank_doc(item_doc())
        doc["format_version"] = 99
        with pytest.raises(BankParseError, match="format_version"):
            parse_bank(json.dumps(doc))

    def test_correct_index_out_of_range_names_item(self):
        doc = bank_doc(item_doc(correct_options=[7]))
        with pytest.raises(BankValidationError, match="'q1'"):
            parse_bank(json.dumps(doc))

    def test_every_option_correct_rejected(self):
        doc = bank_doc(item_doc(correct_options=[0, 1, 2, 3]))
        with pytest.raises(BankValidationError, match="every option"):
            parse_bank(json.dumps(doc))

    def test_duplicate_ids_rejected(self):
        doc = bank_doc(item_doc(), item_doc())
        with pytest.raises(BankValidationError, match="duplicate"):
            parse_bank(json.dumps(doc))

    def test_all_problems_collected(self):
        doc = bank_doc(
            item_doc("bad1", a=-1.0),
            item_doc("bad2", difficulty_level=9),
            item_doc("ok", b=0.0, c=0.25, difficulty_level=3),
        )
        with pytest.raises(BankValidationError) as err:
            parse_bank(json.dumps(doc))
        text = str(err.value)
        assert "bad1" in text and "bad2" in text and "ok" not in text

    def test_invalid_parameters_rejected(self):
        for bad in ({"a": 0.0}, {"c": 1.0}, {"c": -0.2}, {"b": "high"}):
            doc = bank_doc(item_doc(**bad))
            with pytest.raises(BankValidationError):
                parse_bank(json.dumps(doc))

    def test_guessing_mismatch_warns_with_suggestion(self):
        doc = bank_doc(
            item_doc(options=["a", "b", "c", "d", "e"], correct_options=[0, 2], c=0.4)
        )
        bank = parse_bank(json.dumps(doc))
        assert len(bank.warnings) == 1
        assert "0.1" in bank.warnings[0]

    def test_override_flag_silences_guessing_warning(self):
        doc = bank_doc(
            item_doc(
                options=["a", "b", "c", "d", "e"],
                correct_options=[0, 2],
                c=0.4,
                c_overridden=True,
            )
        )
        assert parse_bank(json.dumps(doc)).warnings == []

    def test_impractical_difficulty_warns(self):
        doc = bank_doc(item_doc(b=-5.0))
        bank = parse_bank(json.dumps(doc))
        assert any("practical range" in w for w in bank.warnings)

    def test_scale_constant_applies_to_every_item(self):
        doc = bank_doc(item_doc())
        doc["scale_constant"] = 1.0
        bank = parse_bank(json.dumps(doc))
        assert bank.scale == 1.0
        assert bank.items[0].params.scale == 1.0


class TestSaveBank:
    def test_round_trip_is_byte_identical(self, tmp_path, ref_bank):
        first = tmp_path / "bank1.json"
        second = tmp_path / "bank2.json"
        save_bank(ref_bank, first)
        save_bank(load_bank(first), second)
        assert first.read_bytes() == second.read_bytes()

    def test_empty_bank_round_trips(self, tmp_path):
        path = tmp_path / "empty.json"
        path.write_text(json.dumps(bank_doc()), encoding="utf-8")
        bank = load_bank(path)
        assert bank.items == []
        save_bank(bank, path)
        assert load_bank(path).items == []

    def test_non_ascii_stems_preserved(self, tmp_path):
        doc = bank_doc(item_doc(stem="Mennyi kettő meg kettő? – válassz!"))
        path = tmp_path / "bank.json"
        path.write_text(json.dumps(doc, ensure_ascii=False), encoding="utf-8")
        bank = load_bank(path)
        save_bank(bank, path)
        assert load_bank(path).items[0].stem == "Mennyi kettő meg kettő? – válassz!"


def drive(session, bank, n, rng):
    """Submit n random answers; returns the last step."""
    step = None
    for _ in range(n):
        item = session.pending_item
        step = submit_answer(session, bank, item, rng.randint(0, 1))
        if isinstance(step, Finished):
            break
    return step


class TestSessionSnapshots:
    def test_resume_mid_test_matches_uninterrupted_run(self, ref_bank, tmp_path):
        # Two sessions from one seed; one is frozen to disk after 12 answers
        # and thawed. Identical answers must produce identical trajectories.
        store = SessionStore(tmp_path / "sessions")
        straight, _ = start_session(ref_bank, seed=99, examinee_id="x")
        frozen, _ = start_session(ref_bank, seed=99, examinee_id="x")

        answers = random.Random(5)
        replay = random.Random(5)
        drive(straight, ref_bank, 12, answers)
        drive(frozen, ref_bank, 12, replay)

        store.save(frozen)
        thawed = store.load(frozen.id)
        assert thawed.pending_item == straight.pending_item
        assert thawed.theta == straight.theta

        while straight.pending_item is not None:
            u = answers.randint(0, 1)
            submit_answer(straight, ref_bank, straight.pending_item, u)
            submit_answer(thawed, ref_bank, thawed.pending_item, replay.randint(0, 1))

        assert thawed.theta_history == straight.theta_history
        assert thawed.administered == straight.administered
        assert thawed.finish_reason == straight.finish_reason

    def test_unknown_id(self, tmp_path):
        store = SessionStore(tmp_path)
        with pytest.raises(SessionNotFoundError):
            store.load("missing")

    def test_corrupted_snapshot(self, tmp_path):
        store = SessionStore(tmp_path)
        (tmp_path / "broken.json").write_text("{not json", encoding="utf-8")
        with pytest.raises(SessionStoreError):
            store.load("broken")
        (tmp_path / "partial.json").write_text('{"id": "partial"}', encoding="utf-8")
        with pytest.raises(SessionStoreError):
            store.load("partial")

    def test_finished_session_reloads_with_report(self, five_level_bank, tmp_path):
        store = SessionStore(tmp_path)
        session, _ = start_session(five_level_bank, seed=4)
        last = drive(session, five_level_bank, 5, random.Random(1))
        assert isinstance(last, Finished)
        store.save(session)
        thawed = store.load(session.id)
        assert thawed.report is not None
        assert thawed.report == session.report
        with pytest.raises(SessionFinishedError):
            submit_answer(thawed, five_level_bank, "lvl1", 1)

    def test_snapshot_round_trip_preserves_rng_stream(self, ref_bank):
        session, _ = start_session(ref_bank, seed=31)
        drive(session, ref_bank, 7, random.Random(2))
        clone = session_from_snapshot(session_to_snapshot(session))
        assert clone.rng.getstate() == session.rng.getstate()
        assert [clone.rng.random() for _ in range(5)] == [
            session.rng.random() for _ in range(5)
        ]
