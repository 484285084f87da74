"""Session persistence: snapshot files that survive a process restart.

Snapshots carry the selection generator's full state, not just the seed,
so a resumed session never replays randomness it already consumed.
Writes are serialized per session id; reads take no lock.
"""

from __future__ import annotations

import json
import random
import threading
from pathlib import Path

from .selection import SelectionStrategy, StrategyKind
from .session import (
    FinishReason,
    ItemOutcome,
    KnowledgeReport,
    Phase,
    TerminationConfig,
    TestSession,
)

SNAPSHOT_VERSION = 1


class SessionNotFoundError(KeyError):
    pass


class SessionStoreError(ValueError):
    """A snapshot exists but cannot be decoded."""


def session_to_snapshot(session: TestSession) -> dict:
    rng_state = session.rng.getstate()
    snapshot = {
        "snapshot_version": SNAPSHOT_VERSION,
        "id": session.id,
        "examinee_id": session.examinee_id,
        "config": {
            "max_items": session.config.max_items,
            "min_items": session.config.min_items,
            "se_threshold": session.config.se_threshold,
            "theta_guard": session.config.theta_guard,
        },
        "strategy": {
            "kind": session.strategy.kind.value,
            "k": session.strategy.k,
            "epsilon": session.strategy.epsilon,
        },
        "rng_seed": session.rng_seed,
        "rng_state": [rng_state[0], list(rng_state[1]), rng_state[2]],
        "phase": session.phase.value,
        "warmup_plan": list(session.warmup_plan),
        "pending_item": session.pending_item,
        "administered": [[item_id, u] for item_id, u in session.administered],
        "theta": session.theta,
        "se": session.se,
        "theta_history": list(session.theta_history),
        "estimate_diverged": session.estimate_diverged,
        "estimate_converged": session.estimate_converged,
        "finish_reason": session.finish_reason.value if session.finish_reason else None,
        "report": _report_to_dict(session.report) if session.report else None,
    }
    return snapshot


def session_from_snapshot(snapshot: dict) -> TestSession:
    try:
        if snapshot["snapshot_version"] != SNAPSHOT_VERSION:
            raise SessionStoreError(
                f"unknown snapshot version {snapshot['snapshot_version']!r}"
            )
        rng = random.Random()
        version, internal, gauss_next = snapshot["rng_state"]
        rng.setstate((version, tuple(internal), gauss_next))
        session = TestSession(
            id=snapshot["id"],
            examinee_id=snapshot["examinee_id"],
            config=TerminationConfig(**snapshot["config"]),
            strategy=SelectionStrategy(
                kind=StrategyKind(snapshot["strategy"]["kind"]),
                k=snapshot["strategy"]["k"],
                epsilon=snapshot["strategy"]["epsilon"],
            ),
            rng_seed=snapshot["rng_seed"],
            phase=Phase(snapshot["phase"]),
            warmup_plan=tuple(snapshot["warmup_plan"]),
            pending_item=snapshot["pending_item"],
            administered=[(item_id, u) for item_id, u in snapshot["administered"]],
            theta=snapshot["theta"],
            se=snapshot["se"],
            theta_history=list(snapshot["theta_history"]),
            estimate_diverged=snapshot["estimate_diverged"],
            estimate_converged=snapshot["estimate_converged"],
            finish_reason=(
                FinishReason(snapshot["finish_reason"])
                if snapshot["finish_reason"]
                else None
            ),
            report=_report_from_dict(snapshot["report"]) if snapshot["report"] else None,
            rng=rng,
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SessionStoreError):
            raise
        raise SessionStoreError(f"corrupted session snapshot: {exc}") from exc
    return session


def _report_to_dict(report: KnowledgeReport) -> dict:
    return {
        "theta": report.theta,
        "standard_error": report.standard_error,
        "finish_reason": report.finish_reason.value,
        "items": [
            {"item_id": o.item_id, "u": o.u, "difficulty_level": o.difficulty_level}
            for o in report.items
        ],
        "level_correct_ratios": {
            str(level): ratio for level, ratio in report.level_correct_ratios.items()
        },
    }


def _report_from_dict(doc: dict) -> KnowledgeReport:
    return KnowledgeReport(
        theta=doc["theta"],
        standard_error=doc["standard_error"],
        finish_reason=FinishReason(doc["finish_reason"]),
        items=tuple(
            ItemOutcome(o["item_id"], o["u"], o["difficulty_level"])
            for o in doc["items"]
        ),
        level_correct_ratios={
            int(level): ratio for level, ratio in doc["level_correct_ratios"].items()
        },
    )


class SessionStore:
    """One JSON snapshot per session under a base directory."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _path(self, session_id: str) -> Path:
        return self.directory / f"{session_id}.json"

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def save(self, session: TestSession) -> None:
        payload = json.dumps(session_to_snapshot(session), indent=2) + "\n"
        path = self._path(session.id)
        with self._lock_for(session.id):
            tmp = path.with_suffix(".json.tmp")
            tmp.write_text(payload, encoding="utf-8")
            tmp.replace(path)

    def load(self, session_id: str) -> TestSession:
        path = self._path(session_id)
        if not path.exists():
            raise SessionNotFoundError(session_id)
        try:
            snapshot = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SessionStoreError(f"corrupted session snapshot {path}: {exc}") from exc
        return session_from_snapshot(snapshot)

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.json"))
