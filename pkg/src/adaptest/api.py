"""HTTP facade over the engine: a test part for examinees, an admin part
for item-bank maintenance, delivery settings, statistics, and calibration.

The API is a thin adapter over the session module; correct answers are
scored server-side and never serialized into examinee-facing payloads.
"""

from __future__ import annotations

import json
import statistics
import threading
from datetime import datetime, timezone

from fastapi import Depends, FastAPI, Header, HTTPException, Request, UploadFile
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import calibration as calib
from .bank import BankFile, BankValidationError, parse_bank
from .config import ApiConfig
from .selection import SelectionStrategy, StrategyKind
from .session import (
    Finished,
    InsufficientBankError,
    KnowledgeReport,
    OutOfOrderAnswerError,
    Phase,
    SessionFinishedError,
    TerminationConfig,
    TestSession,
    start_session,
    submit_answer,
)
from .store import SessionNotFoundError, SessionStore


class AppState:
    """Everything the endpoints share.

    Bank swaps are copy-on-write behind ``mutate_lock``, which also covers
    session creation; in-flight answers read whatever bank reference is
    current. Each session has a single-writer lock.
    """

    def __init__(self, bank: BankFile, config: ApiConfig):
        self.bank = bank
        self.config = config
        self.termination = config.termination
        self.strategy = config.strategy
        self.sessions: dict[str, TestSession] = {}
        self.mutate_lock = threading.Lock()
        self.session_locks: dict[str, threading.Lock] = {}
        self.last_answers: dict[str, tuple[str, frozenset[int], dict]] = {}
        self.store = SessionStore(config.session_dir) if config.session_dir else None

    def session_lock(self, session_id: str) -> threading.Lock:
        with self.mutate_lock:
            return self.session_locks.setdefault(session_id, threading.Lock())

    def get_session(self, session_id: str) -> TestSession:
        session = self.sessions.get(session_id)
        if session is None and self.store is not None:
            try:
                session = self.store.load(session_id)
            except SessionNotFoundError:
                session = None
            if session is not None:
                self.sessions[session_id] = session
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    def persist(self, session: TestSession) -> None:
        if self.store is not None:
            self.store.save(session)


# ---------------------------------------------------------------------------
# Wire models
# ---------------------------------------------------------------------------


class StartSessionRequest(BaseModel):
    examinee_id: str = Field(min_length=1)
    seed: int | None = None


class AnswerRequest(BaseModel):
    item_id: str
    selected_options: list[int]


class ItemUpsertRequest(BaseModel):
    id: str = Field(min_length=1)
    stem: str
    options: list[str]
    correct_options: list[int]
    difficulty_level: int
    topic: str = ""
    a: float = 1.0
    b: float | None = None
    c: float | None = None
    c_overridden: bool = False
    active: bool = True


class ConfigUpdateRequest(BaseModel):
    max_items: int | None = None
    min_items: int | None = None
    se_threshold: float | None = None
    clear_se_threshold: bool = False
    theta_guard: float | None = None
    strategy_kind: str | None = None
    strategy_k: int | None = None
    strategy_epsilon: float | None = None


def _item_payload(session: TestSession, bank: BankFile, item_id: str) -> dict:
    """Examinee view of an item: no correctness fields, ever."""
    record = bank.item(item_id)
    return {
        "item_id": record.id,
        "stem": record.stem,
        "options": list(record.options),
        "position": len(session.administered) + 1,
        "phase": session.phase.value,
    }


def _report_payload(report: KnowledgeReport) -> dict:
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


def _session_payload(session: TestSession, bank: BankFile) -> dict:
    payload = {
        "session_id": session.id,
        "examinee_id": session.examinee_id,
        "phase": session.phase.value,
        "answered": len(session.administered),
        "item": (
            _item_payload(session, bank, session.pending_item)
            if session.pending_item
            else None
        ),
        "report": _report_payload(session.report) if session.report else None,
    }
    return payload


def _admin_item_payload(bank: BankFile, item_id: str) -> dict:
    record = bank.item(item_id)
    return {
        "id": record.id,
        "stem": record.stem,
        "options": list(record.options),
        "correct_options": sorted(record.correct_options),
        "difficulty_level": record.difficulty_level,
        "topic": record.topic,
        "a": record.params.a,
        "b": record.params.b,
        "c": record.params.c,
        "c_overridden": record.c_overridden,
        "active": record.active,
    }


# ---------------------------------------------------------------------------
# App factory
# ---------------------------------------------------------------------------


def create_app(bank: BankFile, config: ApiConfig | None = None) -> FastAPI:
    config = config or ApiConfig()
    state = AppState(bank, config)
    app = FastAPI(title="adaptest", version="0.1.0")
    app.state.engine = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def require_admin(x_admin_token: str | None = Header(default=None)) -> None:
        if x_admin_token != state.config.admin_token:
            raise HTTPException(status_code=401, detail="missing or invalid admin token")

    # Examinee-facing malformed requests are a plain 400; the admin surface
    # keeps the detailed 422 validation responses.
    @app.exception_handler(RequestValidationError)
    async def malformed_request(request: Request, exc: RequestValidationError):
        status = 422 if request.url.path.startswith("/admin") else 400
        return JSONResponse(status_code=status, content={"detail": jsonable_encoder(exc.errors())})

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "items": len(state.bank.items)}

    # -- test part ---------------------------------------------------------

    @app.post("/sessions", status_code=201)
    def create_session(body: StartSessionRequest) -> dict:
        _check_activation_window(state.config)
        with state.mutate_lock:
            bank_ref = state.bank
            termination = state.termination
            strategy = state.strategy
        try:
            session, first_item = start_session(
                bank_ref,
                config=termination,
                strategy=strategy,
                seed=body.seed,
                examinee_id=body.examinee_id,
            )
        except InsufficientBankError as exc:
            raise HTTPException(
                status_code=409,
                detail={
                    "error": "insufficient bank for warmup",
                    "missing_levels": exc.missing_levels,
                },
            )
        state.sessions[session.id] = session
        state.persist(session)
        return {
            "session_id": session.id,
            "item": _item_payload(session, bank_ref, first_item),
        }

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        session = state.get_session(session_id)
        return _session_payload(session, state.bank)

    @app.post("/sessions/{session_id}/answers")
    def answer(session_id: str, body: AnswerRequest) -> dict:
        session = state.get_session(session_id)
        selection = frozenset(body.selected_options)
        with state.session_lock(session_id):
            replay = state.last_answers.get(session_id)
            if replay is not None and replay[0] == body.item_id:
                if replay[1] == selection:
                    return replay[2]
                raise HTTPException(
                    status_code=409,
                    detail=f"item {body.item_id!r} was already answered differently",
                )
            bank_ref = state.bank
            if not bank_ref.has_item(body.item_id):
                raise HTTPException(status_code=409, detail=f"unknown item {body.item_id!r}")
            record = bank_ref.item(body.item_id)
            u = 1 if selection == record.correct_options else 0
            try:
                step = submit_answer(session, bank_ref, body.item_id, u)
            except SessionFinishedError:
                raise HTTPException(status_code=410, detail="session already finished")
            except OutOfOrderAnswerError as exc:
                raise HTTPException(status_code=409, detail=str(exc))
            if isinstance(step, Finished):
                payload = {"status": "finished", "report": _report_payload(step.report)}
            else:
                payload = {
                    "status": "next",
                    "item": _item_payload(session, bank_ref, step.item_id),
                }
            state.last_answers[session_id] = (body.item_id, selection, payload)
            state.persist(session)
            return payload

    # -- admin part ----------------------------------------------------------

    @app.get("/admin/items", dependencies=[Depends(require_admin)])
    def list_items() -> dict:
        bank_ref = state.bank
        return {
            "scale_constant": bank_ref.scale,
            "items": [_admin_item_payload(bank_ref, item.id) for item in bank_ref.items],
        }

    @app.get("/admin/items/{item_id}", dependencies=[Depends(require_admin)])
    def get_item(item_id: str) -> dict:
        if not state.bank.has_item(item_id):
            raise HTTPException(status_code=404, detail=f"unknown item {item_id!r}")
        return _admin_item_payload(state.bank, item_id)

    @app.post("/admin/items", status_code=201, dependencies=[Depends(require_admin)])
    def create_item(body: ItemUpsertRequest) -> dict:
        with state.mutate_lock:
            if state.bank.has_item(body.id):
                raise HTTPException(status_code=409, detail=f"item {body.id!r} already exists")
            state.bank = _rebuild_bank(state.bank, upsert=body)
        return _admin_item_payload(state.bank, body.id)

    @app.put("/admin/items/{item_id}", dependencies=[Depends(require_admin)])
    def update_item(item_id: str, body: ItemUpsertRequest) -> dict:
        if body.id != item_id:
            raise HTTPException(status_code=422, detail="item id in body must match the path")
        with state.mutate_lock:
            if not state.bank.has_item(item_id):
                raise HTTPException(status_code=404, detail=f"unknown item {item_id!r}")
            state.bank = _rebuild_bank(state.bank, upsert=body, replace_id=item_id)
        return _admin_item_payload(state.bank, item_id)

    @app.delete("/admin/items/{item_id}", dependencies=[Depends(require_admin)])
    def delete_item(item_id: str) -> dict:
        with state.mutate_lock:
            if not state.bank.has_item(item_id):
                raise HTTPException(status_code=404, detail=f"unknown item {item_id!r}")
            holders = [
                s
                for s in state.sessions.values()
                if s.phase is not Phase.FINISHED
                and (item_id in s.administered_ids or s.pending_item == item_id)
            ]
            if holders:
                raise HTTPException(
                    status_code=409,
                    detail={
                        "error": f"item {item_id!r} is in use by active sessions",
                        "active_sessions": len(holders),
                    },
                )
            state.bank = _rebuild_bank(state.bank, remove_id=item_id)
        return {"deleted": item_id}

    @app.get("/admin/config", dependencies=[Depends(require_admin)])
    def get_config() -> dict:
        return _config_payload(state)

    @app.put("/admin/config", dependencies=[Depends(require_admin)])
    def update_config(body: ConfigUpdateRequest) -> dict:
        with state.mutate_lock:
            current = state.termination
            se = current.se_threshold
            if body.clear_se_threshold:
                se = None
            if body.se_threshold is not None:
                se = body.se_threshold
            try:
                state.termination = TerminationConfig(
                    max_items=body.max_items if body.max_items is not None else current.max_items,
                    min_items=body.min_items if body.min_items is not None else current.min_items,
                    se_threshold=se,
                    theta_guard=(
                        body.theta_guard if body.theta_guard is not None else current.theta_guard
                    ),
                )
                strategy = state.strategy
                state.strategy = SelectionStrategy(
                    kind=(
                        StrategyKind(body.strategy_kind)
                        if body.strategy_kind is not None
                        else strategy.kind
                    ),
                    k=body.strategy_k if body.strategy_k is not None else strategy.k,
                    epsilon=(
                        body.strategy_epsilon
                        if body.strategy_epsilon is not None
                        else strategy.epsilon
                    ),
                )
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
        return _config_payload(state)

    @app.get("/admin/sessions", dependencies=[Depends(require_admin)])
    def list_sessions() -> dict:
        return {
            "sessions": [
                {
                    "session_id": s.id,
                    "examinee_id": s.examinee_id,
                    "phase": s.phase.value,
                    "answered": len(s.administered),
                    "theta": s.theta,
                    "finish_reason": s.finish_reason.value if s.finish_reason else None,
                }
                for s in state.sessions.values()
            ]
        }

    @app.get("/admin/sessions/{session_id}", dependencies=[Depends(require_admin)])
    def session_detail(session_id: str) -> dict:
        session = state.get_session(session_id)
        return {
            "session_id": session.id,
            "examinee_id": session.examinee_id,
            "phase": session.phase.value,
            "rng_seed": session.rng_seed,
            "warmup_plan": list(session.warmup_plan),
            "administered": [
                {"item_id": item_id, "u": u} for item_id, u in session.administered
            ],
            "theta": session.theta,
            "standard_error": session.se,
            "theta_history": list(session.theta_history),
            "finish_reason": session.finish_reason.value if session.finish_reason else None,
        }

    @app.get("/admin/stats/exposure", dependencies=[Depends(require_admin)])
    def exposure_stats() -> dict:
        bank_ref = state.bank
        counts = {item.id: 0 for item in bank_ref.items}
        finished = 0
        for session in state.sessions.values():
            if session.phase is not Phase.FINISHED:
                continue
            finished += 1
            for item_id, _ in session.administered:
                if item_id in counts:
                    counts[item_id] += 1
        sigma = statistics.pstdev(counts.values()) if counts else 0.0
        return {"finished_sessions": finished, "sigma": sigma, "counts": counts}

    @app.post("/admin/calibration/estimate", dependencies=[Depends(require_admin)])
    async def calibration_estimate(log: UploadFile) -> dict:
        raw = await log.read()
        try:
            records = calib.parse_response_log(raw.decode("utf-8"))
            firsts = calib.first_answers(records)
        except (UnicodeDecodeError, calib.ResponseLogFormatError, calib.AmbiguousLogError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        estimates, skipped = calib.estimate_difficulty(firsts)
        original = {
            item.id: item.difficulty_level
            for item in state.bank.items
            if item.id in {e.item_id for e in estimates}
        }
        report = None
        if original:
            rep = calib.calibration_report(original, estimates)
            report = {
                "mean_original": rep.mean_original,
                "mean_estimated": rep.mean_estimated,
                "flagged": [e.item_id for e in rep.flagged],
                "entries": [
                    {
                        "item_id": e.item_id,
                        "original_difficulty": e.original_difficulty,
                        "estimated_difficulty": e.estimated_difficulty,
                    }
                    for e in rep.entries
                ],
            }
        return {
            "estimates": [
                {
                    "item_id": e.item_id,
                    "p_incorrect": e.p_incorrect,
                    "n_first_answers": e.n_first_answers,
                    "b_estimate": e.b_estimate,
                    "low_confidence": e.low_confidence,
                }
                for e in estimates
            ],
            "skipped": skipped,
            "comparison": report,
        }

    return app


def _config_payload(state: AppState) -> dict:
    t = state.termination
    s = state.strategy
    return {
        "termination": {
            "max_items": t.max_items,
            "min_items": t.min_items,
            "se_threshold": t.se_threshold,
            "theta_guard": t.theta_guard,
        },
        "strategy": {"kind": s.kind.value, "k": s.k, "epsilon": s.epsilon},
    }


def _rebuild_bank(
    bank: BankFile,
    upsert: ItemUpsertRequest | None = None,
    replace_id: str | None = None,
    remove_id: str | None = None,
) -> BankFile:
    """Apply one mutation and re-validate the whole document.

    Going through the canonical serializer and parser keeps validation
    total: whatever an admin sends, only a bank that loads cleanly can
    replace the live one.
    """
    docs = []
    for item in bank.items:
        if remove_id is not None and item.id == remove_id:
            continue
        if replace_id is not None and item.id == replace_id:
            continue
        docs.append(
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
        )
    if upsert is not None:
        b = upsert.b
        if b is None and upsert.difficulty_level in (1, 2, 3, 4, 5):
            b = calib.level_to_b(upsert.difficulty_level)
        c = upsert.c
        if c is None:
            try:
                c = calib.guessing_from_structure(
                    len(upsert.options), len(set(upsert.correct_options))
                )
            except ValueError:
                c = 0.0
        docs.append(
            {
                "id": upsert.id,
                "stem": upsert.stem,
                "options": upsert.options,
                "correct_options": sorted(set(upsert.correct_options)),
                "difficulty_level": upsert.difficulty_level,
                "topic": upsert.topic,
                "a": upsert.a,
                "b": b,
                "c": c,
                "c_overridden": upsert.c_overridden,
                "active": upsert.active,
            }
        )
    candidate = {
        "format_version": bank.format_version,
        "scale_constant": bank.scale,
        "items": docs,
    }
    try:
        return parse_bank(json.dumps(candidate), source="<admin mutation>")
    except BankValidationError as exc:
        raise HTTPException(status_code=422, detail=exc.problems)


def _check_activation_window(config: ApiConfig) -> None:
    now = datetime.now(timezone.utc)
    if config.active_from is not None:
        start = datetime.fromisoformat(config.active_from)
        if start.tzinfo is None:
            start = start.replace(tzinfo=timezone.utc)
        if now < start:
            raise HTTPException(status_code=403, detail="testing window not open yet")
    if config.active_until is not None:
        end = datetime.fromisoformat(config.active_until)
        if end.tzinfo is None:
            end = end.replace(tzinfo=timezone.utc)
        if now > end:
            raise HTTPException(status_code=403, detail="testing window has closed")


def create_app_from_config(config: ApiConfig) -> FastAPI:
    """Build the app with the bank loaded from the configured path."""
    from .bank import load_bank
    from .reference import reference_bank

    bank = load_bank(config.bank_path) if config.bank_path else reference_bank()
    return create_app(bank, config)
