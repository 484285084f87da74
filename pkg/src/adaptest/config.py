"""Service configuration: a JSON file plus environment overrides.

The environment wins over the file for the bind address, bank path, and
admin token, which is what deployments typically need to vary.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .selection import SelectionStrategy, StrategyKind
from .session import TerminationConfig

ENV_HOST = "ADAPTEST_HOST"
ENV_PORT = "ADAPTEST_PORT"
ENV_BANK = "ADAPTEST_BANK"
ENV_ADMIN_TOKEN = "ADAPTEST_ADMIN_TOKEN"


@dataclass
class ApiConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    bank_path: str | None = None
    admin_token: str = "change-me"
    session_dir: str | None = None
    termination: TerminationConfig = field(default_factory=TerminationConfig)
    strategy: SelectionStrategy = field(default_factory=SelectionStrategy)
    # Optional activation window (ISO 8601 timestamps); sessions can only
    # be started inside it.
    active_from: str | None = None
    active_until: str | None = None


def _termination_from_doc(doc: Mapping) -> TerminationConfig:
    return TerminationConfig(
        max_items=doc.get("max_items", 30),
        min_items=doc.get("min_items", 5),
        se_threshold=doc.get("se_threshold"),
        theta_guard=doc.get("theta_guard", 4.0),
    )


def _strategy_from_doc(doc: Mapping) -> SelectionStrategy:
    kind = doc.get("kind", StrategyKind.CLUSTERED_TOP_K_RANDOM.value)
    return SelectionStrategy(
        kind=StrategyKind(kind),
        k=doc.get("k", 10),
        epsilon=doc.get("epsilon", 1e-9),
    )


def load_config(
    path: str | Path | None = None, env: Mapping[str, str] | None = None
) -> ApiConfig:
    env = os.environ if env is None else env
    doc: dict = {}
    if path is not None:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))

    config = ApiConfig(
        host=doc.get("host", "127.0.0.1"),
        port=int(doc.get("port", 8000)),
        bank_path=doc.get("bank_path"),
        admin_token=doc.get("admin_token", "change-me"),
        session_dir=doc.get("session_dir"),
        termination=_termination_from_doc(doc.get("termination", {})),
        strategy=_strategy_from_doc(doc.get("strategy", {})),
        active_from=doc.get("active_from"),
        active_until=doc.get("active_until"),
    )

    if ENV_HOST in env:
        config.host = env[ENV_HOST]
    if ENV_PORT in env:
        config.port = int(env[ENV_PORT])
    if ENV_BANK in env:
        config.bank_path = env[ENV_BANK]
    if ENV_ADMIN_TOKEN in env:
        config.admin_token = env[ENV_ADMIN_TOKEN]
    return config
