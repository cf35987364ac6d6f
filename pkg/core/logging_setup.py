"""Logging configuration for ssplab."""

from __future__ import annotations

import json
import logging
import os
import re
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(name)s] %(levelname)s: %(message)s",
    datefmt="%H:%M:%S",
)
log = logging.getLogger("ssplab")

# matplotlib's font manager is chatty at INFO (re-enable with SSPLAB_VERBOSE_PLOTS=1).
if os.getenv("SSPLAB_VERBOSE_PLOTS", "").strip().lower() not in {"1", "true", "yes"}:
    logging.getLogger("matplotlib").setLevel(logging.WARNING)

# Learners prefix their lines with "[<algorithm>:<seed>]".
_RUN_RE = re.compile(r"^\[(?P<run>[^\]]+)\]\s*(?P<body>.*)$")

_OPERATION_HINTS: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("plan", ("plan", "evi", "sweeps")),
    ("attempt", ("attempt", "pivot horizon")),
    ("epoch", ("epoch",)),
    ("episode", ("episode",)),
    ("oracle", ("oracle", "v*")),
    ("aggregate", ("aggregate",)),
    ("persist", ("wrote", "manifest")),
)


def _truthy(value: str | None) -> bool:
    return (value or "").strip().lower() in {"1", "true", "yes", "on"}


def _split_run_id(run_id: str | None) -> tuple[str | None, int | None]:
    """Return ``(algorithm, seed)`` for a run id like ``ucssp:3``."""
    if not run_id:
        return None, None
    algorithm, sep, seed = run_id.partition(":")
    if not sep:
        return run_id, None
    try:
        return algorithm, int(seed)
    except ValueError:
        return algorithm, None


def _classify(body: str) -> str:
    lower = (body or "").lower()
    for operation, hints in _OPERATION_HINTS:
        if any(h in lower for h in hints):
            return operation
    return "general"


class _JsonLogFormatter(logging.Formatter):
    """One JSON object per record, with the run prefix split into fields."""

    def format(self, record: logging.LogRecord) -> str:
        message = record.getMessage()
        matched = _RUN_RE.match(message or "")
        run_id = matched.group("run") if matched else None
        body = matched.group("body") if matched else message
        algorithm, seed = _split_run_id(run_id)

        payload: dict[str, Any] = {
            "ts": datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            "level": record.levelname,
            "logger": record.name,
            "message": body,
            "run": run_id,
            "algorithm": algorithm,
            "seed": seed,
            "operation": _classify(body),
        }
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload, ensure_ascii=False)


def _json_log_path(output_root: str | Path | None) -> Path:
    override = os.getenv("JSON_LOG_PATH", "").strip()
    if override:
        path = Path(override).expanduser()
        return path if path.is_absolute() else (Path.cwd() / path).resolve()
    root = Path(output_root).expanduser() if output_root else Path.cwd()
    return (root / "logs" / "ssplab.jsonl").resolve()


def configure_optional_json_logging(output_root: str | Path | None = None) -> Path | None:
    """Attach a JSONL file handler to the ``ssplab`` logger when JSON_LOG_ENABLED is set.

    The file defaults to ``<output_root>/logs/ssplab.jsonl``; JSON_LOG_PATH overrides it.
    Calling twice with the same target is a no-op.
    """
    if not _truthy(os.getenv("JSON_LOG_ENABLED")):
        return None

    path = _json_log_path(output_root)
    logger = logging.getLogger("ssplab")
    if any(
        isinstance(h, logging.FileHandler) and Path(h.baseFilename).resolve() == path
        for h in logger.handlers
    ):
        return path

    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path, mode="a", encoding="utf-8")
    handler.setLevel(logging.DEBUG)
    handler.setFormatter(_JsonLogFormatter())
    logger.addHandler(handler)
    logger.info(f"Structured JSON logging enabled: {path.as_posix()}")
    return path
