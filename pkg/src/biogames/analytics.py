"""Per-exercise telemetry persistence and caregiver-facing reports.

Events are journaled to a newline-delimited canonical-JSON file, one event
per line, append-only. Aggregation always recomputes from the stored
events, so re-running a report on unchanged storage is bit-stable.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

from .model import GameType, canonical_json
import json


class DuplicateEvent(Exception):
    pass


class StorageFailure(Exception):
    pass


class UnknownSession(Exception):
    pass


class InvalidEvent(Exception):
    pass


@dataclass(frozen=True)
class TelemetryEvent:
    event_id: str
    user_id: str
    session_id: str
    game_type: GameType
    timestamp: float
    elapsed_seconds: float
    errors: int
    passed: bool
    score: float
    completion_level_at_event: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "event_id": self.event_id,
            "user_id": self.user_id,
            "session_id": self.session_id,
            "game_type": self.game_type.value,
            "timestamp": self.timestamp,
            "elapsed_seconds": self.elapsed_seconds,
            "errors": self.errors,
            "passed": self.passed,
            "score": self.score,
            "completion_level_at_event": self.completion_level_at_event,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "TelemetryEvent":
        return cls(
            event_id=d["event_id"],
            user_id=d["user_id"],
            session_id=d["session_id"],
            game_type=GameType(d["game_type"]),
            timestamp=d["timestamp"],
            elapsed_seconds=d["elapsed_seconds"],
            errors=d["errors"],
            passed=d["passed"],
            score=d["score"],
            completion_level_at_event=d["completion_level_at_event"],
        )


def validate_event(e: TelemetryEvent) -> list[str]:
    violations = []
    if not 0.0 <= e.score <= 1.0:
        violations.append("score out of [0, 1]")
    if e.passed != (e.score == 1.0):
        violations.append("passed inconsistent with score")
    if e.elapsed_seconds < 0:
        violations.append("elapsed_seconds negative")
    if e.errors < 0:
        violations.append("errors negative")
    if not 0.0 <= e.completion_level_at_event <= 1.0:
        violations.append("completion_level_at_event out of [0, 1]")
    return violations


@dataclass(frozen=True)
class GameTypeStats:
    attempts: int
    pass_rate: float
    mean_score: float
    mean_errors: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "attempts": self.attempts,
            "pass_rate": self.pass_rate,
            "mean_score": self.mean_score,
            "mean_errors": self.mean_errors,
        }


@dataclass(frozen=True)
class OverviewReport:
    user_id: str
    period: Optional[tuple[float, float]]
    sessions_played: int
    total_play_seconds: float
    per_game_type: dict[GameType, GameTypeStats]
    score_trend: tuple[tuple[str, float], ...]  # (session_id, mean score)

    def to_dict(self) -> dict[str, Any]:
        return {
            "user_id": self.user_id,
            "period": list(self.period) if self.period else None,
            "sessions_played": self.sessions_played,
            "total_play_seconds": self.total_play_seconds,
            "per_game_type": {
                gt.value: stats.to_dict() for gt, stats in self.per_game_type.items()
            },
            "score_trend": [[sid, score] for sid, score in self.score_trend],
        }


class EventLog:
    """File-backed append-only telemetry store.

    Single writer per log, concurrent readers; readers see a consistent
    prefix. ``compact`` rewrites the file dropping any trailing partial
    line left by a crashed writer.
    """

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()
        self._ids: set[str] = set()
        self._events: list[TelemetryEvent] = []
        self._load()

    def _load(self) -> None:
        if not os.path.exists(self.path):
            return
        with open(self.path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                try:
                    e = TelemetryEvent.from_dict(json.loads(line))
                except (json.JSONDecodeError, KeyError, ValueError):
                    continue  # torn tail write; dropped at next compaction
                if e.event_id not in self._ids:
                    self._ids.add(e.event_id)
                    self._events.append(e)

    def record_event(self, e: TelemetryEvent) -> str:
        """Durably append one event; duplicate ids are rejected."""
        problems = validate_event(e)
        if problems:
            raise InvalidEvent("; ".join(problems))
        with self._lock:
            if e.event_id in self._ids:
                raise DuplicateEvent(e.event_id)
            try:
                with open(self.path, "a", encoding="utf-8") as f:
                    f.write(canonical_json(e.to_dict()) + "\n")
                    f.flush()
                    os.fsync(f.fileno())
            except OSError as exc:
                raise StorageFailure(str(exc)) from exc
            self._ids.add(e.event_id)
            self._events.append(e)
        return e.event_id

    def get_event(self, event_id: str) -> Optional[TelemetryEvent]:
        with self._lock:
            for e in self._events:
                if e.event_id == event_id:
                    return e
        return None

    def events(self) -> list[TelemetryEvent]:
        with self._lock:
            return list(self._events)

    def compact(self) -> None:
        """Rewrite the log file from the in-memory state (drops torn lines)."""
        with self._lock:
            tmp = self.path + ".tmp"
            with open(tmp, "w", encoding="utf-8") as f:
                for e in self._events:
                    f.write(canonical_json(e.to_dict()) + "\n")
            os.replace(tmp, self.path)

    # -- reports -----------------------------------------------------------

    def _user_events(
        self, user_id: str, period: Optional[tuple[float, float]] = None
    ) -> list[TelemetryEvent]:
        out = [e for e in self.events() if e.user_id == user_id]
        if period is not None:
            start, end = period
            out = [e for e in out if start <= e.timestamp <= end]
        return out

    def overview(
        self, user_id: str, period: Optional[tuple[float, float]] = None
    ) -> OverviewReport:
        """Aggregate figures over exactly the user's stored events in period."""
        evts = self._user_events(user_id, period)
        per_type: dict[GameType, GameTypeStats] = {}
        for gt in GameType:
            sub = [e for e in evts if e.game_type is gt]
            if not sub:
                continue
            n = len(sub)
            per_type[gt] = GameTypeStats(
                attempts=n,
                pass_rate=sum(e.passed for e in sub) / n,
                mean_score=sum(e.score for e in sub) / n,
                mean_errors=sum(e.errors for e in sub) / n,
            )

        # trend ordered by each session's first event time
        by_session: dict[str, list[TelemetryEvent]] = {}
        for e in evts:
            by_session.setdefault(e.session_id, []).append(e)
        ordered = sorted(by_session.items(), key=lambda kv: min(e.timestamp for e in kv[1]))
        trend = tuple(
            (sid, sum(e.score for e in sub) / len(sub)) for sid, sub in ordered
        )
        return OverviewReport(
            user_id=user_id,
            period=period,
            sessions_played=len(by_session),
            total_play_seconds=sum(e.elapsed_seconds for e in evts),
            per_game_type=per_type,
            score_trend=trend,
        )

    def detail(self, user_id: str, session_id: str) -> list[TelemetryEvent]:
        """All and only the events of one session, timestamp-ordered."""
        evts = [
            e
            for e in self.events()
            if e.user_id == user_id and e.session_id == session_id
        ]
        if not evts:
            raise UnknownSession(session_id)
        return sorted(evts, key=lambda e: e.timestamp)

    def session_ids(self, user_id: str) -> list[str]:
        return sorted({e.session_id for e in self.events() if e.user_id == user_id})
