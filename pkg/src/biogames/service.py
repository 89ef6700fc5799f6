"""RESTful JSON service tying memories, games, sessions, and analytics together.

The HTTP layer adds no semantics of its own: every endpoint delegates to
the domain modules and speaks their canonical JSON encoding. Run with::

    python -m biogames.service --port 8000 --data-dir ./data

Flags fall back to the BIOGAMES_PORT, BIOGAMES_DATA_DIR, BIOGAMES_EVENTS_URL,
and BIOGAMES_REQUEST_TIMEOUT environment variables.
"""

from __future__ import annotations

import argparse
import os
import secrets
import threading
import time
import uuid
from dataclasses import dataclass, field, replace
from typing import Any, Optional

from fastapi import Depends, FastAPI, HTTPException, Query, Request, Response
from fastapi.responses import JSONResponse

from . import analytics, engine, session as sessions
from .analytics import EventLog, TelemetryEvent, UnknownSession
from .engine import Exercise, GenConfig, GenerationError, MultipleChoice, ShapeMismatch, grade
from .events import (
    ChainedEventsProvider,
    ExternalEventsError,
    FallbackEventsProvider,
    HttpEventsProvider,
)
from .model import (
    GameType,
    Memory,
    MemoryCategory,
    MusicMeta,
    Role,
    UserProfile,
    validate_memory,
    validate_profile,
)
from .store import DocumentStore, MediaStore, UnknownRef

GAME_TYPE_TOKENS = [gt.value for gt in GameType]


@dataclass
class OpenSession:
    plan: sessions.SessionPlan
    user_id: str
    estimates: sessions.TimeEstimates
    started_at: float
    index: int = 0
    outcomes: list[sessions.ExerciseOutcome] = field(default_factory=list)
    served_at: float = 0.0


def _default_config() -> dict[str, Any]:
    est = sessions.TimeEstimates()
    return {
        "gen": {"option_count": 4, "association_pairs": 3, "clip_seconds": 10.0},
        "enabled_game_types": list(GAME_TYPE_TOKENS),
        "session_min_seconds": sessions.SESSION_MIN_SECONDS,
        "session_max_seconds": sessions.SESSION_MAX_SECONDS,
        "estimates": {
            "memory_completion": est.memory_completion,
            "activities_ordering": est.activities_ordering,
            "memory_association": est.memory_association,
            "memory_related_event": est.memory_related_event,
            "music_game_base": est.music_game_base,
        },
        "answer_timeout": est.answer_timeout,
    }


def validate_config(cfg: dict[str, Any]) -> list[str]:
    """Field-level violations for a caregiver configuration document."""
    problems = []
    base = _default_config()
    gen = {**base["gen"], **cfg.get("gen", {})}
    try:
        GenConfig(
            option_count=int(gen["option_count"]),
            association_pairs=int(gen["association_pairs"]),
            clip_seconds=float(gen["clip_seconds"]),
        )
    except (ValueError, TypeError) as exc:
        problems.append(f"gen: {exc}")
    enabled = cfg.get("enabled_game_types", base["enabled_game_types"])
    if not isinstance(enabled, list) or not enabled:
        problems.append("enabled_game_types: at least one game type required")
    else:
        bad = [t for t in enabled if t not in GAME_TYPE_TOKENS]
        if bad:
            problems.append(f"enabled_game_types: unknown tokens {bad}")
    for key in ("session_min_seconds", "session_max_seconds", "answer_timeout"):
        value = cfg.get(key, base[key])
        if not isinstance(value, (int, float)) or value <= 0:
            problems.append(f"{key}: must be a positive number")
    lo = cfg.get("session_min_seconds", base["session_min_seconds"])
    hi = cfg.get("session_max_seconds", base["session_max_seconds"])
    if isinstance(lo, (int, float)) and isinstance(hi, (int, float)) and lo >= hi:
        problems.append("session time bounds: min must be below max")
    for key, value in cfg.get("estimates", {}).items():
        if key not in base["estimates"]:
            problems.append(f"estimates.{key}: unknown estimate")
        elif not isinstance(value, (int, float)) or value <= 0:
            problems.append(f"estimates.{key}: must be a positive number")
    return problems


def create_app(
    data_dir: str,
    events_base_url: Optional[str] = None,
    request_timeout: float = 5.0,
) -> FastAPI:
    os.makedirs(data_dir, exist_ok=True)
    store = DocumentStore(os.path.join(data_dir, "documents.ndjson"))
    media = MediaStore(os.path.join(data_dir, "media"))
    event_log = EventLog(os.path.join(data_dir, "telemetry.ndjson"))
    external = (
        HttpEventsProvider(events_base_url, timeout=request_timeout)
        if events_base_url
        else None
    )
    events_provider = ChainedEventsProvider(external, FallbackEventsProvider())

    app = FastAPI(title="biogames", version="0.1.0")
    open_sessions: dict[str, OpenSession] = {}
    open_by_user: dict[str, str] = {}
    sessions_lock = threading.Lock()

    # -- auth helpers ------------------------------------------------------

    def require_auth(request: Request) -> UserProfile:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise HTTPException(401, "missing bearer token")
        user_id = store.resolve_token(header.split(None, 1)[1])
        profile = store.get_user(user_id) if user_id else None
        if profile is None:
            raise HTTPException(401, "invalid token")
        return profile

    def require_self_or_caregiver(caller: UserProfile, user_id: str) -> None:
        if caller.role is not Role.CAREGIVER and caller.user_id != user_id:
            raise HTTPException(403, "not allowed for this user")

    def require_caregiver(caller: UserProfile) -> None:
        if caller.role is not Role.CAREGIVER:
            raise HTTPException(403, "caregiver role required")

    def get_profile_or_404(user_id: str) -> UserProfile:
        profile = store.get_user(user_id)
        if profile is None:
            raise HTTPException(404, f"unknown user {user_id}")
        return profile

    def user_config(user_id: str) -> dict[str, Any]:
        base = _default_config()
        stored = store.get_config(user_id) or {}
        merged = {**base, **stored}
        merged["gen"] = {**base["gen"], **stored.get("gen", {})}
        merged["estimates"] = {**base["estimates"], **stored.get("estimates", {})}
        return merged

    def gen_config(cfg: dict[str, Any], seed: int) -> GenConfig:
        g = cfg["gen"]
        return GenConfig(
            option_count=int(g["option_count"]),
            association_pairs=int(g["association_pairs"]),
            clip_seconds=float(g["clip_seconds"]),
            rng_seed=seed,
        )

    def time_estimates(cfg: dict[str, Any]) -> sessions.TimeEstimates:
        est = cfg["estimates"]
        return sessions.TimeEstimates(
            memory_completion=est["memory_completion"],
            activities_ordering=est["activities_ordering"],
            memory_association=est["memory_association"],
            memory_related_event=est["memory_related_event"],
            music_game_base=est["music_game_base"],
            answer_timeout=cfg["answer_timeout"],
        )

    # -- users -------------------------------------------------------------

    @app.post("/users", status_code=201)
    async def create_user(body: dict) -> dict:
        try:
            role = Role(body.get("role", "senior"))
        except ValueError:
            raise HTTPException(400, f"unknown role {body.get('role')!r}")
        profile = UserProfile(
            user_id="u-" + uuid.uuid4().hex[:12],
            display_name=str(body.get("display_name", "")),
            role=role,
            birth_year=body.get("birth_year"),
        )
        problems = validate_profile(profile)
        if problems:
            raise HTTPException(400, {"violations": problems})
        token = secrets.token_hex(16)
        store.put_user(profile)
        store.put_token(token, profile.user_id)
        return {"profile": profile.to_dict(), "token": token}

    @app.get("/users/{user_id}")
    async def get_user(user_id: str, caller: UserProfile = Depends(require_auth)) -> dict:
        require_self_or_caregiver(caller, user_id)
        return get_profile_or_404(user_id).to_dict()

    # -- memories ----------------------------------------------------------

    @app.post("/users/{user_id}/memories", status_code=201)
    async def create_memory(
        user_id: str, body: dict, caller: UserProfile = Depends(require_auth)
    ) -> dict:
        require_self_or_caregiver(caller, user_id)
        get_profile_or_404(user_id)
        try:
            memory = Memory.from_dict(
                {**body, "memory_id": "m-" + uuid.uuid4().hex[:12], "owner_id": user_id}
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise HTTPException(400, {"violations": [str(exc)]})
        problems = validate_memory(memory)
        for ref_field in ("image_ref",):
            ref = getattr(memory, ref_field)
            if ref is not None and not media.exists(ref):
                problems.append(f"{ref_field}: unknown media reference")
        if memory.music_meta and memory.music_meta.audio_ref is not None:
            if not media.exists(memory.music_meta.audio_ref):
                problems.append("music_meta.audio_ref: unknown media reference")
        if problems:
            raise HTTPException(400, {"violations": problems})
        store.put_memory(memory)
        return memory.to_dict()

    @app.get("/users/{user_id}/memories")
    async def list_memories(
        user_id: str,
        category: Optional[str] = Query(default=None),
        caller: UserProfile = Depends(require_auth),
    ) -> list:
        require_self_or_caregiver(caller, user_id)
        get_profile_or_404(user_id)
        if category is not None and category not in [c.value for c in MemoryCategory]:
            raise HTTPException(400, {"violations": [f"unknown category {category!r}"]})
        return [m.to_dict() for m in store.memories_for(user_id, category)]

    # -- media -------------------------------------------------------------

    @app.post("/media", status_code=201)
    async def upload_media(request: Request, caller: UserProfile = Depends(require_auth)) -> dict:
        data = await request.body()
        if not data:
            raise HTTPException(400, {"violations": ["empty media body"]})
        return {"media_ref": media.put(data)}

    @app.get("/media/{ref}")
    async def fetch_media(ref: str, caller: UserProfile = Depends(require_auth)) -> Response:
        try:
            return Response(content=media.get(ref), media_type="application/octet-stream")
        except UnknownRef:
            raise HTTPException(404, f"unknown media {ref}")

    # -- games and sessions ------------------------------------------------

    @app.get("/users/{user_id}/eligible-games")
    async def eligible(user_id: str, caller: UserProfile = Depends(require_auth)) -> dict:
        require_self_or_caregiver(caller, user_id)
        profile = get_profile_or_404(user_id)
        cfg = user_config(user_id)
        counts = engine.eligible_games(
            store.memories_for(user_id), profile, gen_config(cfg, 0)
        )
        enabled = set(cfg["enabled_game_types"])
        return {gt.value: (n if gt.value in enabled else 0) for gt, n in counts.items()}

    @app.post("/users/{user_id}/sessions", status_code=201)
    async def start_session(
        user_id: str, body: dict, caller: UserProfile = Depends(require_auth)
    ) -> dict:
        require_self_or_caregiver(caller, user_id)
        profile = get_profile_or_404(user_id)
        cfg = user_config(user_id)
        chosen_type = None
        if body.get("chosen_type") is not None:
            try:
                chosen_type = GameType(body["chosen_type"])
            except ValueError:
                raise HTTPException(400, {"violations": [f"unknown game type {body['chosen_type']!r}"]})
            if chosen_type.value not in cfg["enabled_game_types"]:
                raise HTTPException(400, {"violations": [f"{chosen_type.value} is disabled"]})
        seed = int(body.get("seed", secrets.randbits(63)))
        history = [
            _record_from_dict(d) for d in store.session_records_for(user_id)
        ]
        with sessions_lock:
            if user_id in open_by_user:
                raise HTTPException(409, "a session is already open for this user")
            try:
                plan = sessions.plan_session(
                    profile,
                    store.memories_for(user_id),
                    gen_config(cfg, seed),
                    estimates=time_estimates(cfg),
                    chosen_type=chosen_type,
                    history=history,
                    events=events_provider,
                    allowed_types=[GameType(t) for t in cfg["enabled_game_types"]],
                    min_seconds=cfg["session_min_seconds"],
                    max_seconds=cfg["session_max_seconds"],
                )
            except sessions.NoEligibleMaterial as exc:
                raise HTTPException(400, {"violations": [f"no eligible material: {exc}"]})
            now = time.time()
            open_sessions[plan.session_id] = OpenSession(
                plan=plan,
                user_id=user_id,
                estimates=time_estimates(cfg),
                started_at=now,
                served_at=now,
            )
            open_by_user[user_id] = plan.session_id
        return plan.to_dict()

    def _close_session(open_sess: OpenSession) -> dict:
        planned = len(open_sess.plan.exercises)
        record = sessions.SessionRecord(
            session_id=open_sess.plan.session_id,
            started_at=open_sess.started_at,
            ended_at=time.time(),
            outcomes=tuple(open_sess.outcomes),
            completion_level=(len(open_sess.outcomes) / planned) if planned else 0.0,
        )
        doc = {**record.to_dict(), "user_id": open_sess.user_id}
        store.put_session_record(doc)
        open_sessions.pop(open_sess.plan.session_id, None)
        open_by_user.pop(open_sess.user_id, None)
        return doc

    @app.post("/sessions/{session_id}/answers")
    async def submit_answer(
        session_id: str, body: dict, caller: UserProfile = Depends(require_auth)
    ) -> dict:
        with sessions_lock:
            open_sess = open_sessions.get(session_id)
            if open_sess is None:
                raise HTTPException(404, f"no open session {session_id}")
            require_self_or_caregiver(caller, open_sess.user_id)

            if body.get("stop"):
                return {"grade": None, "reread_text": None, "next_exercise": None,
                        "summary": _close_session(open_sess)}

            ex = open_sess.plan.exercises[open_sess.index]
            elapsed = time.time() - open_sess.served_at
            timed_out = bool(body.get("timed_out"))
            if timed_out:
                result = sessions._zero_grade(ex)
            else:
                if "answer" not in body:
                    raise HTTPException(400, {"violations": ["answer missing"]})
                answer = body["answer"]
                if isinstance(answer, list):
                    answer = [int(a) for a in answer if isinstance(a, (int, float))]
                try:
                    result = grade(ex, answer)
                except ShapeMismatch as exc:
                    raise HTTPException(400, {"violations": [str(exc)]})
            outcome = sessions.ExerciseOutcome(
                exercise_id=ex.exercise_id,
                game_type=ex.game_type,
                grade=result,
                elapsed_seconds=max(elapsed, 0.0),
                timed_out=timed_out,
                source_memory_ids=ex.source_memory_ids,
            )
            open_sess.outcomes.append(outcome)
            event_log.record_event(
                TelemetryEvent(
                    event_id=f"{session_id}:{len(open_sess.outcomes)}",
                    user_id=open_sess.user_id,
                    session_id=session_id,
                    game_type=ex.game_type,
                    timestamp=time.time(),
                    elapsed_seconds=outcome.elapsed_seconds,
                    errors=result.errors,
                    passed=result.correct,
                    score=result.score,
                    completion_level_at_event=len(open_sess.outcomes)
                    / len(open_sess.plan.exercises),
                )
            )
            reread = None
            if (
                result.correct
                and ex.game_type is GameType.MEMORY_COMPLETION
                and isinstance(ex.payload, MultipleChoice)
            ):
                reread = ex.payload.reread_text
            open_sess.index += 1
            open_sess.served_at = time.time()
            if open_sess.index >= len(open_sess.plan.exercises):
                return {"grade": result.to_dict(), "reread_text": reread,
                        "next_exercise": None, "summary": _close_session(open_sess)}
            next_ex = open_sess.plan.exercises[open_sess.index]
            return {"grade": result.to_dict(), "reread_text": reread,
                    "next_exercise": next_ex.to_dict(), "summary": None}

    # -- analytics ---------------------------------------------------------

    @app.get("/users/{user_id}/analytics/overview")
    async def analytics_overview(
        user_id: str,
        period: Optional[str] = Query(default=None, description="start,end (epoch seconds)"),
        caller: UserProfile = Depends(require_auth),
    ) -> dict:
        require_caregiver(caller)
        get_profile_or_404(user_id)
        parsed = None
        if period:
            try:
                start, end = (float(x) for x in period.split(","))
                parsed = (start, end)
            except ValueError:
                raise HTTPException(400, {"violations": ["period must be 'start,end'"]})
        return event_log.overview(user_id, parsed).to_dict()

    @app.get("/sessions/{session_id}/analytics")
    async def session_analytics(
        session_id: str, caller: UserProfile = Depends(require_auth)
    ) -> list:
        record = store.get_session_record(session_id)
        with sessions_lock:
            open_sess = open_sessions.get(session_id)
        owner = record["user_id"] if record else (open_sess.user_id if open_sess else None)
        if owner is None:
            raise HTTPException(404, f"unknown session {session_id}")
        require_self_or_caregiver(caller, owner)
        try:
            return [e.to_dict() for e in event_log.detail(owner, session_id)]
        except UnknownSession:
            return []

    # -- historical events -------------------------------------------------

    @app.get("/events")
    async def historical_events(year: int = Query(...)) -> list:
        found = events_provider.events_for_year(year)
        if not found and events_provider.last_external_error is not None:
            raise HTTPException(502, "external events service failed and fallback is empty")
        return [{"year": year, "event_text": text} for text in found]

    # -- caregiver configuration -------------------------------------------

    @app.put("/users/{user_id}/config")
    async def put_config(
        user_id: str, body: dict, caller: UserProfile = Depends(require_auth)
    ) -> dict:
        require_caregiver(caller)
        get_profile_or_404(user_id)
        problems = validate_config(body)
        if problems:
            raise HTTPException(400, {"violations": problems})
        store.put_config(user_id, body)
        return user_config(user_id)

    @app.get("/users/{user_id}/config")
    async def get_config(
        user_id: str, caller: UserProfile = Depends(require_auth)
    ) -> dict:
        require_caregiver(caller)
        get_profile_or_404(user_id)
        return user_config(user_id)

    return app


def _record_from_dict(d: dict[str, Any]) -> sessions.SessionRecord:
    outcomes = tuple(
        sessions.ExerciseOutcome(
            exercise_id=o["exercise_id"],
            game_type=GameType(o["game_type"]),
            grade=engine.GradeResult.from_dict(o["grade"]),
            elapsed_seconds=o["elapsed_seconds"],
            timed_out=o["timed_out"],
            source_memory_ids=tuple(o.get("source_memory_ids", ())),
        )
        for o in d.get("outcomes", [])
    )
    return sessions.SessionRecord(
        session_id=d["session_id"],
        started_at=d["started_at"],
        ended_at=d["ended_at"],
        outcomes=outcomes,
        completion_level=d["completion_level"],
    )


def main(argv: Optional[list[str]] = None) -> None:
    parser = argparse.ArgumentParser(description="biogames HTTP service")
    parser.add_argument("--port", type=int, default=int(os.environ.get("BIOGAMES_PORT", 8000)))
    parser.add_argument("--host", default=os.environ.get("BIOGAMES_HOST", "127.0.0.1"))
    parser.add_argument(
        "--data-dir", default=os.environ.get("BIOGAMES_DATA_DIR", "./biogames-data")
    )
    parser.add_argument(
        "--events-url", default=os.environ.get("BIOGAMES_EVENTS_URL") or None
    )
    parser.add_argument(
        "--timeout",
        type=float,
        default=float(os.environ.get("BIOGAMES_REQUEST_TIMEOUT", 5.0)),
        help="external events request timeout, seconds",
    )
    args = parser.parse_args(argv)

    import uvicorn

    app = create_app(args.data_dir, args.events_url, args.timeout)
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
