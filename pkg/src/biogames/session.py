"""Planning and running 15-20 minute play sessions through a presenter.

The presenter contract abstracts the output/input channels (speech,
display, audio, answers) so the same session loop drives a console
simulator, a web client, or any future device adapter.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Optional, Protocol, Sequence

from . import engine
from .analytics import TelemetryEvent
from .engine import (
    Exercise,
    GenConfig,
    GenerationError,
    GradeResult,
    MultipleChoice,
    MusicTask,
    OrderingTask,
    answer_key,
    grade,
)
from .events import EventsProvider, FallbackEventsProvider
from .model import GameType, Memory, MemoryCategory, UserProfile, memory_year

SESSION_MIN_SECONDS = 15 * 60
SESSION_MAX_SECONDS = 20 * 60
DEFAULT_ANSWER_TIMEOUT = 60.0


class UnknownUser(Exception):
    pass


class AmbiguousName(Exception):
    pass


class NoEligibleMaterial(Exception):
    pass


class PresenterFailure(Exception):
    """The presentation channel broke mid-session."""


class Timeout:
    """Sentinel: the user gave no answer within the allowed time."""


class Stop:
    """Sentinel: the user (or channel) asked to end the session."""


TIMEOUT = Timeout()
STOP = Stop()


class Presenter(Protocol):
    """Capability contract replacing the physical robot's channels."""

    def say(self, text: str) -> None: ...

    def show(self, content: Any) -> None: ...

    def play_audio(self, audio_ref: str, clip_seconds: float) -> None: ...

    def await_answer(self, shape: str, timeout_seconds: float) -> Any:
        """An answer of the requested shape, TIMEOUT, or STOP; never malformed."""
        ...


@dataclass(frozen=True)
class TimeEstimates:
    """Caregiver-configurable seconds budgeted per exercise type."""

    memory_completion: float = 90.0
    activities_ordering: float = 120.0
    memory_association: float = 120.0
    memory_related_event: float = 90.0
    music_game_base: float = 60.0  # plus the configured clip length
    answer_timeout: float = DEFAULT_ANSWER_TIMEOUT

    def for_type(self, game_type: GameType, cfg: GenConfig) -> float:
        return {
            GameType.MEMORY_COMPLETION: self.memory_completion,
            GameType.ACTIVITIES_ORDERING: self.activities_ordering,
            GameType.MEMORY_ASSOCIATION: self.memory_association,
            GameType.MEMORY_RELATED_EVENT: self.memory_related_event,
            GameType.MUSIC_GAME: self.music_game_base + cfg.clip_seconds,
        }[game_type]


@dataclass(frozen=True)
class SessionPlan:
    session_id: str
    user_id: str
    exercises: tuple[Exercise, ...]
    estimated_seconds: float
    short: bool
    game_type_filter: Optional[GameType] = None

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "session_id": self.session_id,
            "user_id": self.user_id,
            "exercises": [e.to_dict() for e in self.exercises],
            "estimated_seconds": self.estimated_seconds,
            "short": self.short,
        }
        if self.game_type_filter is not None:
            d["game_type_filter"] = self.game_type_filter.value
        return d


@dataclass(frozen=True)
class ExerciseOutcome:
    exercise_id: str
    game_type: GameType
    grade: GradeResult
    elapsed_seconds: float
    timed_out: bool
    source_memory_ids: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "exercise_id": self.exercise_id,
            "game_type": self.game_type.value,
            "grade": self.grade.to_dict(),
            "elapsed_seconds": self.elapsed_seconds,
            "timed_out": self.timed_out,
            "source_memory_ids": list(self.source_memory_ids),
        }


@dataclass(frozen=True)
class SessionRecord:
    session_id: str
    started_at: float
    ended_at: float
    outcomes: tuple[ExerciseOutcome, ...]
    completion_level: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "session_id": self.session_id,
            "started_at": self.started_at,
            "ended_at": self.ended_at,
            "outcomes": [o.to_dict() for o in self.outcomes],
            "completion_level": self.completion_level,
        }


def identify_user(name: str, profiles: Sequence[UserProfile]) -> UserProfile:
    """Find the unique profile whose display name matches the spoken name."""
    wanted = name.strip().casefold()
    if not wanted:
        raise UnknownUser("empty name")
    matches = [p for p in profiles if p.display_name.strip().casefold() == wanted]
    if not matches:
        raise UnknownUser(name)
    if len(matches) > 1:
        raise AmbiguousName(name)
    return matches[0]


def _plan_id(user_id: str, seed: int, memory_ids: Sequence[str]) -> str:
    h = hashlib.sha256()
    h.update(user_id.encode())
    h.update(f"\x00{seed}".encode())
    for mid in memory_ids:
        h.update(b"\x00")
        h.update(mid.encode())
    return "sess-" + h.hexdigest()[:16]


def _candidate_exercises(
    profile: UserProfile,
    memories: Sequence[Memory],
    cfg: GenConfig,
    events: EventsProvider,
) -> dict[GameType, list[Callable[[int], Exercise]]]:
    """Per game type, thunks that generate one exercise from a derived seed.

    Each thunk wraps one distinct piece of source material, so a plan never
    schedules the same material twice.
    """
    counts = engine.eligible_games(memories, profile, cfg)
    thunks: dict[GameType, list[Callable[[int], Exercise]]] = {gt: [] for gt in GameType}

    if counts[GameType.MEMORY_COMPLETION]:
        eligible_cats = {
            cat
            for cat, pool in _by_category(memories).items()
            if len({m.key_detail for m in pool if m.key_detail}) >= cfg.option_count
        }
        for m in memories:
            if m.key_detail and m.category in eligible_cats:
                thunks[GameType.MEMORY_COMPLETION].append(
                    lambda seed, m=m: engine.generate_memory_completion(
                        m, memories, replace(cfg, rng_seed=seed)
                    )
                )

    for m in memories:
        if m.category is MemoryCategory.HOBBIES and len(m.hobby_steps) >= 3:
            thunks[GameType.ACTIVITIES_ORDERING].append(
                lambda seed, m=m: engine.generate_activities_ordering(
                    m, replace(cfg, rng_seed=seed)
                )
            )

    if counts[GameType.MEMORY_ASSOCIATION]:
        thunks[GameType.MEMORY_ASSOCIATION].append(
            lambda seed: engine.generate_memory_association(
                memories, replace(cfg, rng_seed=seed)
            )
        )

    for m in memories:
        if memory_year(m, profile) is not None:
            thunks[GameType.MEMORY_RELATED_EVENT].append(
                lambda seed, m=m: engine.generate_event_question(
                    m, profile, events, replace(cfg, rng_seed=seed)
                )
            )

    for m in memories:
        if (
            m.category is MemoryCategory.MUSIC
            and m.music_meta is not None
            and m.music_meta.audio_ref is not None
        ):
            thunks[GameType.MUSIC_GAME].append(
                lambda seed, m=m: engine.generate_music_game(
                    m, memories, replace(cfg, rng_seed=seed)
                )
            )
    return thunks


def _by_category(memories: Sequence[Memory]) -> dict[Any, list[Memory]]:
    out: dict[Any, list[Memory]] = {}
    for m in memories:
        out.setdefault(m.category, []).append(m)
    return out


def plan_session(
    profile: UserProfile,
    memories: Sequence[Memory],
    cfg: GenConfig,
    estimates: Optional[TimeEstimates] = None,
    chosen_type: Optional[GameType] = None,
    history: Sequence[SessionRecord] = (),
    events: Optional[EventsProvider] = None,
    allowed_types: Optional[Sequence[GameType]] = None,
    min_seconds: float = SESSION_MIN_SECONDS,
    max_seconds: float = SESSION_MAX_SECONDS,
) -> SessionPlan:
    """Assemble a session whose estimated time lands in the 15-20 min window.

    Exercises are drawn greedily from eligible material (honoring the
    user's game-type choice), rotating away from memories used in the most
    recent session when alternatives exist. Deterministic given the seed.
    """
    if estimates is None:
        estimates = TimeEstimates()
    if events is None:
        events = FallbackEventsProvider()

    thunks = _candidate_exercises(profile, memories, cfg, events)
    if allowed_types is not None:
        thunks = {gt: th for gt, th in thunks.items() if gt in set(allowed_types)}
    if chosen_type is not None:
        thunks = {chosen_type: thunks.get(chosen_type, [])}

    rng = engine._rng(cfg.rng_seed, "plan", profile.user_id)

    recent_ids: set[str] = set()
    if history:
        recent_ids = {
            mid for o in history[-1].outcomes for mid in o.source_memory_ids
        }

    # Materialize candidates up front; each gets its own derived seed.
    candidates: list[tuple[GameType, Exercise]] = []
    for gt in GameType:
        for thunk in thunks.get(gt, []):
            try:
                candidates.append((gt, thunk(rng.getrandbits(63))))
            except GenerationError:
                continue  # e.g. no event data for this memory's year
    if not candidates:
        raise NoEligibleMaterial(
            chosen_type.value if chosen_type else "no game type has material"
        )

    rng.shuffle(candidates)
    # Fresh material first; repeats from the previous session go to the back.
    candidates.sort(key=lambda ge: bool(recent_ids & set(ge[1].source_memory_ids)))

    chosen: list[Exercise] = []
    total = 0.0
    for gt, ex in candidates:
        if total >= min_seconds:
            break
        est = estimates.for_type(gt, cfg)
        if total + est > max_seconds:
            continue
        chosen.append(ex)
        total += est

    short = total < min_seconds
    return SessionPlan(
        session_id=_plan_id(profile.user_id, cfg.rng_seed, [m.memory_id for m in memories]),
        user_id=profile.user_id,
        exercises=tuple(chosen),
        estimated_seconds=total,
        short=short,
        game_type_filter=chosen_type,
    )


def _answer_shape(ex: Exercise) -> str:
    if isinstance(ex.payload, OrderingTask):
        return "ordering"
    if isinstance(ex.payload, (MultipleChoice, MusicTask)):
        return "index"
    return "mapping"


def _zero_grade(ex: Exercise) -> GradeResult:
    """Grade assigned to a timed-out attempt: one error, nothing correct."""
    p = ex.payload
    if isinstance(p, OrderingTask):
        n = len(p.presented_items)
    elif isinstance(p, (MultipleChoice, MusicTask)):
        n = 1
    else:
        n = len(p.left_items)
    return GradeResult(correct=False, item_correct=(False,) * n, score=0.0, errors=1)


def run_session(
    plan: SessionPlan,
    presenter: Presenter,
    tracker: Optional[Callable[[TelemetryEvent], None]] = None,
    estimates: Optional[TimeEstimates] = None,
    clock: Callable[[], float] = time.time,
) -> SessionRecord:
    """Drive a planned session exercise by exercise through the presenter.

    Every attempted exercise yields exactly one outcome and one telemetry
    event. A correct memory-completion answer re-reads the full memory.
    A broken presenter closes the record with the outcomes gathered so far.
    """
    if estimates is None:
        estimates = TimeEstimates()
    started = clock()
    outcomes: list[ExerciseOutcome] = []
    planned = len(plan.exercises)

    def emit(outcome: ExerciseOutcome) -> None:
        outcomes.append(outcome)
        if tracker is not None:
            tracker(
                TelemetryEvent(
                    event_id=f"{plan.session_id}:{len(outcomes)}",
                    user_id=plan.user_id,
                    session_id=plan.session_id,
                    game_type=outcome.game_type,
                    timestamp=clock(),
                    elapsed_seconds=outcome.elapsed_seconds,
                    errors=outcome.grade.errors,
                    passed=outcome.grade.correct,
                    score=outcome.grade.score,
                    completion_level_at_event=len(outcomes) / planned,
                )
            )

    stopped = False
    try:
        for ex in plan.exercises:
            t0 = clock()
            if isinstance(ex.payload, MusicTask):
                presenter.say(ex.payload.question.prompt)
                presenter.play_audio(ex.payload.audio_ref, ex.payload.clip_seconds)
            elif isinstance(ex.payload, MultipleChoice):
                presenter.say(ex.payload.prompt)
            presenter.show(ex.to_dict())

            answer = presenter.await_answer(_answer_shape(ex), estimates.answer_timeout)
            elapsed = clock() - t0
            if isinstance(answer, Stop):
                stopped = True
                break
            if isinstance(answer, Timeout):
                emit(
                    ExerciseOutcome(
                        ex.exercise_id, ex.game_type, _zero_grade(ex), elapsed,
                        timed_out=True, source_memory_ids=ex.source_memory_ids,
                    )
                )
                continue
            result = grade(ex, answer)
            emit(
                ExerciseOutcome(
                    ex.exercise_id, ex.game_type, result, elapsed,
                    timed_out=False, source_memory_ids=ex.source_memory_ids,
                )
            )
            if (
                result.correct
                and ex.game_type is GameType.MEMORY_COMPLETION
                and isinstance(ex.payload, MultipleChoice)
                and ex.payload.reread_text
            ):
                presenter.say(ex.payload.reread_text)
    except PresenterFailure:
        pass  # close the record with what we have

    return SessionRecord(
        session_id=plan.session_id,
        started_at=started,
        ended_at=clock(),
        outcomes=tuple(outcomes),
        completion_level=(len(outcomes) / planned) if planned else 0.0,
    )


class ConsolePresenter:
    """Line-oriented presenter: prompts on stdout, answers from stdin.

    Type a single option number, a space-separated ordering/mapping, or
    'stop' to end the session. Used for demos and scripted tests.
    """

    def __init__(self, input_fn: Callable[[str], str] = input, echo: Callable[[str], None] = print):
        self.input_fn = input_fn
        self.echo = echo

    def say(self, text: str) -> None:
        self.echo(f"[voice] {text}")

    def show(self, content: Any) -> None:
        payload = content.get("payload", {}) if isinstance(content, dict) else {}
        if "options" in payload:
            for i, opt in enumerate(payload["options"]):
                self.echo(f"  {i}: {opt}")
        elif "question" in payload:
            for i, opt in enumerate(payload["question"]["options"]):
                self.echo(f"  {i}: {opt}")
        elif "presented_items" in payload:
            for i, item in enumerate(payload["presented_items"]):
                self.echo(f"  {i}: {item}")
        elif "left_items" in payload:
            for i, (l, r) in enumerate(
                zip(payload["left_items"], payload["right_items"])
            ):
                self.echo(f"  left {i}: {l}    right {i}: {r}")

    def play_audio(self, audio_ref: str, clip_seconds: float) -> None:
        self.echo(f"[audio] playing {audio_ref} for {clip_seconds:g}s")

    def await_answer(self, shape: str, timeout_seconds: float) -> Any:
        try:
            raw = self.input_fn(f"answer ({shape})> ").strip()
        except (EOFError, KeyboardInterrupt):
            return STOP
        if raw.lower() in ("stop", "quit", "exit"):
            return STOP
        if raw == "":
            return TIMEOUT
        try:
            if shape == "index":
                return int(raw)
            return [int(tok) for tok in raw.replace(",", " ").split()]
        except ValueError:
            return TIMEOUT


class ScriptedPresenter:
    """Presenter answering from a fixed script; records every channel call."""

    def __init__(self, answers: Sequence[Any]):
        self.answers = list(answers)
        self.said: list[str] = []
        self.shown: list[Any] = []
        self.played: list[tuple[str, float]] = []
        self._i = 0

    def say(self, text: str) -> None:
        self.said.append(text)

    def show(self, content: Any) -> None:
        self.shown.append(content)

    def play_audio(self, audio_ref: str, clip_seconds: float) -> None:
        self.played.append((audio_ref, clip_seconds))

    def await_answer(self, shape: str, timeout_seconds: float) -> Any:
        if self._i >= len(self.answers):
            return STOP
        answer = self.answers[self._i]
        self._i += 1
        return answer
