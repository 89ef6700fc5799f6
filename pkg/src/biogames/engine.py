"""Seed-driven synthesis of the five exercise types, plus grading.

Every generator is a pure function of (inputs, seed): fixed inputs and a
fixed seed produce a byte-identical exercise, which makes play sessions
reproducible and testable. Distractors always come from the user's own
other memories, except the music game which may top up from a small
bundled pool of classic singers and titles.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Optional, Sequence, Union

from .events import EventsProvider
from .model import GameType, Memory, MemoryCategory, UserProfile, memory_year

BLANK = "___"
FALLBACK_QUESTION = "Which was it?"
MAX_RESHUFFLE_TRIES = 16

EXTERNAL_YEAR_RANGE = range(1900, 2001)  # candidate years for event distractors


class GenerationError(Exception):
    """Base for all exercise-generation failures."""


class InsufficientMaterial(GenerationError):
    pass


class MissingDetail(GenerationError):
    pass


class NotAHobby(GenerationError):
    pass


class TooFewSteps(GenerationError):
    pass


class DuplicateDetails(GenerationError):
    pass


class NoYear(GenerationError):
    pass


class NoEventData(GenerationError):
    pass


class NotMusic(GenerationError):
    pass


class NoAudio(GenerationError):
    pass


class ShapeMismatch(Exception):
    """The submitted answer does not match the exercise payload's shape."""


@dataclass(frozen=True)
class GenConfig:
    option_count: int = 4
    association_pairs: int = 3
    clip_seconds: float = 10.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.option_count < 2:
            raise ValueError("option_count must be >= 2")
        if not 3 <= self.association_pairs <= 4:
            raise ValueError("association_pairs must be 3 or 4")
        if self.clip_seconds <= 0:
            raise ValueError("clip_seconds must be positive")


@dataclass(frozen=True)
class MultipleChoice:
    prompt: str
    options: tuple[str, ...]
    correct_index: int
    reread_text: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "prompt": self.prompt,
            "options": list(self.options),
            "correct_index": self.correct_index,
        }
        if self.reread_text is not None:
            d["reread_text"] = self.reread_text
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "MultipleChoice":
        return cls(
            prompt=d["prompt"],
            options=tuple(d["options"]),
            correct_index=d["correct_index"],
            reread_text=d.get("reread_text"),
        )


@dataclass(frozen=True)
class OrderingTask:
    presented_items: tuple[str, ...]
    correct_order: tuple[int, ...]  # presented-item indices in true sequence

    def to_dict(self) -> dict[str, Any]:
        return {
            "presented_items": list(self.presented_items),
            "correct_order": list(self.correct_order),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "OrderingTask":
        return cls(tuple(d["presented_items"]), tuple(d["correct_order"]))


@dataclass(frozen=True)
class AssociationTask:
    left_items: tuple[str, ...]
    right_items: tuple[str, ...]
    correct_mapping: tuple[int, ...]  # left i -> index into right_items

    def to_dict(self) -> dict[str, Any]:
        return {
            "left_items": list(self.left_items),
            "right_items": list(self.right_items),
            "correct_mapping": list(self.correct_mapping),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "AssociationTask":
        return cls(
            tuple(d["left_items"]), tuple(d["right_items"]), tuple(d["correct_mapping"])
        )


@dataclass(frozen=True)
class MusicTask:
    audio_ref: str
    clip_seconds: float
    question: MultipleChoice

    def to_dict(self) -> dict[str, Any]:
        return {
            "audio_ref": self.audio_ref,
            "clip_seconds": self.clip_seconds,
            "question": self.question.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "MusicTask":
        return cls(d["audio_ref"], d["clip_seconds"], MultipleChoice.from_dict(d["question"]))


Payload = Union[MultipleChoice, OrderingTask, AssociationTask, MusicTask]

_PAYLOAD_TYPES: dict[GameType, type] = {
    GameType.MEMORY_COMPLETION: MultipleChoice,
    GameType.ACTIVITIES_ORDERING: OrderingTask,
    GameType.MEMORY_ASSOCIATION: AssociationTask,
    GameType.MEMORY_RELATED_EVENT: MultipleChoice,
    GameType.MUSIC_GAME: MusicTask,
}


@dataclass(frozen=True)
class Exercise:
    exercise_id: str
    game_type: GameType
    source_memory_ids: tuple[str, ...]
    payload: Payload

    def to_dict(self) -> dict[str, Any]:
        return {
            "exercise_id": self.exercise_id,
            "game_type": self.game_type.value,
            "source_memory_ids": list(self.source_memory_ids),
            "payload": self.payload.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Exercise":
        game_type = GameType(d["game_type"])
        payload = _PAYLOAD_TYPES[game_type].from_dict(d["payload"])
        return cls(d["exercise_id"], game_type, tuple(d["source_memory_ids"]), payload)


@dataclass(frozen=True)
class GradeResult:
    correct: bool
    item_correct: tuple[bool, ...]
    score: float
    errors: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "correct": self.correct,
            "item_correct": list(self.item_correct),
            "score": self.score,
            "errors": self.errors,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "GradeResult":
        return cls(d["correct"], tuple(d["item_correct"]), d["score"], d["errors"])


def _rng(seed: int, *parts: str) -> random.Random:
    """Independent RNG stream for one generation call, keyed by seed + labels."""
    h = hashlib.sha256()
    h.update(str(seed).encode())
    for p in parts:
        h.update(b"\x00")
        h.update(p.encode())
    return random.Random(int.from_bytes(h.digest()[:8], "big"))


def _exercise_id(game_type: GameType, source_ids: Sequence[str], seed: int) -> str:
    h = hashlib.sha256()
    h.update(game_type.value.encode())
    for sid in source_ids:
        h.update(b"\x00")
        h.update(sid.encode())
    h.update(f"\x00{seed}".encode())
    return "ex-" + h.hexdigest()[:16]


def _dedupe(items: Sequence[str]) -> list[str]:
    seen = set()
    out = []
    for it in items:
        if it not in seen:
            seen.add(it)
            out.append(it)
    return out


def _shuffled_not_identity(items: Sequence[Any], rng: random.Random) -> list[Any]:
    """Seed-driven shuffle guaranteed to differ from the given order (len >= 2).

    Bounded retries, then a deterministic rotation by one, so the function
    always terminates with a non-identity arrangement.
    """
    original = list(items)
    for _ in range(MAX_RESHUFFLE_TRIES):
        shuffled = list(items)
        rng.shuffle(shuffled)
        if shuffled != original:
            return shuffled
    return original[1:] + original[:1]


def _assoc_pair(m: Memory) -> Optional[tuple[str, str]]:
    """(left, right) material a memory contributes to the association game."""
    if m.category is MemoryCategory.MUSIC and m.music_meta is not None:
        return (m.music_meta.song_title, m.music_meta.artist)
    if m.key_detail is not None:
        return (m.title, m.key_detail)
    return None


def _completion_pools(memories: Sequence[Memory]) -> dict[MemoryCategory, list[Memory]]:
    pools: dict[MemoryCategory, list[Memory]] = {}
    for m in memories:
        if m.key_detail is not None:
            pools.setdefault(m.category, []).append(m)
    return pools


def _distinct_assoc_pairs(memories: Sequence[Memory]) -> list[tuple[Memory, str, str]]:
    """Pairs with pairwise-distinct lefts and rights, greedily kept in pool order."""
    kept: list[tuple[Memory, str, str]] = []
    lefts: set[str] = set()
    rights: set[str] = set()
    for m in memories:
        pair = _assoc_pair(m)
        if pair is None:
            continue
        left, right = pair
        if left in lefts or right in rights:
            continue
        lefts.add(left)
        rights.add(right)
        kept.append((m, left, right))
    return kept


def _music_eligible(m: Memory) -> bool:
    return (
        m.category is MemoryCategory.MUSIC
        and m.music_meta is not None
        and m.music_meta.audio_ref is not None
    )


def eligible_games(
    memories: Sequence[Memory], profile: UserProfile, cfg: GenConfig
) -> dict[GameType, int]:
    """How much material each game type has: counts of generatable sources.

    A game menu should only offer types with a count > 0; a positive count
    guarantees at least one generation call of that type can succeed.
    """
    counts = dict.fromkeys(GameType, 0)

    for category, pool in _completion_pools(memories).items():
        distinct_details = {m.key_detail for m in pool}
        if len(distinct_details) >= cfg.option_count:
            counts[GameType.MEMORY_COMPLETION] += len(pool)

    counts[GameType.ACTIVITIES_ORDERING] = sum(
        1
        for m in memories
        if m.category is MemoryCategory.HOBBIES and len(m.hobby_steps) >= 3
    )

    by_category: dict[MemoryCategory, list[Memory]] = {}
    for m in memories:
        by_category.setdefault(m.category, []).append(m)
    counts[GameType.MEMORY_ASSOCIATION] = int(
        any(
            len(_distinct_assoc_pairs(pool)) >= cfg.association_pairs
            for pool in by_category.values()
        )
    )

    counts[GameType.MEMORY_RELATED_EVENT] = sum(
        1 for m in memories if memory_year(m, profile) is not None
    )

    counts[GameType.MUSIC_GAME] = sum(1 for m in memories if _music_eligible(m))
    return counts


def generate_memory_completion(
    target: Memory, pool: Sequence[Memory], cfg: GenConfig
) -> Exercise:
    """Fill-the-missing-detail question over one memory.

    The true detail is blanked out of the description (or a fixed question
    appended when the detail never occurs verbatim); distractors are other
    same-category details from the user's own pool.
    """
    if target.key_detail is None:
        raise MissingDetail(f"memory {target.memory_id} has no key_detail")

    candidates: list[tuple[str, str]] = []  # (detail, source memory id)
    seen: set[str] = set()
    for m in pool:
        if (
            m.memory_id != target.memory_id
            and m.category is target.category
            and m.key_detail is not None
            and m.key_detail != target.key_detail
            and m.key_detail not in seen
        ):
            seen.add(m.key_detail)
            candidates.append((m.key_detail, m.memory_id))
    needed = cfg.option_count - 1
    if len(candidates) < needed:
        raise InsufficientMaterial(
            f"need {needed} distinct distractor details, pool has {len(candidates)}"
        )

    rng = _rng(cfg.rng_seed, "memory_completion", target.memory_id)
    chosen = rng.sample(candidates, needed)
    options = [target.key_detail] + [detail for detail, _ in chosen]
    rng.shuffle(options)

    if target.key_detail in target.description:
        prompt = target.description.replace(target.key_detail, BLANK, 1)
    else:
        prompt = f"{target.description} {FALLBACK_QUESTION}".strip()

    source_ids = (target.memory_id,) + tuple(mid for _, mid in chosen)
    payload = MultipleChoice(
        prompt=prompt,
        options=tuple(options),
        correct_index=options.index(target.key_detail),
        reread_text=target.description,
    )
    return Exercise(
        exercise_id=_exercise_id(GameType.MEMORY_COMPLETION, source_ids, cfg.rng_seed),
        game_type=GameType.MEMORY_COMPLETION,
        source_memory_ids=source_ids,
        payload=payload,
    )


def generate_activities_ordering(target: Memory, cfg: GenConfig) -> Exercise:
    """Put the steps of a hobby back in their right order."""
    if target.category is not MemoryCategory.HOBBIES:
        raise NotAHobby(f"memory {target.memory_id} is {target.category.value}")
    steps = list(target.hobby_steps)
    if len(steps) < 3:
        raise TooFewSteps(f"need >= 3 steps, got {len(steps)}")

    rng = _rng(cfg.rng_seed, "activities_ordering", target.memory_id)
    presented = _shuffled_not_identity(steps, rng)
    correct_order = tuple(presented.index(s) for s in steps)
    payload = OrderingTask(presented_items=tuple(presented), correct_order=correct_order)
    source_ids = (target.memory_id,)
    return Exercise(
        exercise_id=_exercise_id(GameType.ACTIVITIES_ORDERING, source_ids, cfg.rng_seed),
        game_type=GameType.ACTIVITIES_ORDERING,
        source_memory_ids=source_ids,
        payload=payload,
    )


def generate_memory_association(pool: Sequence[Memory], cfg: GenConfig) -> Exercise:
    """Connect memories (titles, or song titles) to their details (or singers)."""
    by_category: dict[MemoryCategory, list[Memory]] = {}
    for m in pool:
        by_category.setdefault(m.category, []).append(m)

    chosen_pairs: Optional[list[tuple[Memory, str, str]]] = None
    saw_enough_raw = False
    for category in MemoryCategory:  # fixed order keeps the pick deterministic
        members = by_category.get(category, [])
        raw = [m for m in members if _assoc_pair(m) is not None]
        if len(raw) >= cfg.association_pairs:
            saw_enough_raw = True
        kept = _distinct_assoc_pairs(members)
        if len(kept) >= cfg.association_pairs:
            chosen_pairs = kept
            break
    if chosen_pairs is None:
        if saw_enough_raw:
            raise DuplicateDetails(
                "enough same-category memories, but their details are not distinct"
            )
        raise InsufficientMaterial(
            f"no category has {cfg.association_pairs} memories with distinct details"
        )

    rng = _rng(cfg.rng_seed, "memory_association", *(m.memory_id for m, _, _ in chosen_pairs))
    selected = rng.sample(chosen_pairs, cfg.association_pairs)
    left_items = [left for _, left, _ in selected]
    true_rights = [right for _, _, right in selected]
    right_items = _shuffled_not_identity(true_rights, rng)
    correct_mapping = tuple(right_items.index(r) for r in true_rights)

    source_ids = tuple(m.memory_id for m, _, _ in selected)
    payload = AssociationTask(
        left_items=tuple(left_items),
        right_items=tuple(right_items),
        correct_mapping=correct_mapping,
    )
    return Exercise(
        exercise_id=_exercise_id(GameType.MEMORY_ASSOCIATION, source_ids, cfg.rng_seed),
        game_type=GameType.MEMORY_ASSOCIATION,
        source_memory_ids=source_ids,
        payload=payload,
    )


def generate_event_question(
    target: Memory, profile: UserProfile, events: EventsProvider, cfg: GenConfig
) -> Exercise:
    """Guess the real historical event from the year of the memory."""
    year = memory_year(target, profile)
    if year is None:
        raise NoYear(f"memory {target.memory_id} has no derivable year")
    year_events = events.events_for_year(year)
    if not year_events:
        raise NoEventData(f"no event data for year {year}")

    rng = _rng(cfg.rng_seed, "event_question", target.memory_id)
    correct = rng.choice(year_events)

    needed = cfg.option_count - 1
    other_years = [y for y in EXTERNAL_YEAR_RANGE if y != year]
    rng.shuffle(other_years)
    distractors: list[str] = []
    used = {correct}
    for y in other_years:
        for text in events.events_for_year(y):
            if text not in used:
                used.add(text)
                distractors.append(text)
                break
        if len(distractors) == needed:
            break
    if len(distractors) < needed:
        raise NoEventData(f"not enough distractor events around year {year}")

    options = [correct] + distractors
    rng.shuffle(options)
    prompt = f"What happened in the same year you {target.title} ({year})?"
    source_ids = (target.memory_id,)
    payload = MultipleChoice(
        prompt=prompt, options=tuple(options), correct_index=options.index(correct)
    )
    return Exercise(
        exercise_id=_exercise_id(GameType.MEMORY_RELATED_EVENT, source_ids, cfg.rng_seed),
        game_type=GameType.MEMORY_RELATED_EVENT,
        source_memory_ids=source_ids,
        payload=payload,
    )


def _load_music_fallback() -> dict[str, list[str]]:
    raw = (
        resources.files("biogames.data")
        .joinpath("music_fallback.json")
        .read_text(encoding="utf-8")
    )
    return json.loads(raw)


def generate_music_game(
    target: Memory,
    pool: Sequence[Memory],
    cfg: GenConfig,
    fallback_pool: Optional[dict[str, list[str]]] = None,
) -> Exercise:
    """Play a song clip, then guess its singer or its title.

    Distractors come from the user's other music memories first; the bundled
    artist/title pool only tops up when the collection is too small.
    """
    if target.category is not MemoryCategory.MUSIC or target.music_meta is None:
        raise NotMusic(f"memory {target.memory_id} is not a music memory")
    if target.music_meta.audio_ref is None:
        raise NoAudio(f"music memory {target.memory_id} has no audio")
    if fallback_pool is None:
        fallback_pool = _load_music_fallback()

    rng = _rng(cfg.rng_seed, "music_game", target.memory_id)
    ask_artist = rng.random() < 0.5
    if ask_artist:
        correct = target.music_meta.artist
        prompt = "Who is the singer of this song?"
        fallback_values = fallback_pool["artists"]
    else:
        correct = target.music_meta.song_title
        prompt = "What is the title of this song?"
        fallback_values = fallback_pool["titles"]

    user_candidates: list[tuple[str, str]] = []  # (value, source memory id)
    seen = {correct}
    for m in pool:
        if m.memory_id == target.memory_id or m.category is not MemoryCategory.MUSIC:
            continue
        if m.music_meta is None:
            continue
        value = m.music_meta.artist if ask_artist else m.music_meta.song_title
        if value not in seen:
            seen.add(value)
            user_candidates.append((value, m.memory_id))

    needed = cfg.option_count - 1
    if len(user_candidates) >= needed:
        chosen = rng.sample(user_candidates, needed)
    else:
        chosen = list(user_candidates)
        extra = [v for v in fallback_values if v not in seen]
        missing = needed - len(chosen)
        if len(extra) < missing:
            raise InsufficientMaterial(
                f"need {needed} distractors, even the fallback pool falls short"
            )
        chosen += [(v, "") for v in rng.sample(extra, missing)]

    options = [correct] + [v for v, _ in chosen]
    rng.shuffle(options)
    question = MultipleChoice(
        prompt=prompt, options=tuple(options), correct_index=options.index(correct)
    )
    source_ids = (target.memory_id,) + tuple(mid for _, mid in chosen if mid)
    payload = MusicTask(
        audio_ref=target.music_meta.audio_ref,
        clip_seconds=cfg.clip_seconds,
        question=question,
    )
    return Exercise(
        exercise_id=_exercise_id(GameType.MUSIC_GAME, source_ids, cfg.rng_seed),
        game_type=GameType.MUSIC_GAME,
        source_memory_ids=source_ids,
        payload=payload,
    )


def answer_key(e: Exercise):
    """The response that grades to a perfect score."""
    p = e.payload
    if isinstance(p, MultipleChoice):
        return p.correct_index
    if isinstance(p, MusicTask):
        return p.question.correct_index
    if isinstance(p, OrderingTask):
        return list(p.correct_order)
    if isinstance(p, AssociationTask):
        return list(p.correct_mapping)
    raise TypeError(f"unknown payload {type(p).__name__}")


def _grade_choice(mc: MultipleChoice, response) -> GradeResult:
    if not isinstance(response, int) or isinstance(response, bool):
        raise ShapeMismatch("expected an option index")
    if not 0 <= response < len(mc.options):
        raise ShapeMismatch(f"option index {response} out of range")
    ok = response == mc.correct_index
    return GradeResult(
        correct=ok, item_correct=(ok,), score=1.0 if ok else 0.0, errors=0 if ok else 1
    )


def _check_permutation(response, n: int, what: str) -> list[int]:
    if not isinstance(response, (list, tuple)) or any(
        not isinstance(i, int) or isinstance(i, bool) for i in response
    ):
        raise ShapeMismatch(f"expected a list of {what} indices")
    if sorted(response) != list(range(n)):
        raise ShapeMismatch(f"expected a permutation of 0..{n - 1}")
    return list(response)


def grade(e: Exercise, response) -> GradeResult:
    """Score a response against an exercise's answer key.

    Multiple-choice (and the music question) score all-or-nothing; ordering
    and association score the fraction of items in their correct place.
    """
    p = e.payload
    if isinstance(p, MultipleChoice):
        return _grade_choice(p, response)
    if isinstance(p, MusicTask):
        return _grade_choice(p.question, response)
    if isinstance(p, OrderingTask):
        order = _check_permutation(response, len(p.presented_items), "presented-item")
        item_correct = tuple(a == b for a, b in zip(order, p.correct_order))
    elif isinstance(p, AssociationTask):
        mapping = _check_permutation(response, len(p.left_items), "right-item")
        item_correct = tuple(a == b for a, b in zip(mapping, p.correct_mapping))
    else:
        raise TypeError(f"unknown payload {type(p).__name__}")
    n_ok = sum(item_correct)
    total = len(item_correct)
    return GradeResult(
        correct=n_ok == total,
        item_correct=item_correct,
        score=n_ok / total,
        errors=total - n_ok,
    )
