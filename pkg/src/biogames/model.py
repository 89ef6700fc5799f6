"""Domain types for users and categorized biographical memories.

Everything here is a plain value type with pure helper functions, so the
objects can be shared freely between threads. The canonical JSON encoding
produced by :func:`canonical_json` is the wire format used by the HTTP
service and the analytics log.
"""

from __future__ import annotations

import datetime
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

MIN_BIRTH_YEAR = 1900
MAX_AGE_AT_EVENT = 120


class MemoryCategory(str, Enum):
    """The six biography categories. The set is closed."""

    AFFECTIONS = "Affections"
    EVENTS = "Events"
    GAMES = "Games"
    HOBBIES = "Hobbies"
    PLACES = "Places"
    MUSIC = "Music"


class GameType(str, Enum):
    """The five exercise types synthesized from memories."""

    MEMORY_COMPLETION = "MemoryCompletion"
    ACTIVITIES_ORDERING = "ActivitiesOrdering"
    MEMORY_ASSOCIATION = "MemoryAssociation"
    MEMORY_RELATED_EVENT = "MemoryRelatedEvent"
    MUSIC_GAME = "MusicGame"


class Role(str, Enum):
    SENIOR = "senior"
    CAREGIVER = "caregiver"


@dataclass(frozen=True)
class UserProfile:
    user_id: str
    display_name: str
    role: Role = Role.SENIOR
    birth_year: Optional[int] = None

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "user_id": self.user_id,
            "display_name": self.display_name,
            "role": self.role.value,
        }
        if self.birth_year is not None:
            d["birth_year"] = self.birth_year
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "UserProfile":
        return cls(
            user_id=d["user_id"],
            display_name=d["display_name"],
            role=Role(d.get("role", "senior")),
            birth_year=d.get("birth_year"),
        )


@dataclass(frozen=True)
class MusicMeta:
    song_title: str
    artist: str
    audio_ref: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"song_title": self.song_title, "artist": self.artist}
        if self.audio_ref is not None:
            d["audio_ref"] = self.audio_ref
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "MusicMeta":
        return cls(
            song_title=d["song_title"],
            artist=d["artist"],
            audio_ref=d.get("audio_ref"),
        )


@dataclass(frozen=True)
class Memory:
    memory_id: str
    owner_id: str
    category: MemoryCategory
    title: str
    description: str = ""
    age_at_event: Optional[int] = None
    image_ref: Optional[str] = None
    key_detail: Optional[str] = None
    hobby_steps: tuple[str, ...] = field(default_factory=tuple)
    music_meta: Optional[MusicMeta] = None

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "memory_id": self.memory_id,
            "owner_id": self.owner_id,
            "category": self.category.value,
            "title": self.title,
            "description": self.description,
        }
        if self.age_at_event is not None:
            d["age_at_event"] = self.age_at_event
        if self.image_ref is not None:
            d["image_ref"] = self.image_ref
        if self.key_detail is not None:
            d["key_detail"] = self.key_detail
        if self.hobby_steps:
            d["hobby_steps"] = list(self.hobby_steps)
        if self.music_meta is not None:
            d["music_meta"] = self.music_meta.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Memory":
        music = d.get("music_meta")
        return cls(
            memory_id=d["memory_id"],
            owner_id=d["owner_id"],
            category=MemoryCategory(d["category"]),
            title=d["title"],
            description=d.get("description", ""),
            age_at_event=d.get("age_at_event"),
            image_ref=d.get("image_ref"),
            key_detail=d.get("key_detail"),
            hobby_steps=tuple(d.get("hobby_steps", ())),
            music_meta=MusicMeta.from_dict(music) if music is not None else None,
        )


def canonical_json(value: Any) -> str:
    """Stable, compact JSON: sorted keys, no whitespace, UTF-8 text.

    Serialize -> parse -> serialize is byte-stable for any value built from
    dicts, lists, strings, numbers, booleans, and None.
    """
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def validate_profile(p: UserProfile, current_year: Optional[int] = None) -> list[str]:
    """Return the list of invariant violations for a profile (empty = valid)."""
    if current_year is None:
        current_year = datetime.date.today().year
    violations = []
    if not p.display_name.strip():
        violations.append("display_name empty")
    if p.birth_year is not None and not (MIN_BIRTH_YEAR <= p.birth_year <= current_year):
        violations.append(
            f"birth_year out of range [{MIN_BIRTH_YEAR}, {current_year}]"
        )
    return violations


def validate_memory(m: Memory) -> list[str]:
    """Return the list of invariant violations for a memory (empty = valid).

    Violations are data, not failures: each entry names the offending field.
    The function is pure and idempotent.
    """
    violations = []
    if not m.title.strip():
        violations.append("title empty")
    if m.hobby_steps:
        if m.category is not MemoryCategory.HOBBIES:
            violations.append("hobby_steps on non-Hobbies category")
        if any(not s.strip() for s in m.hobby_steps):
            violations.append("hobby_steps contains empty step")
        if len(set(m.hobby_steps)) != len(m.hobby_steps):
            violations.append("hobby_steps contains duplicate steps")
    if m.music_meta is not None:
        if m.category is not MemoryCategory.MUSIC:
            violations.append("music_meta on non-Music category")
        if not m.music_meta.song_title.strip():
            violations.append("music_meta.song_title empty")
        if not m.music_meta.artist.strip():
            violations.append("music_meta.artist empty")
    if m.age_at_event is not None and not (0 <= m.age_at_event <= MAX_AGE_AT_EVENT):
        violations.append(f"age_at_event out of range [0, {MAX_AGE_AT_EVENT}]")
    return violations


def memory_year(m: Memory, p: UserProfile) -> Optional[int]:
    """Calendar year a memory refers to, or None when underivable.

    The year is always derived (birth year plus age at the event), never
    stored on the memory itself.
    """
    if p.birth_year is None or m.age_at_event is None:
        return None
    return p.birth_year + m.age_at_event
