"""Embedded persistence: a journaled document store and content-addressed media.

The document store appends every write as one canonical-JSON line and
replays the journal on startup; later lines for the same key win. Media
bytes live as content-addressed files so references are stable and
deduplicated. Neither needs an external database.
"""

from __future__ import annotations

import hashlib
import os
import threading
from typing import Any, Optional

import json

from .model import Memory, UserProfile, canonical_json


class UnknownRef(Exception):
    pass


class DocumentStore:
    """Single-writer key/value journal with typed accessors for the domain."""

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()
        self._docs: dict[tuple[str, str], dict[str, Any]] = {}
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
                    entry = json.loads(line)
                    self._docs[(entry["kind"], entry["key"])] = entry["doc"]
                except (json.JSONDecodeError, KeyError, TypeError):
                    continue  # torn tail write

    def _put(self, kind: str, key: str, doc: dict[str, Any]) -> None:
        with self._lock:
            line = canonical_json({"doc": doc, "key": key, "kind": kind})
            with open(self.path, "a", encoding="utf-8") as f:
                f.write(line + "\n")
            self._docs[(kind, key)] = doc

    def _get(self, kind: str, key: str) -> Optional[dict[str, Any]]:
        with self._lock:
            return self._docs.get((kind, key))

    def _all(self, kind: str) -> list[dict[str, Any]]:
        with self._lock:
            return [doc for (k, _), doc in self._docs.items() if k == kind]

    # users

    def put_user(self, p: UserProfile) -> None:
        self._put("user", p.user_id, p.to_dict())

    def get_user(self, user_id: str) -> Optional[UserProfile]:
        doc = self._get("user", user_id)
        return UserProfile.from_dict(doc) if doc else None

    def list_users(self) -> list[UserProfile]:
        return [UserProfile.from_dict(d) for d in self._all("user")]

    # memories

    def put_memory(self, m: Memory) -> None:
        self._put("memory", m.memory_id, m.to_dict())

    def get_memory(self, memory_id: str) -> Optional[Memory]:
        doc = self._get("memory", memory_id)
        return Memory.from_dict(doc) if doc else None

    def memories_for(self, owner_id: str, category: Optional[str] = None) -> list[Memory]:
        out = [Memory.from_dict(d) for d in self._all("memory") if d["owner_id"] == owner_id]
        if category is not None:
            out = [m for m in out if m.category.value == category]
        return sorted(out, key=lambda m: m.memory_id)

    # auth tokens

    def put_token(self, token: str, user_id: str) -> None:
        self._put("token", token, {"user_id": user_id})

    def resolve_token(self, token: str) -> Optional[str]:
        doc = self._get("token", token)
        return doc["user_id"] if doc else None

    # caregiver configuration

    def put_config(self, user_id: str, config: dict[str, Any]) -> None:
        self._put("config", user_id, config)

    def get_config(self, user_id: str) -> Optional[dict[str, Any]]:
        return self._get("config", user_id)

    # completed session records

    def put_session_record(self, record: dict[str, Any]) -> None:
        self._put("session_record", record["session_id"], record)

    def get_session_record(self, session_id: str) -> Optional[dict[str, Any]]:
        return self._get("session_record", session_id)

    def session_records_for(self, user_id: str) -> list[dict[str, Any]]:
        return sorted(
            (d for d in self._all("session_record") if d.get("user_id") == user_id),
            key=lambda d: d.get("started_at", 0.0),
        )


class MediaStore:
    """Content-addressed blobs under a directory; refs are 'sha256:<hex>'."""

    def __init__(self, root: str):
        self.root = root
        os.makedirs(root, exist_ok=True)

    def put(self, data: bytes) -> str:
        digest = hashlib.sha256(data).hexdigest()
        path = os.path.join(self.root, digest)
        if not os.path.exists(path):
            tmp = path + ".tmp"
            with open(tmp, "wb") as f:
                f.write(data)
            os.replace(tmp, path)
        return f"sha256:{digest}"

    def get(self, ref: str) -> bytes:
        if not ref.startswith("sha256:"):
            raise UnknownRef(ref)
        path = os.path.join(self.root, ref.split(":", 1)[1])
        if not os.path.exists(path):
            raise UnknownRef(ref)
        with open(path, "rb") as f:
            return f.read()

    def exists(self, ref: str) -> bool:
        return ref.startswith("sha256:") and os.path.exists(
            os.path.join(self.root, ref.split(":", 1)[1])
        )
