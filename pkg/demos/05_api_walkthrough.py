"""The whole platform over HTTP: users, memories, sessions, analytics.

Uses the in-process test client so the demo is self-contained; point a
real deployment at `python -m biogames.service` instead.
"""

import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

sys.path.insert(0, str(Path(__file__).parent.parent / "tests"))
from conftest import rich_memories  # noqa: E402

from biogames.engine import Exercise, answer_key  # noqa: E402
from biogames.service import create_app  # noqa: E402

with tempfile.TemporaryDirectory() as tmp:
    app = create_app(tmp)
    client = TestClient(app)

    body = client.post(
        "/users", json={"display_name": "Maria", "birth_year": 1933}
    ).json()
    maria, token = body["profile"], body["token"]
    headers = {"Authorization": f"Bearer {token}"}
    caregiver = client.post(
        "/users", json={"display_name": "Anna", "role": "caregiver"}
    ).json()
    caregiver_headers = {"Authorization": f"Bearer {caregiver['token']}"}
    print(f"created senior {maria['user_id']} and a caregiver")

    audio_ref = client.post(
        "/media", content=b"demo audio bytes", headers=headers
    ).json()["media_ref"]
    for m in rich_memories(owner=maria["user_id"]):
        doc = m.to_dict()
        doc.pop("memory_id"), doc.pop("owner_id")
        if doc.get("music_meta", {}).get("audio_ref"):
            doc["music_meta"]["audio_ref"] = audio_ref
        client.post(f"/users/{maria['user_id']}/memories", json=doc, headers=headers)
    print(f"stored {len(rich_memories())} memories")

    counts = client.get(
        f"/users/{maria['user_id']}/eligible-games", headers=headers
    ).json()
    print(f"eligible games: {counts}")

    print(f"historical events 1945: {client.get('/events', params={'year': 1945}).json()}")

    plan = client.post(
        f"/users/{maria['user_id']}/sessions", json={"seed": 7}, headers=headers
    ).json()
    print(f"\nsession {plan['session_id']}: {len(plan['exercises'])} exercises, "
          f"~{plan['estimated_seconds'] / 60:.0f} min")
    for doc in plan["exercises"]:
        ex = Exercise.from_dict(doc)
        result = client.post(
            f"/sessions/{plan['session_id']}/answers",
            json={"answer": answer_key(ex)},
            headers=headers,
        ).json()
        mark = "+" if result["grade"]["correct"] else "-"
        print(f"  {mark} {ex.game_type.value}")
        if result["summary"]:
            print(f"session complete at {result['summary']['completion_level']:.0%}")

    overview = client.get(
        f"/users/{maria['user_id']}/analytics/overview", headers=caregiver_headers
    ).json()
    print(f"\ncaregiver overview: {overview['sessions_played']} session(s), "
          f"{overview['total_play_seconds']:.0f}s of play")
