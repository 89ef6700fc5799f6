"""Generating each of the five exercise types from one memory collection.

Generation is seed-driven: the same memories and seed always produce the
same exercise, byte for byte.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "tests"))
from conftest import make_profile, rich_memories  # noqa: E402

from biogames import (  # noqa: E402
    FallbackEventsProvider,
    GenConfig,
    answer_key,
    eligible_games,
    grade,
)
from biogames import engine  # noqa: E402
from biogames.model import GameType, MemoryCategory  # noqa: E402

profile = make_profile()
memories = rich_memories()
cfg = GenConfig(rng_seed=42)
events = FallbackEventsProvider()

print("eligible material per game type:")
for game_type, count in eligible_games(memories, profile, cfg).items():
    print(f"  {game_type.value:22} {count}")

target = next(m for m in memories if m.key_detail == "Marina di Pisa")
completion = engine.generate_memory_completion(target, memories, cfg)
print(f"\n[{completion.game_type.value}] {completion.payload.prompt}")
for i, opt in enumerate(completion.payload.options):
    print(f"  {i}: {opt}")

hobby = next(m for m in memories if m.category is MemoryCategory.HOBBIES)
ordering = engine.generate_activities_ordering(hobby, cfg)
print(f"\n[{ordering.game_type.value}] put these in order:")
for i, item in enumerate(ordering.payload.presented_items):
    print(f"  {i}: {item}")

association = engine.generate_memory_association(memories, cfg)
print(f"\n[{association.game_type.value}] connect each memory with its detail:")
for left, right in zip(association.payload.left_items, association.payload.right_items):
    print(f"  {left:35} | {right}")

wedding = next(m for m in memories if m.title == "got married")
event_q = engine.generate_event_question(wedding, profile, events, cfg)
print(f"\n[{event_q.game_type.value}] {event_q.payload.prompt}")
for i, opt in enumerate(event_q.payload.options):
    print(f"  {i}: {opt}")

music = next(m for m in memories if m.category is MemoryCategory.MUSIC)
music_game = engine.generate_music_game(music, memories, cfg)
print(f"\n[{music_game.game_type.value}] clip of {music_game.payload.clip_seconds:g}s, "
      f"then: {music_game.payload.question.prompt}")
for i, opt in enumerate(music_game.payload.question.options):
    print(f"  {i}: {opt}")

for ex in (completion, ordering, association, event_q, music_game):
    result = grade(ex, answer_key(ex))
    assert result.correct
print("\nevery exercise grades to 1.0 against its own answer key")
