"""Entering categorized memories and validating them.

A senior's biography is a set of memories, each in one of six categories.
Every category collects a title, a description, and the senior's age at
the time; hobbies add their ordered steps, music adds song metadata.
"""

from biogames import (
    Memory,
    MemoryCategory,
    MusicMeta,
    UserProfile,
    memory_year,
    validate_memory,
)

maria = UserProfile(user_id="u-maria", display_name="Maria", birth_year=1933)

wedding = Memory(
    memory_id="m-wedding",
    owner_id=maria.user_id,
    category=MemoryCategory.EVENTS,
    title="got married",
    description="I got married in the little church of my village.",
    age_at_event=12,
    key_detail="the little church",
)

bread = Memory(
    memory_id="m-bread",
    owner_id=maria.user_id,
    category=MemoryCategory.HOBBIES,
    title="baking bread",
    description="Every Sunday I baked bread for the whole family.",
    hobby_steps=("prepare the dough", "let it rise", "shape the loaves", "bake"),
)

song = Memory(
    memory_id="m-song",
    owner_id=maria.user_id,
    category=MemoryCategory.MUSIC,
    title="the song in my father's car",
    description="I used to listen to that singer when I travelled by car.",
    music_meta=MusicMeta(song_title="Nel blu dipinto di blu", artist="Modugno"),
)

for m in (wedding, bread, song):
    print(f"{m.title!r:40} violations: {validate_memory(m) or 'none'}")

print(f"\nMaria {wedding.title} in {memory_year(wedding, maria)}")

broken = Memory(
    memory_id="m-bad",
    owner_id=maria.user_id,
    category=MemoryCategory.EVENTS,
    title="a mixed-up record",
    hobby_steps=("steps", "do not belong", "here"),
)
print(f"\nbroken record violations: {validate_memory(broken)}")
