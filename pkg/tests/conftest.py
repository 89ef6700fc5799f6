import random

import pytest

from biogames.model import Memory, MemoryCategory, MusicMeta, UserProfile


def make_profile(user_id="u1", name="Maria", birth_year=1933, role="senior"):
    from biogames.model import Role

    return UserProfile(
        user_id=user_id, display_name=name, role=Role(role), birth_year=birth_year
    )


def place_memory(i, owner="u1", detail=None, age=None):
    detail = detail or f"Town {i}"
    return Memory(
        memory_id=f"pl{i}",
        owner_id=owner,
        category=MemoryCategory.PLACES,
        title=f"trip number {i}",
        description=f"We went on a wonderful trip to {detail} that year.",
        key_detail=detail,
        age_at_event=age,
    )


def rich_memories(owner="u1"):
    """A collection spanning all six categories with all five games eligible."""
    memories = [
        place_memory(1, owner, "Marina di Pisa", age=12),
        place_memory(2, owner, "Tirrenia", age=15),
        place_memory(3, owner, "San Vincenzo", age=20),
        place_memory(4, owner, "Castiglioncello", age=25),
        place_memory(5, owner, "Livorno", age=30),
        Memory(
            memory_id="ev1",
            owner_id=owner,
            category=MemoryCategory.EVENTS,
            title="got married",
            description="I got married in the church of my village.",
            age_at_event=12,
            key_detail="the church",
        ),
        Memory(
            memory_id="af1",
            owner_id=owner,
            category=MemoryCategory.AFFECTIONS,
            title="met my first love",
            description="I met my first love at the village dance.",
            age_at_event=18,
        ),
        Memory(
            memory_id="ga1",
            owner_id=owner,
            category=MemoryCategory.GAMES,
            title="playing marbles",
            description="We played marbles in the courtyard after school.",
            age_at_event=8,
        ),
        Memory(
            memory_id="ho1",
            owner_id=owner,
            category=MemoryCategory.HOBBIES,
            title="baking bread",
            description="Every Sunday I baked bread for the family.",
            hobby_steps=(
                "prepare the dough",
                "let it rise",
                "shape the loaves",
                "bake in the oven",
            ),
        ),
        Memory(
            memory_id="ho2",
            owner_id=owner,
            category=MemoryCategory.HOBBIES,
            title="tending the garden",
            description="I grew tomatoes and basil behind the house.",
            hobby_steps=("dig the soil", "plant the seedlings", "water every evening"),
        ),
    ]
    for i, (song, artist) in enumerate(
        [
            ("Nel blu dipinto di blu", "Modugno"),
            ("Fatti mandare dalla mamma", "Morandi"),
            ("Azzurro", "Celentano"),
            ("Auschwitz", "Guccini"),
        ],
        start=1,
    ):
        memories.append(
            Memory(
                memory_id=f"mu{i}",
                owner_id=owner,
                category=MemoryCategory.MUSIC,
                title=f"listening to {song}",
                description=f"I used to listen to {song} when I travelled by car.",
                music_meta=MusicMeta(song_title=song, artist=artist, audio_ref=f"sha256:{'0' * 63}{i}"),
            )
        )
    return memories


def random_memories(rng: random.Random, owner="u1", n=None):
    """A randomized but always-valid memory collection for property tests."""
    n = n if n is not None else rng.randint(0, 20)
    memories = []
    for i in range(n):
        category = rng.choice(list(MemoryCategory))
        kwargs = {}
        if category is MemoryCategory.HOBBIES and rng.random() < 0.8:
            steps = [f"step {i}-{j}" for j in range(rng.randint(1, 6))]
            kwargs["hobby_steps"] = tuple(steps)
        if category is MemoryCategory.MUSIC and rng.random() < 0.8:
            kwargs["music_meta"] = MusicMeta(
                song_title=f"song {i}",
                artist=f"artist {rng.randint(0, n)}",
                audio_ref=f"sha256:{i:064x}" if rng.random() < 0.7 else None,
            )
        if rng.random() < 0.7:
            kwargs["key_detail"] = f"detail {rng.randint(0, n)}"
        if rng.random() < 0.7:
            kwargs["age_at_event"] = rng.randint(0, 60)
        memories.append(
            Memory(
                memory_id=f"m{i}",
                owner_id=owner,
                category=category,
                title=f"memory {i}",
                description=f"something about detail {i} happened",
                **kwargs,
            )
        )
    return memories


@pytest.fixture
def profile():
    return make_profile()


@pytest.fixture
def memories():
    return rich_memories()
