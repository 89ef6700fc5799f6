"""A full play session at the console.

Plans a 15-20 minute session from the demo collection and runs it through
the line-oriented presenter. Answer with the option number (or a space
separated order/mapping), press Enter on its own to simulate a timeout,
or type 'stop' to end early. Run with --auto to let the script answer
everything correctly by itself.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "tests"))
from conftest import make_profile, rich_memories  # noqa: E402

from biogames import (  # noqa: E402
    ConsolePresenter,
    GenConfig,
    answer_key,
    identify_user,
    plan_session,
    run_session,
)

profile = make_profile()
memories = rich_memories()

name = "Maria" if "--auto" in sys.argv else input("What is your name? ")
user = identify_user(name, [profile])
print(f"Welcome back, {user.display_name}! Preparing your session...\n")

plan = plan_session(user, memories, GenConfig(rng_seed=7))
print(f"{len(plan.exercises)} exercises, about {plan.estimated_seconds / 60:.0f} minutes\n")

if "--auto" in sys.argv:
    answers = iter(
        str(k) if isinstance(k := answer_key(ex), int) else " ".join(map(str, k))
        for ex in plan.exercises
    )
    presenter = ConsolePresenter(input_fn=lambda prompt: next(answers))
else:
    presenter = ConsolePresenter()

telemetry = []
record = run_session(plan, presenter, tracker=telemetry.append)

print(f"\nsession over: completed {record.completion_level:.0%} of the plan")
for outcome in record.outcomes:
    print(f"  {outcome.game_type.value:22} score {outcome.grade.score:.2f} "
          f"errors {outcome.grade.errors}{'  (timed out)' if outcome.timed_out else ''}")
print(f"{len(telemetry)} telemetry events emitted")
