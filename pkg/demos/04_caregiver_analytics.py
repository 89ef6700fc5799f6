"""Caregiver analytics: overview and per-session detail from the event log.

Simulates three sessions of varying quality, then prints what a caregiver
would see in the dashboard.
"""

import random
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "tests"))
from conftest import make_profile, rich_memories  # noqa: E402

from biogames import (  # noqa: E402
    EventLog,
    GenConfig,
    ScriptedPresenter,
    answer_key,
    plan_session,
    run_session,
)

profile = make_profile()
memories = rich_memories()
rng = random.Random(1)

with tempfile.TemporaryDirectory() as tmp:
    log = EventLog(str(Path(tmp) / "telemetry.ndjson"))
    for session_seed, skill in [(1, 1.0), (2, 0.6), (3, 0.8)]:
        plan = plan_session(profile, memories, GenConfig(rng_seed=session_seed))
        answers = []
        for ex in plan.exercises:
            key = answer_key(ex)
            if rng.random() < skill:
                answers.append(key)
            elif isinstance(key, int):
                answers.append((key + 1) % 2)
            else:
                answers.append(list(key[1:]) + [key[0]])
        run_session(plan, ScriptedPresenter(answers), tracker=log.record_event)

    report = log.overview(profile.user_id)
    print(f"overview for {profile.user_id}")
    print(f"  sessions played:    {report.sessions_played}")
    print(f"  total play seconds: {report.total_play_seconds:.0f}")
    print("  per game type:")
    for game_type, stats in report.per_game_type.items():
        print(f"    {game_type.value:22} attempts {stats.attempts:2}  "
              f"pass rate {stats.pass_rate:.0%}  mean score {stats.mean_score:.2f}")
    print("  score trend:")
    for session_id, mean_score in report.score_trend:
        print(f"    {session_id}  {mean_score:.2f}")

    first_session = report.score_trend[0][0]
    print(f"\ndetail of session {first_session}:")
    for event in log.detail(profile.user_id, first_session):
        print(f"    {event.game_type.value:22} score {event.score:.2f} "
              f"errors {event.errors}")
