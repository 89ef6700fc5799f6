"""Biography-based cognitive-training games for older adults.

Collect categorized personal memories, synthesize personalized exercises
from them, run timed play sessions through a pluggable presenter, and
aggregate performance analytics for caregivers.
"""

from .model import (
    GameType,
    Memory,
    MemoryCategory,
    MusicMeta,
    Role,
    UserProfile,
    canonical_json,
    memory_year,
    validate_memory,
    validate_profile,
)
from .engine import (
    AssociationTask,
    Exercise,
    GenConfig,
    GradeResult,
    MultipleChoice,
    MusicTask,
    OrderingTask,
    answer_key,
    eligible_games,
    generate_activities_ordering,
    generate_event_question,
    generate_memory_association,
    generate_memory_completion,
    generate_music_game,
    grade,
)
from .session import (
    ConsolePresenter,
    ScriptedPresenter,
    SessionPlan,
    SessionRecord,
    TimeEstimates,
    identify_user,
    plan_session,
    run_session,
)
from .analytics import EventLog, OverviewReport, TelemetryEvent
from .events import FallbackEventsProvider, load_fallback_events

__version__ = "0.1.0"
