/**
 * Wire-format types for the biogames HTTP API.
 *
 * These mirror the server's canonical JSON encoding exactly; the client
 * never recomputes grades, aggregates, or eligibility — it renders what
 * the API returns.
 */

export const MEMORY_CATEGORIES = [
  'Affections',
  'Events',
  'Games',
  'Hobbies',
  'Places',
  'Music',
] as const;
export type MemoryCategory = (typeof MEMORY_CATEGORIES)[number];

export const GAME_TYPES = [
  'MemoryCompletion',
  'ActivitiesOrdering',
  'MemoryAssociation',
  'MemoryRelatedEvent',
  'MusicGame',
] as const;
export type GameType = (typeof GAME_TYPES)[number];

export type Role = 'senior' | 'caregiver';

export interface UserProfile {
  user_id: string;
  display_name: string;
  role: Role;
  birth_year?: number;
}

export interface MusicMeta {
  song_title: string;
  artist: string;
  audio_ref?: string;
}

export interface Memory {
  memory_id: string;
  owner_id: string;
  category: MemoryCategory;
  title: string;
  description: string;
  age_at_event?: number;
  image_ref?: string;
  key_detail?: string;
  hobby_steps?: string[];
  music_meta?: MusicMeta;
}

/** A memory being drafted in the entry wizard (no server ids yet). */
export type MemoryDraft = Omit<Memory, 'memory_id' | 'owner_id'>;

export interface MultipleChoicePayload {
  prompt: string;
  options: string[];
  correct_index: number;
  reread_text?: string;
}

export interface OrderingPayload {
  presented_items: string[];
  correct_order: number[];
}

export interface AssociationPayload {
  left_items: string[];
  right_items: string[];
  correct_mapping: number[];
}

export interface MusicPayload {
  audio_ref: string;
  clip_seconds: number;
  question: MultipleChoicePayload;
}

export type ExercisePayload =
  | MultipleChoicePayload
  | OrderingPayload
  | AssociationPayload
  | MusicPayload;

export interface Exercise {
  exercise_id: string;
  game_type: GameType;
  source_memory_ids: string[];
  payload: ExercisePayload;
}

export interface GradeResult {
  correct: boolean;
  item_correct: boolean[];
  score: number;
  errors: number;
}

export interface SessionPlan {
  session_id: string;
  user_id: string;
  exercises: Exercise[];
  estimated_seconds: number;
  short: boolean;
  game_type_filter?: GameType;
}

export interface ExerciseOutcome {
  exercise_id: string;
  game_type: GameType;
  grade: GradeResult;
  elapsed_seconds: number;
  timed_out: boolean;
  source_memory_ids: string[];
}

export interface SessionSummary {
  session_id: string;
  user_id: string;
  started_at: number;
  ended_at: number;
  outcomes: ExerciseOutcome[];
  completion_level: number;
}

export interface AnswerResponse {
  grade: GradeResult | null;
  reread_text: string | null;
  next_exercise: Exercise | null;
  summary: SessionSummary | null;
}

export interface GameTypeStats {
  attempts: number;
  pass_rate: number;
  mean_score: number;
  mean_errors: number;
}

export interface OverviewReport {
  user_id: string;
  period: [number, number] | null;
  sessions_played: number;
  total_play_seconds: number;
  per_game_type: Partial<Record<GameType, GameTypeStats>>;
  score_trend: [string, number][];
}

export interface TelemetryEvent {
  event_id: string;
  user_id: string;
  session_id: string;
  game_type: GameType;
  timestamp: number;
  elapsed_seconds: number;
  errors: number;
  passed: boolean;
  score: number;
  completion_level_at_event: number;
}

export interface CaregiverConfig {
  gen?: {
    option_count?: number;
    association_pairs?: number;
    clip_seconds?: number;
  };
  enabled_game_types?: GameType[];
  session_min_seconds?: number;
  session_max_seconds?: number;
  estimates?: Record<string, number>;
  answer_timeout?: number;
}

export type EligibleGames = Record<GameType, number>;

export interface HistoricalEvent {
  year: number;
  event_text: string;
}
