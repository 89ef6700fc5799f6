/**
 * Caregiver dashboard: view models over the analytics endpoints and the
 * configuration editor.
 *
 * Every number shown comes verbatim from an API payload — the dashboard
 * holds no aggregation or grading logic of its own.
 */

import { ApiClient, ApiError } from './api.js';
import type {
  CaregiverConfig,
  GameType,
  GameTypeStats,
  OverviewReport,
  TelemetryEvent,
} from './types.js';
import { GAME_TYPES } from './types.js';

export interface GameTypeRow extends GameTypeStats {
  gameType: GameType;
}

export interface TrendPoint {
  sessionId: string;
  meanScore: number;
}

export interface OverviewViewModel {
  userId: string;
  period: [number, number] | null;
  sessionsPlayed: number;
  totalPlaySeconds: number;
  /** One row per game type that has attempts, in canonical type order. */
  gameTypeRows: GameTypeRow[];
  /** Per-session mean score, in session order, for the trend chart. */
  trend: TrendPoint[];
}

export function overviewViewModel(report: OverviewReport): OverviewViewModel {
  const gameTypeRows: GameTypeRow[] = [];
  for (const gameType of GAME_TYPES) {
    const stats = report.per_game_type[gameType];
    if (stats !== undefined) gameTypeRows.push({ gameType, ...stats });
  }
  return {
    userId: report.user_id,
    period: report.period,
    sessionsPlayed: report.sessions_played,
    totalPlaySeconds: report.total_play_seconds,
    gameTypeRows,
    trend: report.score_trend.map(([sessionId, meanScore]) => ({
      sessionId,
      meanScore,
    })),
  };
}

export type DashboardResult<T> =
  | { ok: true; value: T }
  | { ok: false; forbidden: boolean; message: string };

async function guarded<T>(load: () => Promise<T>): Promise<DashboardResult<T>> {
  try {
    return { ok: true, value: await load() };
  } catch (error) {
    if (error instanceof ApiError) {
      return { ok: false, forbidden: error.status === 403, message: error.message };
    }
    throw error;
  }
}

export function loadOverview(
  api: ApiClient,
  userId: string,
  period?: [number, number],
): Promise<DashboardResult<OverviewViewModel>> {
  return guarded(async () => overviewViewModel(await api.overview(userId, period)));
}

export function loadSessionDetail(
  api: ApiClient,
  sessionId: string,
): Promise<DashboardResult<TelemetryEvent[]>> {
  return guarded(() => api.sessionAnalytics(sessionId));
}

/**
 * Edits one user's configuration. Loads the effective (merged) config,
 * tracks local edits, and refuses to save a config that disables every
 * game type before the server would reject it.
 */
export class ConfigEditor {
  private readonly api: ApiClient;
  private readonly userId: string;
  private config: CaregiverConfig = {};

  constructor(api: ApiClient, userId: string) {
    this.api = api;
    this.userId = userId;
  }

  async load(): Promise<CaregiverConfig> {
    this.config = await this.api.getConfig(this.userId);
    return this.config;
  }

  get current(): CaregiverConfig {
    return this.config;
  }

  get enabledGameTypes(): GameType[] {
    return this.config.enabled_game_types ?? [...GAME_TYPES];
  }

  setGameTypeEnabled(gameType: GameType, enabled: boolean): void {
    const next = new Set(this.enabledGameTypes);
    if (enabled) next.add(gameType);
    else next.delete(gameType);
    this.config = {
      ...this.config,
      enabled_game_types: GAME_TYPES.filter((gt) => next.has(gt)),
    };
  }

  update(fields: Partial<CaregiverConfig>): void {
    this.config = { ...this.config, ...fields };
  }

  /** Local problems that block saving (empty = saveable). */
  problems(): string[] {
    const problems: string[] = [];
    if (this.enabledGameTypes.length === 0) {
      problems.push('at least one game type must stay enabled');
    }
    const lo = this.config.session_min_seconds;
    const hi = this.config.session_max_seconds;
    if (lo !== undefined && hi !== undefined && lo >= hi) {
      problems.push('session time bounds: min must be below max');
    }
    return problems;
  }

  get canSave(): boolean {
    return this.problems().length === 0;
  }

  async save(): Promise<CaregiverConfig> {
    if (!this.canSave) {
      throw new Error(`config not saveable: ${this.problems().join('; ')}`);
    }
    this.config = await this.api.putConfig(this.userId, this.config);
    return this.config;
  }
}
