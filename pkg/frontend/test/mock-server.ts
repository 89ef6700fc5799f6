/**
 * In-memory mock of the biogames HTTP API for tests.
 *
 * Implements the same wire contract as the real service — paths, status
 * codes, auth rules, and JSON shapes — backed by plain maps. Session
 * plans come from a canned exercise list so tests can predict answers;
 * grading, the concurrent-session guard, telemetry recording, and the
 * analytics recomputation follow the server's semantics.
 */

import type { FetchLike } from '../src/api.js';
import type {
  AnswerResponse,
  CaregiverConfig,
  Exercise,
  GameType,
  GameTypeStats,
  GradeResult,
  Memory,
  MemoryDraft,
  MultipleChoicePayload,
  OverviewReport,
  Role,
  SessionPlan,
  TelemetryEvent,
  UserProfile,
} from '../src/types.js';
import { GAME_TYPES } from '../src/types.js';
import { validateDraft } from '../src/validation.js';

interface OpenSession {
  plan: SessionPlan;
  userId: string;
  index: number;
  outcomes: {
    exercise_id: string;
    game_type: GameType;
    grade: GradeResult;
    elapsed_seconds: number;
    timed_out: boolean;
    source_memory_ids: string[];
  }[];
  startedAt: number;
}

const DEFAULT_CONFIG: CaregiverConfig = {
  gen: { option_count: 4, association_pairs: 3, clip_seconds: 10.0 },
  enabled_game_types: [...GAME_TYPES],
  session_min_seconds: 900,
  session_max_seconds: 1200,
  estimates: {
    memory_completion: 90,
    activities_ordering: 120,
    memory_association: 120,
    memory_related_event: 90,
    music_game_base: 60,
  },
  answer_timeout: 60,
};

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

function violationError(status: number, violations: string[]): Response {
  return json(status, { detail: { violations } });
}

function plainError(status: number, message: string): Response {
  return json(status, { detail: message });
}

export class MockServer {
  readonly baseUrl = 'http://mock';
  private users = new Map<string, UserProfile>();
  private tokens = new Map<string, string>(); // token -> user_id
  private memories = new Map<string, Memory[]>();
  private media = new Map<string, Uint8Array>();
  private configs = new Map<string, CaregiverConfig>();
  private openSessions = new Map<string, OpenSession>();
  private openByUser = new Map<string, string>();
  private records = new Map<string, Record<string, unknown>>();
  private telemetry: TelemetryEvent[] = [];
  private counter = 0;
  /** Exercises served, in order, when a session is planned. */
  plannedExercises: Exercise[] = [];

  readonly fetch: FetchLike = async (input, init) => this.handle(input, init);

  private nextId(prefix: string): string {
    this.counter += 1;
    return `${prefix}-${this.counter.toString().padStart(4, '0')}`;
  }

  private authedUser(init?: RequestInit): UserProfile | null {
    const headers = (init?.headers ?? {}) as Record<string, string>;
    const auth = headers['Authorization'] ?? headers['authorization'] ?? '';
    if (!auth.toLowerCase().startsWith('bearer ')) return null;
    const userId = this.tokens.get(auth.slice(7));
    return userId ? this.users.get(userId) ?? null : null;
  }

  private allowed(caller: UserProfile, userId: string): boolean {
    return caller.role === 'caregiver' || caller.user_id === userId;
  }

  private effectiveConfig(userId: string): CaregiverConfig {
    const stored = this.configs.get(userId) ?? {};
    return {
      ...DEFAULT_CONFIG,
      ...stored,
      gen: { ...DEFAULT_CONFIG.gen, ...stored.gen },
      estimates: { ...DEFAULT_CONFIG.estimates, ...stored.estimates },
    };
  }

  // -- direct test helpers -------------------------------------------------

  seedUser(displayName: string, role: Role, birthYear?: number): { profile: UserProfile; token: string } {
    const profile: UserProfile = {
      user_id: this.nextId('u'),
      display_name: displayName,
      role,
      ...(birthYear !== undefined ? { birth_year: birthYear } : {}),
    };
    const token = `tok-${profile.user_id}`;
    this.users.set(profile.user_id, profile);
    this.tokens.set(token, profile.user_id);
    return { profile, token };
  }

  seedMedia(data: Uint8Array): string {
    const ref = `sha256:${this.nextId('blob')}`;
    this.media.set(ref, data);
    return ref;
  }

  seedTelemetry(event: TelemetryEvent): void {
    this.telemetry.push(event);
  }

  // -- request dispatch ----------------------------------------------------

  private async handle(input: string, init?: RequestInit): Promise<Response> {
    const url = new URL(input);
    const method = (init?.method ?? 'GET').toUpperCase();
    const path = url.pathname;
    const body = () => JSON.parse((init?.body as string) ?? '{}') as Record<string, unknown>;

    if (method === 'POST' && path === '/users') {
      return this.createUser(body());
    }
    if (method === 'GET' && path === '/events') {
      return this.historicalEvents(url);
    }

    const caller = this.authedUser(init);
    if (caller === null) return plainError(401, 'missing or invalid bearer token');

    let match: RegExpMatchArray | null;
    if ((match = path.match(/^\/users\/([^/]+)$/)) && method === 'GET') {
      return this.getUser(caller, match[1]!);
    }
    if ((match = path.match(/^\/users\/([^/]+)\/memories$/))) {
      if (method === 'POST') return this.createMemory(caller, match[1]!, body());
      if (method === 'GET') return this.listMemories(caller, match[1]!, url);
    }
    if (method === 'POST' && path === '/media') {
      const data = init?.body as Uint8Array | undefined;
      if (!data || data.length === 0) return violationError(400, ['empty media body']);
      return json(201, { media_ref: this.seedMedia(data) });
    }
    if ((match = path.match(/^\/media\/(.+)$/)) && method === 'GET') {
      const data = this.media.get(decodeURIComponent(match[1]!));
      if (!data) return plainError(404, 'unknown media');
      return new Response(data, { status: 200 });
    }
    if ((match = path.match(/^\/users\/([^/]+)\/eligible-games$/)) && method === 'GET') {
      return this.eligibleGames(caller, match[1]!);
    }
    if ((match = path.match(/^\/users\/([^/]+)\/sessions$/)) && method === 'POST') {
      return this.startSession(caller, match[1]!, body());
    }
    if ((match = path.match(/^\/sessions\/([^/]+)\/answers$/)) && method === 'POST') {
      return this.submitAnswer(caller, match[1]!, body());
    }
    if ((match = path.match(/^\/users\/([^/]+)\/analytics\/overview$/)) && method === 'GET') {
      return this.overview(caller, match[1]!, url);
    }
    if ((match = path.match(/^\/sessions\/([^/]+)\/analytics$/)) && method === 'GET') {
      return this.sessionAnalytics(caller, match[1]!);
    }
    if ((match = path.match(/^\/users\/([^/]+)\/config$/))) {
      if (method === 'PUT') return this.putConfig(caller, match[1]!, body());
      if (method === 'GET') return this.getConfig(caller, match[1]!);
    }
    return plainError(404, `no route ${method} ${path}`);
  }

  // -- endpoint implementations -------------------------------------------

  private createUser(body: Record<string, unknown>): Response {
    const role = (body['role'] as Role) ?? 'senior';
    if (role !== 'senior' && role !== 'caregiver') {
      return plainError(400, `unknown role ${String(body['role'])}`);
    }
    const displayName = String(body['display_name'] ?? '');
    if (!displayName.trim()) return violationError(400, ['display_name empty']);
    const seeded = this.seedUser(displayName, role, body['birth_year'] as number | undefined);
    return json(201, { profile: seeded.profile, token: seeded.token });
  }

  private getUser(caller: UserProfile, userId: string): Response {
    if (!this.allowed(caller, userId)) return plainError(403, 'not allowed for this user');
    const profile = this.users.get(userId);
    return profile ? json(200, profile) : plainError(404, `unknown user ${userId}`);
  }

  private createMemory(caller: UserProfile, userId: string, body: Record<string, unknown>): Response {
    if (!this.allowed(caller, userId)) return plainError(403, 'not allowed for this user');
    if (!this.users.has(userId)) return plainError(404, `unknown user ${userId}`);
    const draft = body as unknown as MemoryDraft;
    const violations = validateDraft(draft);
    if (draft.image_ref !== undefined && !this.media.has(draft.image_ref)) {
      violations.push('image_ref: unknown media reference');
    }
    const audioRef = draft.music_meta?.audio_ref;
    if (audioRef !== undefined && !this.media.has(audioRef)) {
      violations.push('music_meta.audio_ref: unknown media reference');
    }
    if (violations.length > 0) return violationError(400, violations);
    const memory: Memory = { ...draft, memory_id: this.nextId('m'), owner_id: userId };
    const list = this.memories.get(userId) ?? [];
    list.push(memory);
    this.memories.set(userId, list);
    return json(201, memory);
  }

  private listMemories(caller: UserProfile, userId: string, url: URL): Response {
    if (!this.allowed(caller, userId)) return plainError(403, 'not allowed for this user');
    if (!this.users.has(userId)) return plainError(404, `unknown user ${userId}`);
    const category = url.searchParams.get('category');
    const all = this.memories.get(userId) ?? [];
    return json(200, category ? all.filter((m) => m.category === category) : all);
  }

  private eligibleGames(caller: UserProfile, userId: string): Response {
    if (!this.allowed(caller, userId)) return plainError(403, 'not allowed for this user');
    if (!this.users.has(userId)) return plainError(404, `unknown user ${userId}`);
    const enabled = new Set(this.effectiveConfig(userId).enabled_game_types);
    const counts: Record<string, number> = {};
    for (const gt of GAME_TYPES) {
      const n = this.plannedExercises.filter((e) => e.game_type === gt).length;
      counts[gt] = enabled.has(gt) ? n : 0;
    }
    return json(200, counts);
  }

  private startSession(caller: UserProfile, userId: string, body: Record<string, unknown>): Response {
    if (!this.allowed(caller, userId)) return plainError(403, 'not allowed for this user');
    if (!this.users.has(userId)) return plainError(404, `unknown user ${userId}`);
    if (this.openByUser.has(userId)) {
      return plainError(409, 'a session is already open for this user');
    }
    const config = this.effectiveConfig(userId);
    const enabled = new Set(config.enabled_game_types);
    const chosen = body['chosen_type'] as GameType | undefined;
    if (chosen !== undefined && !enabled.has(chosen)) {
      return violationError(400, [`${chosen} is disabled`]);
    }
    let exercises = this.plannedExercises.filter((e) => enabled.has(e.game_type));
    if (chosen !== undefined) exercises = exercises.filter((e) => e.game_type === chosen);
    if (exercises.length === 0) {
      return violationError(400, ['no eligible material: nothing to play']);
    }
    const plan: SessionPlan = {
      session_id: this.nextId('s'),
      user_id: userId,
      exercises,
      estimated_seconds: exercises.length * 90,
      short: exercises.length * 90 < (config.session_min_seconds ?? 900),
      ...(chosen !== undefined ? { game_type_filter: chosen } : {}),
    };
    this.openSessions.set(plan.session_id, {
      plan,
      userId,
      index: 0,
      outcomes: [],
      startedAt: Date.now() / 1000,
    });
    this.openByUser.set(userId, plan.session_id);
    return json(201, plan);
  }

  private grade(exercise: Exercise, answer: unknown): GradeResult | Response {
    const payload = exercise.payload;
    const question: MultipleChoicePayload | null =
      'question' in payload
        ? payload.question
        : 'correct_index' in payload
          ? payload
          : null;
    if (question !== null) {
      if (typeof answer !== 'number' || !Number.isInteger(answer)) {
        return violationError(400, ['answer must be an option index']);
      }
      const correct = answer === question.correct_index;
      return {
        correct,
        item_correct: [correct],
        score: correct ? 1.0 : 0.0,
        errors: correct ? 0 : 1,
      };
    }
    const key = 'correct_order' in payload ? payload.correct_order : payload.correct_mapping;
    if (
      !Array.isArray(answer) ||
      answer.length !== key.length ||
      answer.some((a) => typeof a !== 'number' || !Number.isInteger(a))
    ) {
      return violationError(400, [`answer must be a permutation of ${key.length} indices`]);
    }
    const itemCorrect = key.map((k, i) => answer[i] === k);
    const right = itemCorrect.filter(Boolean).length;
    return {
      correct: right === key.length,
      item_correct: itemCorrect,
      score: right / key.length,
      errors: key.length - right,
    };
  }

  private zeroGrade(exercise: Exercise): GradeResult {
    const payload = exercise.payload;
    const items =
      'correct_order' in payload
        ? payload.correct_order.length
        : 'correct_mapping' in payload
          ? payload.correct_mapping.length
          : 1;
    return { correct: false, item_correct: Array(items).fill(false), score: 0.0, errors: 1 };
  }

  private closeSession(open: OpenSession): Record<string, unknown> {
    const planned = open.plan.exercises.length;
    const record = {
      session_id: open.plan.session_id,
      started_at: open.startedAt,
      ended_at: Date.now() / 1000,
      outcomes: open.outcomes,
      completion_level: planned ? open.outcomes.length / planned : 0.0,
      user_id: open.userId,
    };
    this.records.set(open.plan.session_id, record);
    this.openSessions.delete(open.plan.session_id);
    this.openByUser.delete(open.userId);
    return record;
  }

  private submitAnswer(caller: UserProfile, sessionId: string, body: Record<string, unknown>): Response {
    const open = this.openSessions.get(sessionId);
    if (!open) return plainError(404, `no open session ${sessionId}`);
    if (!this.allowed(caller, open.userId)) return plainError(403, 'not allowed for this user');

    if (body['stop']) {
      const response: AnswerResponse = {
        grade: null,
        reread_text: null,
        next_exercise: null,
        summary: this.closeSession(open) as unknown as AnswerResponse['summary'],
      };
      return json(200, response);
    }

    const exercise = open.plan.exercises[open.index]!;
    let result: GradeResult;
    if (body['timed_out']) {
      result = this.zeroGrade(exercise);
    } else {
      if (!('answer' in body)) return violationError(400, ['answer missing']);
      const graded = this.grade(exercise, body['answer']);
      if (graded instanceof Response) return graded;
      result = graded;
    }
    open.outcomes.push({
      exercise_id: exercise.exercise_id,
      game_type: exercise.game_type,
      grade: result,
      elapsed_seconds: 1.0,
      timed_out: Boolean(body['timed_out']),
      source_memory_ids: exercise.source_memory_ids,
    });
    this.telemetry.push({
      event_id: `${sessionId}:${open.outcomes.length}`,
      user_id: open.userId,
      session_id: sessionId,
      game_type: exercise.game_type,
      timestamp: Date.now() / 1000,
      elapsed_seconds: 1.0,
      errors: result.errors,
      passed: result.correct,
      score: result.score,
      completion_level_at_event: open.outcomes.length / open.plan.exercises.length,
    });
    let reread: string | null = null;
    const payload = exercise.payload;
    if (
      result.correct &&
      exercise.game_type === 'MemoryCompletion' &&
      'reread_text' in payload &&
      payload.reread_text !== undefined
    ) {
      reread = payload.reread_text;
    }
    open.index += 1;
    if (open.index >= open.plan.exercises.length) {
      const response: AnswerResponse = {
        grade: result,
        reread_text: reread,
        next_exercise: null,
        summary: this.closeSession(open) as unknown as AnswerResponse['summary'],
      };
      return json(200, response);
    }
    const response: AnswerResponse = {
      grade: result,
      reread_text: reread,
      next_exercise: open.plan.exercises[open.index]!,
      summary: null,
    };
    return json(200, response);
  }

  private overview(caller: UserProfile, userId: string, url: URL): Response {
    if (caller.role !== 'caregiver') return plainError(403, 'caregiver role required');
    if (!this.users.has(userId)) return plainError(404, `unknown user ${userId}`);
    let period: [number, number] | null = null;
    const raw = url.searchParams.get('period');
    if (raw) {
      const parts = raw.split(',').map(Number);
      if (parts.length !== 2 || parts.some(Number.isNaN)) {
        return violationError(400, ["period must be 'start,end'"]);
      }
      period = [parts[0]!, parts[1]!];
    }
    const events = this.telemetry.filter(
      (e) =>
        e.user_id === userId &&
        (period === null || (e.timestamp >= period[0] && e.timestamp <= period[1])),
    );
    const perType: Partial<Record<GameType, GameTypeStats>> = {};
    for (const gt of GAME_TYPES) {
      const mine = events.filter((e) => e.game_type === gt);
      if (mine.length === 0) continue;
      perType[gt] = {
        attempts: mine.length,
        pass_rate: mine.filter((e) => e.passed).length / mine.length,
        mean_score: mine.reduce((s, e) => s + e.score, 0) / mine.length,
        mean_errors: mine.reduce((s, e) => s + e.errors, 0) / mine.length,
      };
    }
    const sessionOrder: string[] = [];
    for (const e of events) {
      if (!sessionOrder.includes(e.session_id)) sessionOrder.push(e.session_id);
    }
    const report: OverviewReport = {
      user_id: userId,
      period,
      sessions_played: sessionOrder.length,
      total_play_seconds: events.reduce((s, e) => s + e.elapsed_seconds, 0),
      per_game_type: perType,
      score_trend: sessionOrder.map((sid) => {
        const mine = events.filter((e) => e.session_id === sid);
        return [sid, mine.reduce((s, e) => s + e.score, 0) / mine.length];
      }),
    };
    return json(200, report);
  }

  private sessionAnalytics(caller: UserProfile, sessionId: string): Response {
    const record = this.records.get(sessionId);
    const open = this.openSessions.get(sessionId);
    const owner = (record?.['user_id'] as string | undefined) ?? open?.userId;
    if (owner === undefined) return plainError(404, `unknown session ${sessionId}`);
    if (!this.allowed(caller, owner)) return plainError(403, 'not allowed for this user');
    return json(200, this.telemetry.filter((e) => e.session_id === sessionId));
  }

  private historicalEvents(url: URL): Response {
    const year = Number(url.searchParams.get('year'));
    if (year === 1945) {
      return json(200, [{ year: 1945, event_text: 'the end of second world war' }]);
    }
    return json(200, [{ year, event_text: `an event of ${year}` }]);
  }

  private putConfig(caller: UserProfile, userId: string, body: Record<string, unknown>): Response {
    if (caller.role !== 'caregiver') return plainError(403, 'caregiver role required');
    if (!this.users.has(userId)) return plainError(404, `unknown user ${userId}`);
    const enabled = body['enabled_game_types'];
    if (enabled !== undefined && (!Array.isArray(enabled) || enabled.length === 0)) {
      return violationError(400, ['enabled_game_types: at least one game type required']);
    }
    this.configs.set(userId, body as CaregiverConfig);
    return json(200, this.effectiveConfig(userId));
  }

  private getConfig(caller: UserProfile, userId: string): Response {
    if (caller.role !== 'caregiver') return plainError(403, 'caregiver role required');
    if (!this.users.has(userId)) return plainError(404, `unknown user ${userId}`);
    return json(200, this.effectiveConfig(userId));
  }
}

/** A predictable four-exercise plan covering the answer-shape space. */
export function cannedExercises(audioRef: string): Exercise[] {
  return [
    {
      exercise_id: 'ex-completion',
      game_type: 'MemoryCompletion',
      source_memory_ids: ['m-1', 'm-2', 'm-3', 'm-4'],
      payload: {
        prompt: 'In the summer we went on holiday to ___.',
        options: ['Florence', 'Marina di Pisa', 'Siena', 'Lucca'],
        correct_index: 1,
        reread_text: 'In the summer we went on holiday to Marina di Pisa.',
      },
    },
    {
      exercise_id: 'ex-ordering',
      game_type: 'ActivitiesOrdering',
      source_memory_ids: ['m-5'],
      payload: {
        presented_items: ['knead the dough', 'pick the tomatoes', 'bake the bread'],
        correct_order: [1, 0, 2],
      },
    },
    {
      exercise_id: 'ex-association',
      game_type: 'MemoryAssociation',
      source_memory_ids: ['m-6', 'm-7', 'm-8'],
      payload: {
        left_items: ['Nel blu dipinto di blu', 'Fatti mandare dalla mamma', 'Azzurro'],
        right_items: ['Adriano Celentano', 'Domenico Modugno', 'Gianni Morandi'],
        correct_mapping: [1, 2, 0],
      },
    },
    {
      exercise_id: 'ex-music',
      game_type: 'MusicGame',
      source_memory_ids: ['m-6'],
      payload: {
        audio_ref: audioRef,
        clip_seconds: 10.0,
        question: {
          prompt: 'Who is the singer of this song?',
          options: ['Domenico Modugno', 'Gianni Morandi', 'Adriano Celentano', 'Francesco Guccini'],
          correct_index: 0,
        },
      },
    },
  ];
}
