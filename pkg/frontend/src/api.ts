/**
 * Typed HTTP client for the biogames service.
 *
 * Every method maps 1:1 to an endpoint and returns the server's JSON
 * verbatim. The fetch implementation is injectable so tests can run
 * against an in-memory contract mock.
 */

import type {
  AnswerResponse,
  CaregiverConfig,
  EligibleGames,
  GameType,
  HistoricalEvent,
  Memory,
  MemoryCategory,
  MemoryDraft,
  OverviewReport,
  SessionPlan,
  TelemetryEvent,
  UserProfile,
} from './types.js';

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  /** Field-level messages from a 400 response, empty otherwise. */
  readonly violations: string[];

  constructor(status: number, detail: unknown) {
    const violations =
      detail !== null &&
      typeof detail === 'object' &&
      Array.isArray((detail as { violations?: unknown }).violations)
        ? ((detail as { violations: unknown[] }).violations.map(String))
        : [];
    super(
      violations.length > 0
        ? `HTTP ${status}: ${violations.join('; ')}`
        : `HTTP ${status}: ${typeof detail === 'string' ? detail : JSON.stringify(detail)}`,
    );
    this.name = 'ApiError';
    this.status = status;
    this.violations = violations;
  }
}

export interface CreateUserRequest {
  display_name: string;
  role?: 'senior' | 'caregiver';
  birth_year?: number;
}

export interface CreatedUser {
  profile: UserProfile;
  token: string;
}

export interface StartSessionOptions {
  chosenType?: GameType;
  seed?: number;
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;
  private token: string | null = null;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, '');
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  setToken(token: string | null): void {
    this.token = token;
  }

  /** Absolute URL for a media reference, usable as an <img>/<audio> src. */
  mediaUrl(ref: string): string {
    return `${this.baseUrl}/media/${encodeURIComponent(ref)}`;
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    let payload: BodyInit | undefined;
    if (body instanceof Uint8Array) {
      headers['Content-Type'] = 'application/octet-stream';
      payload = body as unknown as BodyInit;
    } else if (body !== undefined) {
      headers['Content-Type'] = 'application/json';
      payload = JSON.stringify(body);
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: payload,
    });
    if (!response.ok) {
      let detail: unknown;
      try {
        detail = (await response.json() as { detail?: unknown }).detail;
      } catch {
        detail = response.statusText;
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  createUser(body: CreateUserRequest): Promise<CreatedUser> {
    return this.request('POST', '/users', body);
  }

  getUser(userId: string): Promise<UserProfile> {
    return this.request('GET', `/users/${encodeURIComponent(userId)}`);
  }

  createMemory(userId: string, draft: MemoryDraft): Promise<Memory> {
    return this.request('POST', `/users/${encodeURIComponent(userId)}/memories`, draft);
  }

  listMemories(userId: string, category?: MemoryCategory): Promise<Memory[]> {
    const query = category ? `?category=${encodeURIComponent(category)}` : '';
    return this.request('GET', `/users/${encodeURIComponent(userId)}/memories${query}`);
  }

  async uploadMedia(data: Uint8Array): Promise<string> {
    const { media_ref } = await this.request<{ media_ref: string }>(
      'POST',
      '/media',
      data,
    );
    return media_ref;
  }

  eligibleGames(userId: string): Promise<EligibleGames> {
    return this.request('GET', `/users/${encodeURIComponent(userId)}/eligible-games`);
  }

  startSession(userId: string, options: StartSessionOptions = {}): Promise<SessionPlan> {
    const body: Record<string, unknown> = {};
    if (options.chosenType !== undefined) body['chosen_type'] = options.chosenType;
    if (options.seed !== undefined) body['seed'] = options.seed;
    return this.request('POST', `/users/${encodeURIComponent(userId)}/sessions`, body);
  }

  submitAnswer(sessionId: string, answer: unknown): Promise<AnswerResponse> {
    return this.request('POST', `/sessions/${encodeURIComponent(sessionId)}/answers`, {
      answer,
    });
  }

  reportTimeout(sessionId: string): Promise<AnswerResponse> {
    return this.request('POST', `/sessions/${encodeURIComponent(sessionId)}/answers`, {
      timed_out: true,
    });
  }

  stopSession(sessionId: string): Promise<AnswerResponse> {
    return this.request('POST', `/sessions/${encodeURIComponent(sessionId)}/answers`, {
      stop: true,
    });
  }

  overview(userId: string, period?: [number, number]): Promise<OverviewReport> {
    const query = period ? `?period=${period[0]},${period[1]}` : '';
    return this.request(
      'GET',
      `/users/${encodeURIComponent(userId)}/analytics/overview${query}`,
    );
  }

  sessionAnalytics(sessionId: string): Promise<TelemetryEvent[]> {
    return this.request('GET', `/sessions/${encodeURIComponent(sessionId)}/analytics`);
  }

  eventsForYear(year: number): Promise<HistoricalEvent[]> {
    return this.request('GET', `/events?year=${year}`);
  }

  getConfig(userId: string): Promise<CaregiverConfig> {
    return this.request('GET', `/users/${encodeURIComponent(userId)}/config`);
  }

  putConfig(userId: string, config: CaregiverConfig): Promise<CaregiverConfig> {
    return this.request('PUT', `/users/${encodeURIComponent(userId)}/config`, config);
  }
}
