/**
 * Play client: drives one session against the answer endpoint.
 *
 * The client presents exactly one exercise at a time, accepts a single
 * submission per exercise, shows the server's feedback (including the
 * re-read text after a correct memory completion), and tracks progress.
 * Grading and sequencing are entirely server-side.
 */

import { ApiClient, type StartSessionOptions } from './api.js';
import type {
  Exercise,
  GradeResult,
  MusicPayload,
  SessionPlan,
  SessionSummary,
} from './types.js';

export type PlayPhase = 'idle' | 'question' | 'feedback' | 'finished';

export interface Feedback {
  grade: GradeResult | null;
  /** Memory text to read back after a correct completion, else null. */
  rereadText: string | null;
}

export function isMusicPayload(payload: Exercise['payload']): payload is MusicPayload {
  return 'audio_ref' in payload && 'question' in payload;
}

export class PlayClient {
  private readonly api: ApiClient;
  private plan: SessionPlan | null = null;
  private phase: PlayPhase = 'idle';
  private index = 0;
  private exercise: Exercise | null = null;
  private pendingNext: Exercise | null = null;
  private feedbackValue: Feedback | null = null;
  private summaryValue: SessionSummary | null = null;

  constructor(api: ApiClient) {
    this.api = api;
  }

  get state(): PlayPhase {
    return this.phase;
  }

  get currentExercise(): Exercise | null {
    return this.exercise;
  }

  get feedback(): Feedback | null {
    return this.feedbackValue;
  }

  get summary(): SessionSummary | null {
    return this.summaryValue;
  }

  get progress(): { completed: number; total: number } {
    return { completed: this.index, total: this.plan?.exercises.length ?? 0 };
  }

  /** How long to play the audio clip for the current exercise, if any. */
  get clipSeconds(): number | null {
    const payload = this.exercise?.payload;
    return payload && isMusicPayload(payload) ? payload.clip_seconds : null;
  }

  /** Playable URL for the current exercise's audio clip, if any. */
  get audioUrl(): string | null {
    const payload = this.exercise?.payload;
    return payload && isMusicPayload(payload)
      ? this.api.mediaUrl(payload.audio_ref)
      : null;
  }

  async start(userId: string, options: StartSessionOptions = {}): Promise<SessionPlan> {
    if (this.phase !== 'idle' && this.phase !== 'finished') {
      throw new Error('a session is already in progress');
    }
    const plan = await this.api.startSession(userId, options);
    this.plan = plan;
    this.index = 0;
    this.exercise = plan.exercises[0] ?? null;
    this.pendingNext = null;
    this.feedbackValue = null;
    this.summaryValue = null;
    this.phase = this.exercise ? 'question' : 'finished';
    return plan;
  }

  private applyResponse(response: {
    grade: GradeResult | null;
    reread_text: string | null;
    next_exercise: Exercise | null;
    summary: SessionSummary | null;
  }): Feedback {
    this.feedbackValue = { grade: response.grade, rereadText: response.reread_text };
    this.pendingNext = response.next_exercise;
    this.index += 1;
    if (response.summary !== null) {
      this.summaryValue = response.summary;
      this.phase = 'finished';
      this.exercise = null;
    } else {
      this.phase = 'feedback';
    }
    return this.feedbackValue;
  }

  /** Submit the answer for the current exercise. One submission only. */
  async submitAnswer(answer: number | number[]): Promise<Feedback> {
    if (this.phase !== 'question' || this.plan === null) {
      throw new Error('no exercise awaiting an answer');
    }
    this.phase = 'feedback'; // block a second submit while the request runs
    return this.applyResponse(await this.api.submitAnswer(this.plan.session_id, answer));
  }

  /** Report that the senior ran out of time on the current exercise. */
  async reportTimeout(): Promise<Feedback> {
    if (this.phase !== 'question' || this.plan === null) {
      throw new Error('no exercise awaiting an answer');
    }
    this.phase = 'feedback';
    return this.applyResponse(await this.api.reportTimeout(this.plan.session_id));
  }

  /** Move past the feedback screen to the next exercise. */
  acknowledgeFeedback(): void {
    if (this.phase !== 'feedback') {
      throw new Error('no feedback to acknowledge');
    }
    this.exercise = this.pendingNext;
    this.pendingNext = null;
    this.feedbackValue = null;
    this.phase = this.exercise ? 'question' : 'finished';
  }

  /** End the session early; the server closes and persists it. */
  async stop(): Promise<SessionSummary> {
    if (this.plan === null || this.phase === 'finished' || this.phase === 'idle') {
      throw new Error('no session to stop');
    }
    const response = await this.api.stopSession(this.plan.session_id);
    this.summaryValue = response.summary;
    this.phase = 'finished';
    this.exercise = null;
    this.pendingNext = null;
    if (this.summaryValue === null) {
      throw new Error('server did not return a session summary');
    }
    return this.summaryValue;
  }
}
