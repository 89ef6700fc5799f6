/**
 * Memory-entry wizard: a small state machine that walks a caregiver or
 * senior from category choice through detail entry to review and
 * submission. All validation messages come from the shared client-side
 * mirror plus whatever the server returns on submit.
 */

import { ApiClient, ApiError } from './api.js';
import type { Memory, MemoryCategory, MemoryDraft, MusicMeta } from './types.js';
import { draftHints, validateDraft } from './validation.js';

export type WizardStep = 'category' | 'details' | 'review';

export interface DraftFields {
  title?: string;
  description?: string;
  age_at_event?: number;
  key_detail?: string;
  music_meta?: MusicMeta;
}

export class MemoryEntryWizard {
  private stepValue: WizardStep = 'category';
  private category: MemoryCategory | null = null;
  private fields: DraftFields = {};
  private steps: string[] = [];
  private imageRef: string | null = null;
  /** Violations the server reported on the last failed submit. */
  serverViolations: string[] = [];

  get step(): WizardStep {
    return this.stepValue;
  }

  chooseCategory(category: MemoryCategory): void {
    if (this.category !== category) {
      // Category-specific fields do not survive a category change.
      this.steps = [];
      this.fields.music_meta = undefined;
    }
    this.category = category;
    this.stepValue = 'details';
  }

  update(fields: DraftFields): void {
    this.fields = { ...this.fields, ...fields };
  }

  addHobbyStep(step: string): void {
    this.steps.push(step);
  }

  removeHobbyStep(index: number): void {
    this.steps.splice(index, 1);
  }

  get hobbySteps(): readonly string[] {
    return this.steps;
  }

  async attachImage(api: ApiClient, data: Uint8Array): Promise<string> {
    this.imageRef = await api.uploadMedia(data);
    return this.imageRef;
  }

  async attachAudio(api: ApiClient, data: Uint8Array): Promise<string> {
    const ref = await api.uploadMedia(data);
    const meta = this.fields.music_meta ?? { song_title: '', artist: '' };
    this.fields.music_meta = { ...meta, audio_ref: ref };
    return ref;
  }

  draft(): MemoryDraft {
    if (this.category === null) {
      throw new Error('choose a category first');
    }
    const draft: MemoryDraft = {
      category: this.category,
      title: this.fields.title ?? '',
      description: this.fields.description ?? '',
    };
    if (this.fields.age_at_event !== undefined) draft.age_at_event = this.fields.age_at_event;
    if (this.fields.key_detail !== undefined) draft.key_detail = this.fields.key_detail;
    if (this.imageRef !== null) draft.image_ref = this.imageRef;
    if (this.steps.length > 0) draft.hobby_steps = [...this.steps];
    if (this.fields.music_meta !== undefined) draft.music_meta = this.fields.music_meta;
    return draft;
  }

  /** Blocking problems with the current draft (empty when submittable). */
  problems(): string[] {
    if (this.category === null) return ['choose a category first'];
    return validateDraft(this.draft());
  }

  /** Non-blocking suggestions, e.g. the three-steps ordering-game hint. */
  hints(): string[] {
    if (this.category === null) return [];
    return draftHints(this.draft());
  }

  get canSubmit(): boolean {
    return this.stepValue === 'review' && this.problems().length === 0;
  }

  toReview(): void {
    if (this.category === null) throw new Error('choose a category first');
    this.stepValue = 'review';
  }

  back(): void {
    if (this.stepValue === 'review') this.stepValue = 'details';
    else if (this.stepValue === 'details') this.stepValue = 'category';
  }

  async submit(api: ApiClient, userId: string): Promise<Memory> {
    if (!this.canSubmit) {
      throw new Error(`draft not submittable: ${this.problems().join('; ')}`);
    }
    try {
      const created = await api.createMemory(userId, this.draft());
      this.serverViolations = [];
      return created;
    } catch (error) {
      if (error instanceof ApiError && error.status === 400) {
        this.serverViolations = error.violations;
      }
      throw error;
    }
  }
}
