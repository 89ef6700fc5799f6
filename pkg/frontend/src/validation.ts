/**
 * Client-side memory validation.
 *
 * Mirrors the server's field rules so the wizard can flag problems
 * before submitting; the server remains the authority and re-checks
 * everything (including media-reference existence, which only it can).
 */

import type { MemoryDraft } from './types.js';

export const MAX_AGE_AT_EVENT = 120;

/** Hobby memories need this many steps before the ordering game can use them. */
export const MIN_ORDERING_STEPS = 3;

export function validateDraft(draft: MemoryDraft): string[] {
  const violations: string[] = [];
  if (!draft.title.trim()) violations.push('title empty');
  if (draft.hobby_steps && draft.hobby_steps.length > 0) {
    if (draft.category !== 'Hobbies') {
      violations.push('hobby_steps on non-Hobbies category');
    }
    if (draft.hobby_steps.some((s) => !s.trim())) {
      violations.push('hobby_steps contains empty step');
    }
    if (new Set(draft.hobby_steps).size !== draft.hobby_steps.length) {
      violations.push('hobby_steps contains duplicate steps');
    }
  }
  if (draft.music_meta) {
    if (draft.category !== 'Music') {
      violations.push('music_meta on non-Music category');
    }
    if (!draft.music_meta.song_title.trim()) {
      violations.push('music_meta.song_title empty');
    }
    if (!draft.music_meta.artist.trim()) {
      violations.push('music_meta.artist empty');
    }
  }
  if (
    draft.age_at_event !== undefined &&
    (draft.age_at_event < 0 || draft.age_at_event > MAX_AGE_AT_EVENT)
  ) {
    violations.push(`age_at_event out of range [0, ${MAX_AGE_AT_EVENT}]`);
  }
  return violations;
}

/**
 * Non-blocking suggestions that help a draft feed more game types.
 * A draft with hints is still submittable.
 */
export function draftHints(draft: MemoryDraft): string[] {
  const hints: string[] = [];
  if (draft.category === 'Hobbies') {
    const steps = draft.hobby_steps ?? [];
    if (steps.length < MIN_ORDERING_STEPS) {
      hints.push(
        `add at least ${MIN_ORDERING_STEPS} steps to enable the ordering game`,
      );
    }
  }
  if (draft.category === 'Music' && !draft.music_meta?.audio_ref) {
    hints.push('attach an audio clip to enable the music game');
  }
  if (!draft.key_detail?.trim()) {
    hints.push('a key detail enables the memory-completion game');
  }
  if (draft.age_at_event === undefined) {
    hints.push('an age at the event enables the historical-event question');
  }
  return hints;
}
