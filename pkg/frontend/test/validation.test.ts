import { describe, expect, it } from 'vitest';

import type { MemoryDraft } from '../src/types.js';
import { draftHints, validateDraft, MIN_ORDERING_STEPS } from '../src/validation.js';

function draft(overrides: Partial<MemoryDraft> = {}): MemoryDraft {
  return {
    category: 'Places',
    title: 'Holidays at the seaside',
    description: 'In the summer we went on holiday to Marina di Pisa.',
    ...overrides,
  };
}

describe('validateDraft', () => {
  it('accepts a minimal valid draft', () => {
    expect(validateDraft(draft())).toEqual([]);
  });

  it('rejects an empty title', () => {
    expect(validateDraft(draft({ title: '   ' }))).toContain('title empty');
  });

  it('rejects hobby steps outside the Hobbies category', () => {
    const problems = validateDraft(draft({ hobby_steps: ['a', 'b', 'c'] }));
    expect(problems).toContain('hobby_steps on non-Hobbies category');
  });

  it('rejects empty and duplicate hobby steps', () => {
    const problems = validateDraft(
      draft({ category: 'Hobbies', hobby_steps: ['knead', ' ', 'knead'] }),
    );
    expect(problems).toContain('hobby_steps contains empty step');
    expect(problems).toContain('hobby_steps contains duplicate steps');
  });

  it('rejects music metadata outside the Music category', () => {
    const problems = validateDraft(
      draft({ music_meta: { song_title: 'Azzurro', artist: 'Celentano' } }),
    );
    expect(problems).toContain('music_meta on non-Music category');
  });

  it('rejects blank song title or artist', () => {
    const problems = validateDraft(
      draft({ category: 'Music', music_meta: { song_title: ' ', artist: '' } }),
    );
    expect(problems).toContain('music_meta.song_title empty');
    expect(problems).toContain('music_meta.artist empty');
  });

  it('rejects an out-of-range age', () => {
    expect(validateDraft(draft({ age_at_event: -1 }))).toHaveLength(1);
    expect(validateDraft(draft({ age_at_event: 121 }))).toHaveLength(1);
    expect(validateDraft(draft({ age_at_event: 0 }))).toEqual([]);
    expect(validateDraft(draft({ age_at_event: 120 }))).toEqual([]);
  });
});

describe('draftHints', () => {
  it('suggests three steps for a hobby with fewer', () => {
    const hints = draftHints(
      draft({ category: 'Hobbies', hobby_steps: ['knead', 'bake'] }),
    );
    expect(hints.join(' ')).toContain(`at least ${MIN_ORDERING_STEPS} steps`);
  });

  it('stays quiet about steps once there are three', () => {
    const hints = draftHints(
      draft({ category: 'Hobbies', hobby_steps: ['pick', 'knead', 'bake'] }),
    );
    expect(hints.join(' ')).not.toContain('steps');
  });

  it('suggests an audio clip for music without one', () => {
    const hints = draftHints(
      draft({ category: 'Music', music_meta: { song_title: 'Azzurro', artist: 'Celentano' } }),
    );
    expect(hints.join(' ')).toContain('audio clip');
  });

  it('never blocks submission: hints are not violations', () => {
    const d = draft({ category: 'Hobbies', hobby_steps: ['knead'] });
    expect(draftHints(d).length).toBeGreaterThan(0);
    expect(validateDraft(d)).toEqual([]);
  });
});
