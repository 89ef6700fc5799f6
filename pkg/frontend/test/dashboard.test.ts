import { beforeEach, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import {
  ConfigEditor,
  loadOverview,
  loadSessionDetail,
  overviewViewModel,
} from '../src/dashboard.js';
import { PlayClient } from '../src/play.js';
import { MockServer, cannedExercises } from './mock-server.js';

describe('caregiver dashboard', () => {
  let server: MockServer;
  let caregiverApi: ApiClient;
  let seniorApi: ApiClient;
  let seniorId: string;

  beforeEach(() => {
    server = new MockServer();
    const caregiver = server.seedUser('Anna', 'caregiver');
    const senior = server.seedUser('Maria', 'senior', 1933);
    seniorId = senior.profile.user_id;
    caregiverApi = new ApiClient(server.baseUrl, server.fetch);
    caregiverApi.setToken(caregiver.token);
    seniorApi = new ApiClient(server.baseUrl, server.fetch);
    seniorApi.setToken(senior.token);
    server.plannedExercises = cannedExercises(server.seedMedia(new Uint8Array([1])));
  });

  async function playOneSession(): Promise<string> {
    const play = new PlayClient(seniorApi);
    const plan = await play.start(seniorId);
    await play.submitAnswer(1); // right
    play.acknowledgeFeedback();
    await play.submitAnswer([1, 2, 0]); // partly right: key [1, 0, 2]
    play.acknowledgeFeedback();
    await play.reportTimeout(); // association timeout
    play.acknowledgeFeedback();
    await play.submitAnswer(3); // wrong music answer
    return plan.session_id;
  }

  it('mirrors the overview payload verbatim — no recomputation', async () => {
    await playOneSession();
    const raw = await caregiverApi.overview(seniorId);
    const view = overviewViewModel(raw);
    expect(view.sessionsPlayed).toBe(raw.sessions_played);
    expect(view.totalPlaySeconds).toBe(raw.total_play_seconds);
    for (const row of view.gameTypeRows) {
      expect(row).toMatchObject(raw.per_game_type[row.gameType]!);
    }
    expect(view.gameTypeRows.map((r) => r.gameType)).toEqual(
      Object.keys(raw.per_game_type).sort(
        (a, b) =>
          view.gameTypeRows.findIndex((r) => r.gameType === a) -
          view.gameTypeRows.findIndex((r) => r.gameType === b),
      ),
    );
    expect(view.trend.map((p) => [p.sessionId, p.meanScore])).toEqual(raw.score_trend);
  });

  it('loads overview through the guarded loader', async () => {
    const sessionId = await playOneSession();
    const result = await loadOverview(caregiverApi, seniorId);
    expect(result.ok).toBe(true);
    if (result.ok) {
      expect(result.value.sessionsPlayed).toBe(1);
      expect(result.value.trend[0]?.sessionId).toBe(sessionId);
      // 1.0 + 1/3 + 0 + 0 over four attempts
      expect(result.value.trend[0]?.meanScore).toBeCloseTo((1 + 1 / 3) / 4);
    }
  });

  it('filters the overview by period', async () => {
    await playOneSession();
    const now = Date.now() / 1000;
    const recent = await caregiverApi.overview(seniorId, [now - 3600, now + 3600]);
    expect(recent.sessions_played).toBe(1);
    const past = await caregiverApi.overview(seniorId, [0, 1]);
    expect(past.sessions_played).toBe(0);
    expect(past.score_trend).toEqual([]);
  });

  it('denies the overview to a senior token', async () => {
    const result = await loadOverview(seniorApi, seniorId);
    expect(result.ok).toBe(false);
    if (!result.ok) expect(result.forbidden).toBe(true);
  });

  it('shows per-session telemetry detail', async () => {
    const sessionId = await playOneSession();
    const result = await loadSessionDetail(caregiverApi, sessionId);
    expect(result.ok).toBe(true);
    if (result.ok) {
      expect(result.value).toHaveLength(4);
      expect(result.value.map((e) => e.passed)).toEqual([true, false, false, false]);
      expect(result.value.at(-1)?.completion_level_at_event).toBe(1.0);
    }
  });

  describe('ConfigEditor', () => {
    it('round-trips a config change', async () => {
      const editor = new ConfigEditor(caregiverApi, seniorId);
      await editor.load();
      editor.setGameTypeEnabled('MusicGame', false);
      editor.update({ session_min_seconds: 600, session_max_seconds: 900 });
      expect(editor.canSave).toBe(true);
      const saved = await editor.save();
      expect(saved.enabled_game_types).not.toContain('MusicGame');
      expect(saved.session_min_seconds).toBe(600);
      const games = await seniorApi.eligibleGames(seniorId);
      expect(games.MusicGame).toBe(0);
      expect(games.MemoryCompletion).toBeGreaterThan(0);
    });

    it('refuses to disable every game type', async () => {
      const editor = new ConfigEditor(caregiverApi, seniorId);
      await editor.load();
      for (const gt of editor.enabledGameTypes) {
        editor.setGameTypeEnabled(gt, false);
      }
      expect(editor.canSave).toBe(false);
      expect(editor.problems().join(' ')).toContain('at least one game type');
      await expect(editor.save()).rejects.toThrow('not saveable');
    });

    it('blocks inverted session time bounds locally', async () => {
      const editor = new ConfigEditor(caregiverApi, seniorId);
      await editor.load();
      editor.update({ session_min_seconds: 1200, session_max_seconds: 900 });
      expect(editor.canSave).toBe(false);
    });

    it('denies the editor to a senior token', async () => {
      const editor = new ConfigEditor(seniorApi, seniorId);
      await expect(editor.load()).rejects.toMatchObject({ status: 403 });
    });

    it('a disabled type cannot be chosen for a session', async () => {
      const editor = new ConfigEditor(caregiverApi, seniorId);
      await editor.load();
      editor.setGameTypeEnabled('MusicGame', false);
      await editor.save();
      const play = new PlayClient(seniorApi);
      await expect(play.start(seniorId, { chosenType: 'MusicGame' })).rejects.toMatchObject(
        { status: 400 },
      );
    });
  });
});
