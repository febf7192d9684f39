/** Shared fixtures: a valid form and a mock advisory service.
 *
 * The mock implements the documented /advise contract: policies gated on the
 * profile's late range, fixed per-policy save probabilities, recommendation =
 * argmax, and an instruction sampled proportionally to the probabilities with
 * a PRNG seeded by the request seed.
 */

import type { AdviseRequest, AdviseResponse, AdvisoryForm } from "../src/types.js";
import { ApiClient } from "../src/api.js";

export const FULL_PROBS: Record<string, number> = {
  late: 0.1906,
  early: 0.1322,
  early_educated: 0.1785,
  mixed_educated: 0.1956,
};

export const EARLY_ONLY_PROBS: Record<string, number> = {
  early: 0.1322,
  early_educated: 0.1785,
};

export function makeForm(overrides: Partial<AdvisoryForm> = {}): AdvisoryForm {
  return {
    keeper: {
      early_range: 3.1,
      late_range: 2.8,
      p_late_correct_independent: 0.59,
      p_late_correct_dependent: 0.59,
      p_early_correct_dependent: 0.18,
      start_offset: 0,
    },
    context: {
      minute: 85,
      is_shootout: false,
      goal_diff: 0,
      shootout_kicks_taken: null,
      own_team_kicks_taken: null,
    },
    taker: {
      foot: "right",
      position_line: "striker",
      pens_taken: 14,
      pens_scored: 11,
      pct_to_natural: 55,
      pct_to_nonnatural: 30,
      pct_to_center: 15,
      avg_dist_from_center: 2.7,
    },
    seed: 7,
    ...overrides,
  };
}

/** Deterministic 32-bit PRNG so the mock's sampling is reproducible per seed. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function sampleInstruction(pSave: Record<string, number>, seed: number): string {
  const kinds = Object.keys(pSave);
  const total = kinds.reduce((acc, k) => acc + pSave[k], 0);
  const draw = mulberry32(seed)() * total;
  let cumulative = 0;
  for (const kind of kinds) {
    cumulative += pSave[kind];
    if (draw < cumulative) return kind;
  }
  return kinds[kinds.length - 1];
}

export interface MockCall {
  path: string;
  body: AdviseRequest | null;
}

export function mockService(options: { failOffsets?: number[] } = {}) {
  const calls: MockCall[] = [];
  const failOffsets = options.failOffsets ?? [];
  const fetchImpl = async (input: string, init?: RequestInit): Promise<Response> => {
    const path = input.replace(/^https?:\/\/[^/]+/, "");
    const body: AdviseRequest | null = init?.body
      ? (JSON.parse(String(init.body)) as AdviseRequest)
      : null;
    calls.push({ path, body });
    if (path.endsWith("/health")) {
      return new Response(JSON.stringify({ status: "ok" }), { status: 200 });
    }
    if (path.endsWith("/advise") && body) {
      if (body.offset !== undefined && failOffsets.includes(body.offset)) {
        return new Response(JSON.stringify({ errors: [{ message: "boom" }] }), { status: 400 });
      }
      const gated = body.profile.late_range === undefined ? EARLY_ONLY_PROBS : FULL_PROBS;
      // offsets shift every probability by a fixed visible amount so sweep
      // points are distinguishable; still a pure mock, no client math
      const shift = (body.offset ?? 0) * 0.05;
      const pSave: Record<string, number> = {};
      for (const [kind, value] of Object.entries(gated)) {
        pSave[kind] = value + shift;
      }
      const recommendation = Object.entries(pSave).sort((a, b) => b[1] - a[1])[0][0];
      const payload: AdviseResponse = {
        p_save: pSave,
        recommendation,
        instruction: sampleInstruction(pSave, body.seed),
        seed: body.seed,
      };
      return new Response(JSON.stringify(payload), { status: 200 });
    }
    return new Response("not found", { status: 404 });
  };
  return { client: new ApiClient("", fetchImpl), calls };
}
