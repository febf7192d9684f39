/** What-if sweeps: one /advise call per offset, rendered as one line per policy.
 *
 * Partial failures keep their slot as a gap and raise a warning instead of
 * discarding the sweep. Concurrent sweeps are keyed by a query hash so a
 * repeated in-flight query is not issued twice.
 */

import type { ApiClient } from "./api.js";
import type { AdviseRequest, AdvisoryForm } from "./types.js";
import { FormInvalid } from "./advisory.js";
import { toAdviseRequest, validateForm } from "./validation.js";

export interface WhatIfPoint {
  offset: number;
  /** policy -> save probability exactly as returned; missing on failure */
  values: Record<string, number> | null;
}

export interface WhatIfResult {
  points: WhatIfPoint[];
  policies: string[];
  warnings: string[];
}

function queryHash(request: AdviseRequest, offsets: readonly number[]): string {
  return JSON.stringify({ request, offsets });
}

const inFlight = new Map<string, Promise<WhatIfResult>>();

export async function whatIfOffset(
  client: ApiClient,
  form: AdvisoryForm,
  offsets: readonly number[],
): Promise<WhatIfResult> {
  const errors = validateForm(form);
  if (errors.length > 0) {
    throw new FormInvalid(errors);
  }
  const request = toAdviseRequest(form);
  const key = queryHash(request, offsets);
  const pending = inFlight.get(key);
  if (pending) {
    return pending;
  }
  const job = (async () => {
    const points: WhatIfPoint[] = [];
    const warnings: string[] = [];
    const results = await Promise.all(
      offsets.map(async (offset) => {
        try {
          const response = await client.advise({ ...request, offset });
          return { offset, values: response.p_save };
        } catch (err) {
          warnings.push(`offset ${offset}: ${err instanceof Error ? err.message : String(err)}`);
          return { offset, values: null };
        }
      }),
    );
    points.push(...results);
    const policies = new Set<string>();
    for (const point of points) {
      for (const policy of Object.keys(point.values ?? {})) {
        policies.add(policy);
      }
    }
    return { points, policies: [...policies], warnings };
  })();
  inFlight.set(key, job);
  try {
    return await job;
  } finally {
    inFlight.delete(key);
  }
}

/** CSV of the sweep, one row per (offset, policy), values verbatim from the API. */
export function whatIfToCsv(result: WhatIfResult): string {
  const lines = ["offset,policy,p_save"];
  for (const point of result.points) {
    if (point.values === null) {
      continue;
    }
    for (const policy of result.policies) {
      if (policy in point.values) {
        lines.push(`${point.offset},${policy},${String(point.values[policy])}`);
      }
    }
  }
  return lines.join("\n") + "\n";
}
