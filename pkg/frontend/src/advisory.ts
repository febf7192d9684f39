/** Submit a validated advisory form and shape the response for rendering.
 *
 * The view model is a pure pass-through of API values: each displayed number
 * is one response value formatted to three decimals, the highlighted row is
 * the API's recommendation, and the instruction is shown with its seed so the
 * dice roll is auditable.
 */

import type { ApiClient } from "./api.js";
import type { AdvisoryForm, AdvisoryView, PolicyRow } from "./types.js";
import { toAdviseRequest, validateForm } from "./validation.js";

export class FormInvalid extends Error {
  errors: { field: string; message: string }[];

  constructor(errors: { field: string; message: string }[]) {
    super(errors.map((e) => `${e.field}: ${e.message}`).join("; "));
    this.errors = errors;
  }
}

export function viewFromResponse(response: {
  p_save: Record<string, number>;
  recommendation: string;
  instruction: string;
  seed: number;
}): AdvisoryView {
  const rows: PolicyRow[] = Object.entries(response.p_save).map(([policy, value]) => ({
    policy,
    value,
    display: value.toFixed(3),
    recommended: policy === response.recommendation,
  }));
  return {
    rows,
    recommendation: response.recommendation,
    instruction: response.instruction,
    seed: response.seed,
  };
}

export async function submitAdvisory(client: ApiClient, form: AdvisoryForm): Promise<AdvisoryView> {
  const errors = validateForm(form);
  if (errors.length > 0) {
    throw new FormInvalid(errors);
  }
  const response = await client.advise(toAdviseRequest(form));
  return viewFromResponse(response);
}
