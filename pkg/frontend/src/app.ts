/** DOM wiring for the advisory console; all numbers rendered come straight
 * from API responses. */

import { ApiClient, ApiError, ServiceUnavailable } from "./api.js";
import { FormInvalid, submitAdvisory } from "./advisory.js";
import { renderChartSvg } from "./chart.js";
import { whatIfOffset, whatIfToCsv, type WhatIfResult } from "./whatif.js";
import { POLICY_LABELS, type AdvisoryForm } from "./types.js";

const OFFSETS = [0.0, 0.1, 0.2, 0.3] as const;

const client = new ApiClient("..");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function numberOrNull(id: string): number | null {
  const raw = el<HTMLInputElement>(id).value.trim();
  return raw === "" ? null : Number(raw);
}

function numberOf(id: string): number {
  return Number(el<HTMLInputElement>(id).value);
}

function readForm(): AdvisoryForm {
  const isShootout = el<HTMLInputElement>("ctx-shootout").checked;
  return {
    keeper: {
      early_range: numberOf("gk-early"),
      late_range: numberOrNull("gk-late"),
      p_late_correct_independent: numberOf("gk-pli"),
      p_late_correct_dependent: numberOf("gk-pld"),
      p_early_correct_dependent: numberOf("gk-ped"),
      start_offset: numberOf("gk-offset"),
    },
    context: {
      minute: numberOf("ctx-minute"),
      is_shootout: isShootout,
      goal_diff: numberOf("ctx-goaldiff"),
      shootout_kicks_taken: isShootout ? numberOrNull("ctx-so-kicks") : null,
      own_team_kicks_taken: isShootout ? numberOrNull("ctx-so-own") : null,
    },
    taker: {
      foot: el<HTMLSelectElement>("taker-foot").value as "left" | "right",
      position_line:
        (el<HTMLSelectElement>("taker-position").value || null) as AdvisoryForm["taker"]["position_line"],
      pens_taken: numberOrNull("taker-pens"),
      pens_scored: numberOrNull("taker-scored"),
      pct_to_natural: numberOrNull("taker-pct-nat"),
      pct_to_nonnatural: numberOrNull("taker-pct-non"),
      pct_to_center: numberOrNull("taker-pct-cen"),
      avg_dist_from_center: numberOrNull("taker-avg-dist"),
    },
    seed: numberOf("seed"),
  };
}

function setBanner(message: string, kind: "error" | "warning" | "") {
  const banner = el<HTMLDivElement>("banner");
  banner.textContent = message;
  banner.className = kind ? `banner ${kind}` : "banner hidden";
}

function clearFieldErrors() {
  document.querySelectorAll(".field-error").forEach((node) => {
    node.textContent = "";
  });
}

function showFieldErrors(errors: { field: string; message: string }[]) {
  clearFieldErrors();
  for (const err of errors) {
    const slot = document.querySelector(`[data-error-for="${err.field}"]`);
    if (slot) slot.textContent = err.message;
  }
  setBanner("fix the highlighted fields and resubmit", "error");
}

function renderAdvice(view: Awaited<ReturnType<typeof submitAdvisory>>) {
  const tbody = el<HTMLTableSectionElement>("advice-rows");
  tbody.innerHTML = "";
  for (const row of view.rows) {
    const tr = document.createElement("tr");
    if (row.recommended) tr.className = "recommended";
    const name = document.createElement("td");
    name.textContent = POLICY_LABELS[row.policy] ?? row.policy;
    const value = document.createElement("td");
    value.textContent = row.display;
    tr.append(name, value);
    tbody.append(tr);
  }
  el<HTMLSpanElement>("instruction-policy").textContent =
    POLICY_LABELS[view.instruction] ?? view.instruction;
  el<HTMLSpanElement>("instruction-seed").textContent = String(view.seed);
  el<HTMLElement>("advice-panel").classList.remove("hidden");
}

let lastSweep: WhatIfResult | null = null;

function renderSweep(result: WhatIfResult) {
  lastSweep = result;
  el<HTMLDivElement>("chart").innerHTML = renderChartSvg(result);
  if (result.warnings.length > 0) {
    setBanner(`partial what-if results: ${result.warnings.join("; ")}`, "warning");
  }
  el<HTMLElement>("sweep-panel").classList.remove("hidden");
}

async function onSubmit(event: Event) {
  event.preventDefault();
  clearFieldErrors();
  setBanner("", "");
  let form: AdvisoryForm;
  try {
    form = readForm();
    const view = await submitAdvisory(client, form);
    renderAdvice(view);
  } catch (err) {
    if (err instanceof FormInvalid) {
      showFieldErrors(err.errors);
    } else if (err instanceof ApiError) {
      showFieldErrors(
        err.fieldErrors.map((e) => ({ field: e.field ?? "", message: e.message })),
      );
    } else if (err instanceof ServiceUnavailable) {
      setBanner("service unavailable; check that artifacts are loaded and retry", "error");
    } else {
      setBanner(String(err), "error");
    }
    return;
  }
  try {
    renderSweep(await whatIfOffset(client, form, OFFSETS));
  } catch (err) {
    setBanner(`what-if sweep failed: ${String(err)}`, "warning");
  }
}

function onExport() {
  if (!lastSweep) return;
  const blob = new Blob([whatIfToCsv(lastSweep)], { type: "text/csv" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = "offset_sweep.csv";
  link.click();
  URL.revokeObjectURL(link.href);
}

export function start() {
  el<HTMLFormElement>("advisory-form").addEventListener("submit", onSubmit);
  el<HTMLButtonElement>("export-csv").addEventListener("click", onExport);
  el<HTMLInputElement>("ctx-shootout").addEventListener("change", (event) => {
    const on = (event.target as HTMLInputElement).checked;
    el<HTMLFieldSetElement>("shootout-fields").disabled = !on;
  });
  client.health().then((ok) => {
    if (!ok) setBanner("advisory service unreachable; results will fail until it is up", "warning");
  });
}

if (typeof document !== "undefined") {
  start();
}
