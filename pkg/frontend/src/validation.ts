/** Client-side form validation mirroring the service's invariants.
 *
 * Every rule here corresponds to a 400 the API would return; an invalid form
 * is rejected before any request is made.
 */

import type { AdvisoryForm } from "./types.js";

export const GOAL_HALF_WIDTH = 3.66;

export interface FieldError {
  field: string;
  message: string;
}

function pushIf(errors: FieldError[], bad: boolean, field: string, message: string): void {
  if (bad) errors.push({ field, message });
}

function isProbability(v: number): boolean {
  return Number.isFinite(v) && v >= 0 && v <= 1;
}

function isPercentageOrEmpty(v: number | null): boolean {
  return v === null || (Number.isFinite(v) && v >= 0 && v <= 100);
}

function isCountOrEmpty(v: number | null): boolean {
  return v === null || (Number.isInteger(v) && v >= 0);
}

export function validateForm(form: AdvisoryForm): FieldError[] {
  const errors: FieldError[] = [];
  const gk = form.keeper;
  pushIf(errors, !(Number.isFinite(gk.early_range) && gk.early_range > 0),
    "keeper.early_range", "early dive range must be a positive number of meters");
  if (gk.late_range !== null) {
    pushIf(errors, !(Number.isFinite(gk.late_range) && gk.late_range > 0 && gk.late_range <= gk.early_range),
      "keeper.late_range", "late dive range must be in (0, early range]");
  }
  pushIf(errors, !isProbability(gk.p_late_correct_independent),
    "keeper.p_late_correct_independent", "probability must be in [0, 1]");
  pushIf(errors, !isProbability(gk.p_late_correct_dependent),
    "keeper.p_late_correct_dependent", "probability must be in [0, 1]");
  pushIf(errors, !isProbability(gk.p_early_correct_dependent),
    "keeper.p_early_correct_dependent", "probability must be in [0, 1]");
  pushIf(errors, !(Number.isFinite(gk.start_offset) && Math.abs(gk.start_offset) <= GOAL_HALF_WIDTH),
    "keeper.start_offset", `offset must lie within the goal mouth (|x| <= ${GOAL_HALF_WIDTH})`);

  const ctx = form.context;
  pushIf(errors, !(Number.isInteger(ctx.minute) && ctx.minute >= 0),
    "context.minute", "minute must be a nonnegative integer");
  pushIf(errors, !Number.isInteger(ctx.goal_diff),
    "context.goal_diff", "goal difference must be an integer");
  pushIf(errors, !isCountOrEmpty(ctx.shootout_kicks_taken),
    "context.shootout_kicks_taken", "shootout kicks taken must be a nonnegative integer");
  pushIf(errors, !isCountOrEmpty(ctx.own_team_kicks_taken),
    "context.own_team_kicks_taken", "own-team kicks taken must be a nonnegative integer");
  pushIf(errors, !ctx.is_shootout && (ctx.shootout_kicks_taken ?? 0) > 0,
    "context.shootout_kicks_taken", "shootout counters need the shootout flag");

  const taker = form.taker;
  pushIf(errors, taker.foot !== "left" && taker.foot !== "right",
    "taker.foot", "foot must be left or right");
  pushIf(errors, !isCountOrEmpty(taker.pens_taken),
    "taker.pens_taken", "penalties taken must be a nonnegative integer");
  pushIf(errors, !isCountOrEmpty(taker.pens_scored),
    "taker.pens_scored", "penalties scored must be a nonnegative integer");
  pushIf(
    errors,
    taker.pens_taken !== null && taker.pens_scored !== null && taker.pens_scored > taker.pens_taken,
    "taker.pens_scored", "cannot have scored more penalties than taken",
  );
  pushIf(errors, !isPercentageOrEmpty(taker.pct_to_natural),
    "taker.pct_to_natural", "percentage must be in [0, 100]");
  pushIf(errors, !isPercentageOrEmpty(taker.pct_to_nonnatural),
    "taker.pct_to_nonnatural", "percentage must be in [0, 100]");
  pushIf(errors, !isPercentageOrEmpty(taker.pct_to_center),
    "taker.pct_to_center", "percentage must be in [0, 100]");
  pushIf(
    errors,
    taker.avg_dist_from_center !== null &&
      !(Number.isFinite(taker.avg_dist_from_center) && taker.avg_dist_from_center >= 0 &&
        taker.avg_dist_from_center <= 4.4),
    "taker.avg_dist_from_center", "average distance must be within 0 and 4.4 meters",
  );

  pushIf(errors, !(Number.isInteger(form.seed) && form.seed >= 0),
    "seed", "seed must be a nonnegative integer");
  return errors;
}

/** Request body for POST /advise; pure field mapping, no computed values. */
export function toAdviseRequest(form: AdvisoryForm): import("./types.js").AdviseRequest {
  const profile: Record<string, number> = {
    early_range: form.keeper.early_range,
    p_late_correct_independent: form.keeper.p_late_correct_independent,
    p_late_correct_dependent: form.keeper.p_late_correct_dependent,
    p_early_correct_dependent: form.keeper.p_early_correct_dependent,
    start_offset: form.keeper.start_offset,
  };
  if (form.keeper.late_range !== null) {
    profile.late_range = form.keeper.late_range;
  }
  const context: Record<string, number | string | boolean> = {
    minute: form.context.minute,
    is_shootout: form.context.is_shootout,
    goal_diff: form.context.goal_diff,
    foot: form.taker.foot,
  };
  if (form.context.is_shootout) {
    if (form.context.shootout_kicks_taken !== null) {
      context.shootout_kicks_taken = form.context.shootout_kicks_taken;
    }
    if (form.context.own_team_kicks_taken !== null) {
      context.own_team_kicks_taken = form.context.own_team_kicks_taken;
    }
  }
  if (form.taker.position_line !== null) context.position_line = form.taker.position_line;
  if (form.taker.pens_taken !== null) context.pens_taken = form.taker.pens_taken;
  if (form.taker.pens_scored !== null) context.pens_scored = form.taker.pens_scored;
  if (form.taker.pct_to_natural !== null) context.pct_to_natural = form.taker.pct_to_natural;
  if (form.taker.pct_to_nonnatural !== null) {
    context.pct_to_nonnatural = form.taker.pct_to_nonnatural;
  }
  if (form.taker.pct_to_center !== null) context.pct_to_center = form.taker.pct_to_center;
  if (form.taker.avg_dist_from_center !== null) {
    context.avg_dist_from_center = form.taker.avg_dist_from_center;
  }
  return { profile, context, seed: form.seed };
}
