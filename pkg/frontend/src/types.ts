/** Wire types mirroring the advisory service's request/response schemas. */

export interface GoalkeeperCapacities {
  early_range: number;
  late_range: number | null;
  p_late_correct_independent: number;
  p_late_correct_dependent: number;
  p_early_correct_dependent: number;
  start_offset: number;
}

export interface GameContext {
  minute: number;
  is_shootout: boolean;
  goal_diff: number;
  shootout_kicks_taken: number | null;
  own_team_kicks_taken: number | null;
}

export interface TakerAttributes {
  foot: "left" | "right";
  position_line: "goalkeeper" | "defender" | "midfielder" | "striker" | null;
  pens_taken: number | null;
  pens_scored: number | null;
  pct_to_natural: number | null;
  pct_to_nonnatural: number | null;
  pct_to_center: number | null;
  avg_dist_from_center: number | null;
}

export interface AdvisoryForm {
  keeper: GoalkeeperCapacities;
  context: GameContext;
  taker: TakerAttributes;
  seed: number;
}

export interface AdviseRequest {
  profile: Record<string, number>;
  context: Record<string, number | string | boolean>;
  seed: number;
  offset?: number;
}

export interface AdviseResponse {
  p_save: Record<string, number>;
  recommendation: string;
  instruction: string;
  seed: number;
}

export interface PolicyRow {
  policy: string;
  /** Raw probability exactly as the API returned it. */
  value: number;
  /** The same number rendered to three decimals; never recomputed. */
  display: string;
  recommended: boolean;
}

export interface AdvisoryView {
  rows: PolicyRow[];
  recommendation: string;
  instruction: string;
  seed: number;
}

export const POLICY_LABELS: Record<string, string> = {
  late: "Dive late",
  early: "Dive early",
  early_educated: "Dive early (educated)",
  mixed_educated: "Mixed (educated)",
  game_theoretic: "Game-theoretic mix",
};
