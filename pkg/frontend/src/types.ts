// API document shapes, mirroring the session service's JSON responses.
// The console never derives numbers from these; it re-displays them.

export interface ScenarioView {
  id: string;
  levels: string[];
  production_loss_rate: number[];
  ignition_loss: number;
  horizons: number[];
  observation_nodes: { name: string; outcomes: string[] }[];
  tests: {
    id: string;
    label: string;
    outcomes: string[];
    duration: number;
    cost: number;
    repeatable: boolean;
  }[];
}

export interface SessionStateDoc {
  scenario_id: string;
  seq: number;
  clock: number;
  status_quo_level: number;
  evidence: Record<string, string>;
  test_results: [string, string, number][];
  ignition_evident: boolean;
  belief: Record<string, number>;
}

export interface SessionView {
  session_id: string;
  state: SessionStateDoc;
  severity: string;
  response_label: string;
  scenario: ScenarioView;
}

export interface DiagnosisDoc {
  session_id: string;
  seq: number;
  evidence: Record<string, string>;
  detailed: Record<string, number>;
  aggregate: Record<string, number>;
  belief: Record<string, number>;
  ignition_evident: boolean;
}

export interface RankedLevelDoc {
  level: number;
  level_name: string;
  expected_utility: number;
  ignition_prob_at_horizon: number;
}

export interface RecommendationDoc {
  session_id: string;
  seq: number;
  chosen: number;
  chosen_name: string;
  horizon_used: number;
  ignition_prob_at_decision: number;
  forced_esd: boolean;
  ranked: RankedLevelDoc[];
}

export interface ActNowLeafDoc {
  kind: "act-now-leaf";
  path: string;
  time: number;
  cost: number;
  belief: { outcomes: string[]; probs: number[] };
  eu: number;
  recommendation: Omit<RecommendationDoc, "session_id" | "seq">;
}

export interface IgnitionLeafDoc {
  kind: "ignition-leaf";
  path: string;
  time: number;
  cost: number;
  eu: number;
}

export interface OutcomeBranchDoc {
  kind: "outcome-branch";
  test_id: string;
  eu: number;
  ignition_prob: number;
  ignition_child: IgnitionLeafDoc;
  outcomes: { outcome: string; prob: number; child: PlanNodeDoc }[];
}

export interface ChoiceNodeDoc {
  kind: "choice";
  eu: number;
  argmax: string; // "act-now" or a test id
  act_now: ActNowLeafDoc;
  tests: OutcomeBranchDoc[];
}

export type PlanNodeDoc = ActNowLeafDoc | IgnitionLeafDoc | OutcomeBranchDoc | ChoiceNodeDoc;

export interface PlanDoc {
  session_id: string;
  seq: number;
  best_eu: number;
  act_now_eu: number;
  expansions_used: number;
  best_eu_history: number[];
  frontier: string[];
  root: PlanNodeDoc;
}

export interface ProfilePointDoc {
  seq: number;
  kind: string;
  clock: number;
  ignition_probability: number;
  severity: string;
  response_label: string;
}

export interface ProfileDoc {
  session_id: string;
  points: ProfilePointDoc[];
}

// One line of a stored session event log (drill mode replays these).
export interface SessionEventDoc {
  seq: number;
  timestamp: number;
  kind: string;
  payload: Record<string, unknown>;
}
