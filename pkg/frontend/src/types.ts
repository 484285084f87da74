// Wire types for the adaptest HTTP API.

export interface ItemView {
  item_id: string;
  stem: string;
  options: string[];
  position: number;
  phase: string;
}

export interface ReportItem {
  item_id: string;
  u: number;
  difficulty_level: number;
}

export interface Report {
  theta: number;
  standard_error: number | null;
  finish_reason: string;
  items: ReportItem[];
  level_correct_ratios: Record<string, number>;
}

export interface SessionState {
  session_id: string;
  examinee_id: string;
  phase: string;
  answered: number;
  item: ItemView | null;
  report: Report | null;
}

export interface StartResponse {
  session_id: string;
  item: ItemView;
}

export type AnswerResponse =
  | { status: "next"; item: ItemView }
  | { status: "finished"; report: Report };

export interface AdminItem {
  id: string;
  stem: string;
  options: string[];
  correct_options: number[];
  difficulty_level: number;
  topic: string;
  a: number;
  b: number;
  c: number;
  c_overridden: boolean;
  active: boolean;
}

export interface TerminationSettings {
  max_items: number;
  min_items: number;
  se_threshold: number | null;
  theta_guard: number;
}

export interface StrategySettings {
  kind: string;
  k: number;
  epsilon: number;
}

export interface EngineConfig {
  termination: TerminationSettings;
  strategy: StrategySettings;
}

export interface ExposureStats {
  finished_sessions: number;
  sigma: number;
  counts: Record<string, number>;
}
