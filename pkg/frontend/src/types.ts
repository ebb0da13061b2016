// Wire types mirroring the trial service JSON payloads.

export interface DoseWindow {
  x_min: number;
  x_max: number;
  y_min: number;
  y_max: number;
}

export interface DosePoint {
  x: number;
  y: number;
  raw_x: number;
  raw_y: number;
}

export interface RecommendedPatient extends DosePoint {
  index: number;
}

export interface Recommendation {
  cohort: number;
  alpha: number;
  patients: RecommendedPatient[];
}

export interface TranscriptRow extends DosePoint {
  index: number;
  cohort: number;
  t: 0 | 1;
}

export type TrialStatus = "enrolling" | "stopped_for_safety" | "completed";

export interface CurveEstimate {
  rho00_hat: number;
  rho01_hat: number;
  rho10_hat: number;
  beta3_hat: number;
  link: string;
  theta: number;
  interaction: boolean;
}

export interface TrialStatePayload {
  trial_id: string;
  revision: number;
  status: TrialStatus;
  alpha: number;
  theta: number;
  n_max: number;
  working_link: string;
  interaction: boolean;
  window: DoseWindow;
  transcript: TranscriptRow[];
  pending: Recommendation | null;
  estimate: CurveEstimate | null;
  acceptance_rates: number[] | null;
}

export interface CurvePoint {
  x: number;
  y_estimate: number;
  raw_x: number;
  raw_y: number;
  bands: Record<string, number>;
}

export interface WhatIfPreview {
  alpha: number;
  binding: boolean;
  patients: RecommendedPatient[];
}

export interface CurvePayload {
  trial_id: string;
  revision: number;
  theta: number;
  band_alphas: number[];
  estimate: CurveEstimate;
  points: CurvePoint[];
  what_if: WhatIfPreview | null;
}

export interface SafetyPayload {
  trial_id: string;
  revision: number;
  n_evaluable: number;
  threshold: number;
  exceedance_probability: number;
  xi2: number;
  rule_active: boolean;
  would_stop: boolean;
  status: TrialStatus;
}

export interface OutcomesResponse {
  trial_id: string;
  revision: number;
  status: TrialStatus;
  alpha: number;
  recommendation: Recommendation | null;
  estimate: CurveEstimate | null;
  acceptance_rates: number[];
}

export interface CreateTrialRequest {
  window: DoseWindow;
  design: {
    theta: number;
    n_max: number;
    stop_n1?: number;
  };
  sampler?: {
    n_iterations?: number;
    n_burnin?: number;
    thin?: number;
    seed?: number;
  };
  working_link?: string;
  interaction?: boolean;
  idempotency_key?: string;
}

export interface CreateTrialResponse {
  trial_id: string;
  revision: number;
  recommendation: Recommendation;
}
