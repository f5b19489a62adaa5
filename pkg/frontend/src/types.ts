/**
 * Wire types for the /v1 API. Field names mirror the service payloads
 * exactly; the UI never derives numbers of its own from them.
 */

export interface Envelope<T> {
  command: string;
  catalog_version: string;
  parameters: Record<string, unknown>;
  results: T;
  warnings: string[];
}

export interface ApiErrorBody {
  status: number;
  code: "validation" | "not_found" | "infeasible" | "internal";
  message: string;
  reason?: string;
}

export interface PlatformSummary {
  name: string;
  peak_flops: number;
  mem_type: string;
  mem_capacity_bytes: number;
  mem_bw_bytes_per_s: number;
  tdp_w: number;
}

export interface ModelSummary {
  name: string;
  n_layers: number;
  d_model: number;
  n_params: number;
}

export interface PlanRef {
  tp: number;
  pp: number;
  n_devices: number;
}

export interface PointRef {
  model: string;
  batch: number;
  prompt_len: number;
  context_len: number;
  phase: string;
}

export interface ScenarioEstimate {
  platform: string;
  model: string;
  point: PointRef;
  plan: PlanRef;
  mode: "optimistic" | "realistic";
  ttft_s: number | null;
  tpot_s: number | null;
  comm_prefill_s: number | null;
  comm_decode_s: number | null;
  energy_per_output_token_j: number | null;
  energy_per_input_token_j: number | null;
  n_devices_allocated: number;
  feasible: boolean;
  reason: string | null;
}

export interface FrontierPoint {
  x: number;
  y: number;
  platform: string;
  tp: number;
  pp: number;
  n_devices: number;
  mode: "optimistic" | "realistic";
}

export interface Frontier {
  phase: string;
  axis_x: string;
  axis_y: string;
  points: FrontierPoint[];
}

export interface SweepResults {
  estimates: ScenarioEstimate[];
  frontiers: Record<string, Frontier>;
}

export interface RooflineResults {
  platform: string;
  ridge_point: number;
  points: { arithmetic_intensity: number; attainable_flops: number }[];
}

export interface EquivResults {
  metric: string;
  platforms: string[];
  values: number[][];
}

export interface TraceSegment {
  phase: string;
  start_s: number;
  end_s: number;
  peak_power_w: number;
  mean_power_w: number;
  fraction_of_tdp: number | null;
  energy_j: number;
}

export interface TraceResults {
  platform: string | null;
  idle_level_w: number;
  segments: TraceSegment[];
}
