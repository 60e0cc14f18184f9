/** Mirrors of the operator-service wire contract. */

export type RunStatus = "pending" | "running" | "done" | "failed";

export interface RunHandle {
  id: string;
  kind: string;
  status: RunStatus;
  progress: number;
  error: string | null;
  result: Record<string, unknown>;
}

export interface LinkView {
  freq_lo_hz: number;
  freq_hi_hz: number;
  eirp_w: number;
  min_eirp_w: number;
  modfec_index: number;
  margin_ok: boolean;
}

export interface TransponderStateView {
  links: LinkView[];
  transponder: {
    freq_lo_hz: number;
    freq_hi_hz: number;
    total_eirp_w: number;
  };
  bandwidth_consumption_pct: number;
  power_consumption_pct: number;
  step?: number;
  reward?: number;
}

export interface MetricWeights {
  overlap: number;
  on_transponder: number;
  peb: number;
  margin: number;
  bandwidth: number;
  eirp: number;
  packed: number;
  free_resource: number;
  link_share: number;
  transponder_share: number;
}

export interface TraceEvent {
  step: number;
  reward: number;
  state?: TransponderStateView;
}
