/** Thin JSON client over the operator-service endpoints. */

import type { MetricWeights, RunHandle, TransponderStateView } from "./types.js";

export class WeightsRejected extends Error {}

type FetchFn = typeof fetch;

export class ApiClient {
  constructor(
    private base: string = "",
    private fetchFn: FetchFn = (...args) => fetch(...args),
  ) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.base}${path}`, init);
    if (!response.ok) {
      const body = await response.text();
      throw new Error(`${init?.method ?? "GET"} ${path} -> ${response.status}: ${body}`);
    }
    return (await response.json()) as T;
  }

  getProfile(): Promise<Record<string, unknown>> {
    return this.json("/profile");
  }

  getWeights(): Promise<MetricWeights> {
    return this.json("/weights");
  }

  async putWeights(weights: MetricWeights): Promise<MetricWeights> {
    const response = await this.fetchFn(`${this.base}/weights`, {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(weights),
    });
    if (response.status === 400) {
      const body = await response.text();
      throw new WeightsRejected(body);
    }
    if (!response.ok) {
      throw new Error(`PUT /weights -> ${response.status}`);
    }
    return (await response.json()) as MetricWeights;
  }

  createRun(kind: string, config: Record<string, unknown>): Promise<RunHandle> {
    return this.json("/runs", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ kind, config }),
    });
  }

  getRun(id: string): Promise<RunHandle> {
    return this.json(`/runs/${id}`);
  }

  listRuns(): Promise<RunHandle[]> {
    return this.json("/runs");
  }

  getRunState(id: string, step?: number): Promise<TransponderStateView> {
    const suffix = step === undefined ? "" : `?step=${step}`;
    return this.json(`/runs/${id}/state${suffix}`);
  }

  inferCheckpoint(
    checkpointId: string,
    episodes: number,
    seed: number,
  ): Promise<{
    mean_final_reward: number;
    std_final_reward: number;
    proposals: { reward: number; view: TransponderStateView }[];
  }> {
    return this.json(`/checkpoints/${checkpointId}/infer`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ episodes, seed }),
    });
  }
}
