/**
 * Metric-weight panel state machine.
 *
 * Edits stay local until the service acknowledges the PUT; a rejected edit
 * restores the last accepted values and surfaces the error.
 */

import { ApiClient, WeightsRejected } from "./api.js";
import type { MetricWeights } from "./types.js";

export const WEIGHT_FIELDS: (keyof MetricWeights)[] = [
  "overlap",
  "on_transponder",
  "peb",
  "margin",
  "bandwidth",
  "eirp",
  "packed",
  "free_resource",
  "link_share",
  "transponder_share",
];

export class WeightPanel {
  committed: MetricWeights | null = null;
  draft: MetricWeights | null = null;
  error: string | null = null;

  constructor(private api: ApiClient) {}

  async load(): Promise<MetricWeights> {
    this.committed = await this.api.getWeights();
    this.draft = { ...this.committed };
    this.error = null;
    return this.committed;
  }

  edit(field: keyof MetricWeights, value: number): void {
    if (!this.draft) throw new Error("panel not loaded");
    this.draft = { ...this.draft, [field]: value };
  }

  async submit(): Promise<boolean> {
    if (!this.draft) throw new Error("panel not loaded");
    try {
      this.committed = await this.api.putWeights(this.draft);
      this.draft = { ...this.committed };
      this.error = null;
      return true;
    } catch (err) {
      // restore the last acknowledged values
      this.draft = this.committed ? { ...this.committed } : this.draft;
      this.error =
        err instanceof WeightsRejected ? `rejected: ${err.message}` : String(err);
      return false;
    }
  }
}
