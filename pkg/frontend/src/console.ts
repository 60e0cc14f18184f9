/**
 * Run console state: create runs, follow their trace stream, keep chart
 * series and the latest transponder view, and list finished training runs
 * as checkpoints for operator-reviewed inference.
 */

import { ApiClient } from "./api.js";
import type { ChartPoint } from "./chart.js";
import { SourceFactory, TraceStream } from "./sse.js";
import type { RunHandle, TraceEvent, TransponderStateView } from "./types.js";

export interface ConsoleHooks {
  onTrace?(runId: string, point: ChartPoint): void;
  onState?(runId: string, view: TransponderStateView): void;
  onStatus?(handle: RunHandle): void;
}

export class RunConsole {
  runs = new Map<string, RunHandle>();
  series = new Map<string, ChartPoint[]>();
  streams = new Map<string, TraceStream>();
  lastView: TransponderStateView | null = null;

  constructor(
    private api: ApiClient,
    private makeSource: SourceFactory,
    private hooks: ConsoleHooks = {},
  ) {}

  async start(kind: string, config: Record<string, unknown>): Promise<RunHandle> {
    const handle = await this.api.createRun(kind, config);
    this.runs.set(handle.id, handle);
    this.series.set(handle.id, []);
    if (this.hooks.onStatus) this.hooks.onStatus(handle);
    this.follow(handle.id);
    return handle;
  }

  follow(runId: string): TraceStream {
    const stream = new TraceStream(this.makeSource, runId, {
      onEvent: (event: TraceEvent) => {
        const points = this.series.get(runId);
        if (points) points.push({ step: event.step, value: event.reward });
        if (this.hooks.onTrace) {
          this.hooks.onTrace(runId, { step: event.step, value: event.reward });
        }
        if (event.state) {
          this.lastView = event.state;
          if (this.hooks.onState) this.hooks.onState(runId, event.state);
        }
      },
      onEnd: (handle: RunHandle) => {
        this.runs.set(runId, handle);
        if (this.hooks.onStatus) this.hooks.onStatus(handle);
      },
    });
    this.streams.set(runId, stream);
    stream.connect();
    return stream;
  }

  async refresh(runId: string): Promise<RunHandle> {
    const handle = await this.api.getRun(runId);
    this.runs.set(runId, handle);
    if (this.hooks.onStatus) this.hooks.onStatus(handle);
    return handle;
  }

  /** Finished training runs expose their checkpoint ids for inference. */
  checkpoints(): string[] {
    return [...this.runs.values()]
      .filter((r) => r.kind === "ppo-train" && r.status === "done")
      .map((r) => String(r.result["checkpoint"] ?? r.id));
  }

  async propose(checkpointId: string, episodes: number, seed: number) {
    return this.api.inferCheckpoint(checkpointId, episodes, seed);
  }

  closeAll(): void {
    for (const stream of this.streams.values()) stream.close();
  }
}
