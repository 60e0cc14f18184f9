import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { chartLayout } from "../src/chart.js";
import { RunConsole } from "../src/console.js";
import { EventSourceLike } from "../src/sse.js";
import type { RunHandle } from "../src/types.js";

class ManualSource implements EventSourceLike {
  onmessage: ((ev: { data: string }) => void) | null = null;
  onerror: ((ev: unknown) => void) | null = null;
  private endHandlers: ((ev: { data: string }) => void)[] = [];
  addEventListener(type: string, handler: (ev: { data: string }) => void): void {
    if (type === "end") this.endHandlers.push(handler);
  }
  close(): void {}
  emit(step: number, reward: number): void {
    if (this.onmessage) this.onmessage({ data: JSON.stringify({ step, reward }) });
  }
  end(handle: RunHandle): void {
    for (const h of this.endHandlers) h({ data: JSON.stringify(handle) });
  }
}

function mockApi(handles: Record<string, RunHandle>): ApiClient {
  const fetchFn = async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    if (url.endsWith("/runs") && init?.method === "POST") {
      const body = JSON.parse(String(init.body));
      const handle: RunHandle = {
        id: `run-${Object.keys(handles).length}`,
        kind: body.kind,
        status: "pending",
        progress: 0,
        error: null,
        result: {},
      };
      handles[handle.id] = handle;
      return new Response(JSON.stringify(handle), { status: 201 });
    }
    const match = url.match(/\/runs\/([^/?]+)$/);
    if (match) {
      return new Response(JSON.stringify(handles[match[1]]), { status: 200 });
    }
    return new Response("not found", { status: 404 });
  };
  return new ApiClient("", fetchFn as typeof fetch);
}

describe("run console", () => {
  it("tracks status transitions pending -> running -> done", async () => {
    const handles: Record<string, RunHandle> = {};
    const source = new ManualSource();
    const statuses: string[] = [];
    const console_ = new RunConsole(mockApi(handles), () => source, {
      onStatus: (h) => statuses.push(h.status),
    });
    const handle = await console_.start("sa", { max_steps: 100 });
    expect(statuses).toEqual(["pending"]);

    handles[handle.id] = { ...handle, status: "running", progress: 0.5 };
    await console_.refresh(handle.id);
    expect(statuses).toEqual(["pending", "running"]);

    source.emit(10, 0.6);
    source.end({ ...handle, status: "done", progress: 1, result: {} });
    expect(statuses).toEqual(["pending", "running", "done"]);
    expect(console_.runs.get(handle.id)!.status).toBe("done");
  });

  it("chart series carries trace steps verbatim onto the x axis", async () => {
    const handles: Record<string, RunHandle> = {};
    const source = new ManualSource();
    const console_ = new RunConsole(mockApi(handles), () => source);
    const handle = await console_.start("sa", {});
    source.emit(100, 0.5);
    source.emit(350, 0.7);
    source.emit(400, 0.9);
    const points = console_.series.get(handle.id)!;
    expect(points.map((p) => p.step)).toEqual([100, 350, 400]);
    const layout = chartLayout(points, 300, 100);
    expect(layout.points.map((p) => p.x)).toEqual([0, (250 / 300) * 300, 300]);
    expect(layout.points[2].y).toBeCloseTo(10, 10); // reward 0.9 of 1.0
  });

  it("lists finished training runs as checkpoints", async () => {
    const handles: Record<string, RunHandle> = {};
    const console_ = new RunConsole(mockApi(handles), () => new ManualSource());
    const a = await console_.start("ppo-train", {});
    await console_.start("sa", {});
    handles[a.id] = {
      ...handles[a.id],
      status: "done",
      result: { checkpoint: a.id },
    };
    await console_.refresh(a.id);
    expect(console_.checkpoints()).toEqual([a.id]);
  });
});
