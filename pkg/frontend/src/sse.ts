/**
 * Resumable trace stream over the service's SSE endpoint.
 *
 * Tracks the last step seen and reconnects with `?after=<step>`, so a
 * dropped connection resumes without gaps; duplicate steps are filtered.
 */

import type { RunHandle, TraceEvent } from "./types.js";

export interface EventSourceLike {
  onmessage: ((ev: { data: string }) => void) | null;
  onerror: ((ev: unknown) => void) | null;
  addEventListener(type: string, handler: (ev: { data: string }) => void): void;
  close(): void;
}

export type SourceFactory = (url: string) => EventSourceLike;

export interface StreamHandlers {
  onEvent(event: TraceEvent): void;
  onEnd?(handle: RunHandle): void;
  onReconnect?(attempt: number): void;
}

export class TraceStream {
  lastStep = -1;
  closed = false;
  private source: EventSourceLike | null = null;
  private attempts = 0;

  constructor(
    private makeSource: SourceFactory,
    private runId: string,
    private handlers: StreamHandlers,
    private reconnectDelayMs = 250,
  ) {}

  connect(): void {
    if (this.closed) return;
    const url = `/runs/${this.runId}/events?after=${this.lastStep}`;
    const source = this.makeSource(url);
    this.source = source;
    source.onmessage = (ev) => {
      const event = JSON.parse(ev.data) as TraceEvent;
      if (event.step <= this.lastStep) return; // at-most-once per step
      this.lastStep = event.step;
      this.handlers.onEvent(event);
    };
    source.addEventListener("end", (ev) => {
      this.close();
      if (this.handlers.onEnd) {
        this.handlers.onEnd(JSON.parse(ev.data) as RunHandle);
      }
    });
    source.onerror = () => {
      if (this.closed) return;
      source.close();
      this.attempts += 1;
      if (this.handlers.onReconnect) this.handlers.onReconnect(this.attempts);
      setTimeout(() => this.connect(), this.reconnectDelayMs);
    };
  }

  close(): void {
    this.closed = true;
    if (this.source) this.source.close();
  }
}

export function browserSourceFactory(base = ""): SourceFactory {
  return (url) => new EventSource(`${base}${url}`) as unknown as EventSourceLike;
}
