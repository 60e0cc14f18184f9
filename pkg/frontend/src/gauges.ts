/** Consumption gauges: 0-200% scale, green at or below 100%, red above. */

import { GREEN, RED } from "./spectrum.js";

export const GAUGE_MAX_PCT = 200;

export interface GaugeState {
  pct: number;
  fraction: number; // of the 0-200 scale
  color: typeof GREEN | typeof RED;
}

export function gaugeState(pct: number): GaugeState {
  const clamped = Math.max(0, Math.min(GAUGE_MAX_PCT, pct));
  return {
    pct: clamped,
    fraction: clamped / GAUGE_MAX_PCT,
    color: pct <= 100 ? GREEN : RED,
  };
}

export function renderGauge(el: HTMLElement, label: string, pct: number): void {
  const state = gaugeState(pct);
  el.innerHTML = "";
  const title = document.createElement("div");
  title.className = "gauge-label";
  title.textContent = `${label}: ${state.pct.toFixed(1)}%`;
  const track = document.createElement("div");
  track.className = "gauge-track";
  const fill = document.createElement("div");
  fill.className = "gauge-fill";
  fill.style.width = `${(state.fraction * 100).toFixed(2)}%`;
  fill.style.background = state.color;
  const marker = document.createElement("div");
  marker.className = "gauge-100";
  track.appendChild(fill);
  track.appendChild(marker);
  el.appendChild(title);
  el.appendChild(track);
}
