/** DOM wiring for the operator console (served at /ui by the service). */

import { ApiClient } from "./api.js";
import { renderChart } from "./chart.js";
import { RunConsole } from "./console.js";
import { renderGauge } from "./gauges.js";
import { browserSourceFactory } from "./sse.js";
import { renderSpectrum } from "./spectrum.js";
import type { RunHandle, TransponderStateView } from "./types.js";
import { WEIGHT_FIELDS, WeightPanel } from "./weights.js";

const $ = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;

const api = new ApiClient("");
const weightPanel = new WeightPanel(api);

function paintState(view: TransponderStateView): void {
  renderSpectrum($("spectrum") as HTMLCanvasElement, view);
  renderGauge($("gauge-bandwidth"), "Bandwidth consumption", view.bandwidth_consumption_pct);
  renderGauge($("gauge-power"), "Power consumption", view.power_consumption_pct);
}

function paintStatus(handle: RunHandle): void {
  const row = document.createElement("div");
  row.className = `run-status status-${handle.status}`;
  row.textContent =
    `${handle.id} [${handle.kind}] ${handle.status} ` +
    `${(handle.progress * 100).toFixed(0)}%` +
    (handle.error ? ` — ${handle.error}` : "");
  const existing = document.getElementById(`status-${handle.id}`);
  row.id = `status-${handle.id}`;
  if (existing) existing.replaceWith(row);
  else $("run-list").appendChild(row);
  refreshCheckpointList();
}

const runConsole = new RunConsole(api, browserSourceFactory(""), {
  onTrace: (runId) => {
    const points = runConsole.series.get(runId) ?? [];
    renderChart($("chart") as HTMLCanvasElement, points);
    const last = points[points.length - 1];
    if (last) $("chart-label").textContent =
      `${runId}: step ${last.step}, reward ${last.value.toFixed(4)}`;
  },
  onState: (_runId, view) => paintState(view),
  onStatus: paintStatus,
});

function refreshCheckpointList(): void {
  const select = $("checkpoint") as HTMLSelectElement;
  const current = select.value;
  select.innerHTML = "";
  for (const id of runConsole.checkpoints()) {
    const option = document.createElement("option");
    option.value = id;
    option.textContent = id;
    select.appendChild(option);
  }
  if (current) select.value = current;
}

async function startRun(): Promise<void> {
  const kind = ($("run-kind") as HTMLSelectElement).value;
  let config: Record<string, unknown>;
  try {
    config = JSON.parse(($("run-config") as HTMLTextAreaElement).value || "{}");
  } catch (err) {
    $("run-error").textContent = `bad config JSON: ${err}`;
    return;
  }
  $("run-error").textContent = "";
  const handle = await runConsole.start(kind, config);
  const poll = setInterval(async () => {
    const updated = await runConsole.refresh(handle.id);
    if (updated.status === "done" || updated.status === "failed") clearInterval(poll);
  }, 1000);
}

async function proposeFromCheckpoint(): Promise<void> {
  const checkpoint = ($("checkpoint") as HTMLSelectElement).value;
  if (!checkpoint) return;
  const result = await runConsole.propose(checkpoint, 5, 0);
  const tbody = $("proposal-rows");
  tbody.innerHTML = "";
  result.proposals.forEach((proposal, i) => {
    const tr = document.createElement("tr");
    const links = proposal.view.links
      .map((l) =>
        `[${(l.freq_lo_hz / 1e6).toFixed(2)}–${(l.freq_hi_hz / 1e6).toFixed(2)} MHz, ` +
        `${l.eirp_w.toFixed(1)} W, mf${l.modfec_index}]`)
      .join(" ");
    tr.innerHTML =
      `<td>${i}</td><td>${proposal.reward.toFixed(4)}</td><td>${links}</td>`;
    tr.addEventListener("click", () => paintState(proposal.view));
    tbody.appendChild(tr);
  });
  $("proposal-summary").textContent =
    `mean ${result.mean_final_reward.toFixed(4)} ± ${result.std_final_reward.toFixed(4)}` +
    ` — click a row to inspect it on the spectrum`;
}

async function buildWeightForm(): Promise<void> {
  await weightPanel.load();
  const form = $("weights-form");
  form.innerHTML = "";
  for (const field of WEIGHT_FIELDS) {
    const label = document.createElement("label");
    label.textContent = field;
    const input = document.createElement("input");
    input.type = "number";
    input.step = "0.1";
    input.value = String(weightPanel.draft![field]);
    input.addEventListener("input", () =>
      weightPanel.edit(field, Number(input.value)));
    input.id = `weight-${field}`;
    label.appendChild(input);
    form.appendChild(label);
  }
}

async function submitWeights(): Promise<void> {
  const ok = await weightPanel.submit();
  $("weights-error").textContent = ok ? "saved" : weightPanel.error ?? "error";
  if (!ok) {
    for (const field of WEIGHT_FIELDS) {
      const input = document.getElementById(`weight-${field}`) as HTMLInputElement;
      if (input) input.value = String(weightPanel.draft![field]);
    }
  }
}

async function init(): Promise<void> {
  await buildWeightForm();
  $("run-start").addEventListener("click", () => void startRun());
  $("weights-save").addEventListener("click", () => void submitWeights());
  $("propose").addEventListener("click", () => void proposeFromCheckpoint());
}

void init();
