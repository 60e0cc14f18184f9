/** Reward-vs-step line chart; x positions come from trace steps verbatim. */

export interface ChartPoint {
  step: number;
  value: number;
}

export interface ChartLayout {
  points: { x: number; y: number; step: number }[];
  xOf(step: number): number;
  yOf(value: number): number;
}

export function chartLayout(
  points: ChartPoint[],
  width: number,
  height: number,
  yMax = 1.0,
): ChartLayout {
  const first = points.length ? points[0].step : 0;
  const last = points.length ? points[points.length - 1].step : 1;
  const span = last - first || 1;
  const xOf = (step: number) => ((step - first) / span) * width;
  const yOf = (value: number) => height - (Math.min(value, yMax) / yMax) * height;
  return {
    points: points.map((p) => ({ x: xOf(p.step), y: yOf(p.value), step: p.step })),
    xOf,
    yOf,
  };
}

export function renderChart(
  canvas: HTMLCanvasElement,
  points: ChartPoint[],
  color = "#4da3ff",
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#10151c";
  ctx.fillRect(0, 0, width, height);
  ctx.strokeStyle = "#2a3646";
  for (const frac of [0.25, 0.5, 0.75]) {
    ctx.beginPath();
    ctx.moveTo(0, height * frac);
    ctx.lineTo(width, height * frac);
    ctx.stroke();
  }
  if (!points.length) return;
  const layout = chartLayout(points, width, height);
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  layout.points.forEach((p, i) => {
    if (i === 0) ctx.moveTo(p.x, p.y);
    else ctx.lineTo(p.x, p.y);
  });
  ctx.stroke();
}
