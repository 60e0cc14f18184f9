/**
 * Spectrum panel layout: links as rectangles positioned by their frequency
 * interval, height proportional to EIRP, green when the power floor is met.
 * Pure functions; the canvas painter lives at the bottom.
 */

import type { TransponderStateView } from "./types.js";

export const GREEN = "#2e9e4f";
export const RED = "#d23f31";
export const OVERLAP = "rgba(210, 63, 49, 0.35)";

export interface SpectrumRect {
  link: number;
  x: number;
  w: number;
  y: number;
  h: number;
  color: typeof GREEN | typeof RED;
  marginOk: boolean;
}

export interface OverlapBand {
  x: number;
  w: number;
}

export interface SpectrumLayout {
  rects: SpectrumRect[];
  overlaps: OverlapBand[];
  bandX: number;
  bandW: number;
}

export function spectrumLayout(
  view: TransponderStateView,
  width: number,
  height: number,
): SpectrumLayout {
  const bandLo = view.transponder.freq_lo_hz;
  const bandHi = view.transponder.freq_hi_hz;
  // keep protruding links visible: scale over the hull of band and links
  const lo = Math.min(bandLo, ...view.links.map((l) => l.freq_lo_hz));
  const hi = Math.max(bandHi, ...view.links.map((l) => l.freq_hi_hz));
  const span = hi - lo || 1;
  const toX = (f: number) => ((f - lo) / span) * width;

  const rects: SpectrumRect[] = view.links.map((link, i) => {
    const h = Math.min(1, link.eirp_w / view.transponder.total_eirp_w) * height;
    return {
      link: i,
      x: toX(link.freq_lo_hz),
      w: toX(link.freq_hi_hz) - toX(link.freq_lo_hz),
      y: height - h,
      h,
      color: link.margin_ok ? GREEN : RED,
      marginOk: link.margin_ok,
    };
  });

  const overlaps: OverlapBand[] = [];
  for (let i = 0; i < view.links.length; i++) {
    for (let j = i + 1; j < view.links.length; j++) {
      const a = view.links[i];
      const b = view.links[j];
      const oLo = Math.max(a.freq_lo_hz, b.freq_lo_hz);
      const oHi = Math.min(a.freq_hi_hz, b.freq_hi_hz);
      if (oHi > oLo) {
        overlaps.push({ x: toX(oLo), w: toX(oHi) - toX(oLo) });
      }
    }
  }

  return { rects, overlaps, bandX: toX(bandLo), bandW: toX(bandHi) - toX(bandLo) };
}

export function renderSpectrum(
  canvas: HTMLCanvasElement,
  view: TransponderStateView,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  const layout = spectrumLayout(view, width, height);
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#10151c";
  ctx.fillRect(0, 0, width, height);
  ctx.fillStyle = "#1c2735";
  ctx.fillRect(layout.bandX, 0, layout.bandW, height);
  for (const rect of layout.rects) {
    ctx.fillStyle = rect.color;
    ctx.globalAlpha = 0.85;
    ctx.fillRect(rect.x, rect.y, rect.w, rect.h);
    ctx.globalAlpha = 1.0;
    ctx.strokeStyle = "#0a0e13";
    ctx.strokeRect(rect.x, rect.y, rect.w, rect.h);
  }
  for (const band of layout.overlaps) {
    ctx.fillStyle = OVERLAP;
    ctx.fillRect(band.x, 0, band.w, height);
  }
  ctx.strokeStyle = "#5b6b7d";
  ctx.strokeRect(layout.bandX, 0.5, layout.bandW, height - 1);
}
