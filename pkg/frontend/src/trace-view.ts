/**
 * Uploaded power trace rendered as segment bands: each idle/prefill/decode
 * span becomes a colored band with the service's peak power and energy.
 */

import { fmt } from "./format.js";
import { svgElement } from "./svg.js";
import type { TraceResults } from "./types.js";

export const WIDTH = 640;
export const HEIGHT = 200;

export function renderTraceView(container: HTMLElement, results: TraceResults): void {
  container.replaceChildren();
  const segments = results.segments;
  if (segments.length === 0) {
    container.textContent = "no segments";
    return;
  }
  const t0 = segments[0]!.start_s;
  const t1 = segments[segments.length - 1]!.end_s;
  const span = t1 - t0 || 1;
  const peak = Math.max(...segments.map((s) => s.peak_power_w));

  const svg = svgElement("svg", {
    width: WIDTH,
    height: HEIGHT,
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    class: "trace-view",
  });
  for (const seg of segments) {
    const x = ((seg.start_s - t0) / span) * WIDTH;
    const w = ((seg.end_s - seg.start_s) / span) * WIDTH;
    const h = (seg.peak_power_w / peak) * (HEIGHT - 20);
    const band = svgElement("rect", {
      x,
      y: HEIGHT - h,
      width: w,
      height: h,
      class: `band band-${seg.phase}`,
    });
    band.setAttribute("data-phase", seg.phase);
    const title = svgElement("title");
    title.textContent =
      `${seg.phase}: peak ${fmt(seg.peak_power_w)} W, ` +
      `energy ${fmt(seg.energy_j)} J` +
      (seg.fraction_of_tdp !== null ? `, ${fmt(seg.fraction_of_tdp)} of TDP` : "");
    band.append(title);
    svg.append(band);
  }
  container.append(svg);

  const caption = document.createElement("div");
  caption.className = "trace-caption";
  caption.textContent = `idle level ${fmt(results.idle_level_w)} W`;
  container.append(caption);
}
