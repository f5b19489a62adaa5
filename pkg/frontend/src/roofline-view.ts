/**
 * Log-log roofline: attainable FLOP/s over arithmetic intensity, with a
 * marker at the service-reported ridge point.
 */

import { fmt } from "./format.js";
import { logScale, svgElement } from "./svg.js";
import type { RooflineResults } from "./types.js";

export const WIDTH = 560;
export const HEIGHT = 360;
const MARGIN = 36;

export function renderRooflineView(container: HTMLElement, results: RooflineResults): void {
  container.replaceChildren();
  const pts = results.points;
  if (pts.length === 0) {
    container.textContent = "no samples";
    return;
  }
  const first = pts[0]!;
  const last = pts[pts.length - 1]!;
  const xScale = logScale(first.arithmetic_intensity, last.arithmetic_intensity, WIDTH - 2 * MARGIN);
  const flops = pts.map((p) => p.attainable_flops);
  const yScale = logScale(Math.min(...flops), Math.max(...flops), HEIGHT - 2 * MARGIN, true);

  const svg = svgElement("svg", {
    width: WIDTH,
    height: HEIGHT,
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    class: "roofline-view",
  });
  const path = pts
    .map((p) => `${MARGIN + xScale(p.arithmetic_intensity)},${MARGIN + yScale(p.attainable_flops)}`)
    .join(" ");
  svg.append(svgElement("polyline", { points: path, class: "roofline-line", fill: "none" }));

  const ridgeX = MARGIN + xScale(results.ridge_point);
  svg.append(
    svgElement("line", {
      x1: ridgeX,
      y1: MARGIN,
      x2: ridgeX,
      y2: HEIGHT - MARGIN,
      class: "ridge-marker",
    }),
  );
  const label = svgElement("text", { x: ridgeX + 4, y: MARGIN + 12, class: "ridge-label" });
  label.textContent = `ridge ${fmt(results.ridge_point)} FLOP/B`;
  svg.append(label);

  container.append(svg);
  const caption = document.createElement("div");
  caption.className = "roofline-caption";
  caption.textContent = `${results.platform} roofline (log-log)`;
  container.append(caption);
}
