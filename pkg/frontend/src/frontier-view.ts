/**
 * Latency vs energy-per-token scatter with the pareto frontier polyline.
 * Optimistic points draw as squares, realistic points as circles; hovering a
 * point reveals its platform, plan, device count, and energy. Infeasible
 * platforms are listed with the service's reasons. Every number shown is a
 * verbatim service response field.
 */

import { fmt } from "./format.js";
import { logScale, svgElement } from "./svg.js";
import type { ModeName, PhaseName } from "./state.js";
import type { ScenarioEstimate, SweepResults } from "./types.js";

export const WIDTH = 640;
export const HEIGHT = 420;
const MARGIN = 40;

export function axesFor(phase: PhaseName): { x: keyof ScenarioEstimate; y: keyof ScenarioEstimate } {
  return phase === "prefill"
    ? { x: "ttft_s", y: "energy_per_input_token_j" }
    : { x: "tpot_s", y: "energy_per_output_token_j" };
}

export function frontierKey(phase: PhaseName, mode: ModeName): string {
  return `${phase}_${mode}`;
}

/** Platforms with a point on the selected frontier. */
export function frontierPlatforms(results: SweepResults, phase: PhaseName, mode: ModeName): string[] {
  const frontier = results.frontiers[frontierKey(phase, mode)];
  if (!frontier) {
    return [];
  }
  return [...new Set(frontier.points.map((p) => p.platform))].sort();
}

function feasiblePoints(
  results: SweepResults,
  phase: PhaseName,
  mode: ModeName,
  batch: number,
): { x: number; y: number; e: ScenarioEstimate }[] {
  const { x: xField, y: yField } = axesFor(phase);
  const out: { x: number; y: number; e: ScenarioEstimate }[] = [];
  for (const e of results.estimates) {
    if (!e.feasible || e.mode !== mode || e.point.batch !== batch) {
      continue;
    }
    const x = e[xField] as number | null;
    const y = e[yField] as number | null;
    if (x !== null && y !== null) {
      out.push({ x, y, e });
    }
  }
  return out;
}

export function renderFrontierView(
  container: HTMLElement,
  results: SweepResults,
  phase: PhaseName,
  mode: ModeName,
  batch: number,
  onPin?: (estimate: ScenarioEstimate) => void,
): void {
  container.replaceChildren();
  const points = feasiblePoints(results, phase, mode, batch);
  const frontier = results.frontiers[frontierKey(phase, mode)];
  const frontierPts = (frontier?.points ?? []).filter((p) => p.mode === mode);

  const svg = svgElement("svg", {
    width: WIDTH,
    height: HEIGHT,
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    class: "frontier-view",
  });

  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const xScale = logScale(Math.min(...xs, 1e-9), Math.max(...xs, 1e-8), WIDTH - 2 * MARGIN);
  const yScale = logScale(Math.min(...ys, 1e-9), Math.max(...ys, 1e-8), HEIGHT - 2 * MARGIN, true);

  if (frontierPts.length > 0) {
    const path = frontierPts
      .map((p) => `${MARGIN + xScale(p.x)},${MARGIN + yScale(p.y)}`)
      .join(" ");
    svg.append(
      svgElement("polyline", { points: path, class: "frontier-line", fill: "none" }),
    );
  }

  for (const { x, y, e } of points) {
    const cx = MARGIN + xScale(x);
    const cy = MARGIN + yScale(y);
    const glyph =
      mode === "optimistic"
        ? svgElement("rect", { x: cx - 4, y: cy - 4, width: 8, height: 8, class: "pt-optimistic" })
        : svgElement("circle", { cx, cy, r: 4.5, class: "pt-realistic" });
    glyph.setAttribute("data-platform", e.platform);
    const title = svgElement("title");
    title.textContent =
      `${e.platform} tp=${fmt(e.plan.tp)} pp=${fmt(e.plan.pp)} ` +
      `n=${fmt(e.plan.n_devices)} energy/token=${fmt(y)} J`;
    glyph.append(title);
    if (onPin) {
      glyph.addEventListener("click", () => onPin(e));
    }
    svg.append(glyph);
  }
  container.append(svg);

  const legend = document.createElement("div");
  legend.className = "frontier-members";
  legend.textContent = `frontier: ${frontierPlatforms(results, phase, mode).join(", ") || "(none)"}`;
  container.append(legend);

  const infeasible = results.estimates.filter((e) => !e.feasible && e.mode === mode);
  if (infeasible.length > 0) {
    const list = document.createElement("ul");
    list.className = "infeasible-list";
    const seen = new Set<string>();
    for (const e of infeasible) {
      const key = `${e.platform}: ${e.reason ?? "infeasible"}`;
      if (seen.has(key)) {
        continue;
      }
      seen.add(key);
      const item = document.createElement("li");
      item.textContent = key;
      list.append(item);
    }
    container.append(list);
  }
}
