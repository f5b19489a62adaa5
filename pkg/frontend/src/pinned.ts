/**
 * Pinned-scenario tray: the side-by-side what-if loop. A pin freezes one
 * scenario's key numbers (as returned by the service) so the next query can
 * be compared against it.
 */

import { fmt } from "./format.js";
import type { ScenarioEstimate } from "./types.js";

export interface PinnedScenario {
  key: string;
  label: string;
  latency_s: number | null;
  energy_j: number | null;
}

export function pinKey(e: ScenarioEstimate): string {
  return [
    e.platform,
    e.model,
    e.point.batch,
    e.point.context_len,
    e.mode,
    e.plan.tp,
    e.plan.pp,
  ].join(":");
}

export function toPinned(e: ScenarioEstimate, phase: "prefill" | "decode"): PinnedScenario {
  const latency = phase === "prefill" ? e.ttft_s : e.tpot_s;
  const energy =
    phase === "prefill" ? e.energy_per_input_token_j : e.energy_per_output_token_j;
  return {
    key: pinKey(e),
    label: `${e.platform} B=${e.point.batch} ${e.mode} tp=${e.plan.tp} pp=${e.plan.pp}`,
    latency_s: latency,
    energy_j: energy,
  };
}

export function renderPinnedTray(
  container: HTMLElement,
  pins: PinnedScenario[],
  onRemove: (key: string) => void,
): void {
  container.replaceChildren();
  if (pins.length === 0) {
    container.textContent = "no pinned scenarios";
    return;
  }
  const list = document.createElement("ul");
  list.className = "pinned-tray";
  for (const pin of pins) {
    const item = document.createElement("li");
    item.textContent = `${pin.label}: ${fmt(pin.latency_s)} s, ${fmt(pin.energy_j)} J/token `;
    const remove = document.createElement("button");
    remove.textContent = "unpin";
    remove.addEventListener("click", () => onRemove(pin.key));
    item.append(remove);
    list.append(item);
  }
  container.append(list);
}
