/**
 * Pairwise equivalency heatmap: one table cell per platform pair, showing the
 * service's ratio with two decimal places.
 */

import { fixed2 } from "./format.js";
import type { EquivResults } from "./types.js";

export function renderHeatmap(container: HTMLElement, results: EquivResults): void {
  container.replaceChildren();
  const table = document.createElement("table");
  table.className = "equiv-heatmap";

  const head = document.createElement("tr");
  head.append(document.createElement("th"));
  for (const name of results.platforms) {
    const th = document.createElement("th");
    th.textContent = name;
    head.append(th);
  }
  table.append(head);

  results.values.forEach((row, i) => {
    const tr = document.createElement("tr");
    const th = document.createElement("th");
    th.textContent = results.platforms[i] ?? "";
    tr.append(th);
    row.forEach((value, j) => {
      const td = document.createElement("td");
      td.textContent = fixed2(value);
      td.title = `${results.platforms[i]} vs ${results.platforms[j]}: ${value}`;
      // shade by log-magnitude so 1.0 is neutral
      const tone = Math.max(-1, Math.min(1, Math.log10(value)));
      td.style.backgroundColor = tone >= 0
        ? `rgba(214, 92, 64, ${Math.abs(tone)})`
        : `rgba(64, 128, 214, ${Math.abs(tone)})`;
      tr.append(td);
    });
    table.append(tr);
  });
  container.append(table);
}
