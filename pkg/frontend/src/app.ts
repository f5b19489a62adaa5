/**
 * Explorer wiring: state lives in the URL, every control mutation re-queries
 * the service (debounced for sliders), and stale sweep responses are dropped
 * by sequence number.
 */

import { ApiClient, ApiError } from "./api.js";
import { renderFrontierView } from "./frontier-view.js";
import { renderHeatmap } from "./heatmap.js";
import { PinnedScenario, pinKey, renderPinnedTray, toPinned } from "./pinned.js";
import { renderRooflineView } from "./roofline-view.js";
import { renderTraceView } from "./trace-view.js";
import { RequestGate, debounce } from "./requests.js";
import {
  ExplorerState,
  readStateFromLocation,
  writeStateToLocation,
} from "./state.js";

const DEBOUNCE_MS = 250;

// Byte widths the SRAM rack platform deploys large models with; forwarded to
// the service untouched.
const DEPLOYMENT_OVERRIDES = {
  Groq: { bytes_per_param: 1, bytes_per_kv_elem: 1, bytes_per_act: 1 },
};

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) {
    throw new Error(`missing element #${id}`);
  }
  return found as T;
}

function showError(container: HTMLElement, error: unknown): void {
  const div = document.createElement("div");
  div.className = "api-error";
  if (error instanceof ApiError) {
    div.textContent = `${error.body.code}: ${error.body.message}`;
  } else {
    div.textContent = String(error);
  }
  container.replaceChildren(div);
}

export function startApp(api: ApiClient = new ApiClient()): void {
  let state: ExplorerState = readStateFromLocation();
  const gate = new RequestGate();

  const frontierEl = el<HTMLDivElement>("frontier");
  const pinnedEl = el<HTMLDivElement>("pinned");
  const rooflineEl = el<HTMLDivElement>("roofline");
  const heatmapEl = el<HTMLDivElement>("heatmap");
  const traceEl = el<HTMLDivElement>("trace");
  let pins: PinnedScenario[] = [];

  const batchSlider = el<HTMLInputElement>("batch");
  const seqlenSlider = el<HTMLInputElement>("seqlen");
  const phaseToggle = el<HTMLSelectElement>("phase");
  const modeToggle = el<HTMLSelectElement>("mode");
  const platformSelect = el<HTMLSelectElement>("roofline-platform");
  const metricSelect = el<HTMLSelectElement>("equiv-metric");
  const traceInput = el<HTMLInputElement>("trace-file");

  function syncControls(): void {
    batchSlider.value = String(state.batch);
    seqlenSlider.value = String(state.seqlen);
    phaseToggle.value = state.phase;
    modeToggle.value = state.mode;
  }

  function refreshPins(): void {
    renderPinnedTray(pinnedEl, pins, (key) => {
      pins = pins.filter((p) => p.key !== key);
      state = { ...state, pinned: pins.map((p) => p.key) };
      writeStateToLocation(state);
      refreshPins();
    });
  }

  async function refreshFrontier(): Promise<void> {
    const token = gate.next();
    try {
      const envelope = await api.postSweep({
        models: state.models,
        batches: [state.batch],
        seqlens: [state.seqlen],
        headroom: state.headroom,
        overrides: DEPLOYMENT_OVERRIDES,
        ...(state.platforms.length > 0 ? { platforms: state.platforms } : {}),
      });
      if (!gate.isCurrent(token)) {
        return; // a newer query superseded this response
      }
      renderFrontierView(
        frontierEl,
        envelope.results,
        state.phase,
        state.mode,
        state.batch,
        (estimate) => {
          if (!pins.some((p) => p.key === pinKey(estimate))) {
            pins = [...pins, toPinned(estimate, state.phase)];
            state = { ...state, pinned: pins.map((p) => p.key) };
            writeStateToLocation(state);
            refreshPins();
          }
        },
      );
    } catch (error) {
      if (gate.isCurrent(token)) {
        showError(frontierEl, error);
      }
    }
  }

  async function refreshRoofline(): Promise<void> {
    try {
      const envelope = await api.getRoofline(platformSelect.value || "H100");
      renderRooflineView(rooflineEl, envelope.results);
    } catch (error) {
      showError(rooflineEl, error);
    }
  }

  async function refreshHeatmap(): Promise<void> {
    try {
      const envelope = await api.getEquiv(metricSelect.value || "power");
      renderHeatmap(heatmapEl, envelope.results);
    } catch (error) {
      showError(heatmapEl, error);
    }
  }

  const debouncedFrontier = debounce(() => {
    writeStateToLocation(state);
    void refreshFrontier();
  }, DEBOUNCE_MS);

  batchSlider.addEventListener("input", () => {
    state = { ...state, batch: Number(batchSlider.value) };
    debouncedFrontier();
  });
  seqlenSlider.addEventListener("input", () => {
    state = { ...state, seqlen: Number(seqlenSlider.value) };
    debouncedFrontier();
  });
  phaseToggle.addEventListener("change", () => {
    state = { ...state, phase: phaseToggle.value as ExplorerState["phase"] };
    writeStateToLocation(state);
    void refreshFrontier();
  });
  modeToggle.addEventListener("change", () => {
    state = { ...state, mode: modeToggle.value as ExplorerState["mode"] };
    writeStateToLocation(state);
    void refreshFrontier();
  });
  platformSelect.addEventListener("change", () => void refreshRoofline());
  metricSelect.addEventListener("change", () => void refreshHeatmap());
  traceInput.addEventListener("change", async () => {
    const file = traceInput.files?.[0];
    if (!file) {
      return;
    }
    try {
      const envelope = await api.postTrace(file, file.name);
      renderTraceView(traceEl, envelope.results);
    } catch (error) {
      showError(traceEl, error);
    }
  });

  void (async () => {
    try {
      const platforms = await api.getPlatforms();
      for (const p of platforms.results) {
        const option = document.createElement("option");
        option.value = p.name;
        option.textContent = p.name;
        platformSelect.append(option);
      }
    } catch {
      // roofline platform list degrades to the default entry
    }
    syncControls();
    refreshPins();
    await Promise.all([refreshFrontier(), refreshRoofline(), refreshHeatmap()]);
  })();
}
