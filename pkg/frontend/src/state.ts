/**
 * Explorer state <-> URL query string. The URL is the single source of truth
 * for a view, so copy-pasting a state URL reproduces it exactly.
 */

export type PhaseName = "prefill" | "decode";
export type ModeName = "optimistic" | "realistic";

export interface ExplorerState {
  models: string[];
  platforms: string[];
  batch: number;
  seqlen: number;
  phase: PhaseName;
  mode: ModeName;
  headroom: number;
  pinned: string[];
}

export const DEFAULT_STATE: ExplorerState = {
  models: ["Llama-3.1-70B"],
  platforms: [],
  batch: 1,
  seqlen: 131072,
  phase: "decode",
  mode: "realistic",
  headroom: 0.8,
  pinned: [],
};

export function stateToQuery(state: ExplorerState): string {
  const params = new URLSearchParams();
  params.set("models", state.models.join(","));
  if (state.platforms.length > 0) {
    params.set("platforms", state.platforms.join(","));
  }
  params.set("batch", String(state.batch));
  params.set("seqlen", String(state.seqlen));
  params.set("phase", state.phase);
  params.set("mode", state.mode);
  params.set("headroom", String(state.headroom));
  if (state.pinned.length > 0) {
    params.set("pinned", state.pinned.join("|"));
  }
  return params.toString();
}

export function stateFromQuery(query: string): ExplorerState {
  const params = new URLSearchParams(query);
  const list = (key: string, sep = ","): string[] => {
    const raw = params.get(key);
    return raw ? raw.split(sep).filter((v) => v.length > 0) : [];
  };
  const num = (key: string, fallback: number): number => {
    const raw = params.get(key);
    const value = raw === null ? NaN : Number(raw);
    return Number.isFinite(value) ? value : fallback;
  };
  const phase = params.get("phase");
  const mode = params.get("mode");
  return {
    models: list("models").length > 0 ? list("models") : [...DEFAULT_STATE.models],
    platforms: list("platforms"),
    batch: num("batch", DEFAULT_STATE.batch),
    seqlen: num("seqlen", DEFAULT_STATE.seqlen),
    phase: phase === "prefill" || phase === "decode" ? phase : DEFAULT_STATE.phase,
    mode: mode === "optimistic" || mode === "realistic" ? mode : DEFAULT_STATE.mode,
    headroom: num("headroom", DEFAULT_STATE.headroom),
    pinned: list("pinned", "|"),
  };
}

export function readStateFromLocation(): ExplorerState {
  return stateFromQuery(window.location.search.replace(/^\?/, ""));
}

/** Push the state into the URL without adding browser history entries. */
export function writeStateToLocation(state: ExplorerState): void {
  const query = stateToQuery(state);
  const url = query ? `${window.location.pathname}?${query}` : window.location.pathname;
  window.history.replaceState(null, "", url);
}
