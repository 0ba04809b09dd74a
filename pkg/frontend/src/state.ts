import { DEFAULT_PARAMS, type ModelParams, type SearchResponse, type Variant } from "./types.js";

export interface SessionState {
  query: string;
  examples: [string, string][];
  params: ModelParams;
  variant: Variant;
  /** Snapshot of the last response and the query it answered. Frozen:
   * editing the example list must never mutate a displayed response. */
  lastResponse: SearchResponse | null;
  lastQuery: string | null;
}

export function initialState(): SessionState {
  return {
    query: "",
    examples: [],
    params: { ...DEFAULT_PARAMS },
    variant: "full",
    lastResponse: null,
    lastQuery: null,
  };
}

function deepFreeze<T>(value: T): T {
  if (value !== null && typeof value === "object" && !Object.isFrozen(value)) {
    Object.freeze(value);
    for (const key of Object.getOwnPropertyNames(value)) {
      deepFreeze((value as Record<string, unknown>)[key]);
    }
  }
  return value;
}

/** Duplicate pairs are allowed: the model counts repeated examples. */
export function addExample(state: SessionState, source: string, target: string): boolean {
  const s = source.trim();
  const t = target.trim();
  if (!s || !t || s === t) {
    return false;
  }
  state.examples.push([s, t]);
  return true;
}

export function removeExample(state: SessionState, index: number): void {
  if (index >= 0 && index < state.examples.length) {
    state.examples.splice(index, 1);
  }
}

export function applyResponse(
  state: SessionState,
  query: string,
  response: SearchResponse,
): void {
  state.lastResponse = deepFreeze(response);
  state.lastQuery = query;
}

export function requestBody(state: SessionState) {
  const overrides: Record<string, number> = {};
  for (const name of ["alpha_mp", "alpha_prop", "beta", "max_len", "top_mp"] as const) {
    if (state.params[name] !== DEFAULT_PARAMS[name]) {
      overrides[name] = state.params[name];
    }
  }
  return {
    query: state.query.trim(),
    examples: state.examples.map(([s, t]) => [s, t] as [string, string]),
    ...(state.params.k !== DEFAULT_PARAMS.k ? { k: state.params.k } : {}),
    ...(Object.keys(overrides).length ? { params: overrides } : {}),
    variant: state.variant,
  };
}
