// Payload shapes mirroring the search service JSON. The UI never computes
// relevance itself: every score and weight rendered comes verbatim from
// these payloads.

export interface Contribution {
  facet: string;
  gamma: number;
  weight: number;
  regularizer: number;
}

export interface Answer {
  entity: string;
  score: number;
  contributions: Contribution[];
}

export interface MetaPathFacet {
  text: string;
  weight: number;
  regularizer: number;
}

export interface PropertyFacet {
  attribute: string;
  value: string;
  weight: number;
}

export interface SearchResponse {
  answers: Answer[];
  facets: {
    meta_paths: MetaPathFacet[];
    properties: PropertyFacet[];
  };
  timing_ms: number;
}

export interface EntitySuggestion {
  label: string;
  type: string | null;
}

export interface PropertyPair {
  attribute: string;
  value: string;
}

export interface EntityDetails {
  label: string;
  properties: PropertyPair[];
  out_edges: { relation: string; target: string }[];
  in_edges: { relation: string; source: string }[];
  truncated: { properties: boolean; out_edges: boolean; in_edges: boolean };
}

export interface Health {
  status: string;
  kg: { entities: number; edges: number };
  index_loaded: boolean;
}

export type Variant = "full" | "np";

export interface ModelParams {
  alpha_mp: number;
  alpha_prop: number;
  beta: number;
  max_len: number;
  top_mp: number;
  k: number;
}

export const DEFAULT_PARAMS: ModelParams = {
  alpha_mp: 5,
  alpha_prop: 2,
  beta: 10,
  max_len: 3,
  top_mp: 3,
  k: 10,
};

export interface SearchRequestBody {
  query: string;
  examples: [string, string][];
  k?: number;
  params?: {
    alpha_mp?: number;
    alpha_prop?: number;
    beta?: number;
    max_len?: number;
    top_mp?: number;
  };
  variant?: Variant;
}
