// Wire types of the ranking service; field names match the HTTP API exactly.

export interface DiversifyRequest {
  query?: string;
  center_id?: number;
  n: number;
  kg: number;
  kc: number;
  lambda: number;
  alpha: number;
  beta: number;
  variant: "avg" | "max";
  td_ms: number;
  tc_ms: number | null;
}

export interface ResultItem {
  id: number;
  title: string;
  rel_distance: number;
  marginal_gain: number;
  hops_from_q: number | null;
}

export interface DiversifyResponse {
  center_id: number;
  items: ResultItem[];
  score: number;
  timings_ms: { greedy: number; hillclimb: number };
}

export interface DocDetail {
  id: number;
  key: string;
  title: string;
  out_links: number[];
  top_terms: [string, number][];
}

export interface NeighborhoodNode {
  id: number;
  title: string;
  hops: number;
}

export interface Neighborhood {
  nodes: NeighborhoodNode[];
  edges: { source: number; target: number }[];
}

export interface ApiError {
  error: { code: string; message: string };
}
