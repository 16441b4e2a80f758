// Query form state: defaults, clamping and URL round-tripping.
//
// The UI is stateless beyond this form and the last response; encoding
// the form into the location hash means a refresh reproduces the view.

export interface QueryForm {
  query: string;
  n: number;
  kg: number;
  kc: number;
  lambda: number;
  alpha: number;
  beta: number;
  variant: "avg" | "max";
  td_ms: number;
  tc_ms: number;
}

export const SLIDER_STEP = 0.05;
export const N_MIN = 1;
export const N_MAX = 40;

// alpha stays at 0 by default: relevance from document content only,
// the setting the engine's reference experiments fix it to
export function defaultForm(): QueryForm {
  return {
    query: "",
    n: 10,
    kg: 2,
    kc: 2,
    lambda: 0.8,
    alpha: 0.0,
    beta: 0.8,
    variant: "avg",
    td_ms: 0,
    tc_ms: 0,
  };
}

export function clamp01(x: number): number {
  if (!Number.isFinite(x)) return 0;
  const snapped = Math.round(x / SLIDER_STEP) * SLIDER_STEP;
  return Math.min(1, Math.max(0, Number(snapped.toFixed(2))));
}

export function clampN(x: number): number {
  if (!Number.isFinite(x)) return N_MIN;
  return Math.min(N_MAX, Math.max(N_MIN, Math.round(x)));
}

export function normalizeForm(raw: Partial<QueryForm>): QueryForm {
  const d = defaultForm();
  return {
    query: typeof raw.query === "string" ? raw.query : d.query,
    n: clampN(raw.n ?? d.n),
    kg: clampN(raw.kg ?? d.kg),
    kc: clampN(raw.kc ?? d.kc),
    lambda: clamp01(raw.lambda ?? d.lambda),
    alpha: clamp01(raw.alpha ?? d.alpha),
    beta: clamp01(raw.beta ?? d.beta),
    variant: raw.variant === "max" ? "max" : "avg",
    td_ms: Math.max(0, raw.td_ms ?? 0),
    tc_ms: Math.max(0, raw.tc_ms ?? 0),
  };
}

export function encodeForm(form: QueryForm): string {
  const p = new URLSearchParams();
  const d = defaultForm();
  for (const key of Object.keys(d) as (keyof QueryForm)[]) {
    if (form[key] !== d[key]) p.set(key, String(form[key]));
  }
  return p.toString();
}

export function decodeForm(encoded: string): QueryForm {
  const p = new URLSearchParams(encoded);
  const raw: Partial<QueryForm> = {};
  if (p.has("query")) raw.query = p.get("query")!;
  if (p.has("variant")) raw.variant = p.get("variant") === "max" ? "max" : "avg";
  for (const key of ["n", "kg", "kc", "lambda", "alpha", "beta", "td_ms", "tc_ms"] as const) {
    if (p.has(key)) {
      const value = Number(p.get(key));
      if (Number.isFinite(value)) raw[key] = value;
    }
  }
  return normalizeForm(raw);
}
