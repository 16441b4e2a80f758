// HTTP client for the ranking service. One request in flight at a time:
// a newer submission aborts the older one client-side.

import type {
  ApiError,
  DiversifyRequest,
  DiversifyResponse,
  DocDetail,
  Neighborhood,
} from "./types.js";
import type { QueryForm } from "./state.js";

export class ServiceError extends Error {
  constructor(public code: string, message: string) {
    super(message);
  }
}

export function formToRequest(form: QueryForm): DiversifyRequest {
  const req: DiversifyRequest = {
    n: form.n,
    kg: form.kg,
    kc: form.kc,
    lambda: form.lambda,
    alpha: form.alpha,
    beta: form.beta,
    variant: form.variant,
    td_ms: form.td_ms,
    tc_ms: form.tc_ms > 0 ? form.tc_ms : null,
  };
  const q = form.query.trim();
  if (/^\d+$/.test(q)) {
    req.center_id = Number(q);
  } else {
    req.query = q;
  }
  return req;
}

async function parseError(res: Response): Promise<ServiceError> {
  try {
    const body = (await res.json()) as ApiError;
    return new ServiceError(body.error.code, body.error.message);
  } catch {
    return new ServiceError("HTTP_" + res.status, res.statusText);
  }
}

export class ApiClient {
  private inflight: AbortController | null = null;

  constructor(private base: string = "") {}

  async diversify(form: QueryForm): Promise<DiversifyResponse> {
    if (this.inflight) this.inflight.abort();
    const ctl = new AbortController();
    this.inflight = ctl;
    try {
      const res = await fetch(this.base + "/api/diversify", {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(formToRequest(form)),
        signal: ctl.signal,
      });
      if (!res.ok) throw await parseError(res);
      return (await res.json()) as DiversifyResponse;
    } finally {
      if (this.inflight === ctl) this.inflight = null;
    }
  }

  async doc(id: number): Promise<DocDetail> {
    const res = await fetch(`${this.base}/api/doc/${id}`);
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as DocDetail;
  }

  async neighborhood(id: number, hops: number): Promise<Neighborhood> {
    const res = await fetch(`${this.base}/api/neighborhood?id=${id}&hops=${hops}`);
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as Neighborhood;
  }
}
