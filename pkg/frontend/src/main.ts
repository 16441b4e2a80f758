// Explorer wiring: form inputs, debounced re-query, ranked list, detail
// panel and the neighborhood canvas. Every number on screen comes from
// the server; the client does no score arithmetic of its own.

import { ApiClient, ServiceError } from "./api.js";
import { DEBOUNCE_MS, debounce } from "./debounce.js";
import { GraphView } from "./graphview.js";
import { decodeForm, encodeForm, normalizeForm, QueryForm } from "./state.js";
import type { DiversifyResponse } from "./types.js";

const api = new ApiClient();
let form: QueryForm = decodeForm(location.hash.slice(1));
let lastResponse: DiversifyResponse | null = null;
let shownDoc: number | null = null;

const $ = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;

const queryInput = $<HTMLInputElement>("query");
const statusLine = $<HTMLElement>("status");
const resultList = $<HTMLElement>("results");
const detailPanel = $<HTMLElement>("detail");
const scoreLine = $<HTMLElement>("score-line");
const view = new GraphView($<HTMLCanvasElement>("graph"));

interface SliderSpec {
  key: "lambda" | "alpha" | "beta";
  hint: string;
}

const sliders: SliderSpec[] = [
  { key: "lambda", hint: "relevance vs result dissimilarity" },
  {
    key: "alpha",
    hint: "graph vs text inside relevance (reference setting keeps this at 0)",
  },
  { key: "beta", hint: "graph vs text inside dissimilarity" },
];

function bindControls(): void {
  queryInput.value = form.query;
  queryInput.addEventListener("change", () => {
    form = normalizeForm({ ...form, query: queryInput.value });
    submitNow();
  });

  for (const { key, hint } of sliders) {
    const input = $<HTMLInputElement>(key);
    const label = $<HTMLElement>(`${key}-val`);
    input.title = hint;
    input.value = String(form[key]);
    label.textContent = form[key].toFixed(2);
    input.addEventListener("input", () => {
      form = normalizeForm({ ...form, [key]: Number(input.value) });
      label.textContent = form[key].toFixed(2);
      submitDebounced();
    });
  }

  for (const key of ["n", "kg", "kc", "td_ms", "tc_ms"] as const) {
    const input = $<HTMLInputElement>(key);
    input.value = String(form[key]);
    input.addEventListener("change", () => {
      form = normalizeForm({ ...form, [key]: Number(input.value) });
      input.value = String(form[key]);
      submitDebounced();
    });
  }

  const variant = $<HTMLSelectElement>("variant");
  variant.value = form.variant;
  variant.addEventListener("change", () => {
    form = normalizeForm({ ...form, variant: variant.value as "avg" | "max" });
    submitDebounced();
  });

  $<HTMLButtonElement>("go").addEventListener("click", submitNow);
}

async function submitNow(): Promise<void> {
  if (!form.query.trim()) {
    statusLine.textContent = "enter a query or a numeric document id";
    return;
  }
  location.hash = encodeForm(form);
  statusLine.textContent = "searching...";
  try {
    const res = await api.diversify(form);
    lastResponse = res;
    renderResults(res);
    statusLine.textContent =
      `center ${res.center_id}; greedy ${res.timings_ms.greedy.toFixed(0)} ms, ` +
      `hill-climb ${res.timings_ms.hillclimb.toFixed(0)} ms`;
    if (shownDoc !== null && !res.items.some((i) => i.id === shownDoc)) {
      detailPanel.innerHTML = "<p class='hint'>item left the result; pick another</p>";
      shownDoc = null;
    }
    const nb = await api.neighborhood(res.center_id, 2);
    view.show(nb, res.center_id, res.items.map((i) => i.id));
  } catch (err) {
    if (err instanceof DOMException && err.name === "AbortError") return;
    lastResponse = null;
    resultList.innerHTML = "";
    scoreLine.textContent = "";
    view.clear();
    statusLine.textContent =
      err instanceof ServiceError && err.code === "QUERY_UNRESOLVED"
        ? "no matching center for that query"
        : `error: ${err instanceof Error ? err.message : String(err)}`;
  }
}

const submitDebounced = debounce(() => void submitNow(), DEBOUNCE_MS);

function renderResults(res: DiversifyResponse): void {
  scoreLine.textContent = `set score ${res.score.toFixed(6)} (lower is better)`;
  resultList.innerHTML = "";
  res.items.forEach((item, rank) => {
    const li = document.createElement("li");
    const hops = item.hops_from_q === null ? "-" : String(item.hops_from_q);
    li.innerHTML =
      `<span class="rank">${rank + 1}</span>` +
      `<span class="title">${item.title}</span>` +
      `<span class="nums">rel ${item.rel_distance.toFixed(3)} | ` +
      `gain ${item.marginal_gain.toFixed(4)} | ${hops} hops</span>`;
    li.addEventListener("click", () => void inspect(item.id));
    resultList.appendChild(li);
  });
}

async function inspect(id: number): Promise<void> {
  if (!lastResponse || !lastResponse.items.some((i) => i.id === id)) {
    detailPanel.innerHTML = "<p class='hint'>stale item; re-run the query</p>";
    return;
  }
  shownDoc = id;
  try {
    const doc = await api.doc(id);
    const item = lastResponse.items.find((i) => i.id === id)!;
    const hops = item.hops_from_q === null ? "unreachable" : `${item.hops_from_q} hops`;
    const terms = doc.top_terms
      .map(([t, w]) => `<li>${t} <span class="nums">${w.toFixed(2)}</span></li>`)
      .join("");
    detailPanel.innerHTML =
      `<h3>[${doc.id}] ${doc.title}</h3>` +
      `<p>${hops} from the center; ${doc.out_links.length} out-links</p>` +
      `<h4>top terms</h4><ul class="terms">${terms}</ul>`;
  } catch (err) {
    detailPanel.innerHTML = `<p class='hint'>could not load document: ${
      err instanceof Error ? err.message : String(err)
    }</p>`;
  }
}

bindControls();
view.pickHandler((id) => void inspect(id));
if (form.query.trim()) void submitNow();
