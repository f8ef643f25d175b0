// DOM wiring for the one-view annotation app. All rendering reads from a
// single UiState; every server response or click produces a new state and
// a re-render. Probabilities and uncertainty come from the API verbatim.

import { ApiClient } from "./api.js";
import { learningCurveSvg } from "./chart.js";
import {
  UiState,
  applySubmitResult,
  canSubmit,
  emptyState,
  exportEnabled,
  pendingPayload,
  phase,
  select,
  unresolvedIds,
  withBatch,
  withConnection,
  withHistory,
  withSession,
} from "./state.js";

const api = new ApiClient("");
let state: UiState = emptyState();
const REFRESH_MS = 1500;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function probBars(probs: number[], schema: string[]): string {
  return probs
    .map((p, k) => {
      const pct = (100 * p).toFixed(1);
      return (
        `<div class="prob-row"><span class="prob-name">${escapeHtml(schema[k] ?? String(k))}</span>` +
        `<span class="prob-track"><span class="prob-fill" style="width:${pct}%"></span></span>` +
        `<span class="prob-val">${p.toFixed(3)}</span></div>`
      );
    })
    .join("");
}

function renderBatch(): void {
  const host = el<HTMLDivElement>("batch");
  const schema = state.session?.schema ?? [];
  if (!state.batch || state.batch.batch.length === 0) {
    const current = phase(state);
    host.innerHTML =
      current === "done"
        ? '<p class="notice">Pool exhausted or iteration budget reached — session complete. Export your labels below.</p>'
        : '<p class="notice">Waiting for the next batch (model is training)…</p>';
    return;
  }
  host.innerHTML = state.batch.batch
    .map((doc) => {
      const chosen = state.selections[doc.id];
      const flag = state.rowErrors[doc.id];
      const buttons = schema
        .map((name, k) => {
          const active = chosen === k ? " active" : "";
          return (
            `<button class="label-btn${active}" data-doc="${escapeHtml(doc.id)}" ` +
            `data-label="${k}">${escapeHtml(name)}</button>`
          );
        })
        .join("");
      const status = doc.labeled
        ? '<span class="tag tag-done">labeled</span>'
        : chosen !== undefined
          ? '<span class="tag tag-picked">selected</span>'
          : '<span class="tag">needs label</span>';
      return (
        `<article class="doc${flag ? " doc-error" : ""}" data-doc="${escapeHtml(doc.id)}">` +
        `<header><code>${escapeHtml(doc.id)}</code>` +
        `<span class="uncertainty" title="prediction entropy">H=${doc.uncertainty.toFixed(4)}</span>${status}</header>` +
        `<p class="text">${escapeHtml(doc.text)}</p>` +
        `<div class="probs">${probBars(doc.probs, schema)}</div>` +
        (flag ? `<p class="row-error">${escapeHtml(flag)}</p>` : "") +
        `<div class="labels">${buttons}</div></article>`
      );
    })
    .join("");
  for (const btn of host.querySelectorAll<HTMLButtonElement>(".label-btn")) {
    btn.addEventListener("click", () => {
      state = select(state, btn.dataset.doc ?? "", Number(btn.dataset.label));
      render();
    });
  }
}

function renderProgress(): void {
  const session = state.session;
  el("phase").textContent = phase(state);
  if (!session) return;
  const { t, labeled, pool_remaining } = session.progress;
  el("progress").textContent =
    `iteration ${t}` +
    (session.config.max_iterations ? ` / ${session.config.max_iterations}` : "") +
    ` · ${labeled} labeled · ${pool_remaining} in pool`;
  el("session-name").textContent = session.session_id;
}

function render(): void {
  el("banner").hidden = !state.connectionDown;
  renderProgress();
  renderBatch();
  el<HTMLButtonElement>("submit").disabled = !canSubmit(state);
  el("todo").textContent = state.batch
    ? `${unresolvedIds(state).length} of ${state.batch.batch.length} unlabeled`
    : "";
  const exportBtn = el<HTMLAnchorElement>("export");
  exportBtn.classList.toggle("enabled", exportEnabled(state));
  el("chart").innerHTML = learningCurveSvg(state.history);
}

async function refresh(): Promise<void> {
  try {
    const [session, batch, metrics] = await Promise.all([
      api.getSession(),
      api.getBatch(),
      api.getMetrics(),
    ]);
    state = withConnection(
      withHistory(withBatch(withSession(state, session), batch), metrics.history),
      true,
    );
  } catch {
    state = withConnection(state, false);
  }
  render();
}

async function submit(): Promise<void> {
  if (!canSubmit(state)) return;
  el<HTMLButtonElement>("submit").disabled = true;
  try {
    const { result } = await api.postLabels(pendingPayload(state));
    state = applySubmitResult(state, result);
  } catch {
    state = withConnection(state, false);
  }
  await refresh();
}

function loop(): void {
  void refresh().finally(() => {
    window.setTimeout(loop, REFRESH_MS);
  });
}

el("submit").addEventListener("click", () => void submit());
el<HTMLAnchorElement>("export").href = api.exportUrl();
loop();
