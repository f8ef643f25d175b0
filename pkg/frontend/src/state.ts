// Pure view state: the UI is a function of the last server responses plus
// the annotator's unsent selections. Reducers never mutate their input,
// and a reload can always rebuild the exact view from fresh GETs because
// nothing client-side outlives a commit.

import type {
  BatchView,
  HistoryRecord,
  SessionView,
  SubmitResult,
} from "./types.js";

export type Phase = "connecting" | "training" | "labeling" | "done" | "error";

export interface UiState {
  session: SessionView | null;
  batch: BatchView | null;
  history: HistoryRecord[];
  selections: Record<string, number>;
  rowErrors: Record<string, string>;
  connectionDown: boolean;
}

export function emptyState(): UiState {
  return {
    session: null,
    batch: null,
    history: [],
    selections: {},
    rowErrors: {},
    connectionDown: false,
  };
}

export function phase(state: UiState): Phase {
  if (state.session?.error) return "error";
  if (!state.session || (!state.batch && !state.session.done)) return "connecting";
  if (state.session.done || state.batch?.status === "done") return "done";
  if (state.batch?.status === "training") return "training";
  return "labeling";
}

export function withSession(state: UiState, session: SessionView): UiState {
  return { ...state, session };
}

export function withHistory(state: UiState, history: HistoryRecord[]): UiState {
  return { ...state, history };
}

/** Adopt a batch view; selections and row flags for departed docs drop. */
export function withBatch(state: UiState, batch: BatchView): UiState {
  const ids = new Set(batch.batch.map((d) => d.id));
  const selections: Record<string, number> = {};
  for (const [id, label] of Object.entries(state.selections)) {
    if (ids.has(id)) selections[id] = label;
  }
  const rowErrors: Record<string, string> = {};
  for (const [id, msg] of Object.entries(state.rowErrors)) {
    if (ids.has(id)) rowErrors[id] = msg;
  }
  return { ...state, batch, selections, rowErrors };
}

export function withConnection(state: UiState, ok: boolean): UiState {
  return { ...state, connectionDown: !ok };
}

/** Record one selection; ignored unless the doc is in the pending batch. */
export function select(state: UiState, docId: string, label: number): UiState {
  if (!state.batch?.batch.some((d) => d.id === docId)) return state;
  const k = state.session?.schema.length ?? 0;
  if (label < 0 || label >= k) return state;
  const rowErrors = { ...state.rowErrors };
  delete rowErrors[docId];
  return {
    ...state,
    selections: { ...state.selections, [docId]: label },
    rowErrors,
  };
}

/** Docs still needing a selection (not labeled server-side, none chosen). */
export function unresolvedIds(state: UiState): string[] {
  if (!state.batch) return [];
  return state.batch.batch
    .filter((d) => !d.labeled && !(d.id in state.selections))
    .map((d) => d.id);
}

/** Submittable only when every pending doc has exactly one selected label. */
export function canSubmit(state: UiState): boolean {
  return (
    phase(state) === "labeling" &&
    state.batch !== null &&
    state.batch.batch.length > 0 &&
    unresolvedIds(state).length === 0 &&
    Object.keys(state.selections).length > 0
  );
}

export function pendingPayload(state: UiState): Record<string, number> {
  return { ...state.selections };
}

/**
 * Fold a POST /labels response back in: accepted rows leave the local
 * selection set, rejected rows keep their selection and gain a flag, so
 * one 409 never wipes the annotator's other choices.
 */
export function applySubmitResult(state: UiState, result: SubmitResult): UiState {
  const selections = { ...state.selections };
  for (const id of result.accepted) {
    delete selections[id];
  }
  const rowErrors = { ...state.rowErrors };
  for (const [id, err] of Object.entries(result.errors)) {
    rowErrors[id] = `${err.code}: ${err.message}`;
  }
  return { ...state, selections, rowErrors };
}

export function exportEnabled(state: UiState): boolean {
  return phase(state) === "done";
}
