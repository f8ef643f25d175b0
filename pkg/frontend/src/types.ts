// Wire types for the annotation service API. These mirror the server's
// JSON payloads exactly; the UI renders them verbatim and never recomputes
// probabilities or uncertainty on the client.

export interface SessionConfig {
  batch_size: number;
  max_iterations: number | null;
  strategy: string;
  entropy_mode: string;
}

export interface Progress {
  t: number;
  labeled: number;
  pool_remaining: number;
}

export interface SessionView {
  session_id: string;
  schema: string[];
  config: SessionConfig;
  progress: Progress;
  done: boolean;
  error: string | null;
}

export interface BatchDoc {
  id: string;
  text: string;
  probs: number[];
  uncertainty: number;
  labeled: boolean;
}

export type BatchStatus = "pending" | "training" | "done";

export interface BatchView {
  t: number;
  batch: BatchDoc[];
  done: boolean;
  status: BatchStatus;
}

export interface HistoryRecord {
  t: number;
  labeled: number;
  macro_f1: number;
  micro_f1: number;
  accuracy: number;
  mean_train_loss: number;
  eval_on?: string;
}

export interface MetricsView {
  history: HistoryRecord[];
}

export interface RowError {
  code: number;
  message: string;
}

export interface SubmitResult {
  accepted: string[];
  errors: Record<string, RowError>;
  committed: boolean;
  t: number;
}
