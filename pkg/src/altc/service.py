"""HTTP annotation service backing the human-oracle labeling loop.

A session wraps the acquisition loop in a background thread with a
:class:`~altc.active_learning.HumanOracle`; HTTP handlers feed annotator
submissions into the oracle and read immutable state snapshots, so reads
stay consistent while retraining runs.  Every accepted label is appended
to a journal file before it is applied, and replaying the journal on
startup reconstructs the exact session state (the loop itself is
deterministic, so batches recompute identically).

Endpoints (all JSON over HTTP/1.1):

    GET  /session   session id, schema, config, progress
    GET  /batch     pending batch: id, text, probabilities, uncertainty
    POST /labels    {"labels": {doc_id: label}}; commits when complete
    POST /commit    explicit commit attempt; 422 while labels are missing
    GET  /metrics   per-iteration history records
    GET  /export    labeled set download (JSONL)

Anything else is served from the static UI directory when one is given.
"""

from __future__ import annotations

import json
import logging
import mimetypes
import os
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .active_learning import (
    AcquisitionConfig,
    ActiveLearningState,
    HumanOracle,
    run_loop,
)
from .corpus import Document, LabeledDocument, LabelSchema
from .errors import SessionCancelledError
from .linear_model import TrainConfig
from .pipeline import Featurizer

logger = logging.getLogger(__name__)

_COMMIT_TIMEOUT_S = 300.0


class AnnotationSession:
    """One human labeling session: loop thread, oracle, journal, snapshots."""

    def __init__(
        self,
        session_id: str,
        seed_labeled: list[LabeledDocument],
        pool: list[Document],
        schema: LabelSchema,
        acq_cfg: AcquisitionConfig,
        train_cfg: TrainConfig,
        featurizer: Featurizer,
        eval_set: list[LabeledDocument] | None = None,
        journal_path: str | Path | None = None,
    ):
        self.session_id = session_id
        self.schema = schema
        self.acq_cfg = acq_cfg
        self._oracle = HumanOracle()
        self._cond = threading.Condition()
        self._pending: dict | None = None
        self._progress = {"t": 0, "labeled": len(seed_labeled),
                          "pool_remaining": len(pool)}
        self._history: list[dict] = []
        self._labeled: list[LabeledDocument] = list(seed_labeled)
        self._done = False
        self._error: str | None = None
        self._journal_path = Path(journal_path) if journal_path else None
        self._journal_fh = None
        self._replaying = False

        initial_pool = len(pool)
        state = ActiveLearningState(labeled=list(seed_labeled), pool=list(pool))

        def batch_hook(t, docs, probs, scores):
            with self._cond:
                self._pending = {
                    "t": t,
                    "docs": [
                        {"id": d.id, "text": d.text,
                         "probs": [float(x) for x in probs[i]],
                         "uncertainty": float(scores[i])}
                        for i, d in enumerate(docs)
                    ],
                }
                self._cond.notify_all()

        def iteration_hook(record, model, st):
            with self._cond:
                self._pending = None
                self._history.append(dict(record))
                self._labeled = list(st.labeled)
                self._progress = {"t": st.iteration, "labeled": len(st.labeled),
                                  "pool_remaining": len(st.pool)}
                self._cond.notify_all()

        def run():
            try:
                run_loop(state, acq_cfg, train_cfg, eval_set, self._oracle,
                         featurizer, schema,
                         batch_hook=batch_hook, iteration_hook=iteration_hook)
                with self._cond:
                    self._done = True
                    self._pending = None
                    self._cond.notify_all()
            except SessionCancelledError:
                pass
            except Exception as e:  # surfaced to clients as 500s
                logger.exception("session loop failed")
                with self._cond:
                    self._error = f"{type(e).__name__}: {e}"
                    self._cond.notify_all()

        self._thread = threading.Thread(target=run, daemon=True,
                                        name=f"al-session-{session_id}")
        self._initial_pool = initial_pool

    # -- lifecycle ----------------------------------------------------------

    def start(self) -> None:
        journal_records = []
        if self._journal_path is not None and self._journal_path.exists():
            journal_records = self._read_journal()
        self._thread.start()
        if journal_records:
            self._replay(journal_records)
        if self._journal_path is not None:
            self._journal_fh = self._journal_path.open("a", encoding="utf-8")

    def close(self) -> None:
        self._oracle.cancel()
        if self._journal_fh is not None:
            self._journal_fh.close()
            self._journal_fh = None

    def _read_journal(self) -> list[dict]:
        records = []
        with self._journal_path.open("r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
        return records

    def _replay(self, records: list[dict]) -> None:
        """Re-apply journaled labels; batches recompute deterministically."""
        self._replaying = True
        try:
            for rec in records:
                doc_id, label = rec["doc_id"], int(rec["label"])
                self._wait_for_pending_doc(doc_id)
                self._oracle.submit(doc_id, label)
            # Let any commit triggered by the last record finish.
            with self._cond:
                self._cond.wait_for(
                    lambda: self._error is not None or self._done
                    or self._pending is not None, timeout=_COMMIT_TIMEOUT_S)
        finally:
            self._replaying = False
        if self._error:
            raise RuntimeError(f"journal replay failed: {self._error}")
        logger.info("replayed %d journaled labels", len(records))

    def _wait_for_pending_doc(self, doc_id: str) -> None:
        def ready():
            if self._error is not None or self._done:
                return True
            pending = self._oracle.pending_ids
            return pending is not None and doc_id in pending

        with self._cond:
            if not self._cond.wait_for(ready, timeout=_COMMIT_TIMEOUT_S):
                raise RuntimeError(f"timed out waiting for {doc_id!r} to become pending")
        if self._error is not None or self._done:
            raise RuntimeError(
                f"journaled label for {doc_id!r} does not match any pending batch")

    def _journal(self, doc_id: str, label: int) -> None:
        if self._journal_fh is None or self._replaying:
            return
        self._journal_fh.write(
            json.dumps({"doc_id": doc_id, "label": label}) + "\n")
        self._journal_fh.flush()
        os.fsync(self._journal_fh.fileno())

    # -- views --------------------------------------------------------------

    def session_view(self) -> dict:
        with self._cond:
            return {
                "session_id": self.session_id,
                "schema": list(self.schema.names),
                "config": {
                    "batch_size": self.acq_cfg.batch_size,
                    "max_iterations": self.acq_cfg.max_iterations,
                    "strategy": self.acq_cfg.strategy,
                    "entropy_mode": self.acq_cfg.multilabel_entropy_mode,
                },
                "progress": dict(self._progress),
                "done": self._done,
                "error": self._error,
            }

    def batch_view(self) -> dict:
        with self._cond:
            received = self._oracle.received
            if self._pending is None:
                return {"t": self._progress["t"], "batch": [],
                        "done": self._done,
                        "status": "done" if self._done else "training"}
            docs = [dict(d, labeled=(d["id"] in received))
                    for d in self._pending["docs"]]
            return {"t": self._pending["t"], "batch": docs, "done": False,
                    "status": "pending"}

    def metrics_view(self) -> dict:
        with self._cond:
            return {"history": [dict(r) for r in self._history]}

    def export_labeled(self) -> list[LabeledDocument]:
        with self._cond:
            return list(self._labeled)

    # -- label intake -------------------------------------------------------

    def _parse_label(self, value) -> int | None:
        """Accept a class index or exact class name; None if invalid."""
        if isinstance(value, bool):
            return None
        if isinstance(value, int):
            return value if 0 <= value < self.schema.num_classes else None
        if isinstance(value, str):
            k = self.schema.index_of(value)
            if k is not None:
                return k
            if value.strip().isdigit():
                k = int(value.strip())
                return k if 0 <= k < self.schema.num_classes else None
        return None

    def submit_labels(self, labels: dict[str, object]) -> tuple[int, dict]:
        """Apply a {doc_id: label} map; returns (http_status, body)."""
        accepted: list[str] = []
        errors: dict[str, dict] = {}
        with self._cond:
            start_t = self._progress["t"]

        for doc_id in sorted(labels):
            k = self._parse_label(labels[doc_id])
            if k is None:
                errors[doc_id] = {"code": 400,
                                  "message": f"invalid label {labels[doc_id]!r}"}
                continue
            try:
                self._oracle.submit(doc_id, k)
            except KeyError:
                errors[doc_id] = {"code": 409,
                                  "message": f"document {doc_id!r} is not pending"}
                continue
            self._journal(doc_id, k)
            accepted.append(doc_id)

        committed = False
        if accepted:
            # If that filled the batch, the loop thread is committing: wait
            # for the new snapshot so a subsequent GET /batch is fresh.
            pending = self._oracle.pending_ids
            received = self._oracle.received
            commit_in_flight = pending is None or set(pending) == set(received)
            with self._cond:
                if commit_in_flight and not self._done:
                    self._cond.wait_for(
                        lambda: self._error is not None or self._done
                        or self._progress["t"] > start_t,
                        timeout=_COMMIT_TIMEOUT_S)
                committed = self._progress["t"] > start_t or self._done

        if self._error:
            return 500, {"error": self._error}
        status = 200
        if errors:
            status = 400 if any(e["code"] == 400 for e in errors.values()) else 409
        body = {"accepted": accepted, "errors": errors,
                "committed": committed, "t": self._progress["t"]}
        return status, body

    def commit(self) -> tuple[int, dict]:
        """Explicit commit: 422 unless the pending batch is fully labeled."""
        with self._cond:
            pending = self._oracle.pending_ids
            if pending is None:
                return 200, {"committed": True, "t": self._progress["t"],
                             "done": self._done}
            missing = sorted(set(pending) - set(self._oracle.received))
            return 422, {"error": "batch incomplete",
                         "missing": missing, "t": self._progress["t"]}


def _json_bytes(obj: dict) -> bytes:
    return json.dumps(obj, ensure_ascii=False).encode("utf-8")


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "altc-annotation"

    # Set by make_server().
    session: AnnotationSession = None  # type: ignore[assignment]
    ui_dir: Path | None = None

    def log_message(self, fmt, *args):
        logger.debug("%s - %s", self.address_string(), fmt % args)

    def _respond(self, status: int, body: bytes,
                 content_type: str = "application/json; charset=utf-8"):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()
        self.wfile.write(body)

    def _respond_json(self, status: int, obj: dict):
        self._respond(status, _json_bytes(obj))

    def do_OPTIONS(self):
        self._respond(204, b"")

    def do_GET(self):
        path = self.path.split("?", 1)[0]
        if path == "/session":
            self._respond_json(200, self.session.session_view())
        elif path == "/batch":
            self._respond_json(200, self.session.batch_view())
        elif path == "/metrics":
            self._respond_json(200, self.session.metrics_view())
        elif path == "/export":
            lines = []
            for d in self.session.export_labeled():
                lines.append(json.dumps(
                    {"id": d.doc.id, "text": d.doc.text,
                     "label": self.session.schema.names[d.label]},
                    ensure_ascii=False))
            body = ("\n".join(lines) + "\n" if lines else "").encode("utf-8")
            self._respond(200, body, "application/x-ndjson; charset=utf-8")
        else:
            self._serve_static(path)

    def do_POST(self):
        path = self.path.split("?", 1)[0]
        if path not in ("/labels", "/commit"):
            self._respond_json(404, {"error": f"no such endpoint {path}"})
            return
        if path == "/commit":
            status, body = self.session.commit()
            self._respond_json(status, body)
            return
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length) if length else b""
        try:
            payload = json.loads(raw.decode("utf-8")) if raw else {}
        except (json.JSONDecodeError, UnicodeDecodeError):
            self._respond_json(400, {"error": "body must be JSON"})
            return
        labels = payload.get("labels", payload)
        if not isinstance(labels, dict) or not labels:
            self._respond_json(400, {"error": 'expected {"labels": {doc_id: label}}'})
            return
        status, body = self.session.submit_labels(labels)
        self._respond_json(status, body)

    def _serve_static(self, path: str):
        if self.ui_dir is None:
            self._respond_json(404, {"error": f"no such endpoint {path}"})
            return
        rel = path.lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        root = self.ui_dir.resolve()
        if root not in target.parents and target != root:
            self._respond_json(404, {"error": "not found"})
            return
        if target.is_dir():
            target = target / "index.html"
        if not target.is_file():
            self._respond_json(404, {"error": "not found"})
            return
        ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
        self._respond(200, target.read_bytes(), ctype)


def make_server(
    session: AnnotationSession,
    port: int,
    host: str = "127.0.0.1",
    ui_dir: str | Path | None = None,
) -> ThreadingHTTPServer:
    """Build (but do not start) the HTTP server bound to a session."""
    handler = type("BoundHandler", (_Handler,), {
        "session": session,
        "ui_dir": Path(ui_dir) if ui_dir else None,
    })
    return ThreadingHTTPServer((host, port), handler)


def serve_forever(session: AnnotationSession, server: ThreadingHTTPServer) -> None:
    session.start()
    try:
        logger.info("annotation service listening on http://%s:%d/",
                    *server.server_address)
        server.serve_forever()
    finally:
        session.close()
        server.server_close()
