"""Command-line surface: ingest, stats, train, eval, al-sim, serve.

Runs are reproducible: given the same inputs, flags, and seeds, every
output file is byte-identical (no timestamps are written).  Relative
artifact paths resolve under ``$ALTC_DATA_DIR`` when it is set.
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
from pathlib import Path

from . import active_learning as al
from .corpus import (
    DEFAULT_LABELS,
    LabeledDocument,
    LabelSchema,
    distribution,
    export,
    ingest,
    stratified_split,
)
from .errors import AltcError, SchemaMismatchError
from .linear_model import TrainConfig, predict_proba_matrix
from .metrics import confusion, report
from .pipeline import Featurizer, TextClassifier, train_classifier
from .service import AnnotationSession, make_server, serve_forever
from .textprep import PrepConfig
from .tfidf import stack

import numpy as np


def _resolve(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get("ALTC_DATA_DIR")
    if base and not p.is_absolute():
        return Path(base) / p
    return p


def _schema_from_arg(arg: str | None) -> LabelSchema:
    if not arg:
        return LabelSchema(names=DEFAULT_LABELS)
    names = tuple(s.strip() for s in arg.split(","))
    return LabelSchema(names=names)


def _format_for(path: Path, explicit: str | None) -> str:
    if explicit:
        return explicit
    suffix = path.suffix.lower().lstrip(".")
    if suffix in ("csv", "tsv", "jsonl"):
        return suffix
    raise AltcError(
        f"cannot infer format from {path.name!r}; pass --format")


def _fail(e: Exception, code: int = 1) -> int:
    sys.stderr.write(json.dumps(
        {"error": type(e).__name__, "message": str(e)}) + "\n")
    return code


def _add_corpus_args(p: argparse.ArgumentParser):
    p.add_argument("--input", required=True, help="corpus file (csv/tsv/jsonl)")
    p.add_argument("--format", choices=("csv", "tsv", "jsonl"),
                   help="inferred from the file extension when omitted")
    p.add_argument("--schema", help="comma-separated class names "
                   f"(default: {', '.join(DEFAULT_LABELS)})")


def _add_train_args(p: argparse.ArgumentParser):
    p.add_argument("--lr", type=float, default=0.1, help="learning rate")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--l2", type=float, default=1e-4, help="L2 penalty")
    p.add_argument("--train-batch-size", type=int, default=64,
                   help="mini-batch size for gradient descent")
    p.add_argument("--min-df", type=int, default=1,
                   help="drop terms seen in fewer documents")
    p.add_argument("--max-vocab", type=int, default=None,
                   help="keep only the highest-df terms")
    p.add_argument("--seed", type=int, default=0)


def _train_config(args) -> TrainConfig:
    return TrainConfig(learning_rate=args.lr, epochs=args.epochs,
                       batch_size=args.train_batch_size,
                       l2_penalty=args.l2, seed=args.seed)


def _load_labeled(args) -> tuple[list[LabeledDocument], LabelSchema]:
    schema = _schema_from_arg(args.schema)
    path = _resolve(args.input)
    fmt = _format_for(path, args.format)
    docs = ingest(path, fmt, schema)
    return docs, schema


# -- commands -----------------------------------------------------------------

def cmd_ingest(args) -> int:
    try:
        docs, schema = _load_labeled(args)
    except AltcError as e:
        return _fail(e, 2)
    out = _resolve(args.output)
    out_fmt = _format_for(out, args.output_format)
    export(docs, out, out_fmt, schema)
    dist = distribution(docs, schema)
    if args.dist_output:
        _resolve(args.dist_output).write_text(
            dist.to_json(schema) + "\n", encoding="utf-8")
    print(f"ingested {dist.total} documents -> {out}")
    return 0


def cmd_stats(args) -> int:
    try:
        docs, schema = _load_labeled(args)
    except AltcError as e:
        return _fail(e, 2)
    dist = distribution(docs, schema)
    width = max(len(n) for n in schema.names) + 2
    for name, count in zip(schema.names, dist.counts):
        print(f"{name:<{width}}{count:>8}")
    print(f"{'total':<{width}}{dist.total:>8}")
    if args.json_output:
        _resolve(args.json_output).write_text(
            dist.to_json(schema) + "\n", encoding="utf-8")
    return 0


def cmd_train(args) -> int:
    try:
        docs, schema = _load_labeled(args)
        clf, history = train_classifier(
            docs, schema, prep=PrepConfig(), train_config=_train_config(args),
            min_df=args.min_df, max_vocab=args.max_vocab)
    except AltcError as e:
        return _fail(e)
    out = _resolve(args.output)
    clf.save(out)
    if args.loss_history:
        _resolve(args.loss_history).write_text(
            json.dumps({"epoch_loss": history}) + "\n", encoding="utf-8")
    print(f"trained on {len(docs)} documents, "
          f"final epoch loss {history[-1]:.6f} -> {out}")
    return 0


def cmd_eval(args) -> int:
    try:
        clf = TextClassifier.load(_resolve(args.model))
        schema = _schema_from_arg(args.schema)
        if args.schema and tuple(schema.names) != tuple(clf.schema.names):
            raise SchemaMismatchError(list(clf.schema.names), list(schema.names))
        schema = clf.schema
        path = _resolve(args.input)
        docs = ingest(path, _format_for(path, args.format), schema)
        feats = stack([clf.featurizer.featurize(d.doc.text) for d in docs])
        pred = np.argmax(predict_proba_matrix(clf.model, feats), axis=1)
        cm = confusion([d.label for d in docs], pred.tolist(), schema.num_classes)
        rep = report(cm)
    except AltcError as e:
        return _fail(e)
    if args.report:
        _resolve(args.report).write_text(rep.to_json() + "\n", encoding="utf-8")
    if args.confusion_csv:
        _resolve(args.confusion_csv).write_text(
            cm.to_csv(list(schema.names)), encoding="utf-8")
    print(rep.to_table(list(schema.names)))
    return 0


def _al_sim_run(docs, schema, strategy, seed, args):
    """One simulated AL run; returns its history records."""
    train_part, eval_part = stratified_split(docs, args.train_fraction, seed)
    seed_set, rest = al.stratified_seed(
        train_part, args.seed_size, schema.num_classes, seed)
    oracle = al.SimulatedOracle.from_corpus(rest)
    pool = [d.doc for d in rest]
    featurizer = Featurizer.fit(
        [d.doc.text for d in train_part], prep=PrepConfig(),
        min_df=args.min_df, max_vocab=args.max_vocab)
    cfg = al.AcquisitionConfig(
        batch_size=args.batch_size, max_iterations=args.iterations,
        seed_size=args.seed_size, strategy=strategy, seed=seed)
    state = al.ActiveLearningState(labeled=list(seed_set), pool=pool)
    _, state = al.run_loop(state, cfg, _train_config(args), eval_part,
                           oracle, featurizer, schema)
    return state.history


def _labels_to_target(history: list[dict], target: float) -> int | None:
    for rec in history:
        if rec["macro_f1"] >= target:
            return rec["labeled"]
    return None


def cmd_al_sim(args) -> int:
    try:
        docs, schema = _load_labeled(args)
    except AltcError as e:
        return _fail(e, 2)
    outdir = _resolve(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    seeds = [int(s) for s in args.seeds.split(",")]
    strategies = ("entropy", "random") if args.strategy == "both" else (args.strategy,)

    rows = []
    curve_lines = ["run,strategy,seed,t,labeled,macro_f1,accuracy"]
    for strategy in strategies:
        for seed in seeds:
            history = _al_sim_run(docs, schema, strategy, seed, args)
            run = f"{strategy}_seed{seed}"
            al.write_history(history, outdir / f"history_{run}.jsonl")
            for rec in history:
                curve_lines.append(
                    f"{run},{strategy},{seed},{rec['t']},{rec['labeled']},"
                    f"{rec['macro_f1']!r},{rec['accuracy']!r}")
            budget = _labels_to_target(history, args.target_f1)
            rows.append({
                "run": run, "strategy": strategy, "seed": seed,
                "final_macro_f1": history[-1]["macro_f1"],
                "final_accuracy": history[-1]["accuracy"],
                f"labels_to_f1_{args.target_f1}": budget if budget is not None else "",
            })
            print(f"{run}: final macro-F1 {history[-1]['macro_f1']:.4f}, "
                  f"labels to {args.target_f1}: {budget}")

    fieldnames = list(rows[0].keys())
    lines = [",".join(fieldnames)]
    for row in rows:
        lines.append(",".join(repr(row[f]) if isinstance(row[f], float)
                              else str(row[f]) for f in fieldnames))
    (outdir / "comparison.csv").write_text("\n".join(lines) + "\n",
                                           encoding="utf-8")
    (outdir / "curves.csv").write_text("\n".join(curve_lines) + "\n",
                                       encoding="utf-8")

    if args.strategy == "both" and len(seeds) > 1:
        for metric in (f"labels_to_f1_{args.target_f1}",):
            by = {s: [r[metric] for r in rows if r["strategy"] == s and r[metric] != ""]
                  for s in strategies}
            med = {s: (statistics.median(v) if v else None) for s, v in by.items()}
            print(f"median {metric}: " +
                  ", ".join(f"{s}={med[s]}" for s in strategies))
    return 0


def cmd_serve(args) -> int:
    try:
        schema = _schema_from_arg(args.schema)
        labeled_path = _resolve(args.labeled)
        seed_docs = ingest(labeled_path, _format_for(labeled_path, args.format),
                           schema)
        pool_path = _resolve(args.pool)
        pool_records = ingest(pool_path, _format_for(pool_path, args.format),
                              schema, allow_unlabeled=True)
        pool = [d.doc if isinstance(d, LabeledDocument) else d
                for d in pool_records]
        eval_set = None
        if args.eval:
            eval_path = _resolve(args.eval)
            eval_set = ingest(eval_path, _format_for(eval_path, args.format),
                              schema)
        texts = [d.doc.text for d in seed_docs] + [d.text for d in pool]
        featurizer = Featurizer.fit(texts, prep=PrepConfig(),
                                    min_df=args.min_df, max_vocab=args.max_vocab)
        cfg = al.AcquisitionConfig(
            batch_size=args.batch_size, max_iterations=args.iterations,
            seed_size=len(seed_docs), strategy=args.strategy, seed=args.seed)
        session = AnnotationSession(
            session_id=args.session_id, seed_labeled=seed_docs, pool=pool,
            schema=schema, acq_cfg=cfg, train_cfg=_train_config(args),
            featurizer=featurizer, eval_set=eval_set,
            journal_path=_resolve(args.journal) if args.journal else None)
        server = make_server(session, args.port, host=args.host,
                             ui_dir=_resolve(args.ui_dir) if args.ui_dir else None)
    except AltcError as e:
        return _fail(e)
    host, port = server.server_address[:2]
    print(f"annotation service on http://{host}:{port}/ "
          f"(batch {args.batch_size}, {args.iterations or 'unbounded'} iterations)",
          flush=True)
    try:
        serve_forever(session, server)
    except KeyboardInterrupt:
        pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="altc",
        description="Active-learning toolkit for imbalanced text classification")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a corpus and re-export it")
    _add_corpus_args(p)
    p.add_argument("--output", required=True)
    p.add_argument("--output-format", choices=("csv", "tsv", "jsonl"))
    p.add_argument("--dist-output", help="write the class distribution JSON here")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="print the class distribution")
    _add_corpus_args(p)
    p.add_argument("--json-output", help="also write distribution JSON here")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("train", help="train a classifier, write the artifact")
    _add_corpus_args(p)
    _add_train_args(p)
    p.add_argument("--output", required=True, help="model artifact JSON path")
    p.add_argument("--loss-history", help="write per-epoch losses here")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model artifact on a labeled set")
    _add_corpus_args(p)
    p.add_argument("--model", required=True)
    p.add_argument("--report", help="write the report JSON here")
    p.add_argument("--confusion-csv", help="write the confusion matrix CSV here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("al-sim", help="simulate active learning with a hidden oracle")
    _add_corpus_args(p)
    _add_train_args(p)
    p.add_argument("--outdir", required=True)
    p.add_argument("--seed-size", type=int, default=40)
    p.add_argument("--batch-size", type=int, default=50)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--strategy", choices=("entropy", "random", "both"),
                   default="both")
    p.add_argument("--seeds", default="1",
                   help="comma-separated run seeds, e.g. 1,2,3")
    p.add_argument("--train-fraction", type=float, default=0.8,
                   help="fraction kept for learning; the rest evaluates")
    p.add_argument("--target-f1", type=float, default=0.8,
                   help="macro-F1 level for the label-budget column")
    p.set_defaults(func=cmd_al_sim)

    p = sub.add_parser("serve", help="run the human-annotation HTTP service")
    p.add_argument("--labeled", required=True, help="seed labeled corpus")
    p.add_argument("--pool", required=True, help="unlabeled pool corpus")
    p.add_argument("--eval", help="optional held-out labeled corpus")
    p.add_argument("--format", choices=("csv", "tsv", "jsonl"))
    p.add_argument("--schema")
    _add_train_args(p)
    p.add_argument("--batch-size", type=int, default=10)
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--strategy", choices=("entropy", "random"), default="entropy")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--session-id", default="session-1")
    p.add_argument("--journal", help="append-only label journal (replayed on start)")
    p.add_argument("--ui-dir", help="static directory for the annotation UI")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AltcError as e:
        return _fail(e)


if __name__ == "__main__":
    sys.exit(main())
