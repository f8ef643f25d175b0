"""Human-in-the-loop service: a scripted annotator closes the loop.

Starts the HTTP annotation service in-process, then plays the annotator:
fetch the pending batch (most uncertain first), POST one label per
document, watch the model retrain and the history grow.  A real session
replaces the scripted labels with the browser UI served from the same
endpoints.
"""

import json
import threading
import urllib.request

from altc import AcquisitionConfig, Featurizer, LabelSchema, PrepConfig, TrainConfig
from altc.service import AnnotationSession, make_server
from altc.synth import separable_corpus

schema = LabelSchema(names=("Not Hope", "Generalized Hope"))
docs = separable_corpus([14, 14], seed=5)
gold = {d.doc.id: d.label for d in docs}
seed_docs, pool = docs[:6], [d.doc for d in docs[6:]]

session = AnnotationSession(
    session_id="demo",
    seed_labeled=seed_docs,
    pool=pool,
    schema=schema,
    acq_cfg=AcquisitionConfig(batch_size=5, max_iterations=3, seed_size=6,
                              strategy="entropy", seed=1),
    train_cfg=TrainConfig(learning_rate=1.0, epochs=10, batch_size=16, seed=0),
    featurizer=Featurizer.fit([d.doc.text for d in docs], PrepConfig()),
)
server = make_server(session, port=0)
threading.Thread(target=server.serve_forever, daemon=True).start()
session.start()
base = f"http://127.0.0.1:{server.server_address[1]}"
print("service at", base)


def get(path):
    with urllib.request.urlopen(base + path, timeout=30) as r:
        return json.loads(r.read())


def post(path, obj):
    req = urllib.request.Request(base + path, json.dumps(obj).encode(),
                                 headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(req, timeout=60) as r:
        return json.loads(r.read())


while True:
    batch = get("/batch")
    if batch["status"] == "done":
        break
    if batch["status"] != "pending":
        continue
    print(f"\nbatch t={batch['t']}: {len(batch['batch'])} docs, "
          "uncertainty " + ", ".join(f"{d['uncertainty']:.3f}"
                                     for d in batch["batch"]))
    answer = {d["id"]: gold[d["id"]] for d in batch["batch"]}
    result = post("/labels", {"labels": answer})
    print(f"labeled {len(result['accepted'])} docs -> committed: "
          f"{result['committed']}, t={result['t']}")

history = get("/metrics")["history"]
print("\nlearning curve:")
for rec in history:
    print(f"  t={rec['t']}  labeled={rec['labeled']:>2}  "
          f"accuracy={rec['accuracy']:.3f}")

with urllib.request.urlopen(base + "/export", timeout=30) as r:
    exported = [json.loads(line) for line in r.read().decode().splitlines()]
print(f"\n/export returned {len(exported)} labeled documents")

session.close()
server.shutdown()
server.server_close()
