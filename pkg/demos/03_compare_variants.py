"""
Comparing the streaming variants
================================

A drifting synthetic stream, mined by every variant. Recall is measured
against the full re-mining baseline (alg0) over complete windows.
"""

import numpy as np

from streamepi.datagen import GenConfig, generate_stream
from streamepi.events import batchify
from streamepi.harness import evaluate
from streamepi.miner import MinerConfig
from streamepi.variants import run_variant

gen = GenConfig(duration=2000.0, seed=3)
events, truth = generate_stream(gen)
batches = batchify(events, gen.batch_span, 0.0)
print(f"{len(events)} events in {len(batches)} batches")

base = dict(k=10, length=2, m=4)
reports = {}
for variant, v in [("alg0", None), ("alg1", None), ("alg2", None), ("alg3", None), ("alg4", 2), ("alg5", 2)]:
    reports[variant] = run_variant(batches, MinerConfig(variant=variant, v=v, **base))

print(f"{'variant':>8} {'recall':>7} {'ms/batch':>9} {'peak nodes':>11}")
for variant, reps in reports.items():
    full = [(r, a) for r, a in zip(reps, reports["alg0"]) if not r.partial]
    recall = np.mean([evaluate(r.episodes, a.episodes).recall for r, a in full])
    ms = 1000 * np.mean([r.seconds for r, _ in full])
    print(f"{variant:>8} {recall:7.3f} {ms:9.1f} {max(r.nodes for r in reps):11d}")

# thresholds used by alg3 in the last few batches
for r in reports["alg3"][-3:]:
    print(f"batch {r.window}: f_k={r.f_k} f_min={r.f_min} delta={r.delta}")
