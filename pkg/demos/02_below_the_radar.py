"""
Window top-k outside every batch top-k
======================================

Four batches. A->B and M->N are never among the two most frequent
episodes of a single batch, yet they lead the window. Merging the batch
top-k lists misses both; the incremental miner with the exact margin
keeps them.
"""

from itertools import product

from streamepi.counting import count_many
from streamepi.datagen import window_disconnect_stream
from streamepi.events import batchify
from streamepi.lattice import rank_top_k
from streamepi.miner import MinerConfig
from streamepi.variants import run_variant

events, symbols = window_disconnect_stream()
batches = batchify(events, 100.0, 0.0)


def name(ep):
    return "".join(symbols.name(x) for x in ep)


# exhaustive counts of every 2-node episode, batch by batch
universe = list(product(range(len(symbols)), repeat=2))
per_batch = [count_many(universe, b) for b in batches]
for s, counts in enumerate(per_batch, start=1):
    print(f"batch {s} top-2:", [(name(e), c) for e, c in rank_top_k(counts, 2)])

window = {e: sum(c[e] for c in per_batch) for e in universe}
print("window top-2:", [(name(e), c) for e, c in rank_top_k(window, 2)])

# the largest change of any episode between consecutive batches
delta = max(abs(a[e] - b[e]) for a, b in zip(per_batch, per_batch[1:]) for e in universe)
print("true rate of change:", delta)

cfg = dict(k=2, length=2, m=4, batch_span=100.0)
for variant, extra in [("alg0", {}), ("alg1", {}), ("exact", {"delta": delta})]:
    last = run_variant(batches, MinerConfig(variant=variant, **cfg, **extra))[-1]
    print(f"{variant:>5}:", [(name(e), c) for e, c in last.ranked])
