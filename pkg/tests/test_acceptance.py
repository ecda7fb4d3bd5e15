"""Acceptance criteria, one check per criterion.

Each ``check_*`` returns ``(ok, detail)``. Under pytest every criterion
prints one ``PASS``/``FAIL`` line and the lines are repeated in the
terminal summary. Run this file directly to print the lines without
pytest.
"""

import random
import sys
import time
from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from streamepi.counting import brute_force_max_nonoverlapped, count_many, count_nonoverlapped
from streamepi.datagen import GenConfig, generate_stream, window_disconnect_stream
from streamepi.events import Event, batchify, window_of
from streamepi.harness import evaluate
from streamepi.lattice import rank_top_k
from streamepi.miner import MinerConfig, incremental_update, mine_first_batch, mine_levelwise
from streamepi.thresholds import DeltaState, bounds, closed_form_errors, estimate_delta, nearest_rank
from streamepi.variants import make_miner, run_variant


def line(n, ok, detail):
    return f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"


def all_nodes(lattice):
    return {(nd.episode, nd.status) for nd in lattice.nodes()}


# -- 1. counting oracle --------------------------------------------------------


def check_counting_oracle(cases=10_000, seed=0):
    rng = random.Random(seed)
    start = time.perf_counter()
    bad = repeated = 0
    for i in range(cases):
        alphabet = rng.randint(1, 4)
        n = rng.randint(0, 12)
        t, events = 0.0, []
        for _ in range(n):
            t += rng.choice((0.0, 1.0, 1.0, 2.0))  # ties on purpose
            events.append(Event(rng.randrange(alphabet), t))
        size = rng.randint(1, 3)
        if i % 4 == 0 and size > 1:
            x = rng.randrange(alphabet)
            episode = tuple(x if rng.random() < 0.7 else rng.randrange(alphabet) for _ in range(size))
        else:
            episode = tuple(rng.randrange(alphabet) for _ in range(size))
        repeated += len(set(episode)) < len(episode)
        if count_nonoverlapped(episode, events) != brute_force_max_nonoverlapped(episode, events):
            bad += 1
    secs = time.perf_counter() - start
    ok = bad == 0 and secs < 60
    return ok, f"{cases} cases ({repeated} repeated-symbol), {bad} mismatches, {secs:.1f}s (< 60s)"


# -- 2. incremental = from scratch ----------------------------------------------


def _random_batch(rng, start):
    alphabet = rng.randint(2, 6)
    n = rng.randint(0, 500)
    weights = [rng.random() + 0.05 for _ in range(alphabet)]
    types = rng.choices(range(alphabet), weights, k=n)
    times = sorted(start + rng.random() * 100 for _ in range(n))
    return [Event(x, t) for x, t in zip(types, times)]


def check_incremental(cases=200, seed=1):
    rng = random.Random(seed)
    bad = nontrivial = 0
    for _ in range(cases):
        length = rng.randint(1, 3)
        variant = rng.choice(["alg3", "alg4", "alg5", "exact"])
        m = rng.randint(2, 5)
        v = rng.randint(1, m) if variant in ("alg4", "alg5") else None
        cfg = MinerConfig(k=rng.randint(1, 8), length=length, m=m, v=v, variant=variant)
        first, second = _random_batch(rng, 0.0), _random_batch(rng, 100.0)
        boot = mine_first_batch(first, cfg, s=1)
        lat = boot.lattice
        delta = rng.choice([0, 1, 2, 5, 10])
        info = incremental_update(lat, second, cfg, delta, 2, boot.f_k)
        fresh = mine_levelwise(second, info.f_min, length, m=m, s=2)
        same = lat.state(2) == fresh.state(2) and all_nodes(lat) == all_nodes(fresh)
        bad += not same
        nontrivial += len(lat) > 10
    return bad == 0, f"{cases} two-batch streams ({nontrivial} with >10 nodes), {bad} mismatches"


# -- 3 and 4. drifting streams with the true rate of change --------------------


def drifting_streams(n=20):
    """Block streams whose pattern counts follow a bounded random walk.

    Poisson noise makes the true rate of change so large that every
    margin collapses to the floor of 1; contiguous pattern blocks keep it
    small enough for the thresholds to prune.
    """
    out = []
    for i in range(n):
        rng = random.Random(100 + i)
        length = 2 if i < n // 2 else 3
        letters = "ABCDEFGHIJ"[: 10 if length == 2 else 8]
        patterns = list(dict.fromkeys(
            "".join(rng.choice(letters) for _ in range(rng.randint(2, 4))) for _ in range(8)
        ))
        level = {p: rng.randint(40, 250) for p in patterns}
        counts = []
        for _ in range(9):
            counts.append(dict(level))
            level = {p: max(5, c + rng.randint(-6, 6)) for p, c in level.items()}
        events, symbols = window_disconnect_stream(5000.0, counts)
        batches = batchify(events, 5000.0, 0.0)
        universe = list(product(range(len(symbols)), repeat=length))
        per_batch = [count_many(universe, b) for b in batches]
        delta = max(
            abs(a[e] - b[e]) for a, b in zip(per_batch, per_batch[1:]) for e in universe
        )
        out.append((batches, length, per_batch, delta))
    return out


M, K = 5, 10


def check_exact_policy(streams):
    windows = mismatches = pruned = 0
    for batches, length, _, delta in streams:
        base = dict(k=K, length=length, m=M)
        alg0 = run_variant(batches, MinerConfig(variant="alg0", **base))
        exact = run_variant(batches, MinerConfig(variant="exact", delta=delta, **base))
        for a, b in zip(alg0, exact):
            if a.partial:
                continue
            windows += 1
            pruned += b.f_min > 1
            mismatches += sorted(a.ranked) != sorted(b.ranked)
    sizes = max(len(b) for s in streams for b in s[0])
    deltas = [s[3] for s in streams]
    return mismatches == 0, (
        f"{len(streams)} streams, {windows} complete windows, {mismatches} mismatches; "
        f"true delta {min(deltas)}..{max(deltas)}, f_min > 1 in {pruned} windows, "
        f"max {sizes} events/batch"
    )


def check_persistent(streams):
    checked = misses = 0
    vs = (-(-M // 2), M)
    for batches, length, per_batch, delta in streams:
        batch_top = [{ep for ep, _ in rank_top_k(c, K)} for c in per_batch]
        for v in vs:
            miner = make_miner(MinerConfig(variant="alg4", v=v, k=K, length=length, m=M, delta=delta))
            frequent = []
            for b in batches:
                miner.process(b)
                frequent.append(set(miner.lattice.frequent(length)))
            for s in range(M, len(batches) + 1):
                window = window_of(s, M)
                idx = [b - 1 for b in window.batch_indices]
                tally = {}
                for i in idx:
                    for ep in batch_top[i]:
                        tally[ep] = tally.get(ep, 0) + 1
                for ep, n in tally.items():
                    if n < v:
                        continue
                    checked += 1
                    misses += any(ep not in frequent[i] for i in idx)
    return misses == 0, f"v in {vs}: {checked} persistent (episode, window) pairs, {misses} false negatives"


# -- 5. window top-k outside every batch top-k ---------------------------------


def check_disconnect():
    events, symbols = window_disconnect_stream()
    batches = batchify(events, 100.0, 0.0)
    universe = list(product(range(len(symbols)), repeat=2))
    per_batch = [count_many(universe, b) for b in batches]
    window = {e: sum(c[e] for c in per_batch) for e in universe}
    truth = {ep for ep, _ in rank_top_k(window, 2)}
    disjoint = all(not truth & {ep for ep, _ in rank_top_k(c, 2)} for c in per_batch)
    delta = max(abs(a[e] - b[e]) for a, b in zip(per_batch, per_batch[1:]) for e in universe)

    base = dict(k=2, length=2, m=4, batch_span=100.0)
    recall = {}
    for name, extra in (("alg0", {}), ("alg1", {}), ("exact", {"delta": delta})):
        last = run_variant(batches, MinerConfig(variant=name, **base, **extra))[-1]
        recall[name] = evaluate(last.episodes, truth).recall
    ok = disjoint and recall == {"alg0": 1.0, "alg1": 0.0, "exact": 1.0}
    shown = ", ".join(f"{k} {v:.2f}" for k, v in recall.items())
    return ok, f"brute-force disconnect={disjoint}, true delta={delta}, recall {shown}"


# -- 6. bound calculator ---------------------------------------------------------


def check_bounds():
    k, eps, delta = 25, Fraction(1, 10), Fraction(3)
    exact = checked = 0
    order_ok = True
    for m in range(2, 21):
        mid = (m + 1) // 2
        cases = {1: 1, 2: m, 3: mid}
        # phi large enough for every separation condition
        phi = Fraction(2 * m + 2)
        for case, v in cases.items():
            b = bounds(k, m, v, delta, phi, eps, [100] * m)
            if case == 1:
                want = eps * k * m / (m - 1)
            elif case == 2:
                want = eps * k * m
            else:
                want = 4 * eps * k * m * m / (m * m - 1)
            got = closed_form_errors(k, m, v, phi, eps).get(case)
            checked += 1
            exact += got == want and b.corollary.get(case) == want and isinstance(got, Fraction)
            exact -= not b.max_errors <= want
        for v in range(1, m + 1):
            b = bounds(k, m, v, delta, phi, eps, [100] * m)
            order_ok &= b.f_lower < b.f_upper
    ok = exact == checked and order_ok
    return ok, f"{exact}/{checked} closed forms exact for m=2..20, f_L < f_U for all v: {order_ok}"


# -- 7. performance trend ------------------------------------------------------

PERF_STREAM = GenConfig(
    num_patterns=8, pattern_rate=1.0, batch_span=400.0, duration=4800.0, drift="none",
    noise_rate=2.0, powerlaw_exponent=1.5, seed=1,
)


def check_performance():
    start = time.perf_counter()
    events, _ = generate_stream(PERF_STREAM)
    batches = batchify(events, PERF_STREAM.batch_span, 0.0)
    base = dict(k=25, length=3, m=10)
    stats = {}
    for name in ("alg3", "alg0"):
        reps = run_variant(batches, MinerConfig(variant=name, **base))
        full = [r for r in reps if not r.partial]
        stats[name] = (float(np.mean([r.seconds for r in full])), max(r.nodes for r in reps))
    total = time.perf_counter() - start
    (t3, n3), (t0, n0) = stats["alg3"], stats["alg0"]
    ok = t3 <= t0 / 3 and n3 <= n0 and total < 600
    return ok, (
        f"{len(events)} events; alg3 {t3:.3f}s/window vs alg0 {t0:.3f}s (ratio {t3 / t0:.3f} <= 0.333); "
        f"peak nodes alg3 {n3} vs alg0 {n0}; total {total:.0f}s"
    )


# -- 8. quality ordering ---------------------------------------------------------

QUALITY_VARIANTS = (("alg0", None), ("alg1", None), ("alg2", None), ("alg3", None), ("alg4", 2), ("alg5", 2))


def quality_table(seeds=range(5)):
    recall = {name: [] for name, _ in QUALITY_VARIANTS}
    for seed in seeds:
        cfg = GenConfig(seed=seed)
        events, _ = generate_stream(cfg)
        batches = batchify(events, cfg.batch_span, 0.0)
        base = dict(k=10, length=2, m=4)
        alg0 = None
        for name, v in QUALITY_VARIANTS:
            reps = run_variant(batches, MinerConfig(variant=name, v=v, **base))
            alg0 = alg0 or reps
            recall[name] += [evaluate(r.episodes, a.episodes).recall for r, a in zip(reps, alg0) if not r.partial]
    return {name: float(np.mean(vals)) for name, vals in recall.items()}


def check_quality():
    table = quality_table()
    ok = table["alg1"] <= table["alg3"] + 0.02 and table["alg3"] <= table["alg5"] + 0.02
    shown = ", ".join(f"{name}{'' if v is None else f'(v={v})'} {table[name]:.3f}" for name, v in QUALITY_VARIANTS)
    return ok, f"mean recall over 5 seeds: {shown}"


# -- 9. rate-of-change estimator -------------------------------------------------


def check_delta_estimator():
    results = []
    results.append(nearest_rank([1, 2, 3, 4], 75) == 3)
    results.append(nearest_rank([4, 1, 3, 2], 75) == 3)
    results.append(nearest_rank([5], 75) == 5)
    st = DeltaState(delta=0.0)
    prev = {("a",): 10, ("b",): 20, ("c",): 30, ("d",): 40}
    cur = {("a",): 11, ("b",): 22, ("c",): 33, ("d",): 44}
    results.append(estimate_delta(prev, cur, st) == 3 and not st.fallback)
    results.append(estimate_delta({("a",): 1}, {("b",): 9}, st) == 3 and st.fallback)
    st2 = DeltaState(delta=5.0)
    results.append(estimate_delta({("x",): 0}, {("x",): 7}, st2) == 5.0 and st2.fallback)
    return all(results), f"{sum(results)}/{len(results)} estimator cases (nearest rank and fallback)"


# -- pytest wrappers -----------------------------------------------------------------


@pytest.fixture(scope="module")
def streams():
    return drifting_streams()


def _run(n, check, log, *args):
    ok, detail = check(*args)
    text = line(n, ok, detail)
    log.append(text)
    print(text)
    assert ok, text


def test_criterion_1_counting_oracle(acceptance_log):
    _run(1, check_counting_oracle, acceptance_log)


def test_criterion_2_incremental_equals_from_scratch(acceptance_log):
    _run(2, check_incremental, acceptance_log)


def test_criterion_3_exact_policy_matches_alg0(acceptance_log, streams):
    _run(3, check_exact_policy, acceptance_log, streams)


def test_criterion_4_persistent_episodes_kept(acceptance_log, streams):
    _run(4, check_persistent, acceptance_log, streams)


def test_criterion_5_fly_below_the_radar(acceptance_log):
    _run(5, check_disconnect, acceptance_log)


def test_criterion_6_bound_calculator(acceptance_log):
    _run(6, check_bounds, acceptance_log)


def test_criterion_7_performance_trend(acceptance_log):
    _run(7, check_performance, acceptance_log)


def test_criterion_8_quality_ordering(acceptance_log):
    _run(8, check_quality, acceptance_log)


def test_criterion_9_delta_estimator(acceptance_log):
    _run(9, check_delta_estimator, acceptance_log)


if __name__ == "__main__":
    s = drifting_streams()
    checks = [
        (1, check_counting_oracle, ()), (2, check_incremental, ()), (3, check_exact_policy, (s,)),
        (4, check_persistent, (s,)), (5, check_disconnect, ()), (6, check_bounds, ()),
        (7, check_performance, ()), (8, check_quality, ()), (9, check_delta_estimator, ()),
    ]
    failed = 0
    for n, fn, args in checks:
        ok, detail = fn(*args)
        failed += not ok
        print(line(n, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
