"""The mining variants compared by the harness, behind one interface.

``alg0``
    Keeps every event of the window and re-mines it from scratch on each
    slide (window frequency = sum of batch frequencies). Ground truth.
``alg1``
    Batch top-k only; the window answer is ranked from the union of the
    batch top-k sets using whatever counts are known.
``alg2``
    As ``alg1``, but an episode that entered a batch top-k keeps being
    counted until it has missed the batch top-k for ``m`` batches in a row.
``alg3``, ``alg4``, ``alg5``, ``exact``
    Incremental lattice mining with thresholds ``f_k - 2*delta``,
    ``f_k - 2(m-v)*delta``, the heuristic ``f_k - m(2 - v/m - (v/m)^2)*delta``
    and ``f_k - 2(m-1)*delta``.
"""

import time
from collections import deque
from dataclasses import dataclass

from .errors import ConfigError
from .events import window_of
from .lattice import FREQUENT, rank_top_k
from .miner import MinerConfig, PatternCounter, StreamingMiner, mine_top_k


@dataclass
class WindowReport:
    """Ranked window top-k after processing batch ``window``."""

    window: int
    ranked: list
    f_k: int | None = None
    f_min: int | None = None
    delta: float | None = None
    seconds: float = 0.0
    nodes: int = 0
    counted: int = 0
    buffered_events: int = 0
    flags: frozenset = frozenset()

    @property
    def episodes(self):
        return [ep for ep, _ in self.ranked]

    @property
    def partial(self):
        return "partial" in self.flags


def report_topk_window(lattice, window, k, length):
    """Rank the frequent ``length``-node episodes by window frequency.

    Returns ``(episode, window_frequency)`` pairs, ties at the k-th value
    included, by decreasing frequency then node sequence.
    """
    if isinstance(window, int):
        raise TypeError("pass a Window, e.g. window_of(s, m)")
    counts = {}
    for ep, nd in lattice.level(length).items():
        if nd.status == FREQUENT:
            counts[ep] = sum(c for b, c in nd.ring if b in window)
    return rank_top_k(counts, k)


class _Variant:
    def __init__(self, config):
        self.config = config
        self.s = 0

    def process(self, batch):
        self.s += 1
        start = time.perf_counter()
        report = self._process(getattr(batch, "events", batch))
        report.seconds = time.perf_counter() - start
        flags = set(report.flags)
        if self.s < self.config.m:
            flags.add("partial")
        if len(report.ranked) < self.config.k:
            flags.add("shortfall")
        report.flags = frozenset(flags)
        return report

    def _process(self, events):
        raise NotImplementedError


class WindowMiner(_Variant):
    """Alg 0: re-mine the whole window on every slide."""

    def __init__(self, config, max_window_events=None):
        super().__init__(config)
        self.window = deque(maxlen=config.m)
        self.max_window_events = max_window_events

    def _process(self, events):
        cfg = self.config
        self.window.append(events)
        counter = PatternCounter(list(self.window))
        if self.max_window_events is not None and counter.n_events > self.max_window_events:
            raise ConfigError(
                f"alg0 window holds {counter.n_events} events, above the cap of {self.max_window_events}"
            )
        top = mine_top_k(counter, cfg.k, cfg.length, cfg.epsilon_step, s=self.s)
        ranked = rank_top_k(top.counts(cfg.length, self.s), cfg.k)
        return WindowReport(
            self.s, ranked, f_k=top.f_k, f_min=top.threshold,
            nodes=len(counter.cache), counted=len(counter.cache),
            buffered_events=counter.n_events,
        )


class BatchTopKMiner(_Variant):
    """Alg 1 (``track=False``) and Alg 2 (``track=True``)."""

    def __init__(self, config, track=False):
        super().__init__(config)
        self.track = track
        self.known = deque(maxlen=config.m)
        self.misses = {}

    def _process(self, events):
        cfg = self.config
        counter = PatternCounter([events])
        top = mine_top_k(counter, cfg.k, cfg.length, cfg.epsilon_step, s=self.s)
        batch_top = dict(rank_top_k(top.counts(cfg.length, self.s), cfg.k))
        known = dict(batch_top)
        if self.track:
            extra = [ep for ep in self.misses if ep not in batch_top]
            known.update(counter(extra))
            for ep in extra:
                self.misses[ep] += 1
                if self.misses[ep] >= cfg.m:
                    del self.misses[ep]
            for ep in batch_top:
                self.misses[ep] = 0
        self.known.append(known)

        window = {}
        for counts in self.known:
            for ep, c in counts.items():
                window[ep] = window.get(ep, 0) + c
        ranked = rank_top_k(window, cfg.k)
        tracked = len(window)
        return WindowReport(
            self.s, ranked, f_k=top.f_k, f_min=top.threshold,
            nodes=tracked, counted=len(counter.cache), buffered_events=len(events),
        )


class IncrementalMiner(_Variant):
    """Alg 3, 4, 5 and the exact policy."""

    def __init__(self, config):
        super().__init__(config)
        self.miner = StreamingMiner(config)

    @property
    def lattice(self):
        return self.miner.lattice

    def _process(self, events):
        cfg = self.config
        info = self.miner.process(events)
        lattice = self.miner.lattice
        ranked = [] if lattice is None else report_topk_window(lattice, window_of(self.s, cfg.m), cfg.k, cfg.length)
        return WindowReport(
            self.s, ranked, f_k=info.f_k, f_min=info.f_min, delta=info.delta,
            nodes=0 if lattice is None else len(lattice), counted=info.counted,
            buffered_events=len(events), flags=info.flags,
        )


def make_miner(config, max_window_events=None):
    if config.variant == "alg0":
        return WindowMiner(config, max_window_events)
    if config.variant == "alg1":
        return BatchTopKMiner(config, track=False)
    if config.variant == "alg2":
        return BatchTopKMiner(config, track=True)
    return IncrementalMiner(config)


def run_variant(batches, config, max_window_events=None):
    """Run one variant over a batch sequence; one report per batch."""
    miner = make_miner(config, max_window_events)
    return [miner.process(b) for b in batches]


__all__ = [
    "MinerConfig", "WindowReport", "report_topk_window",
    "WindowMiner", "BatchTopKMiner", "IncrementalMiner", "make_miner", "run_variant",
]
