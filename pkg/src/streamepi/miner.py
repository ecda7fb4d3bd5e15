"""Level-wise and incremental episode mining over a stream of batches.

The incremental path keeps a :class:`~streamepi.lattice.PatternLattice`
of frequent and border episodes between batches. For each new batch it
recounts only lattice nodes plus candidates anchored at newly frequent
episodes, instead of mining the batch from scratch.
"""

import logging
import math
from dataclasses import dataclass

from . import thresholds as th
from .counting import count_many
from .episodes import generate_candidates, maximal_subepisodes
from .errors import ConfigError
from .lattice import FREQUENT, PatternLattice, kth_count

logger = logging.getLogger(__name__)

VARIANTS = ("alg0", "alg1", "alg2", "alg3", "alg4", "alg5", "exact")

_POLICY = {
    "alg3": th.NEXT_BATCH,
    "alg4": th.PERSISTENT,
    "alg5": th.HEURISTIC,
    "exact": th.EXACT,
}


@dataclass
class MinerConfig:
    """Parameters shared by all mining variants.

    ``delta=None`` estimates the rate of change from the data; a number
    fixes it. ``delta0_frac`` sets the initial estimate as a fraction of
    the first batch's ``f_k``.
    """

    k: int = 25
    length: int = 4
    m: int = 10
    batch_span: float = 1.0
    v: int | None = None
    variant: str = "alg3"
    delta: float | None = None
    delta0_frac: float = 0.05
    epsilon_step: float = 0.1
    percentile: float = 75.0
    min_delta_samples: int = 4

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.length < 1:
            raise ConfigError(f"episode length must be >= 1, got {self.length}")
        if self.m < 1:
            raise ConfigError(f"m must be >= 1, got {self.m}")
        if not self.batch_span > 0:
            raise ConfigError(f"batch span must be positive, got {self.batch_span}")
        if not 0 < self.epsilon_step < 1:
            raise ConfigError(f"epsilon_step must lie in (0, 1), got {self.epsilon_step}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}; choose from {', '.join(VARIANTS)}")
        if self.variant in ("alg4", "alg5") and self.v is None:
            raise ConfigError(f"{self.variant} needs the persistence parameter v")
        if self.v is not None and not 1 <= self.v <= self.m:
            raise ConfigError(f"need 1 <= v <= m, got v={self.v}, m={self.m}")
        if self.delta is not None and self.delta < 0:
            raise ConfigError(f"delta must be non-negative, got {self.delta}")
        if not 0 < self.delta0_frac:
            raise ConfigError(f"delta0_frac must be positive, got {self.delta0_frac}")

    @property
    def policy(self):
        return _POLICY.get(self.variant)

    def threshold(self, f_k, delta):
        return th.threshold(self.policy, f_k, self.m, self.v, delta)


class PatternCounter:
    """Memoised counting over one or more batches; counts are summed."""

    def __init__(self, batches):
        self.batches = [getattr(b, "events", b) for b in batches]
        self.cache = {}
        self._alphabet = None

    @property
    def alphabet(self):
        if self._alphabet is None:
            self._alphabet = sorted({x for evs in self.batches for x, _ in evs})
        return self._alphabet

    @property
    def n_events(self):
        return sum(len(evs) for evs in self.batches)

    def __call__(self, patterns):
        missing = [p for p in patterns if p not in self.cache]
        if missing:
            for p in missing:
                self.cache[p] = 0
            for evs in self.batches:
                for p, c in count_many(missing, evs).items():
                    self.cache[p] += c
        return {p: self.cache[p] for p in patterns}


def _as_counter(data):
    return data if isinstance(data, PatternCounter) else PatternCounter([data])


def _link(lattice, cands):
    for ep in cands:
        for sub in maximal_subepisodes(ep):
            lattice.link(sub, ep)


# -- from-scratch mining ----------------------------------------------------


def mine_levelwise(data, f_min, max_level, m=1, s=1):
    """Apriori mining of all episodes of 1..``max_level`` nodes.

    ``data`` is a batch, an event list or a :class:`PatternCounter`.
    Every episode with count ``>= f_min`` becomes a frequent node and
    every other generated candidate a border node, with counts recorded
    for batch ``s``. Level-1 candidates are the event types present.
    """
    counter = _as_counter(data)
    lattice = PatternLattice(m, max_level)
    cands = [(x,) for x in counter.alphabet]
    for i in range(1, max_level + 1):
        if not cands:
            break
        counts = counter(cands)
        for ep in cands:
            if counts[ep] >= f_min:
                lattice.promote(ep, counts[ep], s)
            else:
                lattice.add_border(ep, counts[ep], s)
        if i > 1:
            _link(lattice, cands)
        if i < max_level:
            cands = sorted(generate_candidates(lattice.frequent(i)))
    return lattice


@dataclass
class TopK:
    lattice: PatternLattice
    f_k: int | None
    threshold: int
    rounds: int
    shortfall: bool

    def counts(self, length, s=1):
        return self.lattice.batch_counts(length, s, FREQUENT)


def mine_top_k(data, k, length, epsilon_step=0.1, m=1, s=1):
    """Top-k episodes of ``length`` nodes by progressive threshold lowering.

    Starts at the k-th highest single-event count and multiplies the
    threshold by ``1 - epsilon_step`` (at least one unit per round) until
    at least ``k`` episodes of ``length`` nodes are frequent or the
    threshold reaches 1.
    """
    counter = _as_counter(data)
    singles = counter([(x,) for x in counter.alphabet])
    if not singles:
        return TopK(PatternLattice(m, length), None, 1, 0, True)
    t = max(1, kth_count(singles.values(), k))
    rounds = 0
    while True:
        rounds += 1
        lattice = mine_levelwise(counter, t, length, m, s)
        top = lattice.batch_counts(length, s, FREQUENT)
        if len(top) >= k or t == 1:
            break
        t = max(1, min(t - 1, math.floor(t * (1 - epsilon_step))))
    shortfall = len(top) < k
    if shortfall:
        logger.info("only %d frequent episodes of length %d (k=%d)", len(top), length, k)
    return TopK(lattice, kth_count(top.values(), k), t, rounds, shortfall)


# -- incremental mining -------------------------------------------------------


@dataclass
class UpdateInfo:
    """What one batch update did to the lattice."""

    f_k: int | None
    f_min: int
    delta: float
    counted: int
    new: dict
    removed: int
    flags: frozenset = frozenset()


def update_lattice(lattice, data, f_min, s):
    """Bring ``lattice`` from batch ``s-1`` to batch ``s`` at threshold ``f_min``.

    Level by level: count the frequent and border nodes plus the new
    candidates; frequent nodes below ``f_min`` become border and lose
    their super-episodes; border nodes and candidates reaching ``f_min``
    become frequent and anchor the next level's candidates. Level-1
    candidates are event types seen for the first time; level-1 nodes
    absent from the batch are dropped.

    Returns ``(new, removed)``: newly frequent episodes per level and the
    number of deleted nodes.
    """
    counter = _as_counter(data)
    present = counter.alphabet
    level1 = lattice.level(1)
    cands = [(x,) for x in present if (x,) not in level1]
    new = {}
    removed = 0
    for i in range(1, lattice.max_level + 1):
        level = lattice.level(i)
        old_frequent = [ep for ep, nd in level.items() if nd.status == FREQUENT]
        others = [ep for ep, nd in level.items() if nd.status != FREQUENT]
        counts = counter(old_frequent + others + cands)

        for ep in old_frequent:
            c = counts[ep]
            if c >= f_min:
                lattice.promote(ep, c, s)
            else:
                removed += len(lattice.demote_to_border(ep, s, c))
        fresh = set()
        for ep in others + cands:
            c = counts[ep]
            if c >= f_min:
                lattice.promote(ep, c, s)
                fresh.add(ep)
            else:
                lattice.add_border(ep, c, s)
        if i > 1:
            _link(lattice, cands)
        else:
            for ep in [ep for ep, nd in level.items() if nd.status != FREQUENT and counts[ep] == 0]:
                removed += len(lattice.remove(ep))
        new[i] = fresh

        if i == lattice.max_level:
            break
        nxt = lattice.level(i + 1)
        cands = sorted(c for c in generate_candidates(lattice.frequent(i), fresh) if c not in nxt)
    return new, removed


class StreamingMiner:
    """Incremental miner for the threshold-based variants.

    Feed batches in order with :meth:`process`; each call updates the
    lattice and returns an :class:`UpdateInfo`.
    """

    def __init__(self, config):
        if config.policy is None:
            raise ConfigError(f"variant {config.variant!r} is not an incremental variant")
        self.config = config
        self.lattice = None
        self.s = 0
        self.f_k = None
        self.deltas = th.DeltaState(
            delta=config.delta or 0.0,
            percentile=config.percentile,
            min_samples=config.min_delta_samples,
        )

    @property
    def delta(self):
        return self.deltas.delta

    def process(self, batch):
        self.s += 1
        events = getattr(batch, "events", batch)
        if self.lattice is None:
            return self._bootstrap(events)
        if not events:
            # nothing to count: keep the lattice, the batch contributes 0
            f_min = 1 if self.f_k is None else self.config.threshold(self.f_k, self.delta)
            return UpdateInfo(self.f_k, f_min, self.delta, 0, {}, 0, frozenset({"empty_batch"}))
        return self._incremental(events)

    def _bootstrap(self, events):
        cfg = self.config
        if not events:
            return UpdateInfo(None, 1, self.delta, 0, {}, 0, frozenset({"shortfall", "empty_batch"}))
        counter = PatternCounter([events])
        info = mine_first_batch(counter, cfg, self.s, self.deltas)
        self.lattice = info.lattice
        self.f_k = info.f_k
        return UpdateInfo(info.f_k, info.f_min, self.delta, len(counter.cache), {}, 0, info.flags)

    def _incremental(self, events):
        cfg = self.config
        delta = self.deltas if cfg.delta is None else cfg.delta
        info = incremental_update(self.lattice, events, cfg, delta, self.s, self.f_k)
        self.f_k = info.f_k
        return info


def incremental_update(lattice, batch, config, delta, s, prev_fk=None):
    """One incremental step: re-estimate ``f_k``, set ``f_min``, update the lattice.

    ``delta`` is either a fixed number or a :class:`~streamepi.thresholds.DeltaState`,
    which is then refreshed from the carried episodes' counts in this batch
    and the previous one. ``prev_fk`` is reused when no frequent
    ``length``-episode survives.
    """
    counter = _as_counter(batch)
    flags = set()
    carried = lattice.frequent(config.length)
    cur = counter(sorted(carried))
    if len(cur) < config.k:
        flags.add("shortfall")
    f_k = kth_count(cur.values(), config.k) if cur else prev_fk
    if not cur:
        flags.add("stale_fk")
    if isinstance(delta, th.DeltaState):
        th.estimate_delta(lattice.batch_counts(config.length, s - 1), cur, delta)
        if delta.fallback:
            flags.add("delta_fallback")
        delta = delta.delta
    f_min = 1 if f_k is None else config.threshold(f_k, delta)
    new, removed = update_lattice(lattice, counter, f_min, s)
    return UpdateInfo(f_k, f_min, delta, len(counter.cache), new, removed, frozenset(flags))


@dataclass
class FirstBatch:
    lattice: PatternLattice
    f_k: int | None
    f_min: int
    rounds: int
    flags: frozenset


def mine_first_batch(data, config, s=1, deltas=None):
    """Bootstrap the lattice from the first batch.

    Finds ``f_k`` by progressive lowering, then mines once more at
    ``f_k - margin`` for the configured policy. With an estimated rate of
    change the initial value is ``delta0_frac * f_k``; it is written to
    ``deltas`` when given.
    """
    counter = _as_counter(data)
    top = mine_top_k(counter, config.k, config.length, config.epsilon_step, config.m, s)
    flags = {"shortfall"} if top.shortfall else set()
    if top.f_k is None:
        # nothing of full length even at threshold 1: keep what was mined there
        return FirstBatch(top.lattice, None, top.threshold, top.rounds, frozenset(flags))
    delta = config.delta if config.delta is not None else config.delta0_frac * top.f_k
    if deltas is not None:
        deltas.delta = delta
        deltas.history.append(delta)
    f_min = config.threshold(top.f_k, delta)
    lattice = mine_levelwise(counter, f_min, config.length, config.m, s)
    return FirstBatch(lattice, top.f_k, f_min, top.rounds, frozenset(flags))
