"""Synthetic event streams with embedded serial episodes.

Background noise: every noise event type fires as a homogeneous Poisson
process. The aggregate ``noise_rate`` is split across types with weights
proportional to ``rank ** -powerlaw_exponent``, which gives a long tail.

Embedded patterns: each pattern is a serial episode over its own event
types. Occurrence start times arrive as a Poisson process; an occurrence
emits its events in order, separated by exponential gaps of mean
``intra_gap``. With ``drift="random_walk"`` every pattern's rate is
multiplied by ``1 + drift_step`` or ``1 - drift_step`` (fair coin) at each
batch boundary, clamped to ``[0.1, 10]`` times its initial value.

Under drift the intended count of a pattern changes between consecutive
batches by about ``drift_step * rate * batch_span`` plus Poisson noise of
order ``sqrt(2 * rate * batch_span)``; :func:`intended_delta` measures the
realised value from the ground truth.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .episodes import parse, render
from .errors import ConfigError
from .events import Event, SymbolTable

DRIFTS = ("none", "random_walk")


@dataclass(frozen=True)
class GenConfig:
    alphabet_size: int = 500
    noise_rate: float = 10.0
    powerlaw_exponent: float = 2.0
    num_patterns: int = 10
    pattern_length: int = 4
    pattern_rate: float = 1.0
    intra_gap: float = 0.05
    drift: str = "random_walk"
    drift_step: float = 0.05
    batch_span: float = 200.0
    duration: float = 4000.0
    seed: int = 0

    def __post_init__(self):
        if self.num_patterns * self.pattern_length > self.alphabet_size:
            raise ConfigError(
                f"{self.num_patterns} patterns of length {self.pattern_length} need more than "
                f"{self.alphabet_size} event types"
            )
        if self.num_patterns < 0 or self.pattern_length < 1:
            raise ConfigError("num_patterns must be >= 0 and pattern_length >= 1")
        if not self.powerlaw_exponent > 1:
            raise ConfigError(f"powerlaw_exponent must exceed 1, got {self.powerlaw_exponent}")
        if self.noise_rate < 0 or self.pattern_rate < 0 or self.intra_gap < 0:
            raise ConfigError("rates and gaps must be non-negative")
        if self.drift not in DRIFTS:
            raise ConfigError(f"drift must be one of {DRIFTS}, got {self.drift!r}")
        if not 0 <= self.drift_step < 1:
            raise ConfigError(f"drift_step must lie in [0, 1), got {self.drift_step}")
        if not self.batch_span > 0 or not self.duration > 0:
            raise ConfigError("batch_span and duration must be positive")

    @property
    def n_batches(self):
        return math.ceil(self.duration / self.batch_span - 1e-9)

    @property
    def n_noise_types(self):
        return self.alphabet_size - self.num_patterns * self.pattern_length

    def symbols(self):
        return SymbolTable(f"e{i}" for i in range(self.alphabet_size))

    def patterns(self):
        """Embedded episodes; they use the highest ids (least noisy ranks)."""
        base = self.n_noise_types
        n = self.pattern_length
        return [tuple(range(base + p * n, base + (p + 1) * n)) for p in range(self.num_patterns)]

    def noise_rates(self):
        ranks = np.arange(1, self.n_noise_types + 1, dtype=float)
        weights = ranks ** -self.powerlaw_exponent
        return self.noise_rate * weights / weights.sum() if len(weights) else weights


@dataclass
class GroundTruth:
    """Injected occurrence counts: ``counts[s][episode]`` for batch ``s``."""

    episodes: list
    counts: dict = field(default_factory=dict)
    rates: dict = field(default_factory=dict)

    def rows(self):
        for s in sorted(self.counts):
            for ep in self.episodes:
                yield s, ep, self.counts[s][ep]


def generate_stream(config):
    """Generate ``(events, truth)``; a pure function of ``config``."""
    rng = np.random.default_rng(config.seed)
    types, times = [], []

    rates = config.noise_rates()
    if config.noise_rate > 0 and len(rates):
        n = rng.poisson(config.noise_rate * config.duration)
        types.append(rng.choice(len(rates), size=n, p=rates / rates.sum()))
        times.append(rng.uniform(0.0, config.duration, size=n))

    patterns = config.patterns()
    truth = GroundTruth(patterns)
    current = np.full(len(patterns), config.pattern_rate, dtype=float)
    lo, hi = 0.1 * config.pattern_rate, 10.0 * config.pattern_rate
    n_nodes = config.pattern_length
    for b in range(config.n_batches):
        start = b * config.batch_span
        stop = min(start + config.batch_span, config.duration)
        truth.rates[b + 1] = dict(zip(patterns, current.tolist()))
        truth.counts[b + 1] = {}
        for p, ep in enumerate(patterns):
            n = rng.poisson(current[p] * (stop - start))
            truth.counts[b + 1][ep] = int(n)
            if n == 0:
                continue
            first = rng.uniform(start, stop, size=n)
            gaps = rng.exponential(config.intra_gap, size=(n, n_nodes - 1)) if n_nodes > 1 else np.zeros((n, 0))
            offsets = np.concatenate([np.zeros((n, 1)), np.cumsum(gaps, axis=1)], axis=1)
            times.append((first[:, None] + offsets).ravel())
            types.append(np.tile(np.asarray(ep), n))
        if config.drift == "random_walk" and len(patterns):
            signs = rng.choice((-1.0, 1.0), size=len(patterns))
            current = np.clip(current * (1 + signs * config.drift_step), lo, hi)

    if not times:
        return [], truth
    t = np.round(np.concatenate(times), 6)
    x = np.concatenate(types).astype(np.int64)
    keep = t < config.duration
    t, x = t[keep], x[keep]
    order = np.argsort(t, kind="stable")
    events = [Event(int(a), float(b)) for a, b in zip(x[order], t[order])]
    return events, truth


def intended_delta(truth):
    """Largest change of an injected count between consecutive batches."""
    batches = sorted(truth.counts)
    best = 0
    for a, b in zip(batches, batches[1:]):
        for ep in truth.episodes:
            best = max(best, abs(truth.counts[b][ep] - truth.counts[a][ep]))
    return best


def export_ground_truth(truth, path, symbols=None):
    """Write ``batch,episode,intended_count`` rows."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["batch", "episode", "intended_count"])
        for s, ep, c in truth.rows():
            w.writerow([s, render(ep, symbols), c])


def read_ground_truth(path, symbols):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    episodes = list(dict.fromkeys(parse(r["episode"], symbols) for r in rows))
    truth = GroundTruth(episodes)
    for r in rows:
        truth.counts.setdefault(int(r["batch"]), {})[parse(r["episode"], symbols)] = int(r["intended_count"])
    return truth


#: Per-batch occurrence counts of the constructed stream below. Window sums
#: over the four batches: AB 35, MN 34, EF 25, WX 24, IJ 23, PQ 19.
DISCONNECT_COUNTS = (
    {"PQ": 10, "WX": 12, "AB": 9, "MN": 9},
    {"EF": 13, "IJ": 11, "AB": 9, "MN": 8},
    {"EF": 12, "IJ": 12, "AB": 9, "MN": 9},
    {"WX": 12, "PQ": 9, "AB": 8, "MN": 8},
)


def window_disconnect_stream(batch_span=100.0, counts=DISCONNECT_COUNTS):
    """Four batches whose window top-2 (A->B, M->N) is in no batch top-2.

    Each batch holds one contiguous block per pattern, e.g.
    ``A B A B ...``, with one event per time unit. Returns
    ``(events, symbols)``; batch ``s`` starts at ``(s-1) * batch_span``.
    """
    symbols = SymbolTable()
    events = []
    for s, batch in enumerate(counts):
        t = s * batch_span
        for pattern, n in batch.items():
            ids = [symbols.add(c) for c in pattern]
            for _ in range(n):
                for x in ids:
                    t += 1.0
                    events.append(Event(x, t))
        if t >= (s + 1) * batch_span:
            raise ConfigError(f"batch {s + 1} does not fit in a span of {batch_span}")
    return events, symbols
