"""Run several variants over one stream and score them against Alg 0.

An experiment is described by a flat ``key = value`` file (or a dict with
the same keys). Keys mirror the command-line flags with dashes replaced by
underscores::

    # generated input; use ``input = events.tsv`` for a file instead
    num_patterns = 10
    duration = 4000
    seed = 3
    batch_span = 200
    variants = alg0, alg1, alg3, alg5
    k = 10
    l = 2
    m = 4
    v = 2
    report_dir = out

Report directory layout:

``<variant>.csv``
    ranked window top-k rows for every window.
``summary.csv``
    one row per (variant, complete window): precision and recall against
    Alg 0, wall time and node counts.
``averages.csv``
    the same metrics averaged over complete windows.
``reference.csv``
    Alg 0's previous window used as a predictor of the current one.
``resources.csv``
    wall time and node counts for every window, warm-up included.

Only the ``seconds`` and ``rss_kb`` columns depend on the machine; every
other byte is a function of the configuration.
"""

import configparser
import csv
import dataclasses
import logging
import resource
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from .datagen import GenConfig, generate_stream, read_ground_truth
from .episodes import render
from .errors import ConfigError
from .events import batchify, read_events
from .miner import VARIANTS, MinerConfig
from .variants import make_miner

logger = logging.getLogger(__name__)

DEFAULT_MAX_WINDOW_EVENTS = 2_000_000

GEN_KEYS = tuple(f.name for f in dataclasses.fields(GenConfig))


class Score(tuple):
    """``(precision, recall)`` with ``flags`` naming empty denominators."""

    def __new__(cls, precision, recall, flags=frozenset()):
        self = super().__new__(cls, (precision, recall))
        self.flags = frozenset(flags)
        return self

    @property
    def precision(self):
        return self[0]

    @property
    def recall(self):
        return self[1]


def evaluate(predicted, truth):
    """Precision and recall of ``predicted`` against ``truth``.

    An empty denominator gives 0 and adds ``empty_predicted`` or
    ``empty_truth`` to the result's flags.
    """
    predicted, truth = set(predicted), set(truth)
    hits = len(predicted & truth)
    flags = set()
    if predicted:
        precision = hits / len(predicted)
    else:
        precision = 0.0
        flags.add("empty_predicted")
    if truth:
        recall = hits / len(truth)
    else:
        recall = 0.0
        flags.add("empty_truth")
    return Score(precision, recall, flags)


@dataclass
class EvalResult:
    variant: str
    window: int
    precision: float
    recall: float
    seconds: float
    nodes: int
    counted: int
    flags: frozenset = frozenset()
    gt_precision: float | None = None
    gt_recall: float | None = None


def measure_resources(reports):
    """Per-window wall time and structural memory of one run.

    Memory is the lattice (or tracked-pattern) node count plus the number
    of patterns counted in that batch. ``rss_kb`` is the process peak
    resident size where the platform reports it; it is informational only.
    """
    try:
        rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
    except (AttributeError, OSError):  # pragma: no cover - platform dependent
        rss = None
    return [
        {
            "window": r.window,
            "seconds": r.seconds,
            "nodes": r.nodes,
            "counted": r.counted,
            "buffered_events": r.buffered_events,
            "rss_kb": rss,
        }
        for r in reports
    ]


# -- configuration ------------------------------------------------------------


@dataclass
class ExperimentConfig:
    input: str | None = None
    gen: GenConfig | None = None
    truth: str | None = None
    batch_span: float | None = None
    origin: float | None = None
    variants: tuple = ("alg0", "alg1", "alg2", "alg3")
    k: int = 25
    l: int = 4  # noqa: E741 - mirrors the --l flag
    m: int = 10
    v: int | None = None
    delta: float | None = None
    delta0_frac: float = 0.05
    epsilon_step: float = 0.1
    max_window_events: int | None = DEFAULT_MAX_WINDOW_EVENTS
    report_dir: str = "report"

    def miner_config(self, variant, v=None):
        return MinerConfig(
            k=self.k, length=self.l, m=self.m,
            batch_span=self.batch_span or 1.0,
            v=self.v if v is None else v, variant=variant,
            delta=self.delta, delta0_frac=self.delta0_frac,
            epsilon_step=self.epsilon_step,
        )

    def variant_specs(self):
        """``[(label, variant, v)]``; ``alg4:3`` selects v=3 for that run."""
        specs = []
        for token in self.variants:
            name, _, v = token.partition(":")
            if name not in VARIANTS:
                raise ConfigError(f"unknown variant {name!r}; choose from {', '.join(VARIANTS)}")
            v = int(v) if v else None
            label = f"{name}_v{v}" if v is not None else name
            specs.append((label, name, v))
        if len({label for label, _, _ in specs}) != len(specs):
            raise ConfigError(f"duplicate variants in {', '.join(self.variants)}")
        if not specs:
            raise ConfigError("no variants selected")
        return specs


def _parse_delta(text):
    if text is None or str(text).strip().lower() == "auto":
        return None
    return float(text)


_CASTS = {
    "batch_span": float, "origin": float, "k": int, "l": int, "m": int, "v": int,
    "delta": _parse_delta, "delta0_frac": float, "epsilon_step": float,
    "max_window_events": int,
}


def load_config(source=None, overrides=None):
    """Build an :class:`ExperimentConfig` from a file and/or a dict.

    ``overrides`` win over the file. Unknown keys raise :class:`ConfigError`.
    """
    values = {}
    if isinstance(source, dict):
        values.update(source)
    elif source is not None:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
        text = Path(source).read_text(encoding="utf-8")
        parser.read_string("[experiment]\n" + text, source=str(source))
        values.update(parser["experiment"])
    values.update({key: val for key, val in (overrides or {}).items() if val is not None})

    kw, gen = {}, {}
    for key, val in values.items():
        key = key.replace("-", "_")
        if key in GEN_KEYS and key not in ("batch_span",):
            gen[key] = val
        elif key == "variants":
            kw[key] = tuple(t.strip() for t in val.split(",") if t.strip()) if isinstance(val, str) else tuple(val)
        elif key == "max_window_events" and str(val).lower() == "none":
            kw[key] = None
        elif key in _CASTS:
            kw[key] = _CASTS[key](val)
        elif key in ("input", "truth", "report_dir"):
            kw[key] = str(val)
        else:
            raise ConfigError(f"unknown configuration key {key!r}")

    cfg = ExperimentConfig(**kw)
    if cfg.input is None:
        if cfg.batch_span is not None:
            gen["batch_span"] = cfg.batch_span
        cfg.gen = gen_config(gen)
        cfg.batch_span = cfg.gen.batch_span
    elif gen:
        raise ConfigError(f"generator keys {sorted(gen)} given together with input={cfg.input}")
    elif cfg.batch_span is None:
        raise ConfigError("batch_span is required with an input file")
    return cfg


def gen_config(values):
    """GenConfig from string or typed values, casting by field type."""
    kw = {}
    types = {f.name: f.type for f in dataclasses.fields(GenConfig)}
    for key, val in values.items():
        if key not in types:
            raise ConfigError(f"unknown generator key {key!r}")
        cast = types[key] if types[key] in (int, float, str) else str
        kw[key] = cast(val)
    return GenConfig(**kw)


# -- running ---------------------------------------------------------------------


@dataclass
class Experiment:
    """Everything produced by :func:`run_experiment`, before or after writing."""

    config: ExperimentConfig
    symbols: object
    reports: dict
    results: list
    reference: list
    truth_episodes: set | None = None


def _stream(cfg):
    if cfg.input is not None:
        path = Path(cfg.input)
        if not path.exists():
            raise ConfigError(f"input file {path} does not exist")
        events, symbols = read_events(path)
        truth = read_ground_truth(cfg.truth, symbols) if cfg.truth else None
        return events, symbols, truth
    events, truth = generate_stream(cfg.gen)
    return events, cfg.gen.symbols(), truth


def embedded_episodes(truth, length):
    """Every ``length``-node sub-episode of the embedded patterns."""
    out = set()
    for ep in truth.episodes:
        out.update(combinations(ep, length))
    return out


def compare(cfg):
    """Run every configured variant plus Alg 0 and score complete windows."""
    events, symbols, truth = _stream(cfg)
    origin = cfg.origin if cfg.origin is not None else (0.0 if cfg.gen is not None else None)
    batches = batchify(events, cfg.batch_span, origin)
    specs = cfg.variant_specs()
    if not any(name == "alg0" for _, name, _ in specs):
        specs = [("alg0", "alg0", None)] + specs

    reports = {}
    for label, name, v in specs:
        miner = make_miner(cfg.miner_config(name, v), cfg.max_window_events)
        reports[label] = [miner.process(b) for b in batches]
        logger.info("%s: %d windows", label, len(reports[label]))

    embedded = embedded_episodes(truth, cfg.l) if truth is not None else None
    baseline = reports["alg0"]
    results = []
    for label, _, _ in specs:
        for rep, base in zip(reports[label], baseline):
            if rep.partial:
                continue
            score = evaluate(rep.episodes, base.episodes)
            res = EvalResult(
                label, rep.window, score.precision, score.recall, rep.seconds,
                rep.nodes, rep.counted, frozenset(rep.flags | score.flags),
            )
            if embedded is not None:
                gt = evaluate(rep.episodes, embedded)
                res.gt_precision, res.gt_recall = gt
            results.append(res)

    reference = []
    for prev, cur in zip(baseline, baseline[1:]):
        if prev.partial:
            continue
        score = evaluate(prev.episodes, cur.episodes)
        reference.append((cur.window, score.precision, score.recall))
    return Experiment(cfg, symbols, reports, results, reference, embedded)


def run_experiment(config, overrides=None):
    """Run an experiment and write its report directory; returns the path."""
    cfg = config if isinstance(config, ExperimentConfig) else load_config(config, overrides)
    exp = compare(cfg)
    return write_reports(exp, cfg.report_dir)


# -- output ------------------------------------------------------------------------


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _flags(flags):
    return "|".join(sorted(flags))


def competition_ranks(ranked):
    """1-based ranks where tied counts share the best rank ("1224")."""
    ranks, prev = [], None
    for i, (_, c) in enumerate(ranked, 1):
        ranks.append(ranks[-1] if c == prev else i)
        prev = c
    return ranks


def write_variant_csv(reports, dest, symbols=None):
    """Ranked rows of one variant; ``dest`` is a path or an open text file."""
    if hasattr(dest, "write"):
        _variant_rows(reports, dest, symbols)
        return
    with open(dest, "w", newline="", encoding="utf-8") as fh:
        _variant_rows(reports, fh, symbols)


def _variant_rows(reports, fh, symbols):
    w = csv.writer(fh)
    w.writerow(["window_id", "rank", "episode", "window_freq", "f_k", "f_min", "delta_used", "flags"])
    for r in reports:
        for rank, (ep, c) in zip(competition_ranks(r.ranked), r.ranked):
            w.writerow([r.window, rank, render(ep, symbols), c, _fmt(r.f_k), _fmt(r.f_min),
                        _fmt(r.delta), _flags(r.flags)])


def _mean(xs):
    xs = [x for x in xs if x is not None]
    return sum(xs) / len(xs) if xs else None


def write_reports(exp, report_dir):
    out = Path(report_dir)
    out.mkdir(parents=True, exist_ok=True)
    for label, reports in exp.reports.items():
        write_variant_csv(reports, out / f"{label}.csv", exp.symbols)

    cols = ["variant", "window", "precision", "recall", "gt_precision", "gt_recall",
            "seconds", "nodes", "counted", "flags"]
    with open(out / "summary.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in exp.results:
            w.writerow([r.variant, r.window, _fmt(r.precision), _fmt(r.recall), _fmt(r.gt_precision),
                        _fmt(r.gt_recall), _fmt(r.seconds), r.nodes, r.counted, _flags(r.flags)])

    with open(out / "averages.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["variant", "windows", "precision", "recall", "gt_precision", "gt_recall",
                    "seconds", "peak_nodes"])
        for label in exp.reports:
            rows = [r for r in exp.results if r.variant == label]
            w.writerow([
                label, len(rows),
                _fmt(_mean(r.precision for r in rows)), _fmt(_mean(r.recall for r in rows)),
                _fmt(_mean(r.gt_precision for r in rows)), _fmt(_mean(r.gt_recall for r in rows)),
                _fmt(_mean(r.seconds for r in rows)), max((r.nodes for r in rows), default=0),
            ])

    with open(out / "reference.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["window", "precision", "recall"])
        for window, p, r in exp.reference:
            w.writerow([window, _fmt(p), _fmt(r)])

    with open(out / "resources.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["variant", "window", "seconds", "nodes", "counted", "buffered_events", "rss_kb"])
        for label, reports in exp.reports.items():
            for row in measure_resources(reports):
                w.writerow([label, row["window"], _fmt(row["seconds"]), row["nodes"], row["counted"],
                            row["buffered_events"], _fmt(row["rss_kb"])])
    return out
