"""Events, symbol tables, time batching and sliding windows.

Event files are UTF-8 text with one event per line::

    # comment
    0.125	A
    0.250	B

Timestamps are decimal seconds and must be non-decreasing.
"""

import io
import logging
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import ConfigError, OrderingError, ParseError

logger = logging.getLogger(__name__)

#: batches holding more events than this trigger a warning (no hard cap)
MEMORY_WARNING_EVENTS = 5_000_000


class Event(NamedTuple):
    event_type: int
    timestamp: float


class SymbolTable:
    """Bidirectional map between event-type names and dense integer ids."""

    def __init__(self, names=()):
        self._ids = {}
        self._names = []
        for name in names:
            self.add(name)

    def add(self, name):
        name = str(name)
        try:
            return self._ids[name]
        except KeyError:
            self._ids[name] = len(self._names)
            self._names.append(name)
            return self._ids[name]

    def id(self, name):
        return self._ids[str(name)]

    def name(self, event_type):
        return self._names[event_type]

    @property
    def names(self):
        return list(self._names)

    def __len__(self):
        return len(self._names)

    def __contains__(self, name):
        return str(name) in self._ids

    def __repr__(self):
        return f"SymbolTable({self._names!r})"


def read_events(source, symbols=None):
    """Parse an event file.

    Parameters
    ----------
    source : str, path-like or text/binary file object
        A path is opened; a file object is read as is.
    symbols : SymbolTable, optional
        Table to extend with any new event-type names. A fresh one is
        created when omitted.

    Returns
    -------
    events : list of Event
    symbols : SymbolTable

    Raises
    ------
    ParseError
        On a malformed line, with its 1-based line number.
    OrderingError
        When a timestamp is smaller than the one before it.
    """
    if symbols is None:
        symbols = SymbolTable()
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, encoding="utf-8") as fh:
            return _parse(fh, symbols), symbols
    if isinstance(source, io.RawIOBase | io.BufferedIOBase):
        source = io.TextIOWrapper(source, encoding="utf-8")
    return _parse(source, symbols), symbols


def _parse(lines, symbols):
    events = []
    last = -math.inf
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[1].strip():
            raise ParseError(lineno, f"expected 'timestamp<TAB>event_type', got {raw!r}")
        try:
            t = float(parts[0])
        except ValueError:
            raise ParseError(lineno, f"bad timestamp {parts[0]!r}") from None
        if not math.isfinite(t) or t < 0:
            raise ParseError(lineno, f"timestamp must be finite and non-negative, got {t}")
        if t < last:
            raise OrderingError(lineno, f"timestamp {t} is before previous timestamp {last}")
        last = t
        events.append(Event(symbols.add(parts[1].strip()), t))
    return events


def write_events(events, symbols, path):
    """Write events in the format read by :func:`read_events`."""
    with open(path, "w", encoding="utf-8") as fh:
        for ev in events:
            fh.write(f"{ev.timestamp!r}\t{symbols.name(ev.event_type)}\n")


@dataclass(frozen=True)
class Batch:
    """Events whose times fall in ``[start, end)``; ``index`` counts from 1."""

    index: int
    start: float
    end: float
    events: tuple = ()

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)


def batch_index(t, span, origin=0.0):
    """1-based index of the half-open batch containing time ``t``."""
    offset = t - origin
    s = math.floor(offset / span)
    # division can round across a boundary, recheck with multiplication
    if (s + 1) * span <= offset:
        s += 1
    elif s * span > offset:
        s -= 1
    return s + 1


def batchify(events, span, origin=None):
    """Split time-ordered events into contiguous batches of width ``span``.

    Batch ``s`` holds events with ``(s-1)*span <= t - origin < s*span``.
    Empty batches between non-empty ones are kept so indices stay
    contiguous. ``origin`` defaults to the first event's timestamp.
    """
    if not span > 0:
        raise ConfigError(f"batch span must be positive, got {span}")
    events = list(events)
    if not events:
        return []
    if origin is None:
        origin = events[0].timestamp
    if events[0].timestamp < origin:
        raise ConfigError(f"origin {origin} is after the first event at {events[0].timestamp}")

    groups = {}
    for ev in events:
        groups.setdefault(batch_index(ev.timestamp, span, origin), []).append(ev)
    last = max(groups)
    batches = []
    for s in range(1, last + 1):
        evs = groups.get(s, ())
        if len(evs) > MEMORY_WARNING_EVENTS:
            logger.warning("batch %d holds %d events", s, len(evs))
        batches.append(Batch(s, origin + (s - 1) * span, origin + s * span, tuple(evs)))
    return batches


@dataclass(frozen=True)
class Window:
    """The ``m`` consecutive batches ending at batch ``end``."""

    end: int
    m: int

    @property
    def first(self):
        return max(1, self.end - self.m + 1)

    @property
    def batch_indices(self):
        return range(self.first, self.end + 1)

    @property
    def partial(self):
        return self.end < self.m

    def __contains__(self, s):
        return self.first <= s <= self.end


def window_of(s, m):
    if s < 1 or m < 1:
        raise ConfigError(f"need s >= 1 and m >= 1, got s={s}, m={m}")
    return Window(s, m)


def flatten(batches: Iterable[Batch]):
    return [ev for b in batches for ev in b.events]
