"""Frequent/border pattern lattice carried from one batch to the next."""

import logging
from collections import deque
from dataclasses import dataclass, field

from .episodes import render

logger = logging.getLogger(__name__)

FREQUENT = "frequent"
BORDER = "border"


def rank_top_k(counts, k):
    """Top-k of a ``{episode: count}`` map, ties at the k-th count included.

    Returns ``(episode, count)`` pairs by decreasing count, ties broken by
    the episode's node sequence.
    """
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    if len(ranked) <= k:
        return ranked
    cut = ranked[k - 1][1]
    return [kv for kv in ranked if kv[1] >= cut]


def kth_count(values, k):
    """The k-th largest of ``values``, the smallest when fewer than k exist."""
    values = sorted(values, reverse=True)
    if not values:
        return None
    return values[min(k, len(values)) - 1]


@dataclass(eq=False)
class LatticeNode:
    episode: tuple
    status: str
    ring: deque
    children: set = field(default_factory=set)

    @property
    def last_counted(self):
        return self.ring[-1][0] if self.ring else None

    def count_at(self, s):
        for b, c in reversed(self.ring):
            if b == s:
                return c
            if b < s:
                break
        return None


class PatternLattice:
    """Per-level frequent and border episodes with batch-count rings.

    Frequent nodes keep the counts of up to ``m`` recent batches; border
    nodes keep only their latest count. Each node remembers the candidates
    it helped generate so that demoting it can drop all of them.
    """

    def __init__(self, m, max_level):
        self.m = m
        self.max_level = max_level
        self._levels = {i: {} for i in range(1, max_level + 1)}

    # -- lookup ---------------------------------------------------------

    def node(self, episode):
        return self._levels[len(episode)].get(episode)

    def __contains__(self, episode):
        return self.node(episode) is not None

    def level(self, i):
        return self._levels[i]

    def frequent(self, i):
        return {ep for ep, nd in self._levels[i].items() if nd.status == FREQUENT}

    def border(self, i):
        return {ep for ep, nd in self._levels[i].items() if nd.status == BORDER}

    def __len__(self):
        return sum(len(lv) for lv in self._levels.values())

    def nodes(self):
        for i in sorted(self._levels):
            yield from self._levels[i].values()

    # -- updates --------------------------------------------------------

    def _ring(self, *entries):
        return deque(entries, maxlen=self.m)

    def promote(self, episode, count, s):
        """Mark ``episode`` frequent at batch ``s`` and record its count."""
        nd = self.node(episode)
        if nd is None:
            nd = LatticeNode(episode, FREQUENT, self._ring())
            self._levels[len(episode)][episode] = nd
        nd.status = FREQUENT
        if nd.ring and nd.ring[-1][0] == s:
            nd.ring.pop()
        nd.ring.append((s, count))
        return nd

    def add_border(self, episode, count, s):
        """Insert or refresh ``episode`` as a border node."""
        nd = self.node(episode)
        if nd is None:
            nd = LatticeNode(episode, BORDER, self._ring())
            self._levels[len(episode)][episode] = nd
        nd.status = BORDER
        nd.ring = self._ring((s, count))
        return nd

    def demote_to_border(self, episode, s, count=None):
        """Turn a frequent node into a border node and delete its super-episodes.

        Returns the list of deleted episodes.
        """
        nd = self.node(episode)
        if count is None:
            count = nd.count_at(s)
            count = 0 if count is None else count
        nd.status = BORDER
        nd.ring = self._ring((s, count))
        removed = self._drop_descendants(nd)
        nd.children = set()
        return removed

    def link(self, parent, child):
        self.node(parent).children.add(child)

    def remove(self, episode):
        """Delete one node and everything generated from it."""
        nd = self._levels[len(episode)].pop(episode, None)
        if nd is None:
            return []
        return [episode] + self._drop_descendants(nd)

    def _drop_descendants(self, root):
        removed = []
        stack = list(root.children)
        while stack:
            ep = stack.pop()
            nd = self._levels[len(ep)].pop(ep, None)
            if nd is None:
                continue
            removed.append(ep)
            stack.extend(nd.children)
        return removed

    # -- queries --------------------------------------------------------

    def window_frequency(self, episode, window):
        """Sum of recorded batch counts inside ``window``.

        Returns ``(count, tracked)``; an episode not in the lattice gives
        ``(0, False)``. Batches without a recorded count contribute 0.
        """
        nd = self.node(episode)
        if nd is None:
            return 0, False
        return sum(c for b, c in nd.ring if b in window), True

    def batch_counts(self, i, s, status=None):
        """``{episode: count}`` at batch ``s`` for level ``i``."""
        out = {}
        for ep, nd in self._levels[i].items():
            if status is not None and nd.status != status:
                continue
            c = nd.count_at(s)
            if c is not None:
                out[ep] = c
        return out

    def top_k(self, i, k, s):
        counts = self.batch_counts(i, s, FREQUENT)
        if not counts:
            logger.warning("level %d has no frequent episodes counted at batch %d", i, s)
            return []
        return rank_top_k(counts, k)

    def state(self, s):
        """Comparable snapshot: level -> (frequent counts, border counts) at batch ``s``."""
        return {
            i: (self.batch_counts(i, s, FREQUENT), self.batch_counts(i, s, BORDER))
            for i in self._levels
        }

    def dump(self, symbols=None):
        lines = []
        for nd in self.nodes():
            ring = " ".join(f"{b}:{c}" for b, c in nd.ring)
            lines.append(f"{len(nd.episode)}\t{nd.status}\t{render(nd.episode, symbols)}\t{ring}")
        return "\n".join(lines)
