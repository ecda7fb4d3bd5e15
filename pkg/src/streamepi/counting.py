"""Non-overlapped occurrence counting of serial episodes.

An occurrence maps episode nodes to events of matching type at strictly
increasing times. Two occurrences are non-overlapped when no event of one
lies between the events of the other (by position in the sequence). The
frequency of an episode is the size of a largest set of pairwise
non-overlapped occurrences.
"""

from collections import Counter
from functools import lru_cache

from .errors import OracleSizeError

#: largest input accepted by the exhaustive oracle
ORACLE_MAX_EVENTS = 16


def _events(source):
    return getattr(source, "events", source)


def count_nonoverlapped(episode, events):
    """Frequency of one serial episode in a batch or event list.

    Single left-to-right scan: each node is matched to the earliest
    admissible event and the automaton restarts after every completed
    occurrence. This earliest-completion greedy attains the maximum.
    """
    if not episode:
        raise ValueError("episode must be non-empty")
    size = len(episode)
    count = j = 0
    last = None
    want = episode[0]
    for x, t in _events(events):
        if x != want or (j and t <= last):
            continue
        j += 1
        if j == size:
            count += 1
            j = 0
        else:
            last = t
        want = episode[j]
    return count


def count_many(patterns, events):
    """Count many episodes with a single pass over the events.

    Every episode runs its own automaton; events are dispatched only to
    the automata currently waiting for that event type.

    Returns
    -------
    dict
        Maps each requested episode to its frequency.
    """
    patterns = list(dict.fromkeys(patterns))
    if not patterns:
        return {}
    events = _events(events)
    out = {}
    singles = [ep for ep in patterns if len(ep) == 1]
    if singles:
        tally = Counter(x for x, _ in events)
        for ep in singles:
            out[ep] = tally.get(ep[0], 0)
    multi = [ep for ep in patterns if len(ep) > 1]
    if not multi:
        return out

    n = len(multi)
    counts = [0] * n
    state = [0] * n
    last = [0.0] * n
    waiting = {}
    for i, ep in enumerate(multi):
        waiting.setdefault(ep[0], []).append(i)

    for x, t in events:
        bucket = waiting.get(x)
        if not bucket:
            continue
        keep = []
        for i in bucket:
            j = state[i]
            if j and t <= last[i]:
                keep.append(i)
                continue
            ep = multi[i]
            j += 1
            if j == len(ep):
                counts[i] += 1
                j = 0
            else:
                last[i] = t
            state[i] = j
            nxt = ep[j]
            if nxt == x:
                # this event is spent; wait for the next one of the same type
                keep.append(i)
            else:
                lst = waiting.get(nxt)
                if lst is None:
                    waiting[nxt] = [i]
                else:
                    lst.append(i)
        waiting[x] = keep

    for ep, c in zip(multi, counts):
        out[ep] = c
    return out


def occurrences(episode, events):
    """All occurrences of ``episode`` as tuples of event positions."""
    events = list(_events(events))
    found = []

    def extend(prefix, node, start):
        if node == len(episode):
            found.append(tuple(prefix))
            return
        for pos in range(start, len(events)):
            x, t = events[pos]
            if x != episode[node]:
                continue
            if prefix and not t > events[prefix[-1]][1]:
                continue
            prefix.append(pos)
            extend(prefix, node + 1, pos + 1)
            prefix.pop()

    extend([], 0, 0)
    return found


def brute_force_max_nonoverlapped(episode, events, max_events=ORACLE_MAX_EVENTS):
    """Exact frequency by exhaustive search over occurrence maps.

    Test oracle only; refuses inputs longer than ``max_events``.
    """
    events = list(_events(events))
    if len(events) > max_events:
        raise OracleSizeError(f"{len(events)} events exceed the oracle bound of {max_events}")
    spans = sorted({(occ[0], occ[-1]) for occ in occurrences(episode, events)})

    @lru_cache(maxsize=None)
    def best(after):
        # largest non-overlapped family using only events at positions > after
        result = 0
        for first, end in spans:
            if first > after:
                result = max(result, 1 + best(end))
        return result

    return best(-1)
