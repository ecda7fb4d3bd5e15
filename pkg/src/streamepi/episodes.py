"""Serial episodes and Apriori candidate generation.

An episode is a plain tuple of event-type ids, e.g. ``(0, 1, 2)`` for
A->B->C. Repeated types are allowed.
"""

from .errors import ConfigError

ARROW = "->"


def render(episode, symbols=None):
    if symbols is None:
        return ARROW.join(str(x) for x in episode)
    return ARROW.join(symbols.name(x) for x in episode)


def parse(text, symbols):
    return tuple(symbols.add(name) for name in text.split(ARROW))


def maximal_subepisodes(episode):
    """Distinct episodes obtained by deleting exactly one node."""
    if len(episode) < 2:
        raise ConfigError(f"episode of length {len(episode)} has no proper subepisodes")
    return {episode[:i] + episode[i + 1:] for i in range(len(episode))}


def serial_join(alpha, beta):
    """Join two i-node episodes whose (i-1)-suffix/prefix agree.

    Returns ``alpha + beta[-1:]`` or None when they do not overlap.
    """
    if len(alpha) != len(beta):
        raise ConfigError(f"cannot join episodes of lengths {len(alpha)} and {len(beta)}")
    if alpha[1:] == beta[:-1]:
        return alpha + beta[-1:]
    return None


def is_closed(episode, frequent):
    return all(sub in frequent for sub in maximal_subepisodes(episode))


def generate_candidates(frequent, new=None):
    """Candidates of size i+1 from frequent episodes of size i.

    Parameters
    ----------
    frequent : collection of tuple
        The frequent i-node episodes.
    new : collection of tuple, optional
        Newly frequent episodes (a subset of ``frequent``). When given,
        only candidates having at least one maximal subepisode in ``new``
        are returned. None means no restriction.

    Returns
    -------
    set of tuple
        Every join whose maximal subepisodes all lie in ``frequent``.
    """
    frequent = frequent if isinstance(frequent, (set, frozenset, dict)) else set(frequent)
    if not frequent:
        return set()
    if new is None:
        return _full_join(frequent)
    return _anchored(frequent, new)


def _full_join(frequent):
    by_prefix = {}
    for beta in frequent:
        by_prefix.setdefault(beta[:-1], []).append(beta[-1])
    out = set()
    for alpha in frequent:
        for last in by_prefix.get(alpha[1:], ()):
            cand = alpha + (last,)
            if is_closed(cand, frequent):
                out.add(cand)
    return out


def _anchored(frequent, new):
    # a candidate with a new subepisode is that subepisode with one node
    # inserted; every node of a closed candidate already occurs in `frequent`
    alphabet = sorted({x for ep in frequent for x in ep})
    out = set()
    for delta in new:
        if delta not in frequent:
            continue
        for pos in range(len(delta) + 1):
            head, tail = delta[:pos], delta[pos:]
            for x in alphabet:
                cand = head + (x,) + tail
                if cand not in out and is_closed(cand, frequent):
                    out.add(cand)
    return out
