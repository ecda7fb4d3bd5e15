"""Batch frequency thresholds, rate-of-change estimation and error bounds.

Notation used throughout: ``f_k`` is the batch frequency of the k-th most
frequent episode, ``m`` the number of batches per window, ``v`` the
persistence parameter and ``delta`` the largest change of any episode's
batch frequency between consecutive batches.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigError

EXACT = "exact"            # exact window top-k: 2(m-1)*delta
PERSISTENT = "persistent"  # (v,k)-persistent: 2(m-v)*delta
NEXT_BATCH = "next_batch"  # next batch's top-k: 2*delta
HEURISTIC = "heuristic"    # m(2 - v/m - (v/m)^2)*delta
BATCH_TOPK = "batch_topk"  # no margin

POLICIES = (EXACT, PERSISTENT, NEXT_BATCH, HEURISTIC, BATCH_TOPK)


def margin(policy, m, v=None, delta=0.0):
    """How far below ``f_k`` a batch threshold must reach for ``policy``."""
    if policy == EXACT:
        return 2 * (m - 1) * delta
    if policy == NEXT_BATCH:
        return 2 * delta
    if policy == BATCH_TOPK:
        return 0
    if v is None:
        raise ConfigError(f"policy {policy!r} needs the persistence parameter v")
    if not 1 <= v <= m:
        raise ConfigError(f"need 1 <= v <= m, got v={v}, m={m}")
    if policy == PERSISTENT:
        return 2 * (m - v) * delta
    if policy == HEURISTIC:
        r = Fraction(v, m) if isinstance(v, int) else v / m
        return float(m * (2 - r - r * r)) * delta
    raise ConfigError(f"unknown threshold policy {policy!r}")


def threshold(policy, f_k, m, v=None, delta=0.0):
    """Integer batch threshold ``max(1, ceil(f_k - margin))``."""
    x = f_k - margin(policy, m, v, delta)
    # absorb float noise such as 63.99999999 -> 64
    return max(1, math.ceil(round(x, 9)))


# -- rate of change --------------------------------------------------------


def nearest_rank(values, percentile):
    """Nearest-rank percentile: the ceil(p/100 * n)-th smallest value."""
    values = sorted(values)
    if not values:
        raise ValueError("no values")
    rank = max(1, math.ceil(percentile / 100 * len(values)))
    return values[rank - 1]


@dataclass
class DeltaState:
    """Running estimate of the maximum rate of change."""

    delta: float = 0.0
    percentile: float = 75.0
    min_samples: int = 4
    history: list = field(default_factory=list)
    fallback: bool = False


def estimate_delta(prev, cur, state):
    """Update ``state`` from two consecutive batches' episode counts.

    The estimate is the nearest-rank percentile (75th by default) of
    ``|cur[a] - prev[a]|`` over episodes present in both maps. With fewer
    than ``state.min_samples`` common episodes the previous value is kept
    and ``state.fallback`` is set.
    """
    diffs = [abs(cur[ep] - prev[ep]) for ep in cur.keys() & prev.keys()]
    if len(diffs) < state.min_samples:
        state.fallback = True
    else:
        state.fallback = False
        state.delta = nearest_rank(diffs, state.percentile)
    state.history.append(state.delta)
    return state.delta


# -- approximation bounds ---------------------------------------------------


@dataclass(frozen=True)
class Bounds:
    f_lower: object
    f_upper: object
    valid: bool
    mu: object
    max_errors: object
    corollary: dict


def _exact(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def separation_condition(m, v, phi):
    """True when phi/2 > max(1, (1 - v/m)(m - v + 1))."""
    half = _exact(phi) / 2
    return half > max(1, (1 - Fraction(v, m)) * (m - v + 1))


def closed_form_errors(k, m, v, phi, eps):
    """Closed-form error counts for v = 1, v = m and v = floor((m+1)/2).

    Returns ``{case: errors}`` for each case whose v matches and whose
    separation condition holds. Values are exact fractions.
    """
    if m < 2:
        return {}
    k, phi, eps = _exact(k), _exact(phi), _exact(eps)
    half = phi / 2
    out = {}
    if v == 1 and half > m - 1:
        out[1] = eps * k * m / (m - 1)
    if v == m and half > 1:
        out[2] = eps * k * m
    if v == (m + 1) // 2 and half > Fraction(-(-(m - 1) // 2) * -(-(m + 1) // 2), m):
        out[3] = 4 * eps * k * m * m / (m * m - 1)
    return out


def bounds(k, m, v, delta, phi, eps, fk_per_batch, n_persistent=None):
    """Window-frequency bounds and top-k error guarantee.

    Parameters
    ----------
    fk_per_batch : sequence of length m
        ``f_k`` of every batch in the window.
    n_persistent : int, optional
        Number of (v,k)-persistent episodes, when known. The guarantee
        needs at least k of them.

    Returns
    -------
    Bounds
        ``f_lower`` is the least window frequency of a (v,k)-persistent
        episode, ``f_upper`` the strict upper bound for any other one,
        ``max_errors = eps*k*m/mu``. ``valid`` is False when the
        separation condition (or the ``n_persistent >= k`` requirement)
        fails, in which case the numbers carry no guarantee.
    """
    if len(fk_per_batch) != m:
        raise ConfigError(f"expected {m} per-batch f_k values, got {len(fk_per_batch)}")
    if not 1 <= v <= m:
        raise ConfigError(f"need 1 <= v <= m, got v={v}, m={m}")
    if min(k, delta, phi, eps) < 0:
        raise ConfigError("parameters must be non-negative")
    total = sum(_exact(f) for f in fk_per_batch)
    d = _exact(delta)
    f_lower = total - (m - v) * (m - v + 1) * d
    f_upper = total + v * (v + 1) * d

    valid = separation_condition(m, v, phi)
    if n_persistent is not None and n_persistent < k:
        valid = False

    phi_x = _exact(phi)
    disc = 1 + 2 * m * phi_x
    root = math.isqrt(int(disc)) if disc.denominator == 1 else None
    if root is not None and root * root == disc:
        g = Fraction(root - 1, 2)
    else:
        g = (math.sqrt(1 + 2 * m * float(phi_x)) - 1) / 2
    mu = min(Fraction(m - v + 1), phi_x / 2, g)
    if mu > 0:
        max_errors = _exact(eps) * k * m / mu if isinstance(mu, Fraction) else float(eps) * k * m / mu
    else:
        max_errors = math.inf
    return Bounds(f_lower, f_upper, valid, mu, max_errors, closed_form_errors(k, m, v, phi, eps))
