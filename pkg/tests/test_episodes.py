from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from streamepi.episodes import (
    generate_candidates, is_closed, maximal_subepisodes, parse, render, serial_join,
)
from streamepi.errors import ConfigError
from streamepi.events import SymbolTable

from conftest import ep


def test_maximal_subepisodes():
    assert maximal_subepisodes(ep("ABC")) == {ep("BC"), ep("AC"), ep("AB")}
    assert maximal_subepisodes(ep("AA")) == {ep("A")}
    assert maximal_subepisodes(ep("AB")) == {ep("A"), ep("B")}
    with pytest.raises(ConfigError):
        maximal_subepisodes(ep("A"))


def test_serial_join():
    assert serial_join(ep("AB"), ep("BC")) == ep("ABC")
    assert serial_join(ep("AB"), ep("CD")) is None
    aaa = serial_join(ep("AA"), ep("AA"))
    assert aaa == ep("AAA") and maximal_subepisodes(aaa) == {ep("AA")}
    assert serial_join(ep("A"), ep("B")) == ep("AB")
    with pytest.raises(ConfigError):
        serial_join(ep("AB"), ep("ABC"))


def test_render_parse_round_trip():
    symbols = SymbolTable()
    e = parse("x->y->x", symbols)
    assert e == (0, 1, 0) and render(e, symbols) == "x->y->x"
    assert render((3, 4)) == "3->4"


def test_restricted_generation_examples():
    F = {ep("AB"), ep("BC"), ep("AC")}
    assert generate_candidates(F, {ep("BC")}) == {ep("ABC")}
    assert generate_candidates(F, set()) == set()
    # without A->C the join A->B->C is not closed
    assert generate_candidates({ep("AB"), ep("BC")}, {ep("BC")}) == set()
    assert generate_candidates({ep("AB")}) == set()
    assert generate_candidates(set()) == set()


def test_level_one_joins_include_repeats():
    F = {ep("A"), ep("B")}
    assert generate_candidates(F) == {ep("AA"), ep("AB"), ep("BA"), ep("BB")}
    assert generate_candidates(F, {ep("A")}) == {ep("AA"), ep("AB"), ep("BA")}


def brute_candidates(F, new=None):
    """Every (i+1)-sequence over F's symbols, filtered by the definitions."""
    if not F:
        return set()
    i = len(next(iter(F)))
    sigma = {x for e in F for x in e}
    out = set()
    for cand in product(sorted(sigma), repeat=i + 1):
        subs = maximal_subepisodes(cand)
        if not subs <= F:
            continue
        if new is not None and not subs & set(new):
            continue
        out.add(cand)
    return out


level_sets = st.integers(1, 3).flatmap(
    lambda i: st.sets(st.tuples(*[st.integers(0, 3)] * i), max_size=14)
)


@given(level_sets, st.data())
def test_generation_matches_brute_force(F, data):
    new = data.draw(st.sets(st.sampled_from(sorted(F))) if F else st.just(set()))
    full = generate_candidates(F)
    assert full == brute_candidates(F)
    restricted = generate_candidates(F, new)
    assert restricted == brute_candidates(F, new)
    # downward closure and restriction soundness
    for c in full:
        assert is_closed(c, F)
    assert restricted <= full
    # every candidate maps injectively to (new member, frequent member, side)
    assert len(restricted) <= 2 * len(new) * len(F)


def test_literal_cardinality_bound_counterexample():
    # F = {A, B}, F_new = {A}: three candidates exceed |F_new| * |F| = 2
    assert len(generate_candidates({ep("A"), ep("B")}, {ep("A")})) == 3
