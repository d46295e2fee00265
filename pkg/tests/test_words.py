import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sadic.words import (
    DirectiveSequence,
    Substitution,
    abelianize,
    balance_measure,
    complexity,
    fixed_point_prefix,
    frequency,
    periodic_point,
    word_from_str,
    word_to_str,
)

TAU0 = Substitution(["0", "01"], name="tau0")
TAU1 = Substitution(["10", "1"], name="tau1")
C0 = Substitution(["0", "02", "1"], name="c0")
C1 = Substitution(["1", "02", "2"], name="c1")


words_2 = st.lists(st.integers(0, 1), min_size=0, max_size=40).map(tuple)
words_3 = st.lists(st.integers(0, 2), min_size=0, max_size=40).map(tuple)


def brute_complexity(w, n):
    return len({tuple(w[i : i + n]) for i in range(len(w) - n + 1)})


def test_word_round_trip():
    assert word_from_str("0210") == (0, 2, 1, 0)
    assert word_to_str((0, 2, 1, 0)) == "0210"


@given(words_3)
def test_abelianization_counts(w):
    ab = abelianize(w, 3)
    assert ab == tuple(w.count(a) for a in range(3))


@given(words_3)
def test_substitution_matrix_action(w):
    # M . ab(w) = ab(sigma(w))
    img = C0.apply(w)
    m = C0.matrix
    ab = abelianize(w, 3)
    assert abelianize(img, 3) == tuple(
        sum(m[i][j] * ab[j] for j in range(3)) for i in range(3)
    )


@given(words_3)
def test_compose_is_application_order(w):
    lhs = C0.compose(C1).apply(w)
    assert lhs == C0.apply(C1.apply(w))


def test_compose_matrix_is_product():
    m = C0.compose(C1).matrix
    a, b = C0.matrix, C1.matrix
    assert m == tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
        for i in range(3)
    )


@given(words_2, st.integers(0, 30))
def test_apply_truncated_is_prefix(w, limit):
    full = TAU1.apply(w)
    assert TAU1.apply_truncated(w, limit) == full[:limit]


def test_periodic_point_c0c1():
    period, prefix = periodic_point(C0.compose(C1), 0, 10)
    assert period == 1
    assert word_to_str(prefix[:10]) == "0210102010"


def test_periodic_point_requires_growth():
    # c1c0 sends 0 to a word starting with 1; no periodic point through 0
    with pytest.raises(ValueError):
        periodic_point(C1.compose(C0), 0, 10)


def test_periodic_point_prefix_is_fixed():
    sigma = TAU0.compose(TAU1)
    _, prefix = periodic_point(sigma, 0, 200)
    image = sigma.apply(prefix)
    assert image[: len(prefix)] == tuple(prefix)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=120).map(tuple))
@settings(max_examples=60)
def test_complexity_matches_brute_force(w):
    table = complexity(w, min(8, len(w)))
    for n in range(1, min(8, len(w)) + 1):
        assert table[n] == brute_complexity(w, n)


def test_complexity_sturmian_prefix():
    s = DirectiveSequence.periodic({"tau0": TAU0, "tau1": TAU1}, ["tau0", "tau1"])
    prefix = fixed_point_prefix(s, 1, 30000).rows[0]
    table = complexity(prefix, 50)
    assert all(table[n] == n + 1 for n in range(1, 51))


def test_fixed_point_prefix_rows_nested():
    s = DirectiveSequence.periodic(
        {"c0": C0, "c1": C1}, ["c0", "c1"]
    )
    out = fixed_point_prefix(s, 3, 50)
    # u_k = s_k(u_{k+1}) on the determined prefixes
    for k in range(2):
        img = s.subs[s.name(k)].apply(out.rows[k + 1])
        m = min(len(img), len(out.rows[k]))
        assert tuple(img[:m]) == tuple(out.rows[k][:m])


def test_fixed_point_prefix_max_level_monotone():
    s = DirectiveSequence.periodic({"c0": C0, "c1": C1}, ["c0", "c1"])
    shorter = fixed_point_prefix(s, 1, 10**9, max_level=6).rows[0]
    longer = fixed_point_prefix(s, 1, 10**9, max_level=10).rows[0]
    assert tuple(longer[: len(shorter)]) == tuple(shorter)


def test_directive_sequence_cache_replay():
    s = DirectiveSequence.seeded({"c0": C0, "c1": C1}, 7)
    first = s.names(50)
    assert s.names(50) == first
    s2 = DirectiveSequence.seeded({"c0": C0, "c1": C1}, 7)
    assert s2.names(50) == first


def test_matrix_product_window():
    s = DirectiveSequence.explicit({"c0": C0, "c1": C1}, ["c0", "c1", "c1"])
    m = s.matrix_product(0, 3)
    expected = C0.compose(C1).compose(C1).matrix
    assert m == expected


def test_frequency_and_balance_periodic():
    w = word_from_str("01001" * 200)
    freq = frequency(w)
    assert freq[0] == Fraction(3, 5) and freq[1] == Fraction(2, 5)
    bal = balance_measure(w, 10)
    assert max(bal.values()) <= 2  # Sturmian-like 1-balance, small slack


def test_shifted_sequence():
    s = DirectiveSequence.periodic({"c0": C0, "c1": C1}, ["c0", "c1"])
    t = s.shifted(1)
    assert t.names(4) == ["c1", "c0", "c1", "c0"]
