from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sadic import linalg
from sadic.algorithms import (
    Direction,
    DomainError,
    InconclusiveError,
    directive_sequence,
    eigen_orbit,
    get_algorithm,
    interval_orbit,
    interval_selector,
    perron_direction,
    step,
)
from sadic.words import Substitution


def test_cassaigne_substitutions():
    alg = get_algorithm("cassaigne")
    c0, c1 = alg.substitutions["c0"], alg.substitutions["c1"]
    from sadic.words import word_to_str

    assert [word_to_str(img) for img in c0.images] == ["0", "02", "1"]
    assert [word_to_str(img) for img in c1.images] == ["1", "02", "2"]
    m = c0.compose(c1).matrix
    assert m == ((1, 1, 0), (0, 1, 1), (1, 0, 0))


def test_brun_composition_identity():
    # b210 o b021 o b102 agrees with the cube of 0 -> 10, 1 -> 2, 2 -> 0
    alg = get_algorithm("brun")
    comp = (
        alg.substitutions["b210"]
        .compose(alg.substitutions["b021"])
        .compose(alg.substitutions["b102"])
    )
    cyc = Substitution(["10", "2", "0"], name="cyc")
    cube = cyc.compose(cyc).compose(cyc)
    assert comp.images == cube.images


def test_step_unprojectivized_inverse():
    # x = M x' exactly, with x' the returned direction (up to scaling)
    alg = get_algorithm("cassaigne")
    x = Direction.rational([Fraction(5, 10), Fraction(3, 10), Fraction(2, 10)])
    name, nxt, tie = step(alg, x)
    assert name == "c0" and not tie
    m = alg.substitutions[name].matrix
    back = linalg.mat_vec(m, nxt.v())
    total = sum(back)
    assert tuple(Fraction(c) / total for c in back) == x.v()


def test_step_tie_flag():
    alg = get_algorithm("cassaigne")
    x = Direction.rational([Fraction(2, 5), Fraction(1, 5), Fraction(2, 5)])
    name, _, tie = step(alg, x)
    assert name == "c0" and tie


def test_arnoux_rauzy_domain_error():
    alg = get_algorithm("arnoux-rauzy")
    x = Direction.rational([Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)])
    with pytest.raises(DomainError):
        step(alg, x)


def test_sturmian_is_continued_fraction():
    # the directive sequence of a rational-slope direction runs the
    # subtractive Euclid algorithm until the domain exit
    alg = get_algorithm("sturmian")
    x = Direction.rational([Fraction(7, 12), Fraction(5, 12)])
    _, record = directive_sequence(alg, x, 20)
    # subtractive Euclid on (7, 5): 7-5, 5-2, 3-2, 2-1, 1-1, then the
    # zero component is absorbing (tau1 repeats forever)
    assert record.names[:5] == ["tau0", "tau1", "tau1", "tau0", "tau0"]
    assert record.directions[-1][0] == 0


@given(
    st.sampled_from(["cassaigne", "sturmian", "brun", "arnoux-rauzy"]),
    st.integers(0, 10**6),
)
@settings(max_examples=40, deadline=None)
def test_orbit_matrix_recovers_direction(alg_name, seed):
    import numpy as np

    alg = get_algorithm(alg_name)
    rng = np.random.default_rng(seed)
    x = Direction.floats(rng.dirichlet(np.ones(alg.alphabet_size)))
    _, record = directive_sequence(alg, x, 12)
    n = len(record)
    if n == 0:
        return
    # x = M_[0,n) x^(n) after normalization
    m = record.partial_product(0, n)
    back = np.array(m, dtype=float) @ np.array(record.directions[n], dtype=float)
    back /= back.sum()
    assert np.allclose(back, np.array(x.v_floats()), atol=1e-9)


def test_interval_selector_straddle_and_domain():
    alg = get_algorithm("cassaigne")
    with pytest.raises(InconclusiveError):
        interval_selector(alg, (0.49, 0.1, 0.49), (0.51, 0.1, 0.51))
    ar = get_algorithm("arnoux-rauzy")
    with pytest.raises(DomainError):
        interval_selector(ar, (0.3, 0.3, 0.3), (0.35, 0.35, 0.35))
    with pytest.raises(InconclusiveError):
        interval_selector(ar, (0.45, 0.2, 0.2), (0.55, 0.3, 0.3))


def test_interval_orbit_brackets_exact_orbit():
    alg = get_algorithm("cassaigne")
    x = (Fraction(11, 20), Fraction(1, 4), Fraction(1, 5))
    eps = Fraction(1, 10**9)
    names, lo, hi = interval_orbit(
        alg, [c - eps for c in x], [c + eps for c in x], 5
    )
    cur = Direction.rational(x)
    for k in range(5):
        name, cur, _ = step(alg, cur)
        assert name == names[k]
    v = cur.v()
    total_lo, total_hi = sum(lo), sum(hi)
    for i in range(3):
        assert lo[i] / total_hi <= v[i] <= hi[i] / total_lo


def test_eigen_orbit_is_periodic_for_composed_block():
    alg = get_algorithm("cassaigne")
    m = alg.substitutions["c0"].compose(alg.substitutions["c1"]).matrix
    names, floats = eigen_orbit(alg, m, 30)
    assert names == ["c0", "c1"] * 15
    # the direction itself is periodic with period 2
    assert all(abs(a - b) < 1e-12 for a, b in zip(floats[0], floats[2]))


def test_eigen_direction_object():
    alg = get_algorithm("cassaigne")
    m = alg.substitutions["c0"].compose(alg.substitutions["c1"]).matrix
    x = Direction.eigen(m)
    s, record = directive_sequence(alg, x, 10)
    assert record.names == ["c0", "c1"] * 5
    assert s.names(10) == record.names


def test_perron_direction_enclosure():
    m = ((1, 1, 0), (0, 1, 1), (1, 0, 0))
    enc = perron_direction(m)
    assert enc.eigenvalue.contains(1.7548776662466927)
    v = enc.midpoint_direction().v_floats()
    import numpy as np

    arr = np.array(m, dtype=float) @ np.array(v)
    arr /= arr.sum()
    assert max(abs(arr[i] - v[i]) for i in range(3)) < 1e-12
    # Mv = lambda v holds as interval consistency componentwise
    for i in range(3):
        acc = None
        for j in range(3):
            term = enc.vector[j] * m[i][j]
            acc = term if acc is None else acc + term
        target = enc.eigenvalue * enc.vector[i]
        assert acc.lo <= target.hi and target.lo <= acc.hi
