from fractions import Fraction

import numpy as np
import pytest

from sadic import fractal as fractal_mod
from sadic import torus
from sadic.algorithms import Direction, directive_sequence, get_algorithm
from sadic.words import DirectiveSequence, fixed_point_prefix, word_from_str


@pytest.fixture(scope="module")
def cassaigne_periodic():
    alg = get_algorithm("cassaigne")
    s = DirectiveSequence.periodic(alg.substitutions, ["c0", "c1"])
    x = Direction.eigen(
        alg.substitutions["c0"].compose(alg.substitutions["c1"]).matrix
    )
    return alg, s, x


def test_exchange_is_translation_exact():
    x = Direction.rational([Fraction(1, 2), Fraction(3, 10), Fraction(1, 5)])
    ex = torus.DomainExchangeStep.from_direction(x)
    assert torus.exchange_is_translation(ex)


def test_exchange_is_translation_float(cassaigne_periodic):
    _, _, x = cassaigne_periodic
    ex = torus.DomainExchangeStep.from_direction(x)
    assert torus.exchange_is_translation(ex, tol=1e-12)


def test_translation_vector(cassaigne_periodic):
    _, _, x = cassaigne_periodic
    trans = torus.TorusTranslation.from_direction(x)
    v = x.v_floats()
    assert trans.t[0] == pytest.approx(1 - v[1])
    assert trans.t[1] == pytest.approx(1 - v[2])


def test_worm_orbit_check(cassaigne_periodic):
    _, s, _ = cassaigne_periodic
    prefix = fixed_point_prefix(s, 1, 2000).rows[0]
    assert torus.worm_orbit_check(prefix, 3)


def test_commuting_square_on_cloud(cassaigne_periodic):
    _, s, x = cassaigne_periodic
    prefix = fixed_point_prefix(s, 1, 500).rows[0]
    v = x.v_floats()
    points = []
    letters = []
    counts = [0, 0, 0]
    for a in prefix[:200]:
        h = sum(counts)
        points.append(tuple(counts[i] - h * v[i] for i in (1, 2)))
        letters.append(a)
        counts[a] += 1
    assert torus.commuting_square_check(v, points, letters)


def test_commuting_square_rejects_wrong_letters(cassaigne_periodic):
    _, s, x = cassaigne_periodic
    v = x.v_floats()
    # a point labeled with the wrong letter moves by the wrong lattice class
    assert torus.commuting_square_check(v, [(0.0, 0.0)], [0])
    p = (0.25, 0.5)
    ok0 = torus.commuting_square_check(v, [p], [0])
    ok1 = torus.commuting_square_check(v, [p], [1])
    assert ok0 and ok1  # both reduce to the same torus translation


def test_heuristic_coding_matches_fixed_point(cassaigne_periodic):
    # nearest-piece letters track the fixed point, but the heuristic tail
    # radius leaves most steps ambiguous -- the reason the certified
    # partition exists
    _, s, x = cassaigne_periodic
    f = fractal_mod.approximate(s, x, 30)
    trans = torus.TorusTranslation.from_direction(x)
    rep = torus.code_orbit(f, trans, 200)
    prefix = fixed_point_prefix(s, 1, 200).rows[0]
    assert rep.coverage_failures == 0
    assert all(int(rep.letters[n]) == prefix[n] for n in range(200))
    certain = [n for n in range(200) if bool(rep.certain[n])]
    assert 0 < len(certain) < 150
    assert rep.ambiguity_rate == 1.0 - len(certain) / 200


def test_certified_coding(cassaigne_periodic, embedding, ball_cert, c0c1):
    alg, s, x = cassaigne_periodic
    part = torus.certified_partition(
        alg.substitutions, s, x, 20, embedding, ball_cert, c0c1.matrix
    )
    trans = torus.TorusTranslation.from_direction(x)
    rep = torus.code_orbit_certified(part, trans, 300)
    prefix = fixed_point_prefix(s, 1, 300).rows[0]
    assert rep.coverage_failures == 0
    for n in range(300):
        if bool(rep.certain[n]):
            assert int(rep.letters[n]) == prefix[n]


def test_certified_partition_rejects_odd_depth(cassaigne_periodic, embedding, ball_cert, c0c1):
    alg, s, x = cassaigne_periodic
    with pytest.raises(ValueError):
        torus.certified_partition(
            alg.substitutions, s, x, 19, embedding, ball_cert, c0c1.matrix
        )


def test_bounded_remainder_exact_rational():
    # (01001)^omega has letter frequencies (3/5, 2/5): exact deviations
    prefix = word_from_str("01001" * 100)
    rep = torus.bounded_remainder_check(
        prefix, (Fraction(3, 5), Fraction(2, 5)), 500
    )
    assert isinstance(rep.k, Fraction)
    assert rep.per_letter[0] == rep.per_letter[1]  # deviations sum to zero
    assert rep.k == Fraction(3, 5)
    amb = torus.bounded_remainder_check(
        prefix, (Fraction(3, 5), Fraction(2, 5)), 500, norm="ambient"
    )
    assert amb.k == 2 * rep.k


def test_bounded_remainder_float_golden_sturmian():
    alg = get_algorithm("sturmian")
    x = Direction.eigen(((1, 1), (1, 0)))
    s, _ = directive_sequence(alg, x, 40)
    prefix = fixed_point_prefix(s, 1, 5000).rows[0]
    v = x.v_floats()
    rep = torus.bounded_remainder_check(prefix, v, 5000)
    # golden-rotation bounded remainder: per-letter constant < 1
    assert max(rep.per_letter) < 1.0


def test_return_word_factorization_roundtrip(cassaigne_periodic):
    alg, s, _ = cassaigne_periodic
    c0 = alg.substitutions["c0"]
    u1 = fixed_point_prefix(s.shifted(1), 1, 400).rows[0]
    image = c0.apply(u1)
    blocks = torus.return_word_factorization(image)
    flat = tuple(c for b in blocks for c in b)
    assert flat == tuple(image)
    assert torus.count_factorizations(image) == 1
    decoded = torus.induced_word(image, c0)
    assert tuple(decoded) == tuple(u1)


def test_return_word_factorization_rejects():
    with pytest.raises(ValueError):
        torus.return_word_factorization((2, 0, 1))


def test_renormalize_two_steps():
    alg = get_algorithm("cassaigne")
    x = Direction.floats(
        (0.256005715380561, 0.286881483823029, 0.457112800796410)
    )
    s, record = directive_sequence(alg, x, 18)
    assert record.names[:6] == ["c1", "c0", "c1", "c0", "c1", "c0"]
    f = fractal_mod.approximate(s, x, 16)
    step1 = torus.renormalize(alg, x, f, s)
    assert step1.kind == "top" and step1.sub_name == "c1"
    assert step1.removed == "T_x(R_0)"
    assert abs(step1.det_n) == pytest.approx(0.743994, abs=1e-4)
    assert step1.det_identity_error < 1e-10
    assert step1.decomposition_exact
    assert step1.hausdorff_error < 1e-10
    step2 = torus.renormalize(
        alg, step1.next_direction, step1.next_fractal, s.shifted(1)
    )
    assert step2.kind == "bottom" and step2.sub_name == "c0"
    assert step2.removed == "R_2"
    assert step2.decomposition_exact
    assert step2.hausdorff_error < 1e-10


def test_renormalize_refuses_tie():
    alg = get_algorithm("cassaigne")
    x = Direction.rational([Fraction(2, 5), Fraction(1, 5), Fraction(2, 5)])
    s, _ = directive_sequence(alg, x, 6)
    f = fractal_mod.approximate(s, x, 4)
    from sadic.algorithms import DomainError

    with pytest.raises(DomainError):
        torus.renormalize(alg, x, f, s)


def test_plane_map_conjugation(cassaigne_periodic):
    # N o pi_Fx = pi_x o M on a sample of integer vectors
    alg, s, x = cassaigne_periodic
    from sadic.algorithms import step as alg_step
    from sadic.geometry import project

    name, x_next, _ = alg_step(alg, x)
    m = alg.substitutions[name].matrix
    v = x.v_floats()
    v_next = x_next.v_floats()
    n_mat = np.array(torus.plane_map(v, m), dtype=float)
    rng = np.random.default_rng(0)
    for _ in range(20):
        z = rng.integers(-5, 6, size=3)
        lhs = n_mat @ np.array(project(v_next, z))
        rhs = np.array(project(v, np.array(m, dtype=float) @ z))
        assert np.allclose(lhs, rhs, atol=1e-10)
