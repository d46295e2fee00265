import math

import numpy as np
import pytest

from sadic import fractal as fractal_mod
from sadic import raster
from sadic.algorithms import Direction, get_algorithm
from sadic.words import DirectiveSequence


def test_embedding_conjugates_block_matrix(embedding, c0c1):
    assert embedding.check_equivariance(c0c1.matrix)


def test_embedding_rejects_wrong_matrix(embedding):
    assert not embedding.check_equivariance(((1, 0, 0), (0, 1, 0), (0, 0, 1)))


def test_phi_kills_direction_only_projectively(embedding, c0c1):
    # phi is linear with phi(e0) = 1; the Perron direction of the block
    # matrix is in the kernel (that is what makes phi o pi_x = phi)
    enc_v = Direction.eigen(c0c1.matrix).v_floats()
    assert abs(embedding.phi_float(enc_v)) < 1e-12
    assert embedding.phi_float((1, 0, 0)) == 1


def test_plane_matrix_matches_phi(embedding):
    A = embedding.plane_matrix()
    for coords in [(1, 0), (0, 1), (2, -3)]:
        amb = (-(coords[0] + coords[1]), coords[0], coords[1])
        z = embedding.phi_float(amb)
        img = A @ np.array(coords, dtype=float)
        assert abs(img[0] - z.real) < 1e-12 and abs(img[1] - z.imag) < 1e-12


def test_ball_certificate(ball_cert):
    assert ball_cert.ok
    assert ball_cert.failures == []
    assert 0 < ball_cert.margin < 0.01


def test_ball_certificate_fails_when_shrunk(embedding, c0c1, reference_balls):
    bad = (
        fractal_mod.Ball.of("-0.19", "-0.15", "0.30"),  # too small to contain
        reference_balls[1],
        reference_balls[2],
    )
    cert = fractal_mod.certify_balls(embedding, c0c1, bad, 8)
    assert not cert.ok


def test_seed_certificate(embedding, ball_cert):
    report = fractal_mod.seed_certificate(embedding, ball_cert)
    assert report.ok
    assert report.origin_outside
    assert sorted(report.exceptional) == [(-1, 1), (1, -1)]
    assert report.inconclusive == []
    assert report.min_margin > 0.3
    assert report.enumeration_bound >= 3


def test_remainder_bound_positive(embedding, ball_cert, c0c1):
    d = fractal_mod.remainder_bound_from_balls(embedding, ball_cert, c0c1.matrix)
    assert 0 < d < 100


def _periodic_setup(depth):
    alg = get_algorithm("cassaigne")
    s = DirectiveSequence.periodic(alg.substitutions, ["c0", "c1"])
    x = Direction.eigen(
        alg.substitutions["c0"].compose(alg.substitutions["c1"]).matrix
    )
    return alg, s, x


def test_approximate_point_counts_follow_matrix():
    _, s, x = _periodic_setup(12)
    f = fractal_mod.approximate(s, x, 12)
    m = s.matrix_product(0, 12)
    total = sum(sum(m[i][j] for i in range(3)) for j in range(3))
    assert sum(f.counts().values()) == total
    assert set(f.counts()) == {0, 1, 2}


def test_approximate_refines_with_depth():
    _, s, x = _periodic_setup(0)
    f1 = fractal_mod.approximate(s, x, 8)
    f2 = fractal_mod.approximate(s, x, 14)
    lo, hi = fractal_mod.hausdorff_estimate(f1, f2)
    assert lo == 0.0  # same fractal: the lower bound must vanish
    assert hi < 4.0


def test_tail_radius_contracts():
    _, s, x = _periodic_setup(0)
    tails = [fractal_mod.approximate(s, x, d).tail_radius for d in (6, 12, 18)]
    assert tails[0] > tails[1] > tails[2] > 0
    # the per-block contraction |beta| < 1 must dominate eventually, even
    # through the loose heuristic remainder factor
    assert tails[2] < tails[0] / 3


def test_rigorous_tail_from_certificate(embedding, ball_cert, c0c1):
    _, s, x = _periodic_setup(0)
    d_bound = fractal_mod.remainder_bound_from_balls(
        embedding, ball_cert, c0c1.matrix
    )
    f = fractal_mod.approximate(s, x, 12, tail_bound=d_bound, tail_rigorous=True)
    assert f.tail_rigorous
    # the certified tail dominates the worst observed refinement distance
    f_deep = fractal_mod.approximate(s, x, 20)
    from scipy.spatial import cKDTree

    d = cKDTree(f.all_points()).query(f_deep.all_points())[0].max()
    assert d <= f.tail_radius


def test_render_deterministic(tmp_path):
    _, s, x = _periodic_setup(0)
    f = fractal_mod.approximate(s, x, 10)
    p1, p2 = tmp_path / "a.ppm", tmp_path / "b.ppm"
    fractal_mod.render(f, width=120, height=120, out=str(p1))
    fractal_mod.render(f, width=120, height=120, out=str(p2))
    assert p1.read_bytes() == p2.read_bytes()
    img = raster.read_ppm(str(p1))
    assert img.shape == (120, 120, 3)
    assert raster.pixel_diff_fraction(img, img) == 0.0
