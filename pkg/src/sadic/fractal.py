"""Rauzy-fractal approximation, complex embedding, ball certification.

The fractal R_a(s) is the closure of the projected worm piece; its
finite-depth shadow is the set of path sums pi_x(sum_k M_[0,k) t_k) over
length-n automaton paths ending at a.  For the Cassaigne periodic point
the plane is identified with C through the left eigenvector
e = (1, beta^2 - beta, beta - 1), where multiplication by the matrix
becomes multiplication by beta; certified disks around the pieces then
follow from a finite path check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import automaton as automaton_mod
from . import linalg, raster
from .geometry import project
from .intervals import ComplexInterval, Interval, cassaigne_roots
from .words import DirectiveSequence, Substitution


# ---------------------------------------------------------------------------
# finite-depth approximation


@dataclass
class FractalApprox:
    v: tuple[float, ...]  # normalized direction
    depth: int
    points: dict[int, np.ndarray]  # letter -> (count, d) Lambda-basis floats
    int_points: dict[int, list[tuple[int, ...]]]  # ambient integer path sums
    tail_radius: float
    tail_rigorous: bool
    start_letters: tuple[int, ...]

    @property
    def alphabet_size(self) -> int:
        return len(self.v)

    def all_points(self) -> np.ndarray:
        arrs = [p for p in self.points.values() if len(p)]
        return np.concatenate(arrs) if arrs else np.zeros((0, len(self.v) - 1))

    def counts(self) -> dict[int, int]:
        return {a: len(p) for a, p in self.points.items()}


def approximate(
    s: DirectiveSequence,
    x,
    depth: int,
    start_letters: Optional[Sequence[int]] = None,
    tail_bound: Optional[float] = None,
    tail_rigorous: bool = False,
) -> FractalApprox:
    """Depth-n fractal approximation along the directive sequence.

    `x` is a Direction (or a plain normalized vector).  tail_bound is a
    bound D on the ambient 1-norm of the depth-remainder fractal; when
    absent a heuristic bound (empirical radius times 2) is used and the
    approximation is flagged non-rigorous.
    """
    v = x.v_floats() if hasattr(x, "v_floats") else tuple(float(c) / sum(x) for c in x)
    size = s.alphabet_size
    aut = automaton_mod.build(s.subs)
    if start_letters is None:
        start_letters = tuple(range(size))
    pts = automaton_mod.enumerate_worm(aut, s, depth, start_letters)
    clouds = {}
    for a in range(size):
        if pts[a]:
            arr = np.array(
                [project(v, p) for p in pts[a]], dtype=float
            )
        else:
            arr = np.zeros((0, size - 1))
        clouds[a] = arr
    norm1 = projected_product_norm(s, v, depth)
    if tail_bound is None:
        tail_bound = 2.0 * _empirical_remainder_bound(s, depth)
        tail_rigorous = False
    tail = norm1 * tail_bound
    return FractalApprox(
        v=v,
        depth=depth,
        points=clouds,
        int_points=pts,
        tail_radius=tail,
        tail_rigorous=tail_rigorous,
        start_letters=tuple(start_letters),
    )


def projected_product_norm(s: DirectiveSequence, v, depth: int) -> float:
    """Operator 1-norm of pi_x M_[0,depth) with rescaling-free float math."""
    size = s.alphabet_size
    P = np.eye(size) - np.outer(np.asarray(v, dtype=float), np.ones(size))
    Q = P @ np.array(s.matrix_product(0, depth), dtype=float)
    return float(np.abs(Q).sum(axis=0).max())


def _empirical_remainder_bound(s: DirectiveSequence, depth: int, probe: int = 10) -> float:
    """Ambient 1-norm radius of a shallow cloud of the shifted sequence."""
    shifted = s.shifted(depth)
    size = s.alphabet_size
    aut = automaton_mod.build(s.subs)
    # frequency proxy: normalized Perron-like column of a partial product
    m = np.array(shifted.matrix_product(0, probe + 6), dtype=float)
    col = m.sum(axis=1)
    v = tuple(col / col.sum())
    pts = automaton_mod.enumerate_worm(aut, shifted, probe)
    best = 1.0
    for plist in pts.values():
        for p in plist:
            h = sum(p)
            best = max(best, sum(abs(p[i] - h * v[i]) for i in range(size)))
    return best


# ---------------------------------------------------------------------------
# complex embedding for the Cassaigne periodic point


class ComplexEmbedding:
    """phi(v) = e . v with e = (1, beta^2 - beta, beta - 1).

    phi maps the plane P bijectively onto C, conjugates multiplication by
    ab(c0 c1) into multiplication by beta, and is pi_x0-invariant.
    """

    def __init__(self, digits: int = 25):
        lam, beta = cassaigne_roots(digits)
        self.lam = lam
        self.beta = beta
        one = ComplexInterval.exact(1)
        self.e = (
            one,
            beta * beta - beta,
            beta - one,
        )

    def phi(self, v: Sequence) -> ComplexInterval:
        acc = ComplexInterval.exact(0)
        for coeff, comp in zip(self.e, v):
            acc = acc + coeff * (comp if isinstance(comp, (Interval, ComplexInterval)) else Interval.exact(comp))
        return acc

    def phi_float(self, v: Sequence) -> complex:
        e = [c.mid for c in self.e]
        return sum(complex(e[i]) * float(v[i]) for i in range(len(v)))

    def check_equivariance(self, matrix: linalg.Matrix) -> bool:
        """e . M must meet beta . e componentwise (interval consistency)."""
        size = len(matrix)
        for j in range(size):
            acc = ComplexInterval.exact(0)
            for i in range(size):
                acc = acc + self.e[i] * Interval.exact(matrix[i][j])
            target = self.beta * self.e[j]
            if (
                acc.re.hi < target.re.lo
                or target.re.hi < acc.re.lo
                or acc.im.hi < target.im.lo
                or target.im.hi < acc.im.lo
            ):
                return False
        return True

    def plane_matrix(self) -> np.ndarray:
        """2x2 real matrix sending Lambda-basis coords to (Re phi, Im phi)."""
        w1 = self.phi((-1, 1, 0)).mid  # phi(e1 - e0)
        w2 = self.phi((-1, 0, 1)).mid  # phi(e2 - e0)
        return np.array([[w1.real, w2.real], [w1.imag, w2.imag]])


# ---------------------------------------------------------------------------
# ball certification


@dataclass(frozen=True)
class Ball:
    center: ComplexInterval
    radius: Interval

    @staticmethod
    def of(center_re, center_im, radius) -> "Ball":
        return Ball(
            ComplexInterval.exact(Fraction(str(center_re)), Fraction(str(center_im))),
            Interval.exact(Fraction(str(radius))),
        )


@dataclass
class BallCertificate:
    balls: tuple[Ball, ...]
    depth: int
    margin: float  # certified lower bound on min (r_a - reach)
    failures: list[tuple[int, tuple]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.margin > 0


def _paths_into(
    aut: automaton_mod.PrefixAutomaton, sub_name: str, a: int, n: int, emb: ComplexEmbedding
):
    """(source letter b, coefficient sum c) for all length-n paths into a.

    c = sum_{k<n} phi(t_k) beta^k with t_0 on the edge into a.
    """
    if n == 0:
        yield a, ComplexInterval.exact(0)
        return
    for tr in aut.incoming(a, sub_name):
        head = emb.phi(tr.t)
        for b, c in _paths_into(aut, sub_name, tr.source, n - 1, emb):
            yield b, head + emb.beta * c


def certify_balls(
    emb: ComplexEmbedding,
    sub: Substitution,
    balls: Sequence[Ball],
    n: int,
) -> BallCertificate:
    """Check union over length-n paths of (beta^n cl(O_b) + c) inside O_a.

    Sufficient disk inclusion: |beta^n z_b + c - z_a| + |beta|^n r_b <= r_a,
    interval-strict.  Returns the certificate with the certified margin,
    or the violating (letter, path data) list.
    """
    if not emb.beta.abs().strictly_less(Interval.exact(1)):
        raise ValueError("|beta| must be certified < 1")
    aut = automaton_mod.build({sub.name or "s": sub})
    name = sub.name or "s"
    beta_n = emb.beta.pow(n)
    abs_beta_n = emb.beta.abs().pow(n)
    margin = math.inf
    failures: list[tuple[int, tuple]] = []
    for a in range(sub.alphabet_size):
        za, ra = balls[a].center, balls[a].radius
        for b, c in _paths_into(aut, name, a, n, emb):
            zb, rb = balls[b].center, balls[b].radius
            reach = (beta_n * zb + c - za).abs() + abs_beta_n * rb
            gap = ra - reach
            if gap.lo <= 0:
                failures.append((a, (b, c.mid, gap.lo)))
            margin = min(margin, gap.lo)
    return BallCertificate(tuple(balls), n, margin, failures)


# ---------------------------------------------------------------------------
# seed certificate


@dataclass
class SeedReport:
    ok: bool
    origin_outside: bool  # 0 not in O_1 union O_2
    exceptional: list[tuple[int, ...]]  # Lambda coords with |phi(t)| <= threshold
    below_threshold: list[tuple[int, ...]]  # |phi(t)| not > 1.5
    inconclusive: list[tuple[int, ...]]
    min_margin: float
    enumeration_bound: int


def seed_certificate(emb: ComplexEmbedding, cert: BallCertificate) -> SeedReport:
    """Certify the seed-point conditions from certified balls.

    (i) 0 lies outside O_1 and O_2; (ii) for every lattice translate
    t != 0 either |phi(t)| exceeds max_a(r_a + |z_a|) or every ball test
    |z_a + phi(t)| > r_a holds, all interval-strict.  The finite set of
    candidate translates is enumerated through a lower bound on the
    lattice form |i phi(e1-e0) + j phi(e2-e0)|.
    """
    balls = cert.balls
    origin_ok = all(balls[a].center.abs().strictly_greater(balls[a].radius) for a in (1, 2))
    reach = max((b.radius + b.center.abs()).hi for b in balls)
    enum_radius = 1.5 + reach

    A = emb.plane_matrix()
    sigma_min = float(np.linalg.svd(A, compute_uv=False)[-1])
    bound = int(math.ceil(enum_radius / (0.8 * sigma_min)))

    exceptional: list[tuple[int, ...]] = []
    below_threshold: list[tuple[int, ...]] = []
    inconclusive: list[tuple[int, ...]] = []
    min_margin = math.inf
    w1 = emb.phi((-1, 1, 0))
    w2 = emb.phi((-1, 0, 1))
    for i in range(-bound, bound + 1):
        for j in range(-bound, bound + 1):
            if i == 0 and j == 0:
                continue
            phi_t = w1 * Interval.exact(i) + w2 * Interval.exact(j)
            mod = phi_t.abs()
            if mod.lo > reach:  # reach is already an outward upper bound
                if not mod.lo > 1.5:
                    below_threshold.append((i, j))
                continue
            exceptional.append((i, j))
            for a in range(len(balls)):
                shifted = (balls[a].center + phi_t).abs()
                gap = shifted - balls[a].radius
                if gap.lo > 0:
                    min_margin = min(min_margin, gap.lo)
                elif gap.hi <= 0:
                    return SeedReport(
                        False, origin_ok, exceptional, below_threshold, [], -1.0, bound
                    )
                else:
                    inconclusive.append((i, j))
    ok = origin_ok and not inconclusive
    if min_margin is math.inf:
        min_margin = 0.0
    return SeedReport(
        ok, origin_ok, exceptional, below_threshold, inconclusive, min_margin, bound
    )


def remainder_bound_from_balls(
    emb: ComplexEmbedding, cert: BallCertificate, step_matrix: linalg.Matrix
) -> float:
    """Ambient 1-norm bound D on the periodic-point remainder fractal.

    Points p of R have |phi(p)| <= max(|z_a| + r_a); pulling back through
    the plane matrix bounds the Lambda coordinates, hence the ambient
    1-norm.  Odd shift phases are covered by one application of the
    inverse single-step matrix (remainder of the shifted sequence).
    """
    maxphi = max((b.center.abs() + b.radius).hi for b in cert.balls)
    A = emb.plane_matrix()
    sigma_min = float(np.linalg.svd(A, compute_uv=False)[-1])
    coeff_norm = maxphi / (0.98 * sigma_min)  # Euclidean bound on Lambda coords
    d_even = 2.0 * math.sqrt(2.0) * coeff_norm * 1.01
    minv = np.abs(
        np.array(linalg.inverse_unimodular(step_matrix), dtype=float)
    )
    norm1 = float(minv.sum(axis=0).max())
    d_odd = norm1 * (d_even + 1.0)
    return max(d_even, d_odd)


# ---------------------------------------------------------------------------
# Hausdorff distance between approximations


def hausdorff_estimate(f1: FractalApprox, f2: FractalApprox) -> tuple[float, float]:
    """Interval bound on the Hausdorff distance of the true fractals."""
    from scipy.spatial import cKDTree

    p1, p2 = f1.all_points(), f2.all_points()
    if len(p1) == 0 or len(p2) == 0:
        raise ValueError("empty approximation")
    t1 = cKDTree(p1)
    t2 = cKDTree(p2)
    d12 = float(t2.query(p1)[0].max())
    d21 = float(t1.query(p2)[0].max())
    h = max(d12, d21)
    slack = f1.tail_radius + f2.tail_radius
    return (max(0.0, h - slack), h + slack)


# ---------------------------------------------------------------------------
# rendering


def render(
    f: FractalApprox,
    width: int = 600,
    height: int = 600,
    window=None,
    palette=None,
    out: Optional[str] = None,
    dot: int = 1,
    translates: Optional[Sequence[tuple]] = None,
) -> np.ndarray:
    """Deterministic raster of the per-letter clouds; one color per letter.

    `translates` optionally overlays lattice-shifted grey copies.
    """
    palette = palette or raster.DEFAULT_PALETTE
    clouds = [f.points[a] for a in sorted(f.points)]
    if window is None:
        extra = []
        if translates:
            for t in translates:
                for c in clouds:
                    if len(c):
                        extra.append(c + np.asarray(t, dtype=float))
        window = raster.window_of(clouds + extra)
    img = raster.blank(width, height)
    if translates:
        for t in translates:
            for a in sorted(f.points):
                pts = f.points[a]
                if len(pts):
                    raster.bin_points(
                        img, pts + np.asarray(t, dtype=float), window, (200, 200, 200), dot
                    )
    for a in sorted(f.points):
        raster.bin_points(img, f.points[a], window, palette[a % len(palette)], dot)
    if out:
        raster.write_image(out, img)
    return img
