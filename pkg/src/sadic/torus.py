"""Torus translations, domain exchange, orbit coding, and renormalization.

The torus is P/Lambda with points stored as Lambda-basis coordinates in
[0,1)^d.  The translation T_x adds t = pi_x(e_0) = (-v_1, ..., -v_d) mod 1;
the domain exchange adds pi_x(e_a) on the piece of letter a, which differs
from t by the lattice vector e_a - e_0, so both induce the same torus map.

Renormalization follows the Cassaigne induction: with v = v(x), branch c0
(v_0 > v_2, "bottom") induces on the complement of R_2, branch c1
(v_0 < v_2, "top") on the complement of T_x(R_0); the plane map N with
N o pi_{Fx} = pi_x o ab(s_0) renormalizes the induced translation back to
the reference torus and satisfies |det N| = |det M| / ||M v'||_1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from . import fractal as fractal_mod
from . import linalg
from .algorithms import Algorithm, Direction, DomainError, step
from .geometry import project, torus_reduce
from .words import DirectiveSequence, Substitution, abelianize


@dataclass
class TorusTranslation:
    """Translation of P/Lambda by t = pi_x(e_0) reduced mod Lambda."""

    v: tuple  # normalized direction, components sum to 1
    t: tuple  # Lambda-basis coordinates of pi_x(e_0), reduced

    @classmethod
    def from_direction(cls, x: Direction) -> "TorusTranslation":
        if x.mode == "exact":
            v = x.v()
        else:
            v = tuple(x.v_floats())
        e0 = (1,) + (0,) * (len(v) - 1)
        return cls(tuple(v), torus_reduce(project(v, e0)))


def translate(trans: TorusTranslation, p: Sequence) -> tuple:
    return torus_reduce(tuple(p[i] + trans.t[i] for i in range(len(trans.t))))


@dataclass
class DomainExchangeStep:
    """Per-letter translation vectors pi_x(e_a), Lambda-basis coordinates."""

    v: tuple
    vectors: tuple  # vectors[a] = Lambda coords of pi_x(e_a)

    @classmethod
    def from_direction(cls, x: Direction) -> "DomainExchangeStep":
        v = x.v() if x.mode == "exact" else tuple(x.v_floats())
        size = len(v)
        vecs = []
        for a in range(size):
            ea = tuple(1 if i == a else 0 for i in range(size))
            vecs.append(project(v, ea))
        return cls(tuple(v), tuple(vecs))

    def apply(self, letter: int, p: Sequence) -> tuple:
        vec = self.vectors[letter]
        return tuple(p[i] + vec[i] for i in range(len(vec)))


def exchange_is_translation(ex: DomainExchangeStep, tol: float = 1e-12) -> bool:
    """pi_x(e_a) - pi_x(e_0) is the lattice vector e_a - e_0, for all a.

    Exact equality in rational mode; within tol when the vectors were
    computed in floats (two rounded subtractions almost cancel).
    """
    size = len(ex.v)
    exact = all(isinstance(c, (int, Fraction)) for c in ex.v)
    for a in range(size):
        for i in range(1, size):
            diff = ex.vectors[a][i - 1] - ex.vectors[0][i - 1]
            expected = 1 if i == a else 0
            if exact:
                if diff != expected:
                    return False
            elif abs(diff - expected) > tol:
                return False
    return True


def worm_orbit_check(prefix: Sequence[int], size: int) -> bool:
    """ab(p_{n+1}) = ab(p_n) + e_{u_0[n]} exactly along the whole prefix.

    Applying pi_x to both sides gives the worm-orbit identity
    pi_x(ab(p_{n+1})) = pi_x(ab(p_n)) + pi_x(e_{u_0[n]}); the integer form
    holds with no arithmetic error regardless of the direction mode.
    """
    counts = [0] * size
    for a in prefix:
        nxt = counts.copy()
        nxt[a] += 1
        if any(nxt[i] - counts[i] != (1 if i == a else 0) for i in range(size)):
            return False
        counts = nxt
    return True


def commuting_square_check(
    v: Sequence, points: Sequence[Sequence], letters: Sequence[int]
) -> bool:
    """torus_reduce(E(p)) = translate(T_x, torus_reduce(p)) on cloud points.

    Everything (the direction included) is lifted to Fractions and the
    exchange vectors pi_x(e_a) are recomputed in rational arithmetic, so
    the identity is checked exactly: the two sides differ by the lattice
    vector e_a - e_0 before reduction.
    """
    size = len(v)
    vf = [Fraction(c) for c in v]
    vectors = []
    for a in range(size):
        ea = tuple(1 if i == a else 0 for i in range(size))
        vectors.append(project(vf, ea))
    trans = TorusTranslation(tuple(vf), torus_reduce(vectors[0]))
    for p, a in zip(points, letters):
        pf = tuple(Fraction(c) for c in p)
        left = torus_reduce(
            tuple(pf[i] + vectors[a][i] for i in range(size - 1))
        )
        right = translate(trans, torus_reduce(pf))
        if left != right:
            return False
    return True


# ---------------------------------------------------------------------------
# orbit coding against a fractal partition


@dataclass
class CodingReport:
    n_steps: int
    letters: np.ndarray  # declared letter per step
    certain: np.ndarray  # bool per step
    distances: np.ndarray  # distance to the declared piece per step
    tail_radius: float
    coverage_failures: int

    @property
    def ambiguity_rate(self) -> float:
        if self.n_steps == 0:
            return 0.0
        return 1.0 - float(self.certain.mean())


def _replicated_tree(points: np.ndarray, d: int) -> Optional[cKDTree]:
    if len(points) == 0:
        return None
    reduced = points - np.floor(points)
    offsets = np.stack(
        np.meshgrid(*([[-1.0, 0.0, 1.0]] * d), indexing="ij"), axis=-1
    ).reshape(-1, d)
    tiles = (reduced[None, :, :] + offsets[:, None, :]).reshape(-1, d)
    return cKDTree(tiles)


def code_orbit(
    f: "fractal_mod.FractalApprox",
    trans: TorusTranslation,
    n: int,
    p0: Optional[Sequence[float]] = None,
    slack: float = 1e-9,
) -> CodingReport:
    """Code N translation steps by nearest-piece membership.

    A step is "certain" when the point lies within tail_radius of exactly
    one piece's cloud; a point farther than tail_radius from every cloud
    counts as a coverage failure (and is flagged uncertain).
    """
    d = len(f.v) - 1
    size = d + 1
    tail = float(f.tail_radius)
    if p0 is None:
        p0 = np.zeros(d)
    p0 = np.asarray(p0, dtype=float)
    t = np.asarray([float(c) for c in trans.t])
    steps = np.arange(n)[:, None]
    orbit = (p0[None, :] + steps * t[None, :]) % 1.0
    dists = np.full((size, n), np.inf)
    for a in range(size):
        tree = _replicated_tree(f.points.get(a, np.empty((0, d))), d)
        if tree is not None:
            dists[a] = tree.query(orbit)[0]
    order = np.sort(dists, axis=0)
    best = order[0]
    second = order[1] if size > 1 else np.full(n, np.inf)
    letters = np.argmin(dists, axis=0)
    covered = best <= tail + slack
    certain = covered & (second > tail + slack)
    return CodingReport(
        n_steps=n,
        letters=letters,
        certain=certain,
        distances=best,
        tail_radius=tail,
        coverage_failures=int((~covered).sum()),
    )


# ---------------------------------------------------------------------------
# certified coding via ball enclosures in the complex embedding plane


@dataclass
class CertifiedPartition:
    """Per-piece certified regions: unions of balls around worm points.

    Each depth-n path from start letter b into final letter a contributes
    the enclosure B(q + beta^k z_b, |beta|^k r_b) of its sub-piece, where
    q is the path's worm point, k the number of composed matrix blocks,
    and (z_b, r_b) the certified ball of piece b.  Working in the phi
    plane keeps the enclosures round; coverage of the true pieces follows
    from the ball certificate plus the exact refinement identity.
    """

    v: tuple
    depth: int
    plane: np.ndarray  # Lambda-basis -> phi-plane matrix
    regions: dict  # letter -> list of (cKDTree over shifted points, radius)
    max_radius: float


def certified_partition(
    subs: dict[str, Substitution],
    s: DirectiveSequence,
    x: Direction,
    depth: int,
    emb,
    cert,
    block_matrix: linalg.Matrix,
) -> CertifiedPartition:
    """Build certified piece regions for a beta-conjugate periodic sequence.

    Requires M_[0,depth) to be an exact power of `block_matrix` (the
    matrix whose plane action phi conjugates to multiplication by beta),
    so the depth-n sub-pieces are beta^k-scaled copies of the full pieces.
    """
    from . import automaton as automaton_mod

    size = s.alphabet_size
    total = s.matrix_product(0, depth)
    k = 0
    acc = linalg.identity(size)
    while acc != total and k <= depth:
        acc = linalg.mat_mul(acc, block_matrix)
        k += 1
    if acc != total:
        raise ValueError("M_[0,depth) is not a power of the block matrix")
    if not emb.check_equivariance(block_matrix):
        raise ValueError("embedding does not conjugate the block matrix")

    v = np.asarray(x.v_floats(), dtype=float)
    plane = np.asarray(emb.plane_matrix(), dtype=float)
    beta_k = emb.beta.pow(k)
    d = size - 1
    offsets = np.stack(
        np.meshgrid(*([[-1.0, 0.0, 1.0]] * d), indexing="ij"), axis=-1
    ).reshape(-1, d)
    aut = automaton_mod.build(subs)
    regions: dict[int, list] = {a: [] for a in range(size)}
    max_rad = 0.0
    for b in range(size):
        ball = cert.balls[b]
        shift_iv = beta_k * ball.center
        shift = shift_iv.mid
        # fold the enclosure widths of the shifted center into the radius
        slop = max(shift_iv.re.width, shift_iv.im.width)
        rad = float((beta_k.abs() * ball.radius).hi) + slop
        pts = automaton_mod.enumerate_worm(aut, s, depth, start_letters=[b])
        for a in range(size):
            if not pts[a]:
                continue
            raw = np.asarray(pts[a], dtype=float)
            h = raw.sum(axis=1)
            proj = raw[:, 1:] - h[:, None] * v[None, 1:]
            red = proj - np.floor(proj)
            tiles = (red[None, :, :] + offsets[:, None, :]).reshape(-1, d)
            phi_pts = tiles @ plane.T + np.array([shift.real, shift.imag])
            regions[a].append((cKDTree(phi_pts), rad))
            max_rad = max(max_rad, rad)
    return CertifiedPartition(tuple(map(float, v)), depth, plane, regions, max_rad)


def code_orbit_certified(
    part: CertifiedPartition,
    trans: TorusTranslation,
    n: int,
    p0: Optional[Sequence[float]] = None,
    slack: float = 1e-9,
) -> CodingReport:
    """Coding by certified region membership; certain iff exactly one piece."""
    d = len(part.v) - 1
    size = d + 1
    if p0 is None:
        p0 = np.zeros(d)
    p0 = np.asarray(p0, dtype=float)
    t = np.asarray([float(c) for c in trans.t])
    orbit = (p0[None, :] + np.arange(n)[:, None] * t[None, :]) % 1.0
    orbit_phi = orbit @ part.plane.T
    member = np.zeros((size, n), dtype=bool)
    gap = np.full((size, n), np.inf)  # dist - radius, per piece
    for a in range(size):
        for tree, rad in part.regions[a]:
            dist = tree.query(orbit_phi)[0]
            member[a] |= dist <= rad + slack
            gap[a] = np.minimum(gap[a], dist - rad)
    count = member.sum(axis=0)
    letters = np.argmin(gap, axis=0)
    certain = count == 1
    return CodingReport(
        n_steps=n,
        letters=letters,
        certain=certain,
        distances=np.min(gap, axis=0),
        tail_radius=part.max_radius,
        coverage_failures=int((count == 0).sum()),
    )


# ---------------------------------------------------------------------------
# bounded remainder


@dataclass
class RemainderReport:
    n_max: int
    per_letter: tuple  # K_a = max_N |#{n<N: u[n]=a} - N v_a|
    total: object  # max_N ||ab(p_N) - N v||_1
    argmax_n: int

    @property
    def k(self):
        return self.total


def bounded_remainder_check(
    prefix: Sequence[int], v: Sequence, n_max: int, norm: str = "lattice"
) -> RemainderReport:
    """K = max_{N <= n_max} ||ab(prefix_N) - N v||_1, with per-letter maxima.

    The deviation ab(prefix_N) - N v is a plane vector (components sum to
    zero); norm="lattice" measures it in Lambda-basis coordinates
    (|d_1| + ... + |d_d|, the package's canonical chart), norm="ambient"
    over all d+1 components.  Exact when v has rational entries (integer
    arithmetic over the common denominator); float otherwise.
    """
    if norm not in ("lattice", "ambient"):
        raise ValueError("norm must be 'lattice' or 'ambient'")
    lo = 1 if norm == "lattice" else 0
    if len(prefix) < n_max:
        raise ValueError("prefix shorter than n_max")
    size = len(v)
    u = np.asarray(prefix[:n_max], dtype=np.int64)
    onehot = np.zeros((n_max, size), dtype=np.int64)
    onehot[np.arange(n_max), u] = 1
    counts = np.cumsum(onehot, axis=0)  # row N-1 = ab(prefix_N)
    steps = np.arange(1, n_max + 1)
    if all(isinstance(c, (int, Fraction)) for c in v):
        import math

        fracs = [Fraction(c) for c in v]
        q = math.lcm(*(c.denominator for c in fracs))
        nums = [int(c * q) for c in fracs]
        # big-int safe: numerators can exceed int64 for fine rational v
        dtype = np.int64 if q * n_max < 2**62 else object
        nums_arr = np.array(nums, dtype=dtype)
        dev = np.abs(
            counts.astype(dtype) * q - steps[:, None].astype(dtype) * nums_arr[None, :]
        )
        per_letter = tuple(Fraction(int(dev[:, a].max()), q) for a in range(size))
        row = dev[:, lo:].sum(axis=1)
        arg = int(row.argmax())
        total = Fraction(int(row[arg]), q)
    else:
        vf = np.asarray([float(c) for c in v])
        dev = np.abs(counts - steps[:, None] * vf[None, :])
        per_letter = tuple(float(dev[:, a].max()) for a in range(size))
        row = dev[:, lo:].sum(axis=1)
        arg = int(row.argmax())
        total = float(row[arg])
    return RemainderReport(n_max, per_letter, total, arg + 1)


# ---------------------------------------------------------------------------
# return words and induced coding


RETURN_BLOCKS_C0 = ((0,), (0, 2), (1,))


def return_word_factorization(
    word: Sequence[int], blocks: Sequence[tuple] = RETURN_BLOCKS_C0
) -> list[tuple]:
    """Greedy factorization over the return words; raises on failure.

    Over {0, 02, 1} the greedy choice is forced: a standalone 0 followed
    by 2 would strand the 2 (no block starts with 2), so 02 must be taken.
    """
    blocks = sorted(blocks, key=len, reverse=True)  # longest match first
    out = []
    i = 0
    word = tuple(word)
    while i < len(word):
        for b in blocks:
            if word[i : i + len(b)] == b:
                out.append(b)
                i += len(b)
                break
        else:
            raise ValueError(f"no return word matches at position {i}")
    return out


def count_factorizations(
    word: Sequence[int], blocks: Sequence[tuple] = RETURN_BLOCKS_C0, cap: int = 2
) -> int:
    """Number of distinct factorizations (capped), by dynamic programming."""
    word = tuple(word)
    n = len(word)
    ways = [0] * (n + 1)
    ways[n] = 1
    for i in range(n - 1, -1, -1):
        total = 0
        for b in blocks:
            if word[i : i + len(b)] == tuple(b):
                total += ways[i + len(b)]
        ways[i] = min(total, cap)
    return ways[0]


def induced_word(word: Sequence[int], sub: Substitution) -> list[int]:
    """Decode sigma(u') back to u' when the letter images are return words."""
    blocks = {tuple(img): a for a, img in enumerate(sub.images)}
    out = []
    for b in return_word_factorization(word, list(blocks)):
        out.append(blocks[b])
    return out


# ---------------------------------------------------------------------------
# renormalization


@dataclass
class RenormalizationStep:
    kind: str  # "bottom" or "top"
    sub_name: str  # continued fraction branch taken
    removed: str  # piece removed from the torus
    matrix_n: tuple  # d x d plane map N in the Lambda basis
    det_n: float
    det_identity_error: float
    next_direction: Direction
    next_fractal: "fractal_mod.FractalApprox"
    decomposition_exact: bool
    hausdorff_error: float


def plane_map(v: Sequence, matrix: linalg.Matrix) -> tuple:
    """N with N o pi_{Fx} = pi_x o M, as a d x d matrix in the Lambda basis.

    Column i is the Lambda-coordinate image of the basis vector
    e_i - e_0 (which lies in P, hence is fixed by pi_{Fx}).
    """
    size = len(v)
    cols = []
    for i in range(1, size):
        vec = tuple((1 if j == i else 0) - (1 if j == 0 else 0) for j in range(size))
        cols.append(project(v, linalg.mat_vec(matrix, vec)))
    return tuple(
        tuple(cols[j][i] for j in range(size - 1)) for i in range(size - 1)
    )


def renormalize(
    alg: Algorithm,
    x: Direction,
    f: "fractal_mod.FractalApprox",
    s: DirectiveSequence,
) -> RenormalizationStep:
    """One Cassaigne induction step: branch, plane map N, next fractal.

    The branch is decided by the exact piece-measure identity
    lambda(R_a)/lambda(R) = v(x)_a, i.e. by comparing v_0 with v_2; a tie
    is refused.  The decomposition check verifies, on integer worm points,
    R_a(x) = union over edges b -(t, s_0)-> a of M R_b(Fx) + t, which is
    the N-conjugated refinement identity.
    """
    if f.depth < 1:
        raise ValueError("need fractal depth >= 1")
    name, x_next, tie = step(alg, x)
    if tie:
        raise DomainError("piece measures tie; refusing to branch")
    if alg.name != "cassaigne":
        raise ValueError("renormalization implemented for the Cassaigne case")
    kind = "bottom" if name == "c0" else "top"
    removed = "R_2" if kind == "bottom" else "T_x(R_0)"
    sub = alg.substitutions[name]
    matrix = sub.matrix
    v = tuple(x.v()) if x.mode == "exact" else tuple(x.v_floats())
    vf = [float(c) for c in v]
    n_mat = plane_map(vf, matrix)
    size = len(v)

    s_next = s.shifted(1)
    f_next = fractal_mod.approximate(
        s_next,
        x_next,
        f.depth - 1,
        tail_bound=None,
    )

    # det identity |det N| = |det M| / ||M v'||_1
    v_next = np.asarray(f_next.v, dtype=float)
    mv = np.array(matrix, dtype=float) @ v_next
    det_n = float(np.linalg.det(np.array(n_mat, dtype=float)))
    det_m = float(linalg.determinant(matrix))
    det_err = abs(abs(det_n) - abs(det_m) / float(np.abs(mv).sum()))

    # exact decomposition of integer worm points via the prefix automaton
    from . import automaton as automaton_mod

    aut = automaton_mod.build(alg.substitutions)
    exact = True
    for a in range(size):
        lhs = set(map(tuple, f.int_points.get(a, [])))
        rhs = set()
        for tr in aut.incoming(a, name):
            for p in f_next.int_points.get(tr.source, []):
                mp = linalg.mat_vec(matrix, p)
                rhs.add(tuple(mp[i] + tr.t[i] for i in range(size)))
        if lhs != rhs:
            exact = False
            break

    # geometric check: N R_b(Fx) + pi_x(t) reassembles R_a(x)
    n_arr = np.array(n_mat, dtype=float)
    haus = 0.0
    for a in range(size):
        cur = f.points.get(a, np.empty((0, size - 1)))
        parts = []
        for tr in aut.incoming(a, name):
            pts = f_next.points.get(tr.source, np.empty((0, size - 1)))
            if len(pts):
                shift = np.asarray(project(vf, tr.t), dtype=float)
                parts.append(pts @ n_arr.T + shift[None, :])
        if not parts:
            if len(cur):
                haus = float("inf")
            continue
        rebuilt = np.concatenate(parts)
        if len(cur) == 0:
            haus = float("inf")
            continue
        d1 = cKDTree(rebuilt).query(cur)[0].max()
        d2 = cKDTree(cur).query(rebuilt)[0].max()
        haus = max(haus, float(d1), float(d2))

    return RenormalizationStep(
        kind=kind,
        sub_name=name,
        removed=removed,
        matrix_n=n_mat,
        det_n=det_n,
        det_identity_error=det_err,
        next_direction=x_next,
        next_fractal=f_next,
        decomposition_exact=exact,
        hausdorff_error=haus,
    )
