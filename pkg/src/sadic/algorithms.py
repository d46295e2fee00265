"""Extended continued fraction algorithms.

An algorithm chooses, for every positive direction x, a unimodular
substitution s0(x) whose abelianization matrix M satisfies
M^-1 x >= 0, and steps x -> M^-1 x.  Implemented instances: additive
Sturmian (d=1), Cassaigne (d=2), Brun and Arnoux-Rauzy (any d >= 2).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import linalg
from .intervals import Interval
from .words import DirectiveSequence, Substitution


class DomainError(ValueError):
    """Direction outside the algorithm's domain."""


# ---------------------------------------------------------------------------
# directions


class Direction:
    """A projective positive direction.

    Components are Fractions (mode "exact") or floats (mode "float").
    Eigen-directions of a primitive integer matrix carry the matrix and
    are stepped with adaptive-precision arithmetic (see eigen_orbit).
    """

    def __init__(self, components: Sequence, mode: Optional[str] = None):
        comps = tuple(components)
        if len(comps) < 2:
            raise ValueError("need at least two components")
        if mode is None:
            mode = (
                "exact"
                if all(isinstance(c, (int, Fraction)) for c in comps)
                else "float"
            )
        if mode == "exact":
            comps = tuple(Fraction(c) for c in comps)
        else:
            comps = tuple(float(c) for c in comps)
        if any(c < 0 for c in comps) or all(c == 0 for c in comps):
            raise DomainError("direction must be non-negative and non-zero")
        self.components = comps
        self.mode = mode
        self.eigen_matrix: Optional[linalg.Matrix] = None

    @classmethod
    def rational(cls, components) -> "Direction":
        return cls([Fraction(c) for c in components], mode="exact")

    @classmethod
    def floats(cls, components) -> "Direction":
        return cls([float(c) for c in components], mode="float")

    @classmethod
    def eigen(cls, matrix: linalg.Matrix) -> "Direction":
        """Perron eigendirection of a primitive non-negative integer matrix."""
        vals, vecs = np.linalg.eig(np.array(matrix, dtype=float))
        i = int(np.argmax(vals.real))
        v = np.abs(vecs[:, i].real)
        v = v / v.sum()
        out = cls(list(map(float, v)), mode="float")
        out.eigen_matrix = matrix
        return out

    @property
    def d(self) -> int:
        return len(self.components) - 1

    def v(self):
        """1-norm-normalized representative."""
        total = sum(self.components)
        return tuple(c / total for c in self.components)

    def v_floats(self) -> tuple[float, ...]:
        total = float(sum(self.components))
        return tuple(float(c) / total for c in self.components)

    def __repr__(self):
        return f"Direction({self.components}, mode={self.mode!r})"


# ---------------------------------------------------------------------------
# algorithms


@dataclass
class Algorithm:
    name: str
    substitutions: dict[str, Substitution]
    # selector returns (substitution name, tie flag)
    selector: Callable[[Sequence], tuple[str, bool]]
    alphabet_size: int

    @property
    def matrices(self) -> dict[str, linalg.Matrix]:
        return {k: s.matrix for k, s in self.substitutions.items()}

    def inverse_matrices(self) -> dict[str, linalg.Matrix]:
        return {
            k: linalg.inverse_unimodular(s.matrix)
            for k, s in self.substitutions.items()
        }


def _sturmian() -> Algorithm:
    subs = {
        "tau0": Substitution(["0", "01"], name="tau0"),
        "tau1": Substitution(["10", "1"], name="tau1"),
    }

    def selector(x):
        if x[0] >= x[1]:
            return "tau0", x[0] == x[1]
        return "tau1", False

    return Algorithm("sturmian", subs, selector, 2)


def _cassaigne() -> Algorithm:
    subs = {
        "c0": Substitution(["0", "02", "1"], name="c0"),
        "c1": Substitution(["1", "02", "2"], name="c1"),
    }

    def selector(x):
        if x[0] >= x[2]:
            return "c0", x[0] == x[2]
        return "c1", False

    return Algorithm("cassaigne", subs, selector, 3)


def _brun(d: int = 2) -> Algorithm:
    size = d + 1
    subs = {}
    for zeta in itertools.permutations(range(size)):
        largest, second = zeta[-1], zeta[-2]
        images = [(a,) for a in range(size)]
        images[second] = (second, largest)
        name = "b" + "".join(map(str, zeta))
        subs[name] = Substitution(images, size, name=name)

    def selector(x):
        # ascending order; ties put the smaller index last (treated larger)
        order = sorted(range(size), key=lambda i: (x[i], -i))
        tie = any(x[order[i]] == x[order[i + 1]] for i in range(size - 1))
        return "b" + "".join(map(str, order)), tie

    return Algorithm("brun" if d == 2 else f"brun{d}", subs, selector, size)


def _arnoux_rauzy(d: int = 2) -> Algorithm:
    size = d + 1
    subs = {}
    for i in range(size):
        images = [(a, i) if a != i else (a,) for a in range(size)]
        name = f"ar{i}"
        subs[name] = Substitution(images, size, name=name)

    def selector(x):
        total = sum(x)
        for i in range(size):
            if 2 * x[i] > total:
                return f"ar{i}", False
        raise DomainError("no coordinate dominates the sum of the others")

    return Algorithm(
        "arnoux-rauzy" if d == 2 else f"arnoux-rauzy{d}", subs, selector, size
    )


_REGISTRY: dict[str, Callable[[], Algorithm]] = {
    "sturmian": _sturmian,
    "cassaigne": _cassaigne,
    "brun": _brun,
    "arnoux-rauzy": _arnoux_rauzy,
}


def get_algorithm(name: str, d: Optional[int] = None) -> Algorithm:
    key = name.lower().replace("_", "-")
    if key not in _REGISTRY:
        raise KeyError(f"unknown algorithm {name!r}")
    if d is not None and key in ("brun", "arnoux-rauzy"):
        return _REGISTRY[key](d)  # type: ignore[call-arg]
    return _REGISTRY[key]()


# ---------------------------------------------------------------------------
# stepping


class InconclusiveError(Exception):
    """An interval comparison straddles the decision boundary."""


def interval_selector(alg: Algorithm, lo: Sequence, hi: Sequence) -> str:
    """Branch decision from componentwise bounds lo <= x <= hi.

    Raises InconclusiveError when the bounds cannot separate the
    comparisons the selector makes, DomainError when the direction
    certainly lies outside the algorithm's domain.
    """
    size = alg.alphabet_size
    if alg.name == "cassaigne":
        if lo[0] >= hi[2]:
            return "c0"
        if hi[0] < lo[2]:
            return "c1"
        raise InconclusiveError("x0 vs x2 comparison straddles")
    if alg.name == "sturmian":
        if lo[0] >= hi[1]:
            return "tau0"
        if hi[0] < lo[1]:
            return "tau1"
        raise InconclusiveError("x0 vs x1 comparison straddles")
    if alg.name.startswith("brun"):
        order = sorted(range(size), key=lambda i: lo[i])
        for i in range(size - 1):
            if not hi[order[i]] < lo[order[i + 1]]:
                raise InconclusiveError("ordering of components straddles")
        return "b" + "".join(map(str, order))
    if alg.name.startswith("arnoux-rauzy"):
        for i in range(size):
            if lo[i] > sum(hi[j] for j in range(size) if j != i):
                return f"ar{i}"
        if all(
            hi[i] < sum(lo[j] for j in range(size) if j != i)
            for i in range(size)
        ):
            raise DomainError("no coordinate dominates the sum of the others")
        raise InconclusiveError("dominance comparison straddles")
    raise KeyError(f"no interval selector for {alg.name}")


def interval_step(
    alg: Algorithm, lo: Sequence, hi: Sequence
) -> tuple[str, tuple, tuple]:
    """One step on an interval-valued direction; outward exact bounds."""
    name = interval_selector(alg, lo, hi)
    minv = linalg.inverse_unimodular(alg.substitutions[name].matrix)
    size = alg.alphabet_size
    nlo, nhi = [], []
    for i in range(size):
        row = minv[i]
        nlo.append(sum(row[j] * (lo[j] if row[j] >= 0 else hi[j]) for j in range(size)))
        nhi.append(sum(row[j] * (hi[j] if row[j] >= 0 else lo[j]) for j in range(size)))
    for a, b in zip(nlo, nhi):
        if b < 0:
            raise DomainError(f"step {name} left the positive cone")
        if a < 0:
            raise InconclusiveError("positivity of the next direction straddles")
    return name, tuple(nlo), tuple(nhi)


def interval_orbit(
    alg: Algorithm, lo: Sequence, hi: Sequence, n: int
) -> tuple[list[str], tuple, tuple]:
    """n interval steps from exact rational bounds; stops on straddle."""
    lo = tuple(Fraction(c) for c in lo)
    hi = tuple(Fraction(c) for c in hi)
    names = []
    for _ in range(n):
        name, lo, hi = interval_step(alg, lo, hi)
        names.append(name)
    return names, lo, hi


def step(alg: Algorithm, x: Direction) -> tuple[str, Direction, bool]:
    """One algorithm step: (substitution name, next direction, tie flag)."""
    name, tie = alg.selector(x.components)
    minv = linalg.inverse_unimodular(alg.substitutions[name].matrix)
    nxt = linalg.mat_vec(minv, x.components)
    if any(c < 0 for c in nxt):
        raise DomainError(f"step {name} left the positive cone")
    out = Direction(nxt, mode=x.mode)
    return name, out, tie


@dataclass
class OrbitRecord:
    algorithm: str
    directions: list[tuple]  # x^(0), ..., x^(n)
    names: list[str]  # s_0, ..., s_(n-1)
    matrices: list[linalg.Matrix]
    tie_steps: list[int] = field(default_factory=list)
    exit_index: Optional[int] = None  # step at which the domain was left

    def __len__(self):
        return len(self.names)

    def partial_product(self, k: int, l: int) -> linalg.Matrix:
        if not 0 <= k <= l <= len(self.names):
            raise ValueError("range outside recorded orbit")
        size = len(self.directions[0])
        m = linalg.identity(size)
        for j in range(k, l):
            m = linalg.mat_mul(m, self.matrices[j])
        return m


def directive_sequence(
    alg: Algorithm, x: Direction, n: int
) -> tuple[DirectiveSequence, OrbitRecord]:
    """Directive prefix s_[0,n)(x) with the recorded orbit.

    On a mid-orbit domain exit the record is partial with exit_index set.
    """
    if x.eigen_matrix is not None:
        names, floats = eigen_orbit(alg, x.eigen_matrix, n)
        record = OrbitRecord(
            alg.name,
            [tuple(v) for v in floats],
            names,
            [alg.substitutions[m].matrix for m in names],
        )
        seq = DirectiveSequence.explicit(alg.substitutions, names)
        return seq, record

    record = OrbitRecord(alg.name, [x.components], [], [])
    cur = x
    for k in range(n):
        try:
            name, cur, tie = step(alg, cur)
        except DomainError:
            record.exit_index = k
            break
        record.names.append(name)
        record.matrices.append(alg.substitutions[name].matrix)
        record.directions.append(cur.components)
        if tie:
            record.tie_steps.append(k)
    seq = DirectiveSequence.explicit(alg.substitutions, record.names)
    return seq, record


# ---------------------------------------------------------------------------
# eigen-direction orbits (adaptive precision)


def _mp_perron_vector(matrix: linalg.Matrix, prec: int):
    """Perron eigenvector at `prec` bits via Newton + adjugate."""
    import mpmath as mp

    size = len(matrix)
    coeffs = linalg.charpoly(matrix)
    lam0 = max(np.linalg.eigvals(np.array(matrix, dtype=float)).real)
    with mp.workprec(prec + 64):
        lam = mp.mpf(lam0)
        dcoeffs = [c * (len(coeffs) - 1 - i) for i, c in enumerate(coeffs[:-1])]
        for _ in range(100):
            f = linalg.poly_eval(coeffs, lam)
            df = linalg.poly_eval(dcoeffs, lam)
            delta = f / df
            lam = lam - delta
            if abs(delta) < mp.mpf(2) ** (-(prec + 16)):
                break
        shifted = tuple(
            tuple(mp.mpf(matrix[i][j]) - (lam if i == j else 0) for j in range(size))
            for i in range(size)
        )
        adj = linalg.adjugate_generic(shifted)
        col = max(range(size), key=lambda j: sum(abs(adj[i][j]) for i in range(size)))
        v = [adj[i][col] for i in range(size)]
        if v[0] < 0:
            v = [-c for c in v]
        if any(c <= 0 for c in v):
            raise ValueError("Perron eigenvector computation failed (sign)")
        total = sum(v)
        return [c / total for c in v], lam


def _eigen_orbit_at_prec(alg: Algorithm, matrix, n: int, prec: int):
    import mpmath as mp

    inv = {name: m for name, m in alg.inverse_matrices().items()}
    with mp.workprec(prec):
        v, _lam = _mp_perron_vector(matrix, prec)
        names: list[str] = []
        floats = [tuple(float(c) for c in v)]
        for _ in range(n):
            name, _tie = alg.selector(v)
            minv = inv[name]
            v = [
                sum(minv[i][j] * v[j] for j in range(len(v))) for i in range(len(v))
            ]
            if any(c < 0 for c in v):
                raise DomainError("eigen orbit left the positive cone")
            total = sum(v)
            v = [c / total for c in v]
            names.append(name)
            floats.append(tuple(float(c) for c in v))
    return names, floats


def eigen_orbit(
    alg: Algorithm, matrix: linalg.Matrix, n: int
) -> tuple[list[str], list[tuple[float, ...]]]:
    """Orbit of the Perron direction of `matrix`, branch-verified.

    Runs at precision p and p+64 bits and accepts only when every branch
    decision agrees; otherwise doubles the precision.  p starts at one
    bit per step plus slack, which covers the worst-case expansion of
    the implemented algorithms.
    """
    prec = max(192, n + 192)
    for _ in range(5):
        names1, floats = _eigen_orbit_at_prec(alg, matrix, n, prec)
        names2, _ = _eigen_orbit_at_prec(alg, matrix, n, prec + 64)
        if names1 == names2:
            return names1, floats
        prec *= 2
    raise RuntimeError("eigen orbit did not stabilize; precision exhausted")


# ---------------------------------------------------------------------------
# rigorous Perron enclosure


@dataclass
class PerronEnclosure:
    eigenvalue: Interval
    vector: tuple[Interval, ...]  # 1-norm-normalized enclosure
    positive_power: int

    def midpoint_direction(self) -> Direction:
        return Direction.floats([iv.mid for iv in self.vector])


def perron_direction(
    matrix: linalg.Matrix, digits: int = 15, horizon: int = 64
) -> PerronEnclosure:
    """Interval enclosure of the Perron eigendirection of a primitive matrix.

    The eigenvalue is isolated by exact-rational bisection of the
    characteristic polynomial around the float eigenvalue; the vector is
    a column of adj(M - lambda I) evaluated over the eigenvalue interval
    (rank-one at lambda, hence a rigorous eigenvector enclosure), checked
    for componentwise consistency M v ~ lambda v.
    """
    size = len(matrix)
    power = linalg.identity(size)
    positive_at = None
    for k in range(1, horizon + 1):
        power = linalg.mat_mul(power, matrix)
        if linalg.is_positive(power):
            positive_at = k
            break
    if positive_at is None:
        raise ValueError("matrix is not primitive within the horizon")

    from .intervals import real_root_interval

    coeffs = linalg.charpoly(matrix)
    lam0 = float(max(np.linalg.eigvals(np.array(matrix, dtype=float)).real))
    delta = Fraction(1, 1000)
    while True:
        lo = Fraction(lam0) - delta
        hi = Fraction(lam0) + delta
        flo = linalg.poly_eval(coeffs, lo)
        fhi = linalg.poly_eval(coeffs, hi)
        if flo != 0 and fhi != 0 and (flo > 0) != (fhi > 0):
            break
        delta *= 2
        if delta > abs(Fraction(lam0)) + 10:
            raise ValueError("could not bracket the Perron eigenvalue")
    rlo, rhi = real_root_interval(coeffs, lo, hi, digits)
    lam = Interval(Interval.exact(rlo).lo, Interval.exact(rhi).hi)

    shifted = tuple(
        tuple(
            Interval.exact(matrix[i][j]) - (lam if i == j else Interval.exact(0))
            for j in range(size)
        )
        for i in range(size)
    )
    adj = linalg.adjugate_generic(shifted)
    cols = []
    for j in range(size):
        col = [adj[i][j] for i in range(size)]
        if all(c.lo > 0 for c in col):
            cols.append(col)
        elif all(c.hi < 0 for c in col):
            cols.append([-c for c in col])
    if not cols:
        raise ValueError("no sign-definite adjugate column; enclosure too wide")
    col = max(cols, key=lambda c: min(x.lo for x in c))
    total = col[0]
    for c in col[1:]:
        total = total + c
    v = tuple(c / total for c in col)
    # consistency: (M v)_i must meet (lam v)_i
    for i in range(size):
        mv = None
        for j in range(size):
            term = Interval.exact(matrix[i][j]) * v[j]
            mv = term if mv is None else mv + term
        lv = lam * v[i]
        if mv.hi < lv.lo or lv.hi < mv.lo:
            raise ArithmeticError("Perron enclosure failed the M v = lam v check")
    return PerronEnclosure(lam, v, positive_at)
