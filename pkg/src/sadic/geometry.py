"""Worms, the plane P, the lattice Lambda and torus coordinates.

Ambient space is R^(d+1) with h(y) = sum of coordinates.  P = {h = 0},
Lambda = P intersect Z^(d+1) with basis (e_1 - e_0, ..., e_d - e_0).
A plane point is stored by its Lambda-basis coordinates, which for
p = (p_0, ..., p_d) in P are simply (p_1, ..., p_d); lattice reduction
is then a componentwise fractional part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .words import abelianize


@dataclass
class Worm:
    """Abelianizations of the prefixes of a word, one point per level."""

    points: list[tuple[int, ...]]  # point i = ab(prefix of length i), h = i
    letters: list[int]  # letter following prefix i
    partition: dict[int, list[tuple[int, ...]]]  # W_a pieces

    def __len__(self):
        return len(self.points)


def worm(prefix: Sequence[int], size: Optional[int] = None) -> Worm:
    """The worm of a finite prefix: |prefix| points, labeled by next letter."""
    if size is None:
        size = (max(prefix) + 1) if len(prefix) else 1
    counts = [0] * size
    points = []
    letters = []
    partition: dict[int, list[tuple[int, ...]]] = {a: [] for a in range(size)}
    for a in prefix:
        p = tuple(counts)
        points.append(p)
        letters.append(a)
        partition[a].append(p)
        counts[a] += 1
    return Worm(points, letters, partition)


def project(v: Sequence, z: Sequence) -> tuple:
    """pi_x(z) = z - h(z) v(x) in Lambda-basis coordinates.

    `v` is the normalized direction (sum 1); result drops coordinate 0.
    Exact when v and z are rational.
    """
    h = sum(z)
    return tuple(z[i] - h * v[i] for i in range(1, len(z)))


def project_ambient(v: Sequence, z: Sequence) -> tuple:
    """pi_x(z) as a full ambient vector (h = 0)."""
    h = sum(z)
    return tuple(z[i] - h * v[i] for i in range(len(z)))


def lattice_coords(z: Sequence) -> tuple:
    """Lambda-basis coordinates of a plane vector given in ambient form."""
    return tuple(z[1:])


def torus_reduce(coords: Sequence) -> tuple:
    """Componentwise fractional part of Lambda-basis coordinates."""
    return tuple(c - math.floor(c) for c in coords)


def projection_radius(prefix: Sequence[int], v: Sequence) -> float:
    """max over worm points of the ambient 1-norm of pi_x(point)."""
    size = len(v)
    counts = [0] * size
    best = 0.0
    h = 0
    for a in prefix:
        h += 1
        counts[a] += 1
        norm = sum(abs(counts[i] - h * v[i]) for i in range(size))
        best = max(best, norm)
    return float(best)


def tiling_check(
    w: Worm, window: Sequence[Sequence[int]], height: int
) -> bool:
    """Exactly-once coverage of the H-slabs by the worm's Lambda-translates.

    `window` is a finite set of lattice translates given in Lambda-basis
    coordinates.  The check verifies (a) the worm has exactly one point
    on each level i < height, and (b) the translated copies
    {w_i + t : t in window} of each level are pairwise distinct and cover
    precisely the expected set -- duplicated worm points or repeated
    translates break the exactly-once property.
    """
    from collections import Counter

    if height == 0:
        return True
    if len(w.points) < height:
        return False
    size = len(w.points[0])

    def translate(p, t):
        return (p[0] - sum(t),) + tuple(p[j + 1] + t[j] for j in range(size - 1))

    covered: Counter = Counter()
    levels: dict[int, list[tuple[int, ...]]] = {}
    for p in w.points:
        i = sum(p)
        if i >= height:
            continue
        levels.setdefault(i, []).append(p)
        for t in window:
            if len(t) != size - 1:
                raise ValueError("window translates must be in Lambda-basis")
            covered[translate(p, t)] += 1
    for i in range(height):
        pts = levels.get(i, [])
        if len(pts) != 1:
            return False  # not exactly one worm point per level
        # every slab point reachable from the level point by a window
        # translate must be covered exactly once
        for t in window:
            if covered[translate(pts[0], t)] != 1:
                return False
    return True
