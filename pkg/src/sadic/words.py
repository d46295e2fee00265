"""Words, substitutions, directive sequences and combinatorial measurements.

Letters are the integers 0..d; finite words are tuples of letters.  A
substitution maps each letter to a non-empty word; its abelianization
matrix M satisfies M . ab(w) = ab(sigma(w)), with column a equal to
ab(sigma(a)).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

import numpy as np

from . import linalg

Word = tuple[int, ...]


def word_from_str(s: str) -> Word:
    return tuple(int(c) for c in s)


def word_to_str(w: Sequence[int]) -> str:
    return "".join(str(a) for a in w)


def abelianize(w: Sequence[int], size: int) -> tuple[int, ...]:
    counts = [0] * size
    for a in w:
        counts[a] += 1
    return tuple(counts)


class Substitution:
    """A non-erasing morphism of the free monoid on {0,...,d}."""

    def __init__(self, images, alphabet_size: Optional[int] = None, name: str = ""):
        if isinstance(images, dict):
            size = alphabet_size or (max(images) + 1)
            imgs = []
            for a in range(size):
                img = images[a]
                imgs.append(word_from_str(img) if isinstance(img, str) else tuple(img))
        else:
            imgs = [
                word_from_str(img) if isinstance(img, str) else tuple(img)
                for img in images
            ]
            size = alphabet_size or len(imgs)
        if len(imgs) != size:
            raise ValueError("one image required per letter")
        for img in imgs:
            if len(img) == 0:
                raise ValueError("substitution must be non-erasing")
            if any(not (0 <= a < size) for a in img):
                raise ValueError("image letter out of alphabet")
        self.images: tuple[Word, ...] = tuple(imgs)
        self.alphabet_size = size
        self.name = name
        self._matrix: Optional[linalg.Matrix] = None

    @property
    def matrix(self) -> linalg.Matrix:
        """Abelianization matrix; column a is ab(images[a])."""
        if self._matrix is None:
            cols = [abelianize(img, self.alphabet_size) for img in self.images]
            self._matrix = tuple(
                tuple(cols[j][i] for j in range(self.alphabet_size))
                for i in range(self.alphabet_size)
            )
        return self._matrix

    @property
    def is_unimodular(self) -> bool:
        return abs(linalg.determinant(self.matrix)) == 1

    def apply(self, w: Sequence[int]) -> Word:
        out: list[int] = []
        for a in w:
            out.extend(self.images[a])
        return tuple(out)

    def apply_truncated(self, w: Sequence[int], limit: int) -> Word:
        """Prefix of apply(self, w) of length at most limit."""
        out: list[int] = []
        for a in w:
            out.extend(self.images[a])
            if len(out) >= limit:
                return tuple(out[:limit])
        return tuple(out)

    def compose(self, other: "Substitution") -> "Substitution":
        """self o other: (self.compose(other))(a) = self(other(a))."""
        if self.alphabet_size != other.alphabet_size:
            raise ValueError("alphabet mismatch")
        imgs = [self.apply(other.images[a]) for a in range(other.alphabet_size)]
        return Substitution(
            imgs, self.alphabet_size, name=(self.name + other.name) or ""
        )

    def __eq__(self, other):
        return (
            isinstance(other, Substitution)
            and self.images == other.images
            and self.alphabet_size == other.alphabet_size
        )

    def __hash__(self):
        return hash((self.images, self.alphabet_size))

    def __repr__(self):
        body = ", ".join(
            f"{a}->{word_to_str(img)}" for a, img in enumerate(self.images)
        )
        label = f"{self.name}: " if self.name else ""
        return f"Substitution({label}{body})"


def identity_substitution(size: int) -> Substitution:
    return Substitution([(a,) for a in range(size)], size, name="id")


def periodic_point(sigma: Substitution, a: int, length: int) -> tuple[int, Word]:
    """Period p and length-`length` prefix of the periodic point of sigma at a.

    The first-letter orbit a, f(a), f(f(a)), ... (f = first letter of the
    image) must return to a within (d+1)^2 steps and the cycle must grow.
    """
    size = sigma.alphabet_size
    first = [img[0] for img in sigma.images]
    cap = size * size
    b = a
    period = None
    for k in range(1, cap + 1):
        b = first[b]
        if b == a:
            period = k
            break
    if period is None:
        raise ValueError(f"no growing periodic point through letter {a}")
    power = sigma
    for _ in range(period - 1):
        power = power.compose(sigma)
    w: Word = (a,)
    while len(w) < length:
        nxt = power.apply_truncated(w, length)
        if len(nxt) <= len(w):
            raise ValueError(f"no growing periodic point through letter {a}")
        w = nxt
    return period, w[:length]


class DirectiveSequence:
    """A deterministic, lazily materialized sequence of substitutions.

    `subs` names the substitution set S; the generator yields names from S.
    Producing n terms twice yields identical terms (terms are cached).
    """

    def __init__(
        self,
        subs: dict[str, Substitution],
        factory: Callable[[], Iterator[str]],
        kind: str = "custom",
    ):
        self.subs = dict(subs)
        sizes = {s.alphabet_size for s in self.subs.values()}
        if len(sizes) != 1:
            raise ValueError("substitution set must share one alphabet")
        self.alphabet_size = sizes.pop()
        self._factory = factory
        self._iter: Optional[Iterator[str]] = None
        self._cache: list[str] = []
        self.kind = kind

    @classmethod
    def periodic(cls, subs: dict[str, Substitution], cycle: Sequence[str]):
        cycle = list(cycle)

        def factory():
            return itertools.cycle(cycle)

        return cls(subs, factory, kind=f"periodic({''.join(cycle)})")

    @classmethod
    def explicit(
        cls,
        subs: dict[str, Substitution],
        prefix: Sequence[str],
        extension: Optional[Sequence[str]] = None,
    ):
        """Explicit prefix; default extension repeats the prefix periodically."""
        prefix = list(prefix)
        ext = list(extension) if extension is not None else prefix

        def factory():
            yield from prefix
            yield from itertools.cycle(ext)

        return cls(subs, factory, kind="explicit-prefix")

    @classmethod
    def from_function(cls, subs: dict[str, Substitution], fn: Callable[[int], str]):
        def factory():
            return (fn(k) for k in itertools.count())

        return cls(subs, factory, kind="function")

    @classmethod
    def seeded(cls, subs: dict[str, Substitution], seed: int):
        """Uniform i.i.d. names from a seeded stream; deterministic per seed."""
        names = sorted(subs)

        def factory():
            rng = np.random.default_rng(seed)
            while True:
                yield names[int(rng.integers(len(names)))]

        return cls(subs, factory, kind=f"seeded({seed})")

    def _materialize(self, n: int) -> None:
        if self._iter is None:
            self._iter = self._factory()
        while len(self._cache) < n:
            name = next(self._iter)
            if name not in self.subs:
                raise KeyError(f"substitution {name!r} not in set")
            self._cache.append(name)

    def name(self, k: int) -> str:
        self._materialize(k + 1)
        return self._cache[k]

    def names(self, n: int) -> list[str]:
        self._materialize(n)
        return self._cache[:n]

    def substitution(self, k: int) -> Substitution:
        return self.subs[self.name(k)]

    def matrix_product(self, k: int, l: int) -> linalg.Matrix:
        """M_[k,l) = M_k ... M_(l-1); exact integers."""
        if not 0 <= k <= l:
            raise ValueError("need 0 <= k <= l")
        m = linalg.identity(self.alphabet_size)
        for j in range(k, l):
            m = linalg.mat_mul(m, self.substitution(j).matrix)
        return m

    def shifted(self, k: int) -> "DirectiveSequence":
        """The directive sequence (s_{k+j})_j."""
        parent = self

        def factory():
            return (parent.name(k + j) for j in itertools.count())

        return DirectiveSequence(self.subs, factory, kind=f"shift({k},{self.kind})")


@dataclass
class WordSequencePrefix:
    """Determined prefixes of the fixed-point word tower (u_k)."""

    rows: list[Word]
    depths: list[int]
    level: int  # horizon n used to determine the rows
    fully_determined: bool  # every row reached the requested length

    def row_str(self, k: int) -> str:
        return word_to_str(self.rows[k])


def _common_prefix(words: Iterable[Word]) -> Word:
    words = list(words)
    out = words[0]
    for w in words[1:]:
        n = min(len(out), len(w))
        i = 0
        while i < n and out[i] == w[i]:
            i += 1
        out = out[:i]
    return out


def fixed_point_prefix(
    s: DirectiveSequence,
    rows: int,
    length: int,
    max_level: Optional[int] = None,
    seed_letter: Optional[int] = None,
) -> WordSequencePrefix:
    """Determined prefixes of u_0..u_(rows-1) for a fixed point of s.

    Row k is the longest common prefix over letters a of s_[k,n)(a), the
    part of u_k forced by the first n substitutions alone.  n grows until
    every row reaches `length` (or max_level caps it).  With a
    `seed_letter`, rows are s_[k,n)(seed_letter) instead (chosen, not
    forced, beyond the common prefix).
    """
    size = s.alphabet_size
    alphabet = range(size)

    def rows_at_level(n: int) -> list[Word]:
        imgs = {a: (a,) for a in alphabet}
        out: list[Optional[Word]] = [None] * rows
        for j in range(n - 1, -1, -1):
            sub = s.substitution(j)
            imgs = {a: sub.apply_truncated(imgs[a], length) for a in alphabet}
            if j < rows:
                if seed_letter is not None:
                    out[j] = imgs[seed_letter]
                else:
                    out[j] = _common_prefix(imgs.values())
        for j in range(n, rows):  # horizon below the row count
            out[j] = ()
        return [w if w is not None else () for w in out]

    if max_level is not None:
        level = max_level
        best = rows_at_level(level)
    else:
        level = max(rows + 4, 8)
        best = rows_at_level(level)
        while not all(len(w) >= length for w in best):
            nxt = rows_at_level(2 * level)
            if sum(map(len, nxt)) == sum(map(len, best)) and level >= 256:
                level *= 2
                best = nxt
                break  # no growth across a doubling; give up
            level *= 2
            best = nxt
    return WordSequencePrefix(
        rows=[w[:length] for w in best],
        depths=[min(len(w), length) for w in best],
        level=level,
        fully_determined=all(len(w) >= length for w in best),
    )


# ---------------------------------------------------------------------------
# factor complexity via suffix array


def _suffix_array(arr: np.ndarray) -> np.ndarray:
    """Suffix array by prefix doubling with numpy lexsort."""
    n = len(arr)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    rank = np.asarray(arr, dtype=np.int64)
    idx = np.arange(n, dtype=np.int64)
    k = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        second[: n - k] = rank[k:]
        order = np.lexsort((second, rank))
        new_rank = np.zeros(n, dtype=np.int64)
        r_sorted = rank[order]
        s_sorted = second[order]
        change = np.ones(n, dtype=np.int64)
        change[1:] = (r_sorted[1:] != r_sorted[:-1]) | (s_sorted[1:] != s_sorted[:-1])
        new_rank[order] = np.cumsum(change) - 1
        rank = new_rank
        if rank[order[-1]] == n - 1:
            return order
        k *= 2
        if k >= n:
            return np.lexsort((idx, rank))


def _lcp_array(arr: np.ndarray, sa: np.ndarray) -> np.ndarray:
    """Kasai: lcp[i] = lcp(suffix sa[i], suffix sa[i+1])."""
    n = len(arr)
    rank = np.zeros(n, dtype=np.int64)
    rank[sa] = np.arange(n)
    lcp = np.zeros(max(n - 1, 0), dtype=np.int64)
    h = 0
    for i in range(n):
        r = rank[i]
        if r == n - 1:
            h = 0
            continue
        j = sa[r + 1]
        while i + h < n and j + h < n and arr[i + h] == arr[j + h]:
            h += 1
        lcp[r] = h
        if h:
            h -= 1
    return lcp


@dataclass
class ComplexityTable:
    entries: dict[int, int]
    prefix_length: int
    short_prefix_warning: bool = False

    def __getitem__(self, n: int) -> int:
        return self.entries[n]


def complexity(prefix: Sequence[int], n_max: int) -> ComplexityTable:
    """Exact factor counts p(n), n <= n_max, of the given finite prefix."""
    arr = np.asarray(prefix, dtype=np.int64)
    length = len(arr)
    warn = length < 50 * n_max
    n_max = min(n_max, length)
    entries = {0: 1}
    if length:
        sa = _suffix_array(arr)
        lcp = _lcp_array(arr, sa)
        hist = np.bincount(lcp, minlength=n_max + 2)
        # ge[n] = number of adjacent suffix pairs with lcp >= n
        ge = np.concatenate([[len(lcp)], len(lcp) - np.cumsum(hist)])
        for n in range(1, n_max + 1):
            entries[n] = int((length - n + 1) - ge[min(n, len(ge) - 1)])
    return ComplexityTable(entries, length, warn)


def balance_measure(prefix: Sequence[int], n_max: int) -> dict[int, int]:
    """Per-letter max |#a in v - #a in w| over equal-length factors v,w.

    Returns {letter: minimal balance constant witnessed on the prefix}.
    """
    arr = np.asarray(prefix, dtype=np.int64)
    size = int(arr.max()) + 1 if len(arr) else 1
    out = {}
    for a in range(size):
        cum = np.concatenate([[0], np.cumsum(arr == a)])
        best = 0
        for n in range(1, min(n_max, len(arr)) + 1):
            win = cum[n:] - cum[:-n]
            best = max(best, int(win.max() - win.min()))
        out[a] = best
    return out


def frequency(prefix: Sequence[int], size: Optional[int] = None) -> tuple[Fraction, ...]:
    if len(prefix) == 0:
        raise ValueError("empty prefix has no frequency vector")
    size = size or (max(prefix) + 1)
    ab = abelianize(prefix, size)
    return tuple(Fraction(c, len(prefix)) for c in ab)


def is_primitive_window(
    s: DirectiveSequence, k: int, horizon: int
) -> Optional[int]:
    """Least n <= horizon with M_[k,n) > 0, or None."""
    m = linalg.identity(s.alphabet_size)
    for n in range(k, horizon + 1):
        if n > k:
            m = linalg.mat_mul(m, s.substitution(n - 1).matrix)
        if linalg.is_positive(m):
            return n
    return None


@dataclass
class GrowthTrace:
    column_norms: list[tuple[int, ...]]
    stalled_columns: list[int] = field(default_factory=list)


def is_everywhere_growing_window(s: DirectiveSequence, horizon: int) -> GrowthTrace:
    """Column 1-norms of M_[0,n), n <= horizon, with a stall heuristic."""
    m = linalg.identity(s.alphabet_size)
    trace = [linalg.column_norms(m)]
    for n in range(1, horizon + 1):
        m = linalg.mat_mul(m, s.substitution(n - 1).matrix)
        trace.append(linalg.column_norms(m))
    stalled = [
        j
        for j in range(s.alphabet_size)
        if trace[-1][j] == trace[max(horizon // 2, 0)][j]
    ]
    return GrowthTrace(trace, stalled)
