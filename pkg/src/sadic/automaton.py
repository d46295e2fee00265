"""Abelianized prefix automaton and path-based worm enumeration.

States are letters.  For a substitution sigma there is a transition
a -(t, sigma)-> b exactly when sigma(a) = u b v with ab(u) = t.  Reading
a path b_(n) -(t_(n-1), s_(n-1))-> ... -(t_0, s_0)-> a against a
directive sequence s produces the worm point sum_k M_[0,k) t_k, the
numeration of a prefix of the fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import linalg
from .words import DirectiveSequence, Substitution, abelianize


@dataclass(frozen=True)
class Transition:
    source: int  # a
    t: tuple[int, ...]  # abelianized proper prefix
    sub: str  # substitution name
    target: int  # b


@dataclass
class PrefixAutomaton:
    alphabet_size: int
    sub_names: tuple[str, ...]
    alphabet: tuple[tuple[int, ...], ...]  # Dumont-Thomas alphabet Sigma
    transitions: tuple[Transition, ...]

    def outgoing(self, a: int, sub: Optional[str] = None) -> list[Transition]:
        return [
            tr
            for tr in self.transitions
            if tr.source == a and (sub is None or tr.sub == sub)
        ]

    def incoming(self, b: int, sub: Optional[str] = None) -> list[Transition]:
        return [
            tr
            for tr in self.transitions
            if tr.target == b and (sub is None or tr.sub == sub)
        ]

    def to_dot(self) -> str:
        lines = ["digraph prefix_automaton {", "  rankdir=LR;"]
        for a in range(self.alphabet_size):
            lines.append(f'  {a} [shape=circle, label="{a}"];')
        for tr in self.transitions:
            t = ",".join(map(str, tr.t))
            lines.append(
                f'  {tr.source} -> {tr.target} [label="({t}),{tr.sub}"];'
            )
        lines.append("}")
        return "\n".join(lines)


def build(subs: dict[str, Substitution]) -> PrefixAutomaton:
    """The abelianized prefix automaton of the substitution set."""
    sizes = {s.alphabet_size for s in subs.values()}
    if len(sizes) != 1:
        raise ValueError("substitution set must share one alphabet")
    size = sizes.pop()
    sigma_vectors: list[tuple[int, ...]] = []
    transitions: list[Transition] = []
    for name in sorted(subs):
        sub = subs[name]
        for a in range(size):
            img = sub.images[a]
            for pos in range(len(img)):
                t = abelianize(img[:pos], size)
                if t not in sigma_vectors:
                    sigma_vectors.append(t)
                transitions.append(Transition(a, t, name, img[pos]))
    sigma_vectors.sort()
    return PrefixAutomaton(size, tuple(sorted(subs)), tuple(sigma_vectors), tuple(transitions))


def path_count(
    aut: PrefixAutomaton, s: DirectiveSequence, k: int, l: int, a: int, b: int
) -> int:
    """Number of automaton paths b -> a labeled by s_(l-1), ..., s_k.

    Dynamic programming over the transition list; equals (M_[k,l))_{a,b}.
    """
    if not 0 <= k <= l:
        raise ValueError("need 0 <= k <= l")
    counts = [0] * aut.alphabet_size
    counts[b] = 1
    for j in range(l - 1, k - 1, -1):
        name = s.name(j)
        nxt = [0] * aut.alphabet_size
        for tr in aut.transitions:
            if tr.sub == name and counts[tr.source]:
                nxt[tr.target] += counts[tr.source]
        counts = nxt
    return counts[a]


def enumerate_worm(
    aut: PrefixAutomaton,
    s: DirectiveSequence,
    depth: int,
    start_letters: Optional[Iterable[int]] = None,
) -> dict[int, list[tuple[int, ...]]]:
    """Worm points from length-`depth` paths, grouped by final letter.

    Each path b_depth -> ... -> a (edges labeled s_(depth-1) down to s_0)
    yields the integer point sum_{k<depth} M_[0,k) t_k.  With
    start_letters = {first letter of u_depth}, the union over final
    letters is exactly the worm of the determined prefix s_[0,depth)(b).
    """
    size = aut.alphabet_size
    if start_letters is None:
        start_letters = range(size)
    # vals[state] = list of partial sums rho = t_j + M_j rho' built inward
    vals: dict[int, list[tuple[int, ...]]] = {
        b: [tuple([0] * size)] for b in start_letters
    }
    for j in range(depth - 1, -1, -1):
        name = s.name(j)
        mat = s.subs[name].matrix
        nxt: dict[int, list[tuple[int, ...]]] = {}
        by_source: dict[int, list[Transition]] = {}
        for tr in aut.transitions:
            if tr.sub == name:
                by_source.setdefault(tr.source, []).append(tr)
        for state, points in vals.items():
            for tr in by_source.get(state, []):
                bucket = nxt.setdefault(tr.target, [])
                for rho in points:
                    mr = linalg.mat_vec(mat, rho)
                    bucket.append(tuple(tr.t[i] + mr[i] for i in range(size)))
        vals = nxt
    return {a: vals.get(a, []) for a in range(size)}


def worm_recursion_check(
    aut: PrefixAutomaton, sigma: Substitution, name: str, prefix: Sequence[int]
) -> bool:
    """Check W_a(sigma(u)) = union over edges b -(t)-> a of ab(sigma) W_b(u) + t.

    Both sides are computed on the finite window h < |sigma(prefix minus
    the last letter)| where the right side is fully determined.
    """
    from .geometry import worm

    size = sigma.alphabet_size
    image = sigma.apply(prefix)
    lhs_worm = worm(image, size)
    rhs_input = worm(prefix, size)
    window = len(sigma.apply(prefix[:-1])) if len(prefix) else 0
    mat = sigma.matrix
    for a in range(size):
        lhs = {p for p in lhs_worm.partition.get(a, []) if sum(p) < window}
        rhs = set()
        for tr in aut.incoming(a, name):
            for p in rhs_input.partition.get(tr.source, []):
                mp = linalg.mat_vec(mat, p)
                q = tuple(mp[i] + tr.t[i] for i in range(size))
                if sum(q) < window:
                    rhs.add(q)
        if lhs != rhs:
            return False
    return True
