"""Lyapunov exponents of the transposed and projected matrix cocycles.

theta1 = lim (1/n) ln ||M_[0,n)^T||, theta2 = lim (1/n) ln ||pi_x M_[0,n)||_1.

The projected product keeps pi_x as the fixed left factor.  After each
right multiplication the product is additionally multiplied by
pi_{x^(k)}; by the cocycle identity pi_x M_[0,k) pi_{F^k x} = pi_x M_[0,k)
this changes nothing mathematically, but it projects out the float
rounding noise that would otherwise grow like e^(theta1 n) and swamp the
e^(theta2 n) signal.  Running products are rescaled every step with the
log of the scale accumulated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import linalg
from .algorithms import Algorithm, Direction, DomainError, eigen_orbit


# ---------------------------------------------------------------------------
# orbit streams: yield (matrix, normalized next direction) per step


def _orbit_stream(alg: Algorithm, x: Direction, n: int) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    mats = {k: np.array(m, dtype=float) for k, m in alg.matrices.items()}
    if x.eigen_matrix is not None:
        names, floats = eigen_orbit(alg, x.eigen_matrix, n)
        for k in range(n):
            yield mats[names[k]], np.asarray(floats[k + 1], dtype=float)
        return
    if x.mode == "exact":
        denom = math.lcm(*(Fraction(c).denominator for c in x.components))
        comps = [int(Fraction(c) * denom) for c in x.components]
        invs = {k: alg.inverse_matrices()[k] for k in alg.substitutions}
        for _ in range(n):
            name, _tie = alg.selector(comps)
            minv = invs[name]
            comps = [
                sum(minv[i][j] * comps[j] for j in range(len(comps)))
                for i in range(len(comps))
            ]
            if any(c < 0 for c in comps):
                raise DomainError("left the positive cone")
            total = sum(comps)
            yield mats[name], np.asarray(comps, dtype=float) / total
        return
    comps = np.asarray(x.components, dtype=float)
    comps = comps / comps.sum()
    invs = {k: np.array(m, dtype=float) for k, m in alg.inverse_matrices().items()}
    for _ in range(n):
        name, _tie = alg.selector(tuple(comps))
        comps = invs[name] @ comps
        if (comps < 0).any():
            raise DomainError("left the positive cone")
        comps = comps / comps.sum()
        yield mats[name], comps


def theta1_estimate(alg: Algorithm, x: Direction, n: int) -> float:
    """(1/n) ln ||M_[0,n)^T|| via a rescaled running product."""
    size = alg.alphabet_size
    t = np.eye(size)
    logs = 0.0
    for mat, _v in _orbit_stream(alg, x, n):
        t = mat.T @ t
        scale = np.abs(t).max()
        logs += math.log(scale)
        t /= scale
    logs += math.log(np.abs(t).sum(axis=0).max())
    return logs / n


def theta2_estimate(
    alg: Algorithm,
    x: Direction,
    n: int,
    restart_at: int = 0,
    stabilize: bool = True,
) -> float:
    """(1/n) ln ||pi_x M_[k,k+n)||_1 with k = restart_at.

    With stabilize=False the product is accumulated with no per-step
    re-projection (the literal fixed-left-projection form); usable only
    for short windows in float arithmetic.
    """
    size = alg.alphabet_size
    stream = _orbit_stream(alg, x, restart_at + n)
    v0 = np.asarray(x.v_floats(), dtype=float)
    for _ in range(restart_at):
        _mat, v0 = next(stream)
    q = np.eye(size) - np.outer(v0, np.ones(size))
    logs = 0.0
    for _ in range(n):
        mat, v = next(stream)
        q = q @ mat
        if stabilize:
            q = q - np.outer(q @ v, np.ones(size))
        scale = np.abs(q).max()
        logs += math.log(scale)
        q /= scale
    logs += math.log(np.abs(q).sum(axis=0).max())
    return logs / n


def cocycle_split_check(alg: Algorithm, x: Direction, n: int, split: int) -> float:
    """|log||pi_x M_[0,n)|| - log(||pi_x M_[0,k)|| composed at k)| per step.

    Exercises pi_x M_[0,n) = pi_x M_[0,k) pi_{F^k x} M_[k,n); returns the
    per-step defect of the accumulated log-norms.
    """
    whole = theta2_estimate(alg, x, n) * n
    left = theta2_estimate(alg, x, split) * split
    right = theta2_estimate(alg, x, n - split, restart_at=split) * (n - split)
    # log of a product of operator norms only bounds the composition;
    # compare the two accumulations of the same telescoped product instead
    return abs(whole - (left + right)) / n


# ---------------------------------------------------------------------------
# vectorized Monte-Carlo sweeps


def _batch_branch(alg: Algorithm, names: list[str], x: np.ndarray) -> np.ndarray:
    """Branch index per trial for a (trials, d+1) array of directions."""
    if alg.name == "cassaigne":
        return np.where(x[:, 0] >= x[:, 2], names.index("c0"), names.index("c1"))
    if alg.name == "sturmian":
        return np.where(x[:, 0] >= x[:, 1], names.index("tau0"), names.index("tau1"))
    if alg.name.startswith("brun"):
        order = np.argsort(x, axis=1, kind="stable")
        keys = ["b" + "".join(map(str, row)) for row in order]
        return np.array([names.index(k) for k in keys])
    if alg.name.startswith("arnoux-rauzy"):
        total = x.sum(axis=1)
        dominant = np.argmax(x, axis=1)
        ok = 2 * x[np.arange(len(x)), dominant] > total
        if not ok.all():
            raise DomainError("some trial left the Arnoux-Rauzy domain")
        return np.array([names.index(f"ar{i}") for i in dominant])
    raise KeyError(f"no batch selector for {alg.name}")


@dataclass
class LyapunovReport:
    algorithm: str
    n_steps: int
    rows: list[tuple[int, float, float]]  # (seed, theta1, theta2)
    skipped: int = 0
    theta1_mean: float = float("nan")
    theta1_std: float = float("nan")
    theta2_mean: float = float("nan")
    theta2_std: float = float("nan")
    verdict: str = "insufficient data"

    def finalize(self) -> "LyapunovReport":
        if not self.rows:
            self.verdict = "insufficient data"
            return self
        t1 = np.array([r[1] for r in self.rows])
        t2 = np.array([r[2] for r in self.rows])
        self.theta1_mean = float(t1.mean())
        self.theta1_std = float(t1.std())
        self.theta2_mean = float(t2.mean())
        self.theta2_std = float(t2.std())
        # verdict requires the sign margin to clear the spread
        if t1.min() > 0 > t2.max() and t1.min() >= self.theta1_std and -t2.max() >= self.theta2_std:
            self.verdict = "Pisot-like"
        elif t1.min() > 0 > t2.max():
            self.verdict = "signs hold (margin below stddev)"
        else:
            self.verdict = "not Pisot-like"
        return self


def pisot_report(
    alg: Algorithm,
    trials: int,
    n: int,
    seed: int = 0,
    sampler: str = "simplex",
) -> LyapunovReport:
    """Seeded Monte-Carlo sweep of (theta1, theta2) over random directions.

    Deterministic per (algorithm, trials, n, seed): trial i draws its
    direction from numpy's default_rng(seed + i) on the open simplex.
    All trials are stepped in lockstep with vectorized products.
    """
    report = LyapunovReport(alg.name, n, [])
    if trials == 0:
        return report.finalize()
    size = alg.alphabet_size
    seeds = [seed + i for i in range(trials)]
    xs = np.stack(
        [np.random.default_rng(s).dirichlet(np.ones(size)) for s in seeds]
    )
    names = sorted(alg.substitutions)
    mats = np.stack([np.array(alg.substitutions[k].matrix, dtype=float) for k in names])
    invs = np.stack(
        [np.array(linalg.inverse_unimodular(alg.substitutions[k].matrix), dtype=float) for k in names]
    )
    ones = np.ones(size)
    x = xs.copy()
    q = np.eye(size)[None, :, :] - x[:, :, None] * ones[None, None, :]
    t1 = np.broadcast_to(np.eye(size), (trials, size, size)).copy()
    logs_q = np.zeros(trials)
    logs_t = np.zeros(trials)
    alive = np.ones(trials, dtype=bool)
    for _ in range(n):
        try:
            branch = _batch_branch(alg, names, x)
        except DomainError:
            # retire trials individually
            branch = np.zeros(trials, dtype=int)
            for i in range(trials):
                if not alive[i]:
                    continue
                try:
                    branch[i] = _batch_branch(alg, names, x[i : i + 1])[0]
                except DomainError:
                    alive[i] = False
            if not alive.any():
                break
        m = mats[branch]
        x = np.einsum("tij,tj->ti", invs[branch], x)
        x = x / x.sum(axis=1, keepdims=True)
        q = np.einsum("tij,tjk->tik", q, m)
        q = q - np.einsum("tik,tk->ti", q, x)[:, :, None] * ones[None, None, :]
        t1 = np.einsum("tji,tjk->tik", m, t1)
        sq = np.abs(q).reshape(trials, -1).max(axis=1)
        st = np.abs(t1).reshape(trials, -1).max(axis=1)
        logs_q += np.where(alive, np.log(sq), 0.0)
        logs_t += np.where(alive, np.log(st), 0.0)
        q /= sq[:, None, None]
        t1 /= st[:, None, None]
    logs_q += np.log(np.abs(q).sum(axis=1).max(axis=1))
    logs_t += np.log(np.abs(t1).sum(axis=1).max(axis=1))
    for i in range(trials):
        if alive[i]:
            report.rows.append((seeds[i], float(logs_t[i] / n), float(logs_q[i] / n)))
        else:
            report.skipped += 1
    return report.finalize()
