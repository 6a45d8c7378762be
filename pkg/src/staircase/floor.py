"""Counting stall patterns and estimating their error-floor contribution.

All pattern counts are exact Python integers; probabilities only become
floats when multiplied by ``(p + xi) ** eps``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

comb = math.comb


@dataclass(frozen=True)
class PatternShape:
    K: int
    L: int
    eps: int
    t: int

    def __post_init__(self):
        lo, hi = epsilon_bounds(self.K, self.L, self.t)
        if not lo <= self.eps <= hi:
            raise ValueError(
                f"weight {self.eps} outside [{lo}, {hi}] for a ({self.K},{self.L}) pattern, t={self.t}"
            )

    @property
    def eps_min(self) -> int:
        return max(self.K, self.L) * (self.t + 1)


def epsilon_bounds(K: int, L: int, t: int) -> tuple[int, int]:
    """Smallest and largest weight of a ``(K, L)`` stall pattern."""
    if K < t + 1 or L < t + 1:
        raise ValueError(f"a stall pattern needs K, L >= t+1 = {t + 1}, got ({K}, {L})")
    return max(K, L) * (t + 1), K * L


def shapes(K: int, L: int, t: int) -> list[PatternShape]:
    lo, hi = epsilon_bounds(K, L, t)
    return [PatternShape(K, L, e, t) for e in range(lo, hi + 1)]


def count_positions(m: int, K: int, L: int) -> int:
    """Row/column selections placing a ``(K, L)`` pattern at a given block."""
    return comb(m, L) * sum(comb(m, a) * comb(m, K - a) for a in range(1, K + 1))


def n_hat(shape: PatternShape) -> int:
    K, L, eps, t = shape.K, shape.L, shape.eps, shape.t
    lo = shape.eps_min
    return comb(min(K, L), t + 1) ** max(K, L) * comb(K * L - lo, eps - lo)


# -- binary matrices with prescribed margins --------------------------------

@lru_cache(maxsize=None)
def _margin_count(rows: tuple, cols: tuple) -> int:
    # rows: sorted residual row sums; cols: remaining column sums (descending)
    if not cols:
        return 1 if not any(rows) else 0
    need = cols[0]
    rest = cols[1:]
    if sum(rows) != need + sum(rest):
        return 0
    groups = sorted(Counter(rows).items())
    total = 0

    def choose(idx: int, left: int, ways: int, taken: list):
        nonlocal total
        if idx == len(groups):
            if left:
                return
            new_rows = []
            for (value, count), x in zip(groups, taken):
                new_rows += [value - 1] * x + [value] * (count - x)
            total += ways * _margin_count(tuple(sorted(new_rows)), rest)
            return
        value, count = groups[idx]
        upper = min(count, left) if value > 0 else 0
        for x in range(upper + 1):
            choose(idx + 1, left - x, ways * comb(count, x), taken + [x])

    choose(0, need, 1, [])
    return total


def contingency_count(r, s) -> int:
    """Number of binary matrices with row sums ``r`` and column sums ``s``."""
    r = [int(v) for v in r]
    s = [int(v) for v in s]
    K, L = len(r), len(s)
    if sum(r) != sum(s):
        return 0
    if any(v < 0 or v > L for v in r) or any(v < 0 or v > K for v in s):
        return 0
    return _margin_count(tuple(sorted(r)), tuple(sorted(s, reverse=True)))


def _compositions(total: int, parts: int, lo: int, hi: int, floor_: int | None = None):
    """Nondecreasing tuples of ``parts`` values in ``[lo, hi]`` summing to ``total``."""
    if floor_ is None:
        floor_ = lo
    if parts == 0:
        if total == 0:
            yield ()
        return
    for v in range(floor_, hi + 1):
        remaining = total - v
        if remaining < v * (parts - 1):
            break
        if remaining > hi * (parts - 1):
            continue
        for tail in _compositions(remaining, parts - 1, lo, hi, v):
            yield (v,) + tail


def _arrangements(parts: tuple) -> int:
    """Distinct orderings of a multiset."""
    n = math.factorial(len(parts))
    for c in Counter(parts).values():
        n //= math.factorial(c)
    return n


def margin_classes(shape: PatternShape):
    """Sorted margin pairs ``(r, s, multiplicity)`` of all stall patterns."""
    K, L, eps, t = shape.K, shape.L, shape.eps, shape.t
    row_sets = list(_compositions(eps, K, t + 1, L))
    col_sets = list(_compositions(eps, L, t + 1, K))
    for r in row_sets:
        for s in col_sets:
            yield r, s, _arrangements(r) * _arrangements(s)


def exact_count(shape: PatternShape) -> int:
    """Number of ``K x L`` binary matrices of weight eps whose rows and
    columns all have weight at least ``t + 1``."""
    return sum(mult * contingency_count(r, s) for r, s, mult in margin_classes(shape))


def row_count_tilde(shape: PatternShape) -> int:
    """Number of weight-eps ``K x L`` matrices meeting only the row constraints."""
    L, t = shape.L, shape.t

    @lru_cache(maxsize=None)
    def F(a: int, b: int) -> int:
        if b == 1:
            return comb(L, a)
        lo = max(t + 1, a - L * (b - 1))
        hi = min(a - (b - 1) * (t + 1), L)
        return sum(comb(L, j) * F(a - j, b - 1) for j in range(lo, hi + 1))

    return F(shape.eps, shape.K)


# -- gamma estimation ------------------------------------------------------

def _sample_recipe(shape: PatternShape, count: int, rng: np.random.Generator) -> np.ndarray:
    """K random weight-(t+1) rows, then the remaining ones among the zeros."""
    K, L, eps, t = shape.K, shape.L, shape.eps, shape.t
    keys = rng.random((count, K, L))
    order = np.argsort(keys, axis=2)
    mats = np.zeros((count, K, L), dtype=np.uint8)
    np.put_along_axis(mats, order[:, :, : t + 1], 1, axis=2)
    extra = eps - K * (t + 1)
    if extra:
        flat = mats.reshape(count, K * L)
        keys = rng.random((count, K * L))
        keys[flat == 1] = np.inf
        pick = np.argsort(keys, axis=1)[:, :extra]
        np.put_along_axis(flat, pick, 1, axis=1)
    return mats


def _sample_uniform_rows(shape: PatternShape, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draws from the row-constrained set (the set counted by F)."""
    K, L, eps, t = shape.K, shape.L, shape.eps, shape.t

    @lru_cache(maxsize=None)
    def F(a: int, b: int) -> int:
        if b == 0:
            return 1 if a == 0 else 0
        return sum(comb(L, j) * F(a - j, b - 1) for j in range(t + 1, min(L, a) + 1))

    weights = np.empty((count, K), dtype=np.int64)
    for n in range(count):
        left = eps
        for b in range(K, 0, -1):
            options = list(range(t + 1, min(L, left) + 1))
            w = [comb(L, j) * F(left - j, b - 1) for j in options]
            total = sum(w)
            x = int(rng.integers(total)) if total < 2**63 else int(rng.random() * total)
            acc = 0
            for j, wj in zip(options, w):
                acc += wj
                if x < acc:
                    break
            weights[n, K - b] = j
            left -= j
    keys = rng.random((count, K, L))
    ranks = np.argsort(np.argsort(keys, axis=2), axis=2)
    return (ranks < weights[:, :, None]).astype(np.uint8)


SAMPLERS = {"recipe": _sample_recipe, "uniform": _sample_uniform_rows}


def gamma_estimate(
    shape: PatternShape,
    sample_count: int,
    seed: int,
    sampler: str = "uniform",
    batch: int = 20000,
) -> float:
    """Fraction of sampled row-constrained matrices that are stall patterns.

    ``sampler="recipe"`` draws ``K`` rows of weight ``t+1`` and sprinkles the
    remaining ones uniformly; ``"uniform"`` draws uniformly from the set of
    row-constrained matrices, so its estimate converges to ``N / N_tilde``.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    draw = SAMPLERS[sampler]
    rng = np.random.default_rng(seed)
    hits = 0
    left = sample_count
    while left:
        size = min(batch, left)
        mats = draw(shape, size, rng)
        hits += int(np.all(mats.sum(axis=1) >= shape.t + 1, axis=1).sum())
        left -= size
    return hits / sample_count


def n_approx(shape: PatternShape, gamma: float) -> float:
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must be in [0, 1], got {gamma}")
    return gamma * row_count_tilde(shape)


# -- floor contributions ----------------------------------------------------

def _weight(shape: PatternShape, m: int, p: float, xi: float) -> float:
    if p < 0 or xi < 0 or p + xi >= 1:
        raise ValueError("need p, xi >= 0 and p + xi < 1")
    return shape.eps / m**2 * (p + xi) ** shape.eps


def p_c_old(shape: PatternShape, m: int, p: float, xi: float) -> float:
    return _weight(shape, m, p, xi) * float(count_positions(m, shape.K, shape.L) * n_hat(shape))


def p_c_new(shape: PatternShape, m: int, p: float, xi: float, count: int | float | None = None) -> float:
    """Exact contribution; ``count`` overrides the exact pattern count."""
    if count is None:
        count = exact_count(shape)
    return _weight(shape, m, p, xi) * float(count_positions(m, shape.K, shape.L) * count)


def floor_bound_old(K: int, L: int, m: int, p: float, xi: float, t: int) -> float:
    return sum(p_c_old(s, m, p, xi) for s in shapes(K, L, t))


@dataclass
class FloorTerm:
    shape: PatternShape
    m: int
    p: float
    xi: float
    solved_fraction: float = 0.0
    A: int = field(init=False)
    N_hat: int = field(init=False)
    N_tilde: int = field(init=False)
    N_exact: int = field(init=False)
    N_approx: float | None = None
    P_C_old: float = field(init=False)
    P_C_new: float = field(init=False)

    def __post_init__(self):
        if not 0.0 <= self.solved_fraction <= 1.0:
            raise ValueError("solved_fraction must be in [0, 1]")
        s = self.shape
        self.A = count_positions(self.m, s.K, s.L)
        self.N_hat = n_hat(s)
        self.N_tilde = row_count_tilde(s)
        self.N_exact = exact_count(s)
        self.P_C_old = p_c_old(s, self.m, self.p, self.xi)
        self.P_C_new = p_c_new(s, self.m, self.p, self.xi, self.N_exact)

    @property
    def P_floor(self) -> float:
        return (1.0 - self.solved_fraction) * self.P_C_new


def floor_total(terms) -> float:
    return sum(term.P_floor for term in terms)
