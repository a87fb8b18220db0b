"""Exact counting bounds for weight-class transitions under injective maps.

An injective map that preserves total Hamming weight sends the strings of
one class into distinct strings, so the fraction of a source class landing
in a target class is at most ``|target| / |source|``.  The functions here
evaluate those ratios as exact :class:`fractions.Fraction` values.
"""
from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from itertools import combinations

import numpy as np

from .revcircuit import (
    Circuit,
    WeightCouple,
    check_conservative,
    packed_couples,
    run_packed,
)

EXHAUSTIVE_WIDTH_LIMIT = 24


class InfiniteRateError(ValueError):
    """Decay rate of a zero probability is unbounded."""


def binom(n: int, k: int) -> int:
    if n < 0:
        raise ValueError(f"binom needs n >= 0, got {n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def couple_class_size(c: WeightCouple) -> int:
    return binom(c.half_len, c.left_weight) * binom(c.half_len, c.right_weight)


def _check_half_len(n: int, *couples: WeightCouple) -> None:
    for c in couples:
        if c.half_len != n:
            raise ValueError(f"couple {c} has half_len {c.half_len}, expected {n}")


def clausius_point_ratio(n: int, source: WeightCouple, target: WeightCouple) -> Fraction:
    """``|target class| / |source class|`` for a weight-preserving transition."""
    _check_half_len(n, source, target)
    if source.total != target.total:
        raise ValueError(
            f"weight-sum mismatch: source {source} has {source.total}, target {target} has {target.total}"
        )
    return Fraction(couple_class_size(target), couple_class_size(source))


def equal_weight_targets(n: int, total: int) -> list[WeightCouple]:
    lo, hi = max(0, total - n), min(n, total)
    return [WeightCouple(n, a, total - a) for a in range(lo, hi + 1)]


def loaded_sign(source: WeightCouple) -> int:
    """+1 when the left half is the heavier one (ties go left), else -1."""
    return 1 if source.left_weight >= source.right_weight else -1


def tail_targets(
    n: int, source: WeightCouple, delta_n: int, symmetric: bool = False
) -> list[WeightCouple]:
    """Targets whose imbalance is at least ``2 * delta_n`` beyond the source's.

    Imbalance is measured in the direction of the heavier source half; with
    ``symmetric`` both directions count, using absolute imbalance.
    """
    _check_half_len(n, source)
    if delta_n < 0:
        raise ValueError(f"delta_n must be >= 0, got {delta_n}")
    sign = loaded_sign(source)
    need = sign * source.imbalance + 2 * delta_n
    out = []
    for t in equal_weight_targets(n, source.total):
        shift = abs(t.imbalance) if symmetric else sign * t.imbalance
        if shift >= need:
            out.append(t)
    return out


def clausius_tail_ratio(
    n: int, source: WeightCouple, delta_n: int, symmetric: bool = False
) -> Fraction:
    """Sum of point ratios over the at-least-as-extreme targets, capped at 1."""
    total = sum(
        (clausius_point_ratio(n, source, t) for t in tail_targets(n, source, delta_n, symmetric)),
        Fraction(0),
    )
    return min(total, Fraction(1))


def kelvin_ratio(N: int, n: int, w: int) -> Fraction:
    """Fraction bound for landing weight-``w`` strings on a ``1^n`` prefix."""
    if not 0 <= n <= N:
        raise ValueError(f"need 0 <= n <= N, got n={n}, N={N}")
    if not 0 <= w <= N:
        raise ValueError(f"need 0 <= w <= N, got w={w}, N={N}")
    return Fraction(binom(N - n, w - n), binom(N, w))


def decay_rate(p: Fraction, n: int) -> float:
    """``-log2(p) / n`` evaluated from the exact rational."""
    p = Fraction(p)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if p == 0:
        raise InfiniteRateError("probability is zero; decay rate is infinite")
    if p < 0 or p > 1:
        raise ValueError(f"probability must lie in (0, 1], got {p}")
    # Split off a power of two so the remaining mantissa lies in [3/4, 3/2].
    # Near p = 1 this makes e = 0, so nothing cancels and log1p keeps full
    # relative precision; otherwise |log2 p| > 0.4 and the sum is benign.
    e = p.numerator.bit_length() - p.denominator.bit_length()
    m = p / Fraction(2) ** e
    if m > Fraction(3, 2):
        e, m = e + 1, m / 2
    elif m < Fraction(3, 4):
        e, m = e - 1, m * 2
    log2p = e + math.log1p(float(m - 1)) / math.log(2)
    return -log2p / n


# --- exhaustive oracle -------------------------------------------------------

def couple_members(source: WeightCouple) -> np.ndarray:
    """Packed encodings of every string in the source couple class."""
    n = source.half_len
    lefts = [sum(1 << (n - 1 - i) for i in pos) for pos in combinations(range(n), source.left_weight)]
    rights = [sum(1 << (n - 1 - i) for i in pos) for pos in combinations(range(n), source.right_weight)]
    left = np.array(lefts, dtype=np.uint64) << np.uint64(n)
    right = np.array(rights, dtype=np.uint64)
    return (left[:, None] | right[None, :]).ravel()


def exhaustive_transition_table(c: Circuit, source: WeightCouple) -> dict[WeightCouple, int]:
    """Count, over the whole source class, how many strings land in each couple."""
    n = source.half_len
    if c.width != 2 * n:
        raise ValueError(f"circuit width {c.width} != 2 * half_len {2 * n}")
    if c.width > EXHAUSTIVE_WIDTH_LIMIT:
        raise ValueError(f"width {c.width} exceeds exhaustive limit {EXHAUSTIVE_WIDTH_LIMIT}")
    verdict = check_conservative(c, "exhaustive", max_width=EXHAUSTIVE_WIDTH_LIMIT)
    if not verdict.passed:
        a, b = verdict.counterexample
        raise ValueError(f"circuit is not conservative: {a} -> {b}")
    return _tally(run_packed(c, couple_members(source)), n)


def all_transition_tables(c: Circuit) -> dict[WeightCouple, dict[WeightCouple, int]]:
    """:func:`exhaustive_transition_table` for every source couple, one pass."""
    if c.width % 2:
        raise ValueError("circuit width must be even")
    n = c.width // 2
    if c.width > EXHAUSTIVE_WIDTH_LIMIT:
        raise ValueError(f"width {c.width} exceeds exhaustive limit {EXHAUSTIVE_WIDTH_LIMIT}")
    xs = np.arange(1 << c.width, dtype=np.uint64)
    ys = run_packed(c, xs)
    if np.any(np.bitwise_count(xs) != np.bitwise_count(ys)):
        raise ValueError("circuit is not conservative")
    sl, sr = packed_couples(xs, n)
    tl, tr = packed_couples(ys, n)
    side = n + 1
    keys = ((sl * side + sr) * side + tl) * side + tr
    hist = np.bincount(keys, minlength=side ** 4).reshape(side, side, side, side)
    tables: dict[WeightCouple, dict[WeightCouple, int]] = {}
    for a, b, p, q in zip(*np.nonzero(hist)):
        src = WeightCouple(n, int(a), int(b))
        tables.setdefault(src, {})[WeightCouple(n, int(p), int(q))] = int(hist[a, b, p, q])
    return tables


def _tally(outputs: np.ndarray, n: int) -> dict[WeightCouple, int]:
    left, right = packed_couples(outputs, n)
    counts = Counter(zip(left.tolist(), right.tolist()))
    return {WeightCouple(n, a, b): k for (a, b), k in sorted(counts.items())}
