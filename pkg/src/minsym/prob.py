"""Collision probabilities for uniform sampling with replacement.

Draw ``n`` class labels independently and uniformly from ``num_classes``
classes. :func:`p_class_at_least` is the binomial tail probability that one
fixed class is drawn at least ``m`` times; :func:`p_exists_class_at_least`
lifts it to "some class is drawn at least m times" by treating classes as
independent, which is an approximation. :func:`monte_carlo_exists` estimates
the exact quantity empirically so the gap of the approximation can be
measured (at n=2, num_classes=2, m=2 the formula gives 7/16 while the true
probability is 1/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# Trials per RNG stream. Each chunk owns a counter-based stream derived from
# (seed, chunk index), so estimates are independent of how chunks are
# partitioned across workers.
_TRIALS_PER_CHUNK = 1024


@dataclass(frozen=True)
class CollisionQuery:
    """Sample count n, threshold m, and the number of equiprobable classes."""

    n: int
    m: int
    num_classes: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if self.m < 0:
            raise DomainError(f"m must be >= 0, got {self.m}")
        if self.num_classes < 1:
            raise DomainError(f"num_classes must be >= 1, got {self.num_classes}")


@dataclass(frozen=True)
class MonteCarloEstimate:
    probability: float
    stderr: float
    trials: int
    successes: int
    seed: int


def p_class_at_least(query: CollisionQuery) -> float:
    """P(X >= m) for X ~ Binomial(n, 1/num_classes).

    Log-domain binomial terms with compensated summation; exact 1.0 for m = 0
    and exact 0.0 for m > n. Whichever of the tail and its complement sits
    below the mean is the one summed directly, so small probabilities keep
    full relative precision and saturated ones full absolute precision.
    """
    n, m, classes = query.n, query.m, query.num_classes
    if m == 0:
        return 1.0
    if m > n:
        return 0.0
    if classes == 1:
        return 1.0  # every draw lands in the single class and m <= n here

    log_p = -math.log(classes)
    log_q = math.log1p(-1.0 / classes)
    mean = n / classes

    if m > mean:
        total = _compensated_term_sum(n, range(m, n + 1), log_p, log_q, mean)
    else:
        total = 1.0 - _compensated_term_sum(n, range(m - 1, -1, -1), log_p, log_q, mean)
    return min(1.0, max(0.0, total))


def p_exists_class_at_least(query: CollisionQuery) -> float:
    """1 - (1 - P(X >= m))^num_classes, treating class counts as independent.

    This is an approximation of P(some class >= m); use
    :func:`monte_carlo_exists` for the exact quantity.
    """
    p_single = p_class_at_least(query)
    if p_single >= 1.0:
        return 1.0
    return -math.expm1(query.num_classes * math.log1p(-p_single))


def monte_carlo_exists(query: CollisionQuery, trials: int, seed: int) -> MonteCarloEstimate:
    """Empirical P(some class drawn >= m times) over i.i.d. uniform draws.

    Deterministic for a fixed seed: trials are processed in fixed-size chunks,
    each with its own counter-based RNG stream, and merged by summation, so
    the estimate does not depend on how chunks would be scheduled.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    n, m, classes = query.n, query.m, query.num_classes

    if m == 0:
        return MonteCarloEstimate(1.0, 0.0, trials, trials, seed)

    successes = 0
    done = 0
    chunk_index = 0
    while done < trials:
        count = min(_TRIALS_PER_CHUNK, trials - done)
        rng = _chunk_rng(seed, chunk_index)
        labels = rng.integers(0, classes, size=(count, n), dtype=np.int64)
        successes += _count_collision_trials(labels, classes, m)
        done += count
        chunk_index += 1

    p_hat = successes / trials
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / trials)
    return MonteCarloEstimate(p_hat, stderr, trials, successes, seed)


def _count_collision_trials(labels: np.ndarray, classes: int, m: int) -> int:
    """Number of rows whose most frequent label occurs at least m times."""
    rows, n = labels.shape
    if m > n:
        return 0
    if m == 1:
        return rows
    keyed = (labels + np.arange(rows, dtype=np.int64)[:, None] * classes).ravel()
    uniq, counts = np.unique(keyed, return_counts=True)
    row_ids = uniq // classes
    if m == 2:
        # A row has a repeat iff it has fewer distinct labels than draws.
        distinct_per_row = np.bincount(row_ids, minlength=rows)
        return int((distinct_per_row < n).sum())
    boundaries = np.flatnonzero(np.r_[True, row_ids[1:] != row_ids[:-1]])
    row_max = np.maximum.reduceat(counts, boundaries)
    return int((row_max >= m).sum())


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(chunk_index))


def _compensated_term_sum(n: int, ks, log_p: float, log_q: float, mean: float) -> float:
    """Kahan-compensated sum of binomial pmf terms over ``ks``.

    ``ks`` must be ordered moving away from the mode, so terms shrink and the
    remainder after early exit is bounded by term * len(rest).
    """
    total = 0.0
    compensation = 0.0
    for k in ks:
        term = math.exp(_log_comb(n, k) + k * log_p + (n - k) * log_q)
        y = term - compensation
        t = total + y
        compensation = (t - total) - y
        total = t
        away_from_mode = (k > mean and k < n) or (k < mean and k > 0)
        if away_from_mode and total > 0.0 and term * n < total * 1e-18:
            break
    return total


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
