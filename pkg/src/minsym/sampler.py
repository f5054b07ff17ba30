"""Uniform instance generation and rejection sampling into minimum-symbol buckets.

Instances are drawn i.i.d. from the implicit uniform object universe (the
full universe is far too large to materialize; at 20 attributes and 4 values
it has 4^20 objects). Each draw is solved for its minimum symbol count and
appended to its bucket until every tracked bucket holds the per-bucket quota.

Draws are indexed 0, 1, 2, ... and generated from fixed-size chunks, each
chunk owning a counter-based RNG stream derived from (seed, chunk index).
Instance i is therefore a pure function of (config, i), stored instances keep
their draw index as a stable id, and output is bit-identical for any worker
count: workers solve disjoint chunks, a single collector consumes results in
draw order, and the run stops at the exact draw that fills the last bucket.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np

from .core import AttributeSpace, GameInstance, ObjectVector
from .errors import DomainError, PartialSampleError
from .sms import solve_min_sym

# Draws per RNG stream; fixed so that results do not depend on partitioning.
_DRAWS_PER_CHUNK = 512

# The tail of the bucket distribution is thin (that is the point of bucketing),
# so rare buckets may never fill; the default budget keeps runs finite.
_DEFAULT_ATTEMPTS_PER_BUCKET = 10_000


@dataclass(frozen=True)
class SamplerConfig:
    space: AttributeSpace
    num_distractors: int
    per_bucket_target: int
    tracked_buckets: frozenset[int]
    seed: int
    max_attempts: int = 0  # 0: default budget of 10^4 x per_bucket_target per tracked bucket

    def __post_init__(self):
        object.__setattr__(self, "tracked_buckets", frozenset(int(b) for b in self.tracked_buckets))
        if self.num_distractors < 1:
            raise DomainError(f"num_distractors must be >= 1, got {self.num_distractors}")
        if self.per_bucket_target < 1:
            raise DomainError(f"per_bucket_target must be >= 1, got {self.per_bucket_target}")
        if not self.tracked_buckets:
            raise DomainError("tracked_buckets must be nonempty")
        if any(b < 1 for b in self.tracked_buckets):
            raise DomainError("tracked bucket keys must be >= 1")
        if self.seed < 0:
            raise DomainError(f"seed must be >= 0, got {self.seed}")
        if self.max_attempts == 0:
            object.__setattr__(
                self,
                "max_attempts",
                _DEFAULT_ATTEMPTS_PER_BUCKET * self.per_bucket_target * len(self.tracked_buckets),
            )
        if self.max_attempts < self.per_bucket_target:
            raise DomainError("max_attempts must be at least per_bucket_target")


@dataclass(frozen=True)
class DrawnInstance:
    """A sampled instance together with its global draw index (its stable id)."""

    draw_index: int
    instance: GameInstance


@dataclass
class LabeledDataset:
    """Bucketed instances keyed by minimum symbol count, plus the full outcome histogram.

    The histogram counts every draw made during sampling, including values
    that were not tracked and unsolvable draws (key None).
    """

    config: SamplerConfig
    buckets: dict[int, list[DrawnInstance]]
    histogram: dict[int | None, int] = field(default_factory=dict)
    draws: int = 0

    def bucket_counts(self) -> dict[int, int]:
        return {k: len(v) for k, v in sorted(self.buckets.items())}


def sample_instance(
    space: AttributeSpace, num_distractors: int, rng: np.random.Generator
) -> GameInstance:
    """Draw num_distractors + 1 objects i.i.d. uniform, then a uniform target index."""
    values = rng.integers(
        0, space.num_values, size=(num_distractors + 1, space.num_attributes), dtype=np.int64
    )
    target_index = int(rng.integers(0, num_distractors + 1))
    objects = tuple(ObjectVector(tuple(row)) for row in values.tolist())
    return GameInstance(space, objects, target_index)


def controlled_sample(config: SamplerConfig, workers: int = 1) -> LabeledDataset:
    """Rejection-sample until every tracked bucket holds per_bucket_target instances.

    Raises :class:`PartialSampleError` (carrying the partial dataset and the
    histogram) if max_attempts draws pass before all buckets fill.
    """
    buckets: dict[int, list[DrawnInstance]] = {k: [] for k in sorted(config.tracked_buckets)}
    histogram: dict[int | None, int] = {}
    unfilled = set(buckets)
    draws = 0

    for draw_index, min_m, instance in _solved_stream(config, workers):
        histogram[min_m] = histogram.get(min_m, 0) + 1
        draws = draw_index + 1
        if min_m in unfilled:
            bucket = buckets[min_m]
            bucket.append(DrawnInstance(draw_index, instance))
            if len(bucket) >= config.per_bucket_target:
                unfilled.discard(min_m)
                if not unfilled:
                    break

    dataset = LabeledDataset(config=config, buckets=buckets, histogram=histogram, draws=draws)
    if unfilled:
        short = {k: config.per_bucket_target - len(buckets[k]) for k in sorted(unfilled)}
        raise PartialSampleError(
            f"exhausted {config.max_attempts} draws with buckets still short: {short} "
            f"(histogram: {_printable_histogram(histogram)})",
            dataset=dataset,
            histogram=histogram,
        )
    return dataset


def min_m_histogram(
    space: AttributeSpace,
    num_distractors: int,
    trials: int,
    seed: int,
    workers: int = 1,
) -> dict[int | None, int]:
    """Monte Carlo distribution of the minimum symbol count over uniform instances.

    Unsolvable draws (a distractor duplicating the target) land in the None bin.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    config = SamplerConfig(
        space=space,
        num_distractors=num_distractors,
        per_bucket_target=1,
        tracked_buckets=frozenset({1}),
        seed=seed,
        max_attempts=trials,
    )
    histogram: dict[int | None, int] = {}
    for _, min_m, _ in _solved_stream(config, workers, keep_instances=False):
        histogram[min_m] = histogram.get(min_m, 0) + 1
    return histogram


def _solved_stream(config: SamplerConfig, workers: int, keep_instances: bool = True):
    """Yield (draw_index, min_symbols, instance) in draw order, up to max_attempts."""
    num_chunks = -(-config.max_attempts // _DRAWS_PER_CHUNK)
    if workers <= 1:
        for chunk in range(num_chunks):
            yield from _solve_chunk((config, chunk, keep_instances))
        return
    # Keep only a few chunks in flight and consume them in submission order:
    # results stay deterministic, and an early-stopping consumer leaves a
    # bounded amount of work to drain instead of a terminated mid-feed pool.
    pool = Pool(workers)
    inflight: deque = deque()
    next_chunk = 0
    try:
        while next_chunk < num_chunks or inflight:
            while next_chunk < num_chunks and len(inflight) < workers + 2:
                inflight.append(
                    pool.apply_async(_solve_chunk, ((config, next_chunk, keep_instances),))
                )
                next_chunk += 1
            yield from inflight.popleft().get()
    finally:
        for pending in inflight:
            pending.wait()
        pool.close()
        pool.join()


def _solve_chunk(chunk_args) -> list[tuple[int, int | None, GameInstance | None]]:
    config, chunk_index, keep_instances = chunk_args
    start = chunk_index * _DRAWS_PER_CHUNK
    count = min(_DRAWS_PER_CHUNK, config.max_attempts - start)
    rng = np.random.Generator(np.random.Philox(key=config.seed).jumped(chunk_index))
    out = []
    for offset in range(count):
        instance = sample_instance(config.space, config.num_distractors, rng)
        result = solve_min_sym(instance)
        out.append((start + offset, result.min_symbols, instance if keep_instances else None))
    return out


def _printable_histogram(histogram: dict[int | None, int]) -> dict[str, int]:
    return {("unsolvable" if k is None else str(k)): v for k, v in sorted(
        histogram.items(), key=lambda kv: (kv[0] is None, kv[0] if kv[0] is not None else 0)
    )}
