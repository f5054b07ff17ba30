"""The signaling game: a sender describes a target, a receiver picks a candidate.

One episode (for an instance with target t and K distractors):

1. the sender observes the target and emits a message of at most L symbols;
2. each symbol decodes to an (attribute, value) pair;
3. the receiver keeps the candidates agreeing with every pair (the survivors)
   and picks uniformly among them.

The oracle sender realizes a minimal witness, so with L at least the
instance's minimum symbol count the survivors collapse to the target alone
and the oracle pair communicates perfectly. Policies are pure given
(instance, rng), so evaluation parallelizes per instance with derived seeds.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from multiprocessing import Pool
from typing import Callable

import numpy as np

from .core import GameInstance, decode_symbol
from .errors import DomainError
from .sampler import LabeledDataset
from .sms import solve_min_sym_enum

# Instances per parallel evaluation task; results are merged in task order.
_INSTANCES_PER_TASK = 64


@dataclass(frozen=True)
class Message:
    """A sequence of vocabulary codes. Senders in the game emit 1..L symbols;
    an empty message is allowed as a degenerate policy (it filters nothing)."""

    symbols: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))

    def __len__(self) -> int:
        return len(self.symbols)


@dataclass(frozen=True)
class EpisodeResult:
    chosen_index: int | None
    success: bool
    message: Message
    survivors: int


Sender = Callable[[GameInstance, int], Message]
Receiver = Callable[[GameInstance, Message, np.random.Generator], EpisodeResult]


@dataclass(frozen=True)
class EvalResult:
    bucket: int
    max_length: int
    instances: int
    episodes: int
    empirical_accuracy: float
    stderr: float
    expected_accuracy: float


def filter_survivors(instance: GameInstance, message: Message) -> list[int]:
    """Indices of candidates agreeing with every decoded (attribute, value) pair."""
    pairs = [decode_symbol(instance.space, code) for code in message.symbols]
    survivors = []
    for index, obj in enumerate(instance.objects):
        if all(obj.values[a] == v for a, v in pairs):
            survivors.append(index)
    return survivors


def oracle_sender(instance: GameInstance, max_length: int) -> Message:
    """Emit the minimal witness (ascending attribute order), truncated greedily.

    When the witness exceeds ``max_length`` the emitted pairs are the ones
    that greedily eliminate the most remaining distractors, ties broken by
    attribute index, so sub-minimal accuracy is reproducible.
    """
    if max_length < 1:
        raise DomainError(f"max_length must be >= 1, got {max_length}")
    witness = _canonical_witness(instance)
    if witness is None:
        raise DomainError("instance is unsolvable: a distractor duplicates the target")
    pairs = witness.sorted_pairs()
    if len(pairs) > max_length:
        pairs = _greedy_truncate(instance, pairs, max_length)
    codes = tuple(a * instance.space.num_values + v for a, v in pairs)
    return Message(codes)


def oracle_receiver(
    instance: GameInstance, message: Message, rng: np.random.Generator
) -> EpisodeResult:
    """Filter candidates by the message, then pick uniformly among survivors.

    A truthful sender always leaves the target among the survivors; a foreign
    message may leave none, which is reported as a failure with 0 survivors.
    """
    survivors = filter_survivors(instance, message)
    if not survivors:
        return EpisodeResult(None, False, message, 0)
    chosen = survivors[int(rng.integers(0, len(survivors)))]
    return EpisodeResult(chosen, chosen == instance.target_index, message, len(survivors))


def expected_accuracy(instance: GameInstance, message: Message) -> float:
    """Exact success probability of the uniform-among-survivors receiver."""
    survivors = filter_survivors(instance, message)
    if instance.target_index not in survivors:
        return 0.0
    return 1.0 / len(survivors)


def evaluate(
    dataset: LabeledDataset,
    sender: Sender,
    receiver: Receiver,
    max_length: int,
    episodes_per_instance: int = 1,
    seed: int = 0,
    log_records: list | None = None,
    workers: int = 1,
) -> dict[int, EvalResult]:
    """Play every instance in every bucket; returns per-bucket accuracies.

    ``empirical_accuracy`` is the mean success over sampled episodes (each
    instance gets its own RNG stream derived from (seed, instance id), so
    results do not depend on iteration scheduling or worker count).
    ``expected_accuracy`` is the exact mean of the per-instance
    uniform-receiver success probability for the messages this sender
    produced. When ``log_records`` is a list, one episode record per played
    episode is appended to it. With ``workers > 1`` the policies must be
    module-level callables (the oracle pair is).
    """
    if episodes_per_instance < 1:
        raise DomainError(f"episodes_per_instance must be >= 1, got {episodes_per_instance}")
    results = {}
    for bucket in sorted(dataset.buckets):
        drawn = dataset.buckets[bucket]
        if not drawn:
            continue
        tasks = [
            (drawn[i : i + _INSTANCES_PER_TASK], sender, receiver, max_length,
             episodes_per_instance, seed)
            for i in range(0, len(drawn), _INSTANCES_PER_TASK)
        ]
        if workers <= 1:
            merged = [_evaluate_task(task) for task in tasks]
        else:
            with Pool(workers) as pool:
                merged = pool.map(_evaluate_task, tasks)
        successes = sum(m[0] for m in merged)
        expected_sum = sum(m[1] for m in merged)
        if log_records is not None:
            for m in merged:
                log_records.extend(m[2])
        episodes = len(drawn) * episodes_per_instance
        p_hat = successes / episodes
        results[bucket] = EvalResult(
            bucket=bucket,
            max_length=max_length,
            instances=len(drawn),
            episodes=episodes,
            empirical_accuracy=p_hat,
            stderr=float(np.sqrt(p_hat * (1.0 - p_hat) / episodes)),
            expected_accuracy=expected_sum / len(drawn),
        )
    return results


def _evaluate_task(task) -> tuple[int, float, list[dict]]:
    chunk, sender, receiver, max_length, episodes_per_instance, seed = task
    successes = 0
    expected_sum = 0.0
    records: list[dict] = []
    for item in chunk:
        message = sender(item.instance, max_length)
        expected_sum += expected_accuracy(item.instance, message)
        rng = np.random.Generator(
            np.random.Philox(np.random.SeedSequence([seed, item.draw_index]))
        )
        for _ in range(episodes_per_instance):
            episode = receiver(item.instance, message, rng)
            successes += int(episode.success)
            records.append(
                {
                    "id": item.draw_index,
                    "max_length": max_length,
                    "symbols": list(episode.message.symbols),
                    "chosen": episode.chosen_index,
                    "success": episode.success,
                }
            )
    return successes, expected_sum, records


def uniform_guess_sender(instance: GameInstance, max_length: int) -> Message:
    """Baseline policy: say nothing, forcing the receiver to guess uniformly."""
    return Message(())


@lru_cache(maxsize=8192)
def _canonical_witness(instance: GameInstance):
    return solve_min_sym_enum(instance).witness


def _greedy_truncate(
    instance: GameInstance, pairs: list[tuple[int, int]], max_length: int
) -> list[tuple[int, int]]:
    surviving = list(instance.distractors)
    remaining = list(pairs)
    chosen: list[tuple[int, int]] = []
    for _ in range(max_length):
        best = None
        best_eliminated = -1
        for pair in remaining:
            attribute, value = pair
            eliminated = sum(1 for d in surviving if d.values[attribute] != value)
            if eliminated > best_eliminated:
                best_eliminated = eliminated
                best = pair
        chosen.append(best)
        remaining.remove(best)
        surviving = [d for d in surviving if d.values[best[0]] == best[1]]
    return sorted(chosen)
