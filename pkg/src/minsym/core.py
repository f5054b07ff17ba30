"""Domain types for attribute-value objects and signaling-game instances.

Objects live in a universe of ``num_attributes`` attributes, each taking one
of ``num_values`` integer values. Values are integer indices everywhere;
human-readable labels ("red", "triangle") exist only in docs and test
fixtures. All types are immutable after construction and safe to share
between workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class AttributeSpace:
    """The (num_attributes, num_values) configuration defining the object universe.

    The number of values is uniform across attributes; heterogeneous
    per-attribute value counts are out of scope.
    """

    num_attributes: int
    num_values: int

    def __post_init__(self):
        if self.num_attributes < 1:
            raise DomainError(f"num_attributes must be >= 1, got {self.num_attributes}")
        if self.num_values < 2:
            raise DomainError(f"num_values must be >= 2, got {self.num_values}")

    def vocabulary_size(self) -> int:
        """One symbol per (attribute, value) pair."""
        return self.num_attributes * self.num_values


def encode_pair(space: AttributeSpace, attribute: int, value: int) -> int:
    """Map an (attribute, value) pair to its vocabulary code.

    The bijection is ``code = attribute * num_values + value``; codes cover
    exactly [0, vocabulary_size).
    """
    if not 0 <= attribute < space.num_attributes:
        raise DomainError(f"attribute {attribute} out of range [0, {space.num_attributes})")
    if not 0 <= value < space.num_values:
        raise DomainError(f"value {value} out of range [0, {space.num_values})")
    return attribute * space.num_values + value


def decode_symbol(space: AttributeSpace, code: int) -> tuple[int, int]:
    """Inverse of :func:`encode_pair`."""
    if not 0 <= code < space.vocabulary_size():
        raise DomainError(f"symbol code {code} out of range [0, {space.vocabulary_size()})")
    return divmod(code, space.num_values)


@dataclass(frozen=True)
class ObjectVector:
    """One object: a value index per attribute."""

    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))

    def __len__(self) -> int:
        return len(self.values)

    def one_hot(self, space: AttributeSpace) -> np.ndarray:
        """Concatenated one-hot blocks, one block of width num_values per attribute.

        The result has dimension vocabulary_size and exactly num_attributes ones.
        """
        if len(self.values) != space.num_attributes:
            raise DomainError(
                f"object has {len(self.values)} attributes, space expects {space.num_attributes}"
            )
        row = np.zeros(space.vocabulary_size(), dtype=np.uint8)
        for attribute, value in enumerate(self.values):
            if not 0 <= value < space.num_values:
                raise DomainError(f"value {value} at attribute {attribute} out of range")
            row[attribute * space.num_values + value] = 1
        return row

    @classmethod
    def from_one_hot(cls, space: AttributeSpace, row: Sequence[int]) -> "ObjectVector":
        """Inverse of :meth:`one_hot`; rejects rows that are not valid one-hot blocks."""
        arr = np.asarray(row)
        if arr.shape != (space.vocabulary_size(),):
            raise DomainError(f"one-hot row has shape {arr.shape}, expected ({space.vocabulary_size()},)")
        values = []
        for attribute in range(space.num_attributes):
            block = arr[attribute * space.num_values : (attribute + 1) * space.num_values]
            hot = np.flatnonzero(block)
            if len(hot) != 1:
                raise DomainError(f"attribute block {attribute} has {len(hot)} ones, expected 1")
            values.append(int(hot[0]))
        return cls(tuple(values))


def difference_set(target: ObjectVector, other: ObjectVector) -> frozenset[int]:
    """Attributes where the two objects disagree.

    Empty iff the objects are identical. A symbol set distinguishes ``other``
    from ``target`` exactly when it names at least one of these attributes.
    """
    if len(target) != len(other):
        raise DomainError(
            f"objects come from different spaces ({len(target)} vs {len(other)} attributes)"
        )
    return frozenset(a for a, (t, o) in enumerate(zip(target.values, other.values)) if t != o)


@dataclass(frozen=True)
class GameInstance:
    """A target plus K distractors, all drawn from one attribute space.

    The unit of both minimum-symbol solving and gameplay.
    """

    space: AttributeSpace
    objects: tuple[ObjectVector, ...]
    target_index: int

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        if len(self.objects) < 2:
            raise DomainError("an instance needs a target and at least one distractor")
        if not 0 <= self.target_index < len(self.objects):
            raise DomainError(
                f"target_index {self.target_index} out of range [0, {len(self.objects)})"
            )
        for obj in self.objects:
            if len(obj) != self.space.num_attributes:
                raise DomainError(
                    f"object has {len(obj)} attributes, space expects {self.space.num_attributes}"
                )
            for attribute, value in enumerate(obj.values):
                if not 0 <= value < self.space.num_values:
                    raise DomainError(f"value {value} at attribute {attribute} out of range")

    @property
    def num_distractors(self) -> int:
        return len(self.objects) - 1

    @property
    def target(self) -> ObjectVector:
        return self.objects[self.target_index]

    @property
    def distractors(self) -> tuple[ObjectVector, ...]:
        return tuple(o for i, o in enumerate(self.objects) if i != self.target_index)


@dataclass(frozen=True)
class SymbolSet:
    """A set of (attribute, value) pairs drawn from a target; candidate message content.

    Holds at most one pair per attribute. Whether the values actually match a
    given target is checked where the target is known (see sms.verify_witness).
    """

    pairs: frozenset[tuple[int, int]]

    def __post_init__(self):
        object.__setattr__(
            self, "pairs", frozenset((int(a), int(v)) for a, v in self.pairs)
        )
        attributes = [a for a, _ in self.pairs]
        if len(attributes) != len(set(attributes)):
            raise DomainError("symbol set names an attribute more than once")

    def __len__(self) -> int:
        return len(self.pairs)

    @classmethod
    def from_target(cls, target: ObjectVector, attributes: Iterable[int]) -> "SymbolSet":
        return cls(frozenset((a, target.values[a]) for a in attributes))

    def attributes(self) -> frozenset[int]:
        return frozenset(a for a, _ in self.pairs)

    def sorted_pairs(self) -> list[tuple[int, int]]:
        return sorted(self.pairs)

    def matches(self, obj: ObjectVector) -> bool:
        """True iff ``obj`` agrees with every pair in the set."""
        return all(obj.values[a] == v for a, v in self.pairs)

    def encode(self, space: AttributeSpace) -> tuple[int, ...]:
        """Vocabulary codes for the pairs, in ascending attribute order."""
        return tuple(encode_pair(space, a, v) for a, v in self.sorted_pairs())
