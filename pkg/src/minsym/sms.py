"""Exact solvers for the minimum number of target symbols that single out the target.

Two independent algorithms compute the same quantity:

* :func:`solve_min_sym_enum` enumerates symbol sets drawn from the target in
  ascending size, lexicographic within a size, and returns the first set no
  distractor fully agrees with. It is the reference implementation; worst
  case is exponential in the number of attributes.
* :func:`solve_min_sym_hitting` reformulates the problem: a symbol set
  distinguishes a distractor iff it names an attribute where the distractor
  differs from the target, so the answer is the minimum hitting set over the
  per-distractor difference sets. Solved exactly by branch and bound; this is
  the fast path used by the sampler.

An instance is unsolvable exactly when some distractor is identical to the
target (every symbol set agrees with it). Unsolvable instances yield an
explicit absent result rather than raising, so samplers can skip them cheaply.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .core import GameInstance, SymbolSet
from .errors import DomainError


@dataclass(frozen=True)
class SmsResult:
    """Minimum symbol count plus one witness of that size; both absent when unsolvable."""

    min_symbols: int | None
    witness: SymbolSet | None

    @property
    def solvable(self) -> bool:
        return self.min_symbols is not None


UNSOLVABLE = SmsResult(None, None)


def verify_witness(instance: GameInstance, witness: SymbolSet) -> bool:
    """True iff no distractor agrees with the target on every attribute in ``witness``.

    The witness must be drawn from the target; a pair that contradicts the
    target is a domain error, not a False.
    """
    target = instance.target
    for attribute, value in witness.pairs:
        if not 0 <= attribute < len(target):
            raise DomainError(f"witness names attribute {attribute} outside the space")
        if target.values[attribute] != value:
            raise DomainError(
                f"witness pair ({attribute}, {value}) does not match the target"
            )
    return not any(witness.matches(d) for d in instance.distractors)


def solve_min_sym_enum(instance: GameInstance) -> SmsResult:
    """Reference solver: ascending-size enumeration of target symbol sets.

    Within a size, combinations are visited in lexicographic order over
    attribute indices, and the first uniquely-identifying set is returned,
    so the witness is deterministic.
    """
    target = instance.target
    tv = target.values
    distractors = [d.values for d in instance.distractors]
    # A duplicate of the target agrees with every symbol set; conversely the
    # full attribute set succeeds whenever there is no duplicate, so this
    # check decides solvability without scanning all 2^A - 1 combinations.
    if any(dv == tv for dv in distractors):
        return UNSOLVABLE
    num_attributes = instance.space.num_attributes
    for size in range(1, num_attributes + 1):
        for combo in combinations(range(num_attributes), size):
            unique = True
            for dv in distractors:
                matched = True
                for a in combo:
                    if dv[a] != tv[a]:
                        matched = False
                        break
                if matched:
                    unique = False
                    break
            if unique:
                return SmsResult(size, SymbolSet.from_target(target, combo))
    return UNSOLVABLE  # unreachable given the duplicate check, kept for safety


def solve_min_sym_hitting(instance: GameInstance) -> SmsResult:
    """Exact branch-and-bound over attribute sets hitting every difference set.

    Agrees with :func:`solve_min_sym_enum` on the minimum for every input;
    witnesses may differ but always verify.
    """
    target = instance.target
    tv = target.values
    num_attributes = instance.space.num_attributes

    masks = []
    for d in instance.distractors:
        dv = d.values
        mask = 0
        for a in range(num_attributes):
            if dv[a] != tv[a]:
                mask |= 1 << a
        if mask == 0:
            return UNSOLVABLE
        masks.append(mask)

    sets = _minimal_masks(masks)

    # Singleton difference sets force their attribute into every hitting set.
    forced = 0
    for mask in sets:
        if mask.bit_count() == 1:
            forced |= mask
    if forced:
        sets = [m for m in sets if not (m & forced)]

    chosen = _min_hitting_set(sets, num_attributes)
    solution = forced | chosen
    attributes = [a for a in range(num_attributes) if (solution >> a) & 1]
    return SmsResult(len(attributes), SymbolSet.from_target(target, attributes))


def solve_min_sym(instance: GameInstance) -> SmsResult:
    """Production path: the branch-and-bound solver."""
    return solve_min_sym_hitting(instance)


def _minimal_masks(masks: list[int]) -> list[int]:
    """Drop duplicates and supersets; hitting the minimal sets hits them all."""
    out: list[int] = []
    for mask in sorted(set(masks), key=lambda m: (m.bit_count(), m)):
        if not any((kept & mask) == kept for kept in out):
            out.append(mask)
    return out


def _disjoint_lower_bound(sets: list[int]) -> int:
    """Count of greedily-collected pairwise-disjoint sets; each needs its own attribute."""
    used = 0
    count = 0
    for mask in sets:
        if not (mask & used):
            used |= mask
            count += 1
    return count


def _greedy_hitting_set(sets: list[int], num_attributes: int) -> int:
    """Feasible upper bound: repeatedly take the attribute hitting most remaining sets."""
    remaining = list(sets)
    chosen = 0
    while remaining:
        best_attr = -1
        best_hits = 0
        for a in range(num_attributes):
            bit = 1 << a
            hits = sum(1 for m in remaining if m & bit)
            if hits > best_hits:
                best_hits = hits
                best_attr = a
        chosen |= 1 << best_attr
        remaining = [m for m in remaining if not (m >> best_attr) & 1]
    return chosen


def _min_hitting_set(sets: list[int], num_attributes: int) -> int:
    """Exact minimum hitting set over bitmask sets (empty input: empty set)."""
    if not sets:
        return 0

    best_mask = _greedy_hitting_set(sets, num_attributes)
    best_size = best_mask.bit_count()

    def search(remaining: list[int], chosen_mask: int, chosen_count: int) -> None:
        nonlocal best_mask, best_size
        if not remaining:
            if chosen_count < best_size:
                best_size = chosen_count
                best_mask = chosen_mask
            return
        if chosen_count + _disjoint_lower_bound(remaining) >= best_size:
            return
        # Some attribute of the smallest remaining set must be chosen.
        pivot = min(remaining, key=lambda m: m.bit_count())
        for a in range(num_attributes):
            if not (pivot >> a) & 1:
                continue
            bit = 1 << a
            search([m for m in remaining if not (m & bit)], chosen_mask | bit, chosen_count + 1)

    search(sorted(sets, key=lambda m: m.bit_count()), 0, 0)
    return best_mask
