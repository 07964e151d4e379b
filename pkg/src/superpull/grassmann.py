"""Sign-exact combinatorics of anticommuting generators.

Generators are numbered 1..g and anticommute pairwise, so every product of
distinct generators equals a sign times the product in ascending order.  This
module provides the multi-index bookkeeping for that normal form: sorting a
word of generators with its permutation sign, concatenating two multi-indices,
the block-splitting sign attached to decomposing a multi-index into an ordered
tuple of sub-indices, and enumeration of the index families graded by degree
and parity.

All values are immutable and every function here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

EVEN = 0
ODD = 1


def sort_with_sign(word: Sequence) -> tuple[int, tuple]:
    """Sort a word of anticommuting factors, tracking the permutation sign.

    Returns ``(sign, sorted_word)``.  The sign is the signature of the
    permutation that sorts the word, computed by counting adjacent swaps,
    or 0 when the word repeats a letter (the product then vanishes).
    """
    items = list(word)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j] < items[j - 1]:
            items[j], items[j - 1] = items[j - 1], items[j]
            sign = -sign
            j -= 1
    for a, b in zip(items, items[1:]):
        if a == b:
            return 0, ()
    return sign, tuple(items)


@dataclass(frozen=True)
class MultiIndex:
    """A strictly increasing tuple of generator indices; () is the empty index."""

    indices: tuple[int, ...] = ()

    def __post_init__(self):
        for k in self.indices:
            if not isinstance(k, int) or k < 1:
                raise ValueError(f"generator indices must be positive integers, got {k!r}")
        for a, b in zip(self.indices, self.indices[1:]):
            if a >= b:
                raise ValueError(f"multi-index must be strictly increasing, got {self.indices}")

    @classmethod
    def of(cls, *indices: int) -> "MultiIndex":
        return cls(tuple(indices))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, k: int) -> bool:
        return k in self.indices

    def __lt__(self, other: "MultiIndex") -> bool:
        return self.indices < other.indices

    def __le__(self, other: "MultiIndex") -> bool:
        return self.indices <= other.indices

    @property
    def degree(self) -> int:
        return len(self.indices)

    @property
    def parity(self) -> int:
        return len(self.indices) % 2

    def is_even(self) -> bool:
        return self.parity == EVEN

    def disjoint_from(self, other: "MultiIndex") -> bool:
        return not set(self.indices) & set(other.indices)

    def restricted_complement(self, sub: "MultiIndex") -> "MultiIndex":
        """The indices of self not contained in sub, in order."""
        drop = set(sub.indices)
        return MultiIndex(tuple(k for k in self.indices if k not in drop))

    def __str__(self) -> str:
        return "{" + ",".join(str(k) for k in self.indices) + "}"


EMPTY = MultiIndex()


@dataclass(frozen=True)
class SignedIndex:
    """A multi-index with a sign, or the zero result of a vanishing product."""

    index: MultiIndex | None
    sign: int

    @property
    def is_zero(self) -> bool:
        return self.sign == 0


ZERO = SignedIndex(None, 0)


def concat_sign(left: MultiIndex, right: MultiIndex) -> SignedIndex:
    """Concatenate two multi-indices as a generator product.

    The result is ZERO when the indices share a generator, otherwise the
    sorted union together with the sign of the sorting permutation.
    """
    sign, merged = sort_with_sign(left.indices + right.indices)
    if sign == 0:
        return ZERO
    return SignedIndex(MultiIndex(merged), sign)


def epsilon(blocks: Sequence[MultiIndex], target: MultiIndex) -> int:
    """Sign of reassembling ordered blocks into the target multi-index.

    Zero unless the blocks are all nonempty, pairwise disjoint, and their
    union equals the target; otherwise the signature of the permutation
    carrying the concatenated block word to the target in ascending order.
    The empty block list yields 1 on the empty target and 0 otherwise.
    """
    if not blocks:
        return 1 if not target.indices else 0
    word: list[int] = []
    for block in blocks:
        if not block.indices:
            return 0
        word.extend(block.indices)
    sign, merged = sort_with_sign(word)
    if sign == 0 or merged != target.indices:
        return 0
    return sign


def degree_indices(total: int, degree: int) -> list[MultiIndex]:
    """All multi-indices of the given degree over generators 1..total, in lex order."""
    if degree < 0 or degree > total:
        return []
    return [MultiIndex(c) for c in combinations(range(1, total + 1), degree)]


def enumerate_indices(total: int, degree: int | None = None, parity: str = "all") -> list[MultiIndex]:
    """Enumerate multi-indices over generators 1..total.

    With ``degree`` given, returns the degree slice filtered by ``parity``;
    otherwise the whole family: "all", "even" (including the empty index),
    "odd", or "even_positive" (even and nonempty).  Listing is by ascending
    degree, lexicographic within a degree.
    """
    if parity not in ("all", "even", "odd", "even_positive"):
        raise ValueError(f"unknown parity class {parity!r}")
    if degree is not None:
        out = degree_indices(total, degree)
        if parity == "even" and degree % 2:
            return []
        if parity == "odd" and degree % 2 == 0:
            return []
        if parity == "even_positive" and (degree % 2 or degree == 0):
            return []
        return out
    degrees = {
        "all": range(0, total + 1),
        "even": range(0, total + 1, 2),
        "odd": range(1, total + 1, 2),
        "even_positive": range(2, total + 1, 2),
    }[parity]
    out = []
    for k in degrees:
        out.extend(degree_indices(total, k))
    return out


@dataclass(frozen=True)
class GeneratorSet:
    """The anticommuting generators in play for one computation context.

    ``n_theta`` generators 1..q are the odd source coordinates and ``n_eta``
    auxiliary generators q+1..q+L adjoin extra odd constants; both kinds obey
    the same sign rules and differ only in how they print.
    """

    n_theta: int
    n_eta: int = 0

    def __post_init__(self):
        if self.n_theta < 0 or self.n_eta < 0:
            raise ValueError("generator counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.n_theta + self.n_eta

    def contains(self, k: int) -> bool:
        return 1 <= k <= self.total

    def name(self, k: int) -> str:
        if not self.contains(k):
            raise ValueError(f"generator {k} outside context of size {self.total}")
        if k <= self.n_theta:
            return f"theta{k}"
        return f"eta{k - self.n_theta}"

    def theta_block(self) -> MultiIndex:
        return MultiIndex(tuple(range(1, self.n_theta + 1)))

    def degree_indices(self, degree: int) -> list[MultiIndex]:
        return degree_indices(self.total, degree)

    def even_indices(self) -> list[MultiIndex]:
        """The nonempty even multi-indices over the full generator set."""
        return enumerate_indices(self.total, parity="even_positive")

    def even_indices_with_empty(self) -> list[MultiIndex]:
        """The even multi-indices including the empty one."""
        return enumerate_indices(self.total, parity="even")

    def all_indices(self) -> list[MultiIndex]:
        return enumerate_indices(self.total, parity="all")


def multi_union(parts: Iterable[MultiIndex]) -> MultiIndex:
    """Sorted union of pairwise disjoint multi-indices."""
    word: list[int] = []
    for p in parts:
        word.extend(p.indices)
    return MultiIndex(tuple(sorted(word)))
