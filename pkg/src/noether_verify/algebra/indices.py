"""Symmetric multi-indices and antisymmetric component bookkeeping."""

from collections import Counter
from itertools import combinations_with_replacement
from math import comb
from typing import Iterable, Iterator, Optional

from ..errors import BinomialDomainError


class SymMultiIndex(tuple):
    """Symmetric multi-index stored as an ascending tuple of base indices.

    Being a tuple keeps it hashable and cheap to compare; the constructor
    always sorts, so equal multisets are equal values.
    """

    __slots__ = ()

    def __new__(cls, entries: Iterable[int] = ()):
        return super().__new__(cls, sorted(entries))

    @property
    def order(self) -> int:
        """Number of entries |L|."""
        return len(self)

    def __add__(self, other: tuple) -> "SymMultiIndex":
        return SymMultiIndex(tuple.__add__(self, other))

    def add_index(self, index: int) -> "SymMultiIndex":
        """Return lambda + L."""
        return SymMultiIndex(tuple.__add__(self, (index,)))

    def counts(self) -> Counter:
        """Multiplicity of each base index."""
        return Counter(self)

    def contains(self, other: "SymMultiIndex") -> bool:
        """Whether ``other`` is a sub-multiset of this multi-index."""
        mine = self.counts()
        return all(mine[i] >= k for i, k in other.counts().items())

    def minus(self, other: "SymMultiIndex") -> "SymMultiIndex":
        """Multiset difference; ``other`` must be contained in ``self``."""
        remaining = self.counts()
        remaining.subtract(other.counts())
        return SymMultiIndex(remaining.elements())

    def sub_indices(self) -> Iterator["SymMultiIndex"]:
        """All distinct sub-multisets, smallest first."""
        counts = sorted(self.counts().items())
        choices: list[list[tuple[int, ...]]] = [[(i,) * k for k in range(m + 1)] for i, m in counts]

        def expand(pos: int, acc: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
            if pos == len(choices):
                yield acc
                return
            for piece in choices[pos]:
                yield from expand(pos + 1, acc + piece)

        yield from sorted((SymMultiIndex(t) for t in expand(0, ())), key=multiindex_key)

    def __repr__(self) -> str:
        return f"SymMultiIndex({format_multiindex(self)})"

    def __str__(self) -> str:
        return format_multiindex(self)


EMPTY = SymMultiIndex()


def multiindex_key(index: SymMultiIndex) -> tuple:
    """Enumeration order: by order, then lexicographic."""
    return (len(index), tuple(index))


def multiindex_sum(first: SymMultiIndex, second: SymMultiIndex) -> SymMultiIndex:
    """Sorted merge of two multi-indices."""
    return first + second


def format_multiindex(index: Iterable[int]) -> str:
    """Textual form ``(0,1,1)``; the empty multi-index prints as ``()``."""
    return "(" + ",".join(str(i) for i in index) + ")"


def binomial_C(a: int, b: int) -> int:
    """Exact binomial coefficient C^a_b = b! / (a! (b-a)!).

    Raises:
        BinomialDomainError: If a > b or either argument is negative
    """
    if a < 0 or b < 0 or a > b:
        raise BinomialDomainError(f"binomial_C requires 0 <= a <= b, got a={a}, b={b}")
    return comb(b, a)


def leibniz_weight(part: SymMultiIndex, whole: SymMultiIndex) -> int:
    """Number of ways d_whole distributes ``part`` onto one factor.

    d_W(f g) = sum over sub-multisets P of W of weight(P, W) d_{W-P} f d_P g,
    with weight the product over base indices of C^{P_l}_{W_l}.
    """
    whole_counts = whole.counts()
    weight = 1
    for index, k in part.counts().items():
        weight *= binomial_C(k, whole_counts[index])
    return weight


def enumerate_multiindices(base_dim: int, max_order: int) -> list[SymMultiIndex]:
    """All canonical multi-indices over ``base_dim`` indices of order <= max_order.

    Ordered by order, then lexicographically.
    """
    result: list[SymMultiIndex] = []
    for order in range(max_order + 1):
        result.extend(SymMultiIndex(c) for c in combinations_with_replacement(range(base_dim), order))
    return result


def canonicalize_antisym(indices: Iterable[int]) -> Optional[tuple[tuple[int, ...], int]]:
    """Sort an antisymmetric index tuple.

    Returns:
        ``(strictly increasing tuple, sign)`` or None when an index repeats
        (the component is identically zero)
    """
    items = list(indices)
    if len(set(items)) != len(items):
        return None
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    return tuple(items), sign
