"""Small helpers for subsets stored as integer bit masks."""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Iterator


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(positions: Iterable[int]) -> int:
    m = 0
    for p in positions:
        m |= 1 << p
    return m


def submasks_of_size(mask: int, size: int) -> Iterator[int]:
    """All subsets of ``mask`` with exactly ``size`` bits, in lexicographic position order."""
    positions = tuple(bits(mask))
    for combo in combinations(positions, size):
        yield mask_of(combo)


def nonempty_submasks(mask: int) -> Iterator[int]:
    """All nonempty subsets of ``mask``, smallest cardinality first."""
    positions = tuple(bits(mask))
    for size in range(1, len(positions) + 1):
        for combo in combinations(positions, size):
            yield mask_of(combo)


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


def antichain_maximal(masks: Iterable[int]) -> tuple[int, ...]:
    """Inclusion-maximal elements among ``masks``, deduplicated, in a deterministic order.

    Output is sorted by (cardinality, mask value).
    """
    unique = sorted(set(masks), key=lambda m: (m.bit_count(), m))
    kept: list[int] = []
    for m in unique:
        if not any(is_subset(m, other) for other in unique if other != m and other.bit_count() >= m.bit_count()):
            kept.append(m)
    return tuple(kept)
