"""Finite posets, order complexes, and homotopy-preserving core reduction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .bits import bits, is_subset, mask_of
from .complexes import SimplicialComplex, from_maximal_faces
from .errors import BudgetError, InputError
from .relations import IndexSet

__all__ = [
    "Poset",
    "poset_maximum",
    "poset_minimum",
    "order_complex",
    "chains_up_to",
    "core",
    "DEFAULT_CHAIN_BUDGET",
]

DEFAULT_CHAIN_BUDGET = 2_000_000


@dataclass(frozen=True)
class Poset:
    """A finite partial order; bit y of ``up_masks[x]`` means x <= y."""

    elements: IndexSet
    up_masks: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "up_masks", tuple(self.up_masks))
        n = len(self.elements)
        if len(self.up_masks) != n:
            raise InputError("up_masks length does not match element count")
        for x, up in enumerate(self.up_masks):
            if up & ~self.elements.full_mask:
                raise InputError("up-set mask out of range")
            if not (up >> x) & 1:
                raise InputError(f"not reflexive at {self.elements.labels[x]!r}")
        for x in range(n):
            for y in bits(self.up_masks[x]):
                if y == x:
                    continue
                if (self.up_masks[y] >> x) & 1:
                    raise InputError(
                        f"not antisymmetric: {self.elements.labels[x]!r} and {self.elements.labels[y]!r}"
                    )
                if not is_subset(self.up_masks[y], self.up_masks[x]):
                    raise InputError(
                        f"not transitive above {self.elements.labels[x]!r} via {self.elements.labels[y]!r}"
                    )

    @classmethod
    def from_leq(cls, labels: Sequence[str], leq) -> "Poset":
        """Build from a callable ``leq(a, b) -> bool`` on labels."""
        idx = IndexSet(tuple(labels))
        ups = []
        for a in idx.labels:
            m = 0
            for j, b in enumerate(idx.labels):
                if leq(a, b):
                    m |= 1 << j
            ups.append(m)
        return cls(idx, tuple(ups))

    def leq(self, a: str, b: str) -> bool:
        return bool((self.up_masks[self.elements.position(a)] >> self.elements.position(b)) & 1)

    def __len__(self) -> int:
        return len(self.elements)

    def down_masks(self) -> tuple[int, ...]:
        downs = [0] * len(self.elements)
        for x, up in enumerate(self.up_masks):
            for y in bits(up):
                downs[y] |= 1 << x
        return tuple(downs)


def poset_maximum(P: Poset) -> Optional[str]:
    """The greatest element, if it exists (then the order complex is a cone)."""
    if not len(P):
        return None
    for x, down in enumerate(P.down_masks()):
        if down == P.elements.full_mask:
            return P.elements.labels[x]
    return None


def poset_minimum(P: Poset) -> Optional[str]:
    if not len(P):
        return None
    for x, up in enumerate(P.up_masks):
        if up == P.elements.full_mask:
            return P.elements.labels[x]
    return None


def _cover_masks(P: Poset) -> tuple[int, ...]:
    # y covers x iff x < y with nothing strictly between
    downs = P.down_masks()
    out = []
    for x in range(len(P)):
        strict_up = P.up_masks[x] & ~(1 << x)
        m = 0
        for y in bits(strict_up):
            strict_down_y = downs[y] & ~(1 << y)
            if strict_up & strict_down_y:
                continue
            m |= 1 << y
        out.append(m)
    return tuple(out)


def order_complex(P: Poset, budget: Optional[int] = None) -> SimplicialComplex:
    """The chain complex of ``P``: vertices are elements, faces are chains.

    Maximal faces are the maximal chains, found by walking cover relations
    from the minimal elements.
    """
    cap = DEFAULT_CHAIN_BUDGET if budget is None else budget
    n = len(P)
    if n == 0:
        return SimplicialComplex(IndexSet(()), ())
    covers = _cover_masks(P)
    downs = P.down_masks()
    minimal = [x for x in range(n) if downs[x] == (1 << x)]
    chains: list[int] = []
    state = {"count": 0}

    def walk(x: int, acc: int):
        acc |= 1 << x
        nxt = covers[x]
        if not nxt:
            chains.append(acc)
            state["count"] += 1
            if state["count"] > cap:
                raise BudgetError("maximal chain budget", state["count"], cap)
            return
        for y in bits(nxt):
            walk(y, acc)

    for x in minimal:
        walk(x, 0)
    return from_maximal_faces(P.elements, chains)


def chains_up_to(P: Poset, max_len: int, budget: Optional[int] = None) -> list[list[tuple[int, ...]]]:
    """All strict chains of 1..``max_len`` elements, graded by length.

    Chains are tuples of element indices, listed from bottom to top of the
    chain; each grade is sorted lexicographically.  This avoids materializing
    maximal chains when only bounded-length chains are needed.
    """
    cap = DEFAULT_CHAIN_BUDGET if budget is None else budget
    n = len(P)
    graded: list[list[tuple[int, ...]]] = [[] for _ in range(max_len)]
    count = 0

    def extend(chain: tuple[int, ...], above: int):
        nonlocal count
        length = len(chain)
        graded[length - 1].append(chain)
        count += 1
        if count > cap:
            raise BudgetError("chain budget", count, cap)
        if length == max_len:
            return
        for y in bits(above):
            extend(chain + (y,), P.up_masks[y] & ~(1 << y))

    for x in range(n):
        extend((x,), P.up_masks[x] & ~(1 << x))
    for grade in graded:
        grade.sort()
    return graded


def core(P: Poset) -> Poset:
    """Iteratively remove beat points; the result has the same weak homotopy type.

    An element is removable when its strict up-set has a minimum or its
    strict down-set has a maximum (Stong's core construction for finite
    spaces).  Deterministic: always removes the lowest-index beat point.
    """
    labels = list(P.elements.labels)
    ups = list(P.up_masks)
    alive = list(range(len(labels)))

    def strict_up(i: int) -> int:
        return ups[i] & ~(1 << i)

    def strict_down(i: int, downs: list[int]) -> int:
        return downs[i] & ~(1 << i)

    changed = True
    while changed and len(alive) > 1:
        changed = False
        downs = [0] * len(labels)
        for x in alive:
            for y in bits(ups[x]):
                downs[y] |= 1 << x
        for x in alive:
            up = strict_up(x)
            beat = False
            if up:
                for m in bits(up):
                    if is_subset(up, ups[m]):
                        beat = True
                        break
            if not beat:
                down = strict_down(x, downs)
                if down:
                    for m in bits(down):
                        if is_subset(down, downs[m]):
                            beat = True
                            break
            if beat:
                alive.remove(x)
                bit = 1 << x
                for y in alive:
                    ups[y] &= ~bit
                ups[x] = 0
                changed = True
                break
    keep = sorted(alive)
    new_labels = tuple(labels[i] for i in keep)
    remap = {old: new for new, old in enumerate(keep)}
    new_ups = []
    for i in keep:
        m = 0
        for y in bits(ups[i]):
            m |= 1 << remap[y]
        new_ups.append(m)
    return Poset(IndexSet(new_labels), tuple(new_ups))
