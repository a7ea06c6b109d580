"""Abstract simplicial complexes stored by their maximal faces.

Faces are bit masks over the complex's vertex order.  Only the inclusion-
maximal faces are stored; lower faces are materialized on demand under a
face budget, because the complexes arising from derived relations have few
maximal faces but an enormous number of faces overall.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence, Union

from .bits import antichain_maximal, bits, is_subset, mask_of
from .errors import BudgetError, InputError
from .relations import IndexSet

__all__ = [
    "SimplicialComplex",
    "Cover",
    "from_maximal_faces",
    "enumerate_faces",
    "cone_apex",
    "nerve_of_cover",
    "goodness_certificate",
    "intersect_maximal_faces",
    "complex_to_text",
    "DEFAULT_FACE_BUDGET",
]

DEFAULT_FACE_BUDGET = 2_000_000

FaceLike = Union[int, Iterable[str]]


@dataclass(frozen=True)
class SimplicialComplex:
    """Finite abstract simplicial complex; ``maximal_faces`` is an antichain of masks."""

    vertices: IndexSet
    maximal_faces: tuple[int, ...]

    @property
    def dimension(self) -> int:
        """Dimension of the largest face; -1 for the empty complex."""
        return max((m.bit_count() for m in self.maximal_faces), default=0) - 1

    def face_mask(self, face: FaceLike) -> int:
        return face if isinstance(face, int) else self.vertices.mask_of(face)

    def has_face(self, face: FaceLike) -> bool:
        m = self.face_mask(face)
        return m != 0 and any(is_subset(m, top) for top in self.maximal_faces)

    def face_labels(self, mask: int) -> tuple[str, ...]:
        return self.vertices.labels_of(mask)

    @property
    def is_empty(self) -> bool:
        return not self.maximal_faces


def from_maximal_faces(
    vertices: Union[IndexSet, Sequence[str]],
    faces: Iterable[FaceLike],
) -> SimplicialComplex:
    """Build a complex from generating faces.

    Faces contained in other faces are absorbed.  Vertices that end up in no
    face are dropped (in particular the vertex order is preserved), so the
    stored vertex set always equals the support of the maximal faces.
    """
    universe = vertices if isinstance(vertices, IndexSet) else IndexSet(tuple(vertices))
    masks = []
    for f in faces:
        m = f if isinstance(f, int) else universe.mask_of(f)
        if m == 0:
            raise InputError("faces must be nonempty")
        if m & ~universe.full_mask:
            raise InputError("face contains an unknown vertex")
        masks.append(m)
    maximal = antichain_maximal(masks)
    used = 0
    for m in maximal:
        used |= m
    if used == universe.full_mask:
        return SimplicialComplex(universe, maximal)
    # renumber onto the surviving vertices, preserving order
    kept = tuple(bits(used))
    new_vertices = IndexSet(universe.labels_of(used))
    old_to_new = {old: new for new, old in enumerate(kept)}
    renumbered = tuple(
        sorted(
            (mask_of(old_to_new[b] for b in bits(m)) for m in maximal),
            key=lambda m: (m.bit_count(), m),
        )
    )
    return SimplicialComplex(new_vertices, renumbered)


def enumerate_faces(
    X: SimplicialComplex,
    max_dim: int,
    budget: Optional[int] = None,
) -> list[list[int]]:
    """All faces of dimension <= ``max_dim``, graded by dimension, each exactly once.

    Faces of each dimension are sorted by their vertex index tuples.  Raises
    :class:`BudgetError` when the total face count exceeds the budget
    (default ``DEFAULT_FACE_BUDGET``).
    """
    if max_dim < 0:
        raise InputError(f"max_dim must be >= 0, got {max_dim}")
    cap = DEFAULT_FACE_BUDGET if budget is None else budget
    total = 0
    graded: list[list[int]] = []
    for dim in range(max_dim + 1):
        size = dim + 1
        seen: set[int] = set()
        for top in X.maximal_faces:
            if top.bit_count() < size:
                continue
            positions = tuple(bits(top))
            for combo in combinations(positions, size):
                m = mask_of(combo)
                if m not in seen:
                    seen.add(m)
                    total += 1
                    if total > cap:
                        raise BudgetError("face budget", total, cap)
        graded.append(sorted(seen, key=_face_sort_key(X)))
    return graded


def _face_sort_key(X: SimplicialComplex):
    def key(mask: int):
        return tuple(bits(mask))

    return key


def cone_apex(X: SimplicialComplex) -> Optional[str]:
    """A vertex contained in every maximal face, if one exists (least such).

    The presence of an apex certifies that ``X`` is contractible.
    """
    if X.is_empty:
        return None
    common = X.vertices.full_mask
    for m in X.maximal_faces:
        common &= m
        if not common:
            return None
    low = common & -common
    return X.vertices.labels[low.bit_length() - 1]


@dataclass(frozen=True)
class Cover:
    """A cover of ``ambient`` by labeled subcomplexes (given by their maximal faces)."""

    ambient: SimplicialComplex
    parts: tuple[tuple[str, tuple[int, ...]], ...]  # (label, maximal faces over ambient vertices)

    def __post_init__(self):
        labels = [lab for lab, _ in self.parts]
        if len(set(labels)) != len(labels):
            raise InputError("duplicate part label in cover")
        union: set[int] = set()
        for lab, masks in self.parts:
            for m in masks:
                if m == 0 or m & ~self.ambient.vertices.full_mask:
                    raise InputError(f"part {lab!r}: invalid face mask")
                if not X_has(self.ambient, m):
                    raise InputError(f"part {lab!r}: face not contained in the ambient complex")
        covered = _union_is_cover(self.ambient, self.parts)
        if not covered:
            raise InputError("parts do not cover the ambient complex")

    @classmethod
    def from_subcomplexes(
        cls, ambient: SimplicialComplex, parts: Sequence[tuple[str, Iterable[FaceLike]]]
    ) -> "Cover":
        packed = []
        for label, faces in parts:
            masks = antichain_maximal(ambient.face_mask(f) for f in faces)
            packed.append((label, masks))
        return cls(ambient, tuple(packed))


def X_has(X: SimplicialComplex, mask: int) -> bool:
    return any(is_subset(mask, top) for top in X.maximal_faces)


def _union_is_cover(ambient: SimplicialComplex, parts) -> bool:
    # the union of the parts' (downward closed) face sets equals the ambient's
    # iff every maximal ambient face is contained in some part face
    all_part_faces = [m for _, masks in parts for m in masks]
    return all(
        any(is_subset(top, pf) for pf in all_part_faces) for top in ambient.maximal_faces
    )


def intersect_maximal_faces(parts: Sequence[tuple[int, ...]]) -> tuple[int, ...]:
    """Maximal faces of the intersection of subcomplexes given by maximal faces.

    Pairwise: the maximal faces of the intersection are the maximal elements
    of { f & g }; iterated left to right for more than two parts.
    """
    if not parts:
        return ()
    current = antichain_maximal(m for m in parts[0] if m)
    for masks in parts[1:]:
        meets = [f & g for f in current for g in masks]
        current = antichain_maximal(m for m in meets if m)
        if not current:
            return ()
    return current


def nerve_of_cover(C: Cover) -> SimplicialComplex:
    """Nerve of a cover: part subsets with a nonempty common intersection."""
    labels = tuple(lab for lab, _ in C.parts)
    faces: list[int] = []

    def grow(start: int, chosen: list[int], current: tuple[int, ...]):
        for idx in range(start, len(C.parts)):
            meet = intersect_maximal_faces([current, C.parts[idx][1]]) if chosen else C.parts[idx][1]
            meet = tuple(m for m in meet if m)
            if not meet:
                continue
            chosen.append(idx)
            faces.append(mask_of(chosen))
            grow(idx + 1, chosen, meet)
            chosen.pop()

    grow(0, [], ())
    return from_maximal_faces(labels, faces)


def goodness_certificate(
    C: Cover, size_cap: Optional[int] = None
) -> dict[tuple[str, ...], tuple[str, Optional[str]]]:
    """Certificates for the overlaps of a cover.

    For every subset of at least two parts, up to ``size_cap`` parts, reports
    one of ``("empty", None)``, ``("cone", apex_vertex)``, or
    ``("unknown", None)``.  A cone certificate is sufficient but not necessary
    for contractibility, so "unknown" is a legitimate outcome.
    """
    cap = len(C.parts) if size_cap is None else size_cap
    out: dict[tuple[str, ...], tuple[str, Optional[str]]] = {}
    part_labels = tuple(lab for lab, _ in C.parts)
    for size in range(2, cap + 1):
        for combo in combinations(range(len(C.parts)), size):
            meet = intersect_maximal_faces([C.parts[i][1] for i in combo])
            key = tuple(part_labels[i] for i in combo)
            if not meet:
                out[key] = ("empty", None)
                continue
            overlap = SimplicialComplex(C.ambient.vertices, meet)
            apex = cone_apex(overlap)
            if apex is None:
                out[key] = ("unknown", None)
            else:
                out[key] = ("cone", apex)
    return out


def complex_to_text(X: SimplicialComplex) -> str:
    """One maximal face per line, space-separated vertex labels."""
    lines = [" ".join(X.face_labels(m)) for m in X.maximal_faces]
    return "\n".join(lines) + ("\n" if lines else "")
