"""Row and column complexes of a relation, total-weight filtrations, and duality checks.

The row complex has the rows admitting a common witness column as its
simplices; it is determined by the single-column witness sets, so maximal
faces are computed from those and never by subset enumeration.  Column-side
computations delegate to the row side of the transpose.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterable, Optional

from .bits import antichain_maximal, bits, is_subset, mask_of
from .complexes import SimplicialComplex, enumerate_faces, from_maximal_faces
from .errors import InputError
from .homology import BettiVector, FilteredComplex, betti
from .relations import (
    Relation,
    col_witnesses_mask,
    row_witnesses_mask,
    transpose,
)

__all__ = [
    "Side",
    "row_complex",
    "column_complex",
    "side_complex",
    "total_weight",
    "WeightFiltration",
    "weight_filtration",
    "sublevel_complex",
    "max_vertex_weight",
    "betti_via_smaller_side",
    "DualityReport",
    "duality_check",
    "PsiReport",
    "psi_equivalence_check",
]


class Side(Enum):
    ROW = "row"
    COLUMN = "col"


def row_complex(A: Relation) -> SimplicialComplex:
    """The complex of row subsets admitting a common witness column.

    Maximal faces are the inclusion-maximal single-column witness sets; the
    vertex set is the rows that appear in some face.
    """
    witness_sets = [m for m in A.col_masks if m]
    return from_maximal_faces(A.rows, antichain_maximal(witness_sets))


def column_complex(A: Relation) -> SimplicialComplex:
    return row_complex(transpose(A))


def side_complex(A: Relation, side: Side) -> SimplicialComplex:
    return row_complex(A) if side is Side.ROW else column_complex(A)


def _oriented(A: Relation, side: Side) -> Relation:
    return A if side is Side.ROW else transpose(A)


def total_weight(A: Relation, side: Side, sigma: Iterable[str]) -> int:
    """Number of witnesses of a face of the chosen side's complex.

    The empty set is allowed and has every column (row) as a witness; a
    nonempty non-face raises an input error.
    """
    B = _oriented(A, side)
    mask = B.rows.mask_of(sigma)
    w = row_witnesses_mask(B, mask).bit_count()
    if mask and w == 0:
        raise InputError(
            f"{'/'.join(B.rows.labels_of(mask))} is not a face of the {side.value} complex"
        )
    return w


def max_vertex_weight(A: Relation, side: Side) -> int:
    """Largest single-vertex weight; 0 when the side's complex is empty."""
    B = _oriented(A, side)
    return max((m.bit_count() for m in B.row_masks), default=0)


@dataclass(frozen=True)
class WeightFiltration:
    """Total-weight filtration of one side of a relation.

    Faces of weight w get integer grade ``max_weight - w + 1``, so sublevel
    sets in increasing grade are the complexes of decreasing weight threshold.
    ``level(k)`` converts back to weight coordinates.
    """

    filtration: FilteredComplex
    max_weight: int
    side: Side

    def grade_of_level(self, k: int) -> int:
        return self.max_weight - k + 1

    def level_of_grade(self, g: int) -> int:
        return self.max_weight - g + 1

    def level(self, k: int) -> SimplicialComplex:
        """The subcomplex of faces with at least ``k`` witnesses."""
        return self.filtration.sublevel(self.grade_of_level(k))


def weight_filtration(
    A: Relation, side: Side, max_dim: int, budget: Optional[int] = None
) -> WeightFiltration:
    """Grade every face of the side's complex, up to ``max_dim``, by total weight."""
    B = _oriented(A, side)
    X = row_complex(B)
    w_max = max_vertex_weight(B, Side.ROW)
    grades: dict[int, int] = {}
    if not X.is_empty:
        depth = min(max_dim, X.dimension)
        for dim_faces in enumerate_faces(X, depth, budget=budget):
            for m in dim_faces:
                w = row_witnesses_mask(B, m).bit_count()
                grades[m] = w_max - w + 1
    filtered = FilteredComplex(X, grades, max_dim)
    return WeightFiltration(filtered, w_max, side)


def sublevel_complex(A: Relation, side: Side, k: int) -> SimplicialComplex:
    """The full subcomplex of faces with at least ``k`` witnesses.

    Its maximal faces are the inclusion-maximal witness sets of size-k column
    subsets, so no subset enumeration over the face side is needed.
    """
    if k < 1:
        raise InputError(f"weight threshold must be >= 1, got {k}")
    B = _oriented(A, side)
    tops = maximal_cowitness_sets(B, k)
    return from_maximal_faces(B.rows, tops)


def maximal_cowitness_sets(B: Relation, k: int) -> tuple[int, ...]:
    """Inclusion-maximal sets of rows related to all of some k columns.

    Enumerates size-k column subsets depth-first with an early empty prune;
    witness sets of larger column subsets are dominated by these.
    """
    n_cols = len(B.cols)
    if k > n_cols:
        return ()
    found: list[int] = []

    def grow(start: int, chosen: int, acc: int):
        if chosen == k:
            found.append(acc)
            return
        # not enough columns left to reach size k
        for j in range(start, n_cols - (k - chosen) + 1):
            nxt = acc & B.col_masks[j]
            if nxt:
                grow(j + 1, chosen + 1, nxt)

    grow(0, 0, B.rows.full_mask)
    return antichain_maximal(found)


def betti_via_smaller_side(
    A: Relation,
    p: int = 2,
    max_dim: int = 2,
    force_side: Optional[Side] = None,
    budget: Optional[int] = None,
) -> BettiVector:
    """Betti numbers of the row complex, computed on whichever side is smaller.

    Row and column complexes have equal Betti numbers, so the cheaper side is
    used unless ``force_side`` pins it down (duality tests must not shortcut).
    """
    if force_side is Side.ROW:
        X = row_complex(A)
    elif force_side is Side.COLUMN:
        X = column_complex(A)
    else:
        X = row_complex(A) if len(A.rows) <= len(A.cols) else column_complex(A)
    return betti(X, p, max_dim, budget=budget)


@dataclass(frozen=True)
class DualityReport:
    betti_row: BettiVector
    betti_col: BettiVector

    @property
    def equal(self) -> bool:
        return self.betti_row.counts == self.betti_col.counts


def duality_check(
    A: Relation, p: int = 2, max_dim: int = 2, budget: Optional[int] = None
) -> DualityReport:
    """Compare Betti numbers of the row and column complexes, both computed directly."""
    br = betti(row_complex(A), p, max_dim, budget=budget)
    bc = betti(column_complex(A), p, max_dim, budget=budget)
    return DualityReport(br, bc)


@dataclass(frozen=True)
class PsiReport:
    k: int
    betti_level: BettiVector  # derived-relation complex at weight threshold k
    betti_sublevel: BettiVector  # weight-k subcomplex of the row complex
    vertex_map: tuple[tuple[str, str], ...]  # union map on vertices
    faces_map_to_faces: bool

    @property
    def equal(self) -> bool:
        return self.betti_level.counts == self.betti_sublevel.counts


def psi_equivalence_check(
    A: Relation, k: int, p: int = 2, max_dim: int = 2, budget: Optional[int] = None
) -> PsiReport:
    """Check that the level-(k,1) derived complex matches the weight-k subcomplex.

    Also materializes the union map on vertices (each vertex of the derived
    complex is a row subset, sent to itself as a row subset) and verifies
    that every face maps to a face.
    """
    from .bifiltration import level_complex  # local import to avoid a cycle

    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    level = level_complex(A, k, 1, force_side=Side.ROW)
    sub = sublevel_complex(A, Side.ROW, k)
    b_level = betti(level.complex, p, max_dim, budget=budget)
    b_sub = betti(sub, p, max_dim, budget=budget)

    vertex_map = []
    for label, sigma_mask in zip(level.complex.vertices.labels, level.vertex_masks):
        vertex_map.append((label, "+".join(A.rows.labels_of(sigma_mask))))
    # a face is a set of row subsets below a common maximal witness set W;
    # its union is a subset of W, and W itself is the largest image, so the
    # image of every face is a face iff every W is a face of the sublevel
    faces_ok = True
    for W in level.witness_sets:
        if row_witnesses_mask(A, W).bit_count() < k:
            faces_ok = False
            break
    return PsiReport(k, b_level, b_sub, tuple(vertex_map), faces_ok)
