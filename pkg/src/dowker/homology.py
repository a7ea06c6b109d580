"""Simplicial homology over prime fields, persistence, and cell-complex Betti numbers.

Field coefficients only (default F_2); homology is unreduced everywhere, so
the empty complex has all Betti numbers zero.  Ranks come from straightforward
Gaussian elimination: bit-mask columns for p = 2, coefficient dictionaries for
odd primes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from .bits import antichain_maximal, bits, is_subset, mask_of
from .complexes import (
    DEFAULT_FACE_BUDGET,
    SimplicialComplex,
    enumerate_faces,
    from_maximal_faces,
)
from .errors import InputError, IntegrityError
from .posets import Poset, chains_up_to, core
from .relations import IndexSet

__all__ = [
    "BettiVector",
    "betti",
    "betti_via_nerve",
    "poset_betti",
    "FilteredComplex",
    "Bar",
    "persistent_barcode",
    "barcode_to_csv",
    "DiagonalCellComplex",
    "betti_of_cells",
    "maximal_face_nerve",
]


def _check_prime(p: int) -> None:
    if p < 2 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise InputError(f"field characteristic must be prime, got {p}")


@dataclass(frozen=True)
class BettiVector:
    """Betti numbers beta_0..beta_d over the prime field F_p."""

    counts: tuple[int, ...]
    p: int = 2

    def __getitem__(self, d: int) -> int:
        return self.counts[d]

    def __len__(self) -> int:
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)

    def to_csv(self) -> str:
        lines = ["dim,betti"]
        lines += [f"{d},{b}" for d, b in enumerate(self.counts)]
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# ranks over F_p

def rank_f2(columns: list[int]) -> int:
    """Rank of a matrix given as bit-mask columns, over F_2."""
    pivots: dict[int, int] = {}  # pivot row -> reduced column
    rank = 0
    for col in columns:
        while col:
            low = col.bit_length() - 1
            other = pivots.get(low)
            if other is None:
                pivots[low] = col
                rank += 1
                break
            col ^= other
    return rank


def rank_fp(columns: list[dict[int, int]], p: int) -> int:
    """Rank over F_p of columns given as {row: coefficient} dictionaries."""
    pivots: dict[int, dict[int, int]] = {}
    rank = 0
    for col in columns:
        col = {r: v % p for r, v in col.items() if v % p}
        while col:
            low = max(col)
            other = pivots.get(low)
            if other is None:
                pivots[low] = col
                rank += 1
                break
            factor = (col[low] * pow(other[low], -1, p)) % p
            for r, v in other.items():
                new = (col.get(r, 0) - factor * v) % p
                if new:
                    col[r] = new
                else:
                    col.pop(r, None)
        # a column reduced to zero contributes nothing
    return rank


def _boundary_rank(lower: list[int], upper: list[int], p: int) -> int:
    """Rank of the boundary map from the faces in ``upper`` to those in ``lower``."""
    if not upper or not lower:
        return 0
    index = {m: i for i, m in enumerate(lower)}
    if p == 2:
        cols2 = []
        for m in upper:
            col = 0
            for b in bits(m):
                col |= 1 << index[m ^ (1 << b)]
            cols2.append(col)
        return rank_f2(cols2)
    cols = []
    for m in upper:
        col: dict[int, int] = {}
        for pos, b in enumerate(bits(m)):
            col[index[m ^ (1 << b)]] = 1 if pos % 2 == 0 else p - 1
        cols.append(col)
    return rank_fp(cols, p)


def betti(
    X: SimplicialComplex,
    p: int = 2,
    max_dim: int = 2,
    budget: Optional[int] = None,
) -> BettiVector:
    """Unreduced Betti numbers of ``X`` over F_p in dimensions 0..``max_dim``.

    Materializes faces up to dimension ``max_dim``+1 under the face budget.
    """
    _check_prime(p)
    if max_dim < 0:
        raise InputError(f"max_dim must be >= 0, got {max_dim}")
    if X.is_empty:
        return BettiVector((0,) * (max_dim + 1), p)
    depth = min(max_dim + 1, X.dimension)
    graded = enumerate_faces(X, depth, budget=budget)
    graded += [[] for _ in range(max_dim + 2 - len(graded))]
    ranks = [0] * (max_dim + 2)  # ranks[d] = rank of boundary from dim d to d-1
    for d in range(1, max_dim + 2):
        ranks[d] = _boundary_rank(graded[d - 1], graded[d], p)
    counts = tuple(
        len(graded[d]) - ranks[d] - ranks[d + 1] for d in range(max_dim + 1)
    )
    return BettiVector(counts, p)


def maximal_face_nerve(X: SimplicialComplex) -> SimplicialComplex:
    """Nerve of the cover of ``X`` by its maximal faces.

    Intersections of simplices are simplices (hence empty or cones), so this
    is a good cover and the nerve has the same homotopy type as ``X``.  The
    nerve's vertices are the maximal faces, labeled by position.
    """
    n = len(X.maximal_faces)
    labels = tuple(f"f{i}" for i in range(n))
    if n == 0:
        return SimplicialComplex(IndexSet(()), ())
    per_vertex = []
    for v in range(len(X.vertices)):
        m = 0
        for i, top in enumerate(X.maximal_faces):
            if (top >> v) & 1:
                m |= 1 << i
        if m:
            per_vertex.append(m)
    return from_maximal_faces(labels, antichain_maximal(per_vertex))


def betti_via_nerve(
    X: SimplicialComplex,
    p: int = 2,
    max_dim: int = 2,
    budget: Optional[int] = None,
) -> BettiVector:
    """Betti numbers of ``X`` computed on the nerve of its maximal-face cover.

    Exact by the nerve lemma; far cheaper than direct enumeration when ``X``
    has few maximal faces but very many faces.
    """
    return betti(maximal_face_nerve(X), p, max_dim, budget=budget)


def poset_betti(
    P: Poset,
    p: int = 2,
    max_dim: int = 2,
    use_core: bool = True,
    budget: Optional[int] = None,
) -> BettiVector:
    """Betti numbers of the order complex of ``P``.

    With ``use_core`` the poset is first reduced to its beat-point core, which
    preserves the weak homotopy type; chains are then enumerated only up to
    the needed length instead of via maximal chains.
    """
    _check_prime(p)
    Q = core(P) if use_core else P
    if len(Q) == 0:
        return BettiVector((0,) * (max_dim + 1), p)
    if len(Q) == 1:
        return BettiVector((1,) + (0,) * max_dim, p)
    graded_chains = chains_up_to(Q, max_dim + 2, budget=budget)
    ranks = [0] * (max_dim + 2)
    for d in range(1, max_dim + 2):
        lower = graded_chains[d - 1]
        upper = graded_chains[d]
        if not lower or not upper:
            continue
        index = {c: i for i, c in enumerate(lower)}
        if p == 2:
            cols2 = []
            for chain in upper:
                col = 0
                for drop in range(len(chain)):
                    col ^= 1 << index[chain[:drop] + chain[drop + 1 :]]
                cols2.append(col)
            ranks[d] = rank_f2(cols2)
        else:
            cols = []
            for chain in upper:
                col: dict[int, int] = {}
                for drop in range(len(chain)):
                    col[index[chain[:drop] + chain[drop + 1 :]]] = (
                        1 if drop % 2 == 0 else p - 1
                    )
                cols.append(col)
            ranks[d] = rank_fp(cols, p)
    counts = tuple(
        len(graded_chains[d]) - ranks[d] - ranks[d + 1] for d in range(max_dim + 1)
    )
    return BettiVector(counts, p)


# ---------------------------------------------------------------------------
# filtrations and persistence

@dataclass(frozen=True)
class FilteredComplex:
    """A complex with an integer grade on every face of dimension <= ``max_dim``.

    Grades must be monotone: a face never has a larger grade than any of its
    cofaces, so every sublevel set is a subcomplex.
    """

    complex: SimplicialComplex
    grades: Mapping[int, int]  # face mask -> grade
    max_dim: int
    faces: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        depth = min(self.max_dim, self.complex.dimension)
        graded = enumerate_faces(self.complex, max(depth, 0)) if not self.complex.is_empty else []
        faces = tuple(tuple(g) for g in graded)
        for dim_faces in faces:
            for m in dim_faces:
                if m not in self.grades:
                    raise InputError(
                        f"face {'/'.join(self.complex.face_labels(m))} has no grade"
                    )
        for dim_faces in faces[1:]:
            for m in dim_faces:
                g = self.grades[m]
                for b in bits(m):
                    facet = m ^ (1 << b)
                    if self.grades[facet] > g:
                        raise InputError(
                            "grades are not monotone at face "
                            + "/".join(self.complex.face_labels(m))
                        )
        object.__setattr__(self, "faces", faces)

    @classmethod
    def from_label_grades(
        cls,
        X: SimplicialComplex,
        grades: Mapping[tuple[str, ...], int],
        max_dim: int,
    ) -> "FilteredComplex":
        by_mask = {X.vertices.mask_of(labels): g for labels, g in grades.items()}
        return cls(X, by_mask, max_dim)

    def sublevel(self, grade: int) -> SimplicialComplex:
        """The subcomplex of materialized faces with grade <= ``grade``."""
        keep = [m for dim_faces in self.faces for m in dim_faces if self.grades[m] <= grade]
        if not keep:
            return SimplicialComplex(IndexSet(()), ())
        return from_maximal_faces(self.complex.vertices, keep)

    def grade_range(self) -> tuple[int, int]:
        values = [self.grades[m] for dim_faces in self.faces for m in dim_faces]
        if not values:
            return (0, -1)
        return (min(values), max(values))


@dataclass(frozen=True)
class Bar:
    dim: int
    birth: int
    death: Optional[int]  # None means the class never dies

    def death_str(self) -> str:
        return "inf" if self.death is None else str(self.death)


def persistent_barcode(
    F: FilteredComplex, p: int = 2, max_dim: int = 2
) -> tuple[Bar, ...]:
    """Barcode of the sublevel filtration by standard column reduction.

    Zero-length pairs (birth grade equal to death grade) are dropped, so the
    number of bars containing a grade g equals the Betti number of the
    sublevel complex at g.
    """
    _check_prime(p)
    if max_dim < 0:
        raise InputError(f"max_dim must be >= 0, got {max_dim}")
    if F.complex.dimension > F.max_dim and max_dim + 1 > F.max_dim:
        raise InputError(
            f"barcode up to dimension {max_dim} needs faces of dimension {max_dim + 1}; "
            f"filtration only materializes dimension {F.max_dim}"
        )
    cells: list[tuple[int, int, int]] = []  # (grade, dim, mask)
    for d, dim_faces in enumerate(F.faces):
        if d > max_dim + 1:
            break
        for m in dim_faces:
            cells.append((F.grades[m], d, m))
    cells.sort(key=lambda c: (c[0], c[1], tuple(bits(c[2]))))
    position = {(d, m): i for i, (g, d, m) in enumerate(cells)}

    columns: list[dict[int, int]] = []
    for g, d, m in cells:
        col: dict[int, int] = {}
        if d > 0:
            for pos, b in enumerate(bits(m)):
                col[position[(d - 1, m ^ (1 << b))]] = 1 if pos % 2 == 0 else p - 1
        columns.append(col)

    low_owner: dict[int, int] = {}
    lows: list[Optional[int]] = [None] * len(columns)
    for j, col in enumerate(columns):
        col = dict(col)
        while col:
            low = max(col)
            other = low_owner.get(low)
            if other is None:
                low_owner[low] = j
                lows[j] = low
                break
            factor = (col[low] * pow(columns[other][low], -1, p)) % p
            for r, v in columns[other].items():
                new = (col.get(r, 0) - factor * v) % p
                if new:
                    col[r] = new
                else:
                    col.pop(r, None)
        columns[j] = col

    bars: list[Bar] = []
    killed = {lows[j]: j for j in range(len(columns)) if lows[j] is not None}
    for i, (g, d, m) in enumerate(cells):
        if lows[i] is not None:
            continue  # this cell kills a class instead of creating one
        if d > max_dim:
            continue
        j = killed.get(i)
        if j is None:
            bars.append(Bar(d, g, None))
        else:
            death = cells[j][0]
            if death > g:
                bars.append(Bar(d, g, death))
    bars.sort(key=lambda b: (b.dim, b.birth, b.death is None, b.death))
    return tuple(bars)


def barcode_to_csv(bars: Iterable[Bar]) -> str:
    lines = ["dim,birth,death"]
    lines += [f"{b.dim},{b.birth},{b.death_str()}" for b in bars]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# explicitly presented graded cell complexes

@dataclass(frozen=True)
class DiagonalCellComplex:
    """Graded cells with signed facet incidence; an explicit chain complex.

    ``facets[d][i]`` lists ``(facet_index, sign)`` pairs for cell i of
    dimension d, referring to cells of dimension d-1.
    """

    cells: tuple[tuple[str, ...], ...]
    facets: tuple[tuple[tuple[tuple[int, int], ...], ...], ...]

    def __post_init__(self):
        if len(self.cells) != len(self.facets):
            raise InputError("cells and facets must have the same number of dimensions")
        for d, (labels, incidences) in enumerate(zip(self.cells, self.facets)):
            if len(labels) != len(incidences):
                raise InputError(f"dimension {d}: {len(labels)} cells but {len(incidences)} facet lists")
            for i, inc in enumerate(incidences):
                if d == 0:
                    if inc:
                        raise InputError("0-cells cannot have facets")
                    continue
                for ref, _sign in inc:
                    if not (0 <= ref < len(self.cells[d - 1])):
                        raise InputError(f"dimension {d} cell {i}: facet index {ref} out of range")

    def cell_count(self) -> int:
        return sum(len(c) for c in self.cells)


def validate_boundary_squares_to_zero(D: DiagonalCellComplex, p: int) -> None:
    for d in range(2, len(D.cells)):
        for i, inc in enumerate(D.facets[d]):
            acc: dict[int, int] = {}
            for ref, sign in inc:
                for ref2, sign2 in D.facets[d - 1][ref]:
                    acc[ref2] = (acc.get(ref2, 0) + sign * sign2) % p
            if any(v % p for v in acc.values()):
                raise IntegrityError(
                    f"boundary does not square to zero at dimension {d}, cell {D.cells[d][i]!r}"
                )


def betti_of_cells(D: DiagonalCellComplex, p: int = 2, max_dim: int = 2) -> BettiVector:
    """Betti numbers of an explicitly presented chain complex over F_p."""
    _check_prime(p)
    validate_boundary_squares_to_zero(D, p)
    ranks = [0] * (max_dim + 2)
    for d in range(1, max_dim + 2):
        if d >= len(D.cells) or not D.cells[d] or not D.cells[d - 1]:
            continue
        if p == 2:
            cols2 = []
            for inc in D.facets[d]:
                col = 0
                for ref, sign in inc:
                    if sign % 2:
                        col ^= 1 << ref
                cols2.append(col)
            ranks[d] = rank_f2(cols2)
        else:
            cols = [
                {ref: sign % p for ref, sign in inc if sign % p} for inc in D.facets[d]
            ]
            ranks[d] = rank_fp(cols, p)
    counts = []
    for d in range(max_dim + 1):
        n_d = len(D.cells[d]) if d < len(D.cells) else 0
        counts.append(n_d - ranks[d] - ranks[d + 1])
    return BettiVector(tuple(counts), p)
