"""Binary relations over labeled finite sets.

A relation is a {0,1}-matrix between two ordered label sets.  Subsets of
either side are handled internally as integer bit masks keyed to the label
order, which keeps witness queries word-parallel and all derived output
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .bits import bits, is_subset
from .errors import InputError

__all__ = [
    "IndexSet",
    "Relation",
    "RelationMorphism",
    "MorphismReport",
    "row_witnesses",
    "col_witnesses",
    "row_witnesses_mask",
    "col_witnesses_mask",
    "transpose",
    "restrict",
    "check_morphism",
    "relation_to_csv",
    "relation_to_sparse",
    "parse_relation",
]


@dataclass(frozen=True)
class IndexSet:
    """An ordered set of distinct opaque string labels."""

    labels: tuple[str, ...]
    _position: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        pos = {}
        for i, lab in enumerate(labels):
            if lab in pos:
                raise InputError(f"duplicate label {lab!r}")
            pos[lab] = i
        object.__setattr__(self, "_position", pos)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[str]:
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self._position

    def position(self, label: str) -> int:
        try:
            return self._position[label]
        except KeyError:
            raise InputError(f"unknown label {label!r}") from None

    def mask_of(self, labels: Iterable[str]) -> int:
        m = 0
        for lab in labels:
            m |= 1 << self.position(lab)
        return m

    def labels_of(self, mask: int) -> tuple[str, ...]:
        return tuple(self.labels[i] for i in bits(mask))

    @property
    def full_mask(self) -> int:
        return (1 << len(self.labels)) - 1


@dataclass(frozen=True)
class Relation:
    """A relation rows x cols -> {0,1}; bit j of ``row_masks[i]`` is the (i,j) entry."""

    rows: IndexSet
    cols: IndexSet
    row_masks: tuple[int, ...]
    col_masks: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "row_masks", tuple(self.row_masks))
        if len(self.row_masks) != len(self.rows):
            raise InputError(
                f"incidence has {len(self.row_masks)} rows, expected {len(self.rows)}"
            )
        full = self.cols.full_mask
        for i, m in enumerate(self.row_masks):
            if m < 0 or m & ~full:
                raise InputError(f"row {self.rows.labels[i]!r}: incidence mask out of range")
        cm = [0] * len(self.cols)
        for i, m in enumerate(self.row_masks):
            for j in bits(m):
                cm[j] |= 1 << i
        object.__setattr__(self, "col_masks", tuple(cm))

    @classmethod
    def from_entries(
        cls,
        row_labels: Sequence[str],
        col_labels: Sequence[str],
        entries: Sequence[Sequence[int]],
    ) -> "Relation":
        rows = IndexSet(tuple(row_labels))
        cols = IndexSet(tuple(col_labels))
        if len(entries) != len(rows):
            raise InputError(f"expected {len(rows)} entry rows, got {len(entries)}")
        masks = []
        for i, entry_row in enumerate(entries):
            if len(entry_row) != len(cols):
                raise InputError(
                    f"row {row_labels[i]!r}: expected {len(cols)} entries, got {len(entry_row)}"
                )
            m = 0
            for j, v in enumerate(entry_row):
                if v not in (0, 1):
                    raise InputError(f"entry ({row_labels[i]!r},{col_labels[j]!r}) is {v!r}, not 0/1")
                m |= v << j
            masks.append(m)
        return cls(rows, cols, tuple(masks))

    @classmethod
    def from_pairs(
        cls,
        row_labels: Sequence[str],
        col_labels: Sequence[str],
        pairs: Iterable[tuple[str, str]],
    ) -> "Relation":
        rows = IndexSet(tuple(row_labels))
        cols = IndexSet(tuple(col_labels))
        masks = [0] * len(rows)
        for r, c in pairs:
            masks[rows.position(r)] |= 1 << cols.position(c)
        return cls(rows, cols, tuple(masks))

    def entry(self, row: str, col: str) -> int:
        return (self.row_masks[self.rows.position(row)] >> self.cols.position(col)) & 1

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.cols))


def row_witnesses_mask(A: Relation, sigma_mask: int) -> int:
    """Columns related to every row in ``sigma_mask``; all columns for the empty set."""
    m = A.cols.full_mask
    for i in bits(sigma_mask):
        m &= A.row_masks[i]
        if not m:
            break
    return m


def col_witnesses_mask(A: Relation, tau_mask: int) -> int:
    m = A.rows.full_mask
    for j in bits(tau_mask):
        m &= A.col_masks[j]
        if not m:
            break
    return m


def row_witnesses(A: Relation, sigma: Iterable[str]) -> tuple[str, ...]:
    """The common witness columns of the row subset ``sigma``."""
    return A.cols.labels_of(row_witnesses_mask(A, A.rows.mask_of(sigma)))


def col_witnesses(A: Relation, tau: Iterable[str]) -> tuple[str, ...]:
    """The common witness rows of the column subset ``tau``."""
    return A.rows.labels_of(col_witnesses_mask(A, A.cols.mask_of(tau)))


def transpose(A: Relation) -> Relation:
    return Relation(A.cols, A.rows, A.col_masks)


def restrict(
    A: Relation,
    row_labels: Optional[Iterable[str]] = None,
    col_labels: Optional[Iterable[str]] = None,
) -> Relation:
    """Restriction to label subsets; kept labels stay in their original order."""
    row_keep = A.rows.full_mask if row_labels is None else A.rows.mask_of(row_labels)
    col_keep = A.cols.full_mask if col_labels is None else A.cols.mask_of(col_labels)
    new_rows = IndexSet(A.rows.labels_of(row_keep))
    new_cols = IndexSet(A.cols.labels_of(col_keep))
    col_positions = tuple(bits(col_keep))
    masks = []
    for i in bits(row_keep):
        m = 0
        for new_j, old_j in enumerate(col_positions):
            m |= ((A.row_masks[i] >> old_j) & 1) << new_j
        masks.append(m)
    return Relation(new_rows, new_cols, tuple(masks))


@dataclass(frozen=True)
class RelationMorphism:
    """A pair of total label maps (rows -> rows', cols -> cols')."""

    row_map: Mapping[str, str]
    col_map: Mapping[str, str]


@dataclass(frozen=True)
class MorphismReport:
    ok: bool
    violation: Optional[tuple[str, str]]  # first (row, col) with A=1 but A'=0


def check_morphism(m: RelationMorphism, A: Relation, A2: Relation) -> MorphismReport:
    """Scan all entries: A(i,j)=1 must imply A'(m(i),m(j))=1."""
    for r in A.rows.labels:
        if r not in m.row_map:
            raise InputError(f"row map is not total: missing {r!r}")
        A2.rows.position(m.row_map[r])
    for c in A.cols.labels:
        if c not in m.col_map:
            raise InputError(f"column map is not total: missing {c!r}")
        A2.cols.position(m.col_map[c])
    for i, r in enumerate(A.rows.labels):
        row = A.row_masks[i]
        for j in bits(row):
            c = A.cols.labels[j]
            if not A2.entry(m.row_map[r], m.col_map[c]):
                return MorphismReport(False, (r, c))
    return MorphismReport(True, None)


# ---------------------------------------------------------------------------
# file formats

def relation_to_csv(A: Relation, header_comments: Sequence[str] = ()) -> str:
    """Dense CSV: first row lists column labels, first column lists row labels."""
    lines = [f"# {c}" for c in header_comments]
    lines.append("," + ",".join(A.cols.labels))
    for i, r in enumerate(A.rows.labels):
        cells = [str((A.row_masks[i] >> j) & 1) for j in range(len(A.cols))]
        lines.append(r + "," + ",".join(cells))
    return "\n".join(lines) + "\n"


def relation_to_sparse(A: Relation) -> str:
    """Sparse format: one ``row_label col_label`` line per 1-entry."""
    lines = []
    for i, r in enumerate(A.rows.labels):
        for j in bits(A.row_masks[i]):
            lines.append(f"{r} {A.cols.labels[j]}")
    return "\n".join(lines) + ("\n" if lines else "")


def parse_relation(text: str, source: str = "<string>") -> Relation:
    """Parse either the dense CSV format or the sparse pair format.

    Comment lines starting with ``#`` and blank lines are skipped.  Errors
    carry 1-based line numbers of the original text.
    """
    numbered = [
        (n, line.strip())
        for n, line in enumerate(text.splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not numbered:
        raise InputError(f"{source}: no data lines")
    if "," in numbered[0][1]:
        return _parse_csv(numbered, source)
    return _parse_sparse(numbered, source)


def _parse_csv(numbered, source: str) -> Relation:
    first_n, header = numbered[0]
    head_cells = header.split(",")
    if head_cells[0].strip():
        raise InputError(f"{source}:{first_n}: header must start with an empty cell")
    col_labels = [c.strip() for c in head_cells[1:]]
    if not col_labels or any(not c for c in col_labels):
        raise InputError(f"{source}:{first_n}: empty column label in header")
    row_labels: list[str] = []
    entries: list[list[int]] = []
    for n, line in numbered[1:]:
        cells = line.split(",")
        if len(cells) != len(col_labels) + 1:
            raise InputError(
                f"{source}:{n}: expected {len(col_labels) + 1} cells, got {len(cells)}"
            )
        label = cells[0].strip()
        if not label:
            raise InputError(f"{source}:{n}: empty row label")
        row = []
        for cell in cells[1:]:
            v = cell.strip()
            if v not in ("0", "1"):
                raise InputError(f"{source}:{n}: entry {v!r} is not 0 or 1")
            row.append(int(v))
        row_labels.append(label)
        entries.append(row)
    try:
        return Relation.from_entries(row_labels, col_labels, entries)
    except InputError as exc:
        raise InputError(f"{source}: {exc}") from None


def _parse_sparse(numbered, source: str) -> Relation:
    pairs: list[tuple[str, str]] = []
    row_labels: list[str] = []
    col_labels: list[str] = []
    seen_rows: set[str] = set()
    seen_cols: set[str] = set()
    for n, line in numbered:
        parts = line.split()
        if len(parts) != 2:
            raise InputError(f"{source}:{n}: expected 'row_label col_label', got {line!r}")
        r, c = parts
        if r not in seen_rows:
            seen_rows.add(r)
            row_labels.append(r)
        if c not in seen_cols:
            seen_cols.add(c)
            col_labels.append(c)
        pairs.append((r, c))
    return Relation.from_pairs(row_labels, col_labels, pairs)
