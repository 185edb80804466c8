"""Dense binary matrices backed by Python int bitsets.

Row i is stored as an integer whose bit j is the (i, j) entry, so Boolean
OR / XOR / compare on whole rows or columns are single int operations.
Python ints are arbitrary precision, which covers both the packed-word
fast path (heights up to a machine word) and taller matrices with one
representation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# A set of column indices, strictly increasing, no duplicates.
ColumnSet = tuple[int, ...]


@dataclass(frozen=True)
class BitMatrix:
    """Immutable m x n matrix over {0, 1}.

    ``rows[i]`` has bit j set iff entry (i, j) is 1.  Instances are safe to
    share across threads and may be used as dict keys.
    """

    m: int
    n: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ValueError(f"matrix must be at least 1x1, got {self.m}x{self.n}")
        if len(self.rows) != self.m:
            raise ValueError(f"expected {self.m} rows, got {len(self.rows)}")
        for i, row in enumerate(self.rows):
            if not isinstance(row, int) or row < 0 or row >= (1 << self.n):
                raise ValueError(f"row {i} does not fit in {self.n} columns")

    @classmethod
    def from_rows(cls, bits: Iterable[Iterable[int]]) -> "BitMatrix":
        """Build from an iterable of 0/1 row sequences."""
        rows = []
        n = None
        for r in bits:
            r = list(r)
            if n is None:
                n = len(r)
            elif len(r) != n:
                raise ValueError("ragged rows")
            acc = 0
            for j, b in enumerate(r):
                if b not in (0, 1):
                    raise ValueError(f"entry {b!r} is not 0 or 1")
                acc |= b << j
            rows.append(acc)
        if n is None or not rows:
            raise ValueError("matrix must have at least one row")
        return cls(len(rows), n, tuple(rows))

    @classmethod
    def from_strings(cls, lines: Sequence[str]) -> "BitMatrix":
        """Build from strings of '0'/'1' characters, one per row."""
        return cls.from_rows([[int(ch) for ch in line] for line in lines])

    @classmethod
    def from_array(cls, arr) -> "BitMatrix":
        a = np.asarray(arr)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        return cls.from_rows(a.astype(int).tolist())

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        if n < 1:
            raise ValueError("identity size must be positive")
        return cls(n, n, tuple(1 << i for i in range(n)))

    def bit(self, i: int, j: int) -> int:
        if not (0 <= i < self.m and 0 <= j < self.n):
            raise IndexError(f"({i}, {j}) outside {self.m}x{self.n}")
        return (self.rows[i] >> j) & 1

    @property
    def column_masks(self) -> tuple[int, ...]:
        """Columns as ints; bit i of ``column_masks[j]`` is entry (i, j)."""
        cached = self.__dict__.get("_column_masks")
        if cached is None:
            cols = [0] * self.n
            for i, row in enumerate(self.rows):
                while row:
                    low = row & -row
                    cols[low.bit_length() - 1] |= 1 << i
                    row ^= low
            cached = tuple(cols)
            object.__setattr__(self, "_column_masks", cached)
        return cached

    @property
    def all_ones_mask(self) -> int:
        """Column-vector mask with every row position set."""
        return (1 << self.m) - 1

    def row_weight(self, i: int) -> int:
        return self.rows[i].bit_count()

    def to_strings(self) -> list[str]:
        return [
            "".join("1" if (row >> j) & 1 else "0" for j in range(self.n))
            for row in self.rows
        ]

    def to_array(self) -> np.ndarray:
        """Dense uint8 array of shape (m, n)."""
        out = np.zeros((self.m, self.n), dtype=np.uint8)
        for i, row in enumerate(self.rows):
            for j in range(self.n):
                out[i, j] = (row >> j) & 1
        return out

    def __str__(self) -> str:
        return "\n".join(self.to_strings())


def vstack(*mats: BitMatrix) -> BitMatrix:
    """Stack matrices vertically; all must share the column count."""
    if not mats:
        raise ValueError("nothing to stack")
    n = mats[0].n
    if any(mat.n != n for mat in mats):
        raise ValueError("column counts differ")
    rows: list[int] = []
    for mat in mats:
        rows.extend(mat.rows)
    return BitMatrix(len(rows), n, tuple(rows))


def hstack(*mats: BitMatrix) -> BitMatrix:
    """Concatenate matrices side by side; all must share the row count."""
    if not mats:
        raise ValueError("nothing to stack")
    m = mats[0].m
    if any(mat.m != m for mat in mats):
        raise ValueError("row counts differ")
    rows = [0] * m
    shift = 0
    for mat in mats:
        for i, row in enumerate(mat.rows):
            rows[i] |= row << shift
        shift += mat.n
    return BitMatrix(m, shift, tuple(rows))


def select_columns(mat: BitMatrix, columns: Sequence[int]) -> BitMatrix:
    """New matrix made of the given columns of ``mat``, in the given order."""
    if not columns:
        raise ValueError("need at least one column")
    if any(not 0 <= j < mat.n for j in columns):
        raise ValueError("column index out of range")
    rows = []
    for row in mat.rows:
        acc = 0
        for pos, j in enumerate(columns):
            acc |= ((row >> j) & 1) << pos
        rows.append(acc)
    return BitMatrix(mat.m, len(columns), tuple(rows))


def check_column_set(mat: BitMatrix, columns: Sequence[int]) -> ColumnSet:
    """Validate a column set: nonempty, strictly increasing, in range."""
    cols = tuple(columns)
    if not cols:
        raise ValueError("column set must be nonempty")
    prev = -1
    for j in cols:
        if not isinstance(j, int) or not 0 <= j < mat.n:
            raise ValueError(f"column index {j!r} outside [0, {mat.n})")
        if j <= prev:
            raise ValueError("column indices must be strictly increasing")
        prev = j
    return cols


def column_or_mask(mat: BitMatrix, columns: Sequence[int]) -> int:
    """Boolean sum (OR) of the given columns, as a row-position bitmask."""
    cols = check_column_set(mat, columns)
    masks = mat.column_masks
    acc = 0
    for j in cols:
        acc |= masks[j]
    return acc


def column_or(mat: BitMatrix, columns: Sequence[int]) -> tuple[int, ...]:
    """Boolean sum (OR) of the given columns, as a 0/1 vector of length m."""
    mask = column_or_mask(mat, columns)
    return tuple((mask >> i) & 1 for i in range(mat.m))


def min_row_weight(mat: BitMatrix) -> int:
    """Smallest number of 1s in any row."""
    return min(row.bit_count() for row in mat.rows)
