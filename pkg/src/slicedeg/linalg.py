"""Exact dense linear algebra over a prime field F_p.

Reduced row echelon form, rank, nullspace, and an incremental rank oracle
used for row-space membership tests.  Two storage backends sit behind the
same oracle interface: bit-packed integer rows for p = 2 (XOR elimination,
64+ columns per machine word via Python ints) and numpy int64 rows for odd
p.  All output is deterministic: pivots are chosen scanning columns left to
right, rows top to bottom.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np


def is_prime(p: int) -> bool:
    """Deterministic trial-division primality check (intended range p < 2^31)."""
    if p < 2:
        return False
    for small in (2, 3):
        if p % small == 0:
            return p == small
    d = 5
    while d * d <= p:
        if p % d == 0 or p % (d + 2) == 0:
            return False
        d += 6
    return True


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p with canonical residues in [0, p)."""

    p: int

    def __post_init__(self):
        if not (2 <= self.p < 2**31):
            raise ValueError(f"modulus {self.p} out of supported range [2, 2^31)")
        if not is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")

    def reduce(self, x: int) -> int:
        return x % self.p

    def inv(self, x: int) -> int:
        x %= self.p
        if x == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(x, self.p - 2, self.p)

    def neg(self, x: int) -> int:
        return (-x) % self.p


class FieldMatrix:
    """Dense row-major matrix over F_p.  Immutable after construction."""

    __slots__ = ("field", "rows", "cols", "_a")

    def __init__(self, field: PrimeField, data, cols: Optional[int] = None):
        self.field = field
        a = np.array(data, dtype=np.int64)
        if a.size == 0:
            nrows = len(data) if hasattr(data, "__len__") else 0
            a = np.zeros((nrows, cols or 0), dtype=np.int64)
        if a.ndim != 2:
            raise ValueError("matrix data must be two-dimensional")
        self._a = np.mod(a, field.p)
        self._a.setflags(write=False)
        self.rows, self.cols = self._a.shape

    @property
    def array(self) -> np.ndarray:
        return self._a

    def row(self, i: int):
        return self._a[i]

    def __eq__(self, other):
        return (
            isinstance(other, FieldMatrix)
            and self.field.p == other.field.p
            and self._a.shape == other._a.shape
            and bool(np.array_equal(self._a, other._a))
        )

    def __repr__(self):
        return f"FieldMatrix(p={self.field.p}, {self.rows}x{self.cols})"


def _rref_array(a: np.ndarray, p: int, track_dependents: bool = False):
    """In-place RREF of ``a`` mod p.

    Returns (rank, pivot_cols, pivot_src_rows, dependents).  ``pivot_src_rows``
    gives the original row index that supplied each pivot; ``dependents`` maps
    pivot column -> number of other rows reduced against it (only filled when
    ``track_dependents``).
    """
    rows, cols = a.shape
    pivot_cols: list[int] = []
    pivot_src_row: list[int] = []
    dependents: dict[int, int] = {}
    orig = list(range(rows))
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        col = a[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
            orig[r], orig[piv] = orig[piv], orig[r]
        inv = pow(int(a[r, c]), p - 2, p)
        if inv != 1:
            a[r] = (a[r] * inv) % p
        colvals = a[:, c].copy()
        colvals[r] = 0
        touched = np.nonzero(colvals)[0]
        if touched.size:
            a[touched] = (a[touched] - np.outer(colvals[touched], a[r])) % p
        if track_dependents:
            dependents[c] = int(touched.size)
        pivot_cols.append(c)
        pivot_src_row.append(orig[r])
        r += 1
    return r, pivot_cols, pivot_src_row, dependents


def rref(m: FieldMatrix):
    """Reduced row echelon form.

    Returns (R, rank, pivot_cols) where R is the unique RREF of ``m``.
    """
    a = m.array.copy()
    rank, pivot_cols, _, _ = _rref_array(a, m.field.p)
    return FieldMatrix(m.field, a, cols=m.cols), rank, pivot_cols


def nullspace_basis(m: FieldMatrix) -> list[tuple[int, ...]]:
    """Canonical basis of {v : Mv = 0}.

    One basis vector per free column; the free column's entry is 1 and the
    pivot columns carry the negated RREF entries.
    """
    a = m.array.copy()
    rank, pivot_cols, _, _ = _rref_array(a, m.field.p)
    p = m.field.p
    pivot_set = set(pivot_cols)
    basis = []
    for free in range(m.cols):
        if free in pivot_set:
            continue
        v = [0] * m.cols
        v[free] = 1
        for i, pc in enumerate(pivot_cols):
            v[pc] = (-int(a[i, free])) % p
        basis.append(tuple(v))
    return basis


def solve(m: FieldMatrix, rhs: Sequence[int]) -> Optional[list[int]]:
    """One solution of Mx = rhs over F_p, or None if inconsistent."""
    p = m.field.p
    aug = np.concatenate(
        [m.array, np.mod(np.array(rhs, dtype=np.int64), p).reshape(-1, 1)], axis=1
    )
    rank, pivot_cols, _, _ = _rref_array(aug, p)
    if m.cols in pivot_cols:
        return None
    x = [0] * m.cols
    for i, pc in enumerate(pivot_cols):
        x[pc] = int(aug[i, m.cols])
    return x


class _BitRankOracle:
    """GF(2) backend: a row is a Python int, bit i = column i."""

    __slots__ = ("cols", "pivots", "pivot_mask", "dependents")

    def __init__(self, cols: int):
        self.cols = cols
        self.pivots: dict[int, int] = {}
        self.pivot_mask = 0
        self.dependents: dict[int, int] = {}

    def _reduce(self, row: int, count: bool = False) -> int:
        pivots = self.pivots
        deps = self.dependents
        while True:
            t = row & self.pivot_mask
            if not t:
                return row
            c = (t & -t).bit_length() - 1
            row ^= pivots[c]
            if count:
                deps[c] = deps.get(c, 0) + 1

    def absorb(self, row: int) -> Optional[int]:
        res = self._reduce(row, count=True)
        if res == 0:
            return None
        c = (res & -res).bit_length() - 1
        bit = 1 << c
        for pc, prow in self.pivots.items():
            if prow & bit:
                self.pivots[pc] = prow ^ res
        self.pivots[c] = res
        self.pivot_mask |= bit
        self.dependents.setdefault(c, 0)
        return c

    def member(self, row: int) -> bool:
        return self._reduce(row) == 0

    @property
    def rank(self) -> int:
        return len(self.pivots)


class _ArrRankOracle:
    """Odd-p backend: numpy int64 rows, normalized lead 1, kept reduced."""

    __slots__ = ("cols", "p", "pivots", "dependents")

    def __init__(self, cols: int, p: int):
        self.cols = cols
        self.p = p
        self.pivots: dict[int, np.ndarray] = {}
        self.dependents: dict[int, int] = {}

    def _reduce(self, row: np.ndarray, count: bool = False) -> np.ndarray:
        p = self.p
        for c in sorted(self.pivots):
            v = int(row[c])
            if v:
                row = (row - v * self.pivots[c]) % p
                if count:
                    self.dependents[c] = self.dependents.get(c, 0) + 1
        return row

    def absorb(self, row: np.ndarray) -> Optional[int]:
        res = self._reduce(np.mod(row.astype(np.int64), self.p), count=True)
        nz = np.nonzero(res)[0]
        if nz.size == 0:
            return None
        c = int(nz[0])
        inv = pow(int(res[c]), self.p - 2, self.p)
        if inv != 1:
            res = (res * inv) % self.p
        for pc, prow in self.pivots.items():
            v = int(prow[c])
            if v:
                self.pivots[pc] = (prow - v * res) % self.p
        self.pivots[c] = res
        self.dependents.setdefault(c, 0)
        return c

    def member(self, row: np.ndarray) -> bool:
        res = self._reduce(np.mod(row.astype(np.int64), self.p))
        return not np.any(res)

    @property
    def rank(self) -> int:
        return len(self.pivots)


class RankOracle:
    """Incremental row-space oracle over F_p.

    Stored rows are maintained in reduced echelon form: each has a leading 1
    in a distinct pivot column and zeros in the other pivot columns.
    ``absorb`` grows the span (returns True iff rank grew); ``member`` is a
    read-only span test.  Final rank equals batch-RREF rank regardless of
    absorption order.
    """

    def __init__(self, field: PrimeField, cols: int):
        self.field = field
        self.cols = cols
        if field.p == 2:
            self._impl = _BitRankOracle(cols)
        else:
            self._impl = _ArrRankOracle(cols, field.p)
        self._pivot_owner: dict[int, object] = {}

    def _pack(self, row):
        if self.field.p == 2:
            if isinstance(row, int):
                return row
            if len(row) != self.cols:
                raise ValueError(f"row length {len(row)} != cols {self.cols}")
            mask = 0
            for i, v in enumerate(row):
                if v % 2:
                    mask |= 1 << i
            return mask
        if isinstance(row, np.ndarray):
            if row.shape != (self.cols,):
                raise ValueError(f"row length {row.shape} != cols {self.cols}")
            return row
        if len(row) != self.cols:
            raise ValueError(f"row length {len(row)} != cols {self.cols}")
        return np.array(row, dtype=np.int64)

    def absorb(self, row, label=None) -> bool:
        new_pivot = self._impl.absorb(self._pack(row))
        if new_pivot is not None and label is not None:
            self._pivot_owner[new_pivot] = label
        return new_pivot is not None

    def member(self, row) -> bool:
        return self._impl.member(self._pack(row))

    @property
    def rank(self) -> int:
        return self._impl.rank

    @property
    def pivot_dependents(self) -> dict[int, int]:
        """pivot column -> number of rows reduced against it so far."""
        return dict(self._impl.dependents)

    @property
    def pivot_owner(self) -> dict[int, object]:
        """pivot column -> label of the absorbed row that created it."""
        return dict(self._pivot_owner)

    def pivot_columns(self) -> list[int]:
        return sorted(self._impl.pivots)

    def residue(self, row) -> list[int]:
        """The fully reduced remainder of ``row`` against the stored pivots.

        Zero iff the row is a member.  Entry f of the residue equals the
        inner product of ``row`` with the canonical nullspace vector of free
        column f, which makes witness extraction a lookup.
        """
        packed = self._pack(row)
        if self.field.p == 2:
            res = self._impl._reduce(packed)
            return [(res >> i) & 1 for i in range(self.cols)]
        res = self._impl._reduce(np.mod(packed.astype(np.int64), self.field.p))
        return [int(v) for v in res]

    def nullspace_vector(self, free_col: int) -> list[int]:
        """Canonical nullspace vector for one free (non-pivot) column."""
        if free_col in self._impl.pivots:
            raise ValueError(f"column {free_col} is a pivot column")
        p = self.field.p
        v = [0] * self.cols
        v[free_col] = 1
        if p == 2:
            for pc, prow in self._impl.pivots.items():
                if (prow >> free_col) & 1:
                    v[pc] = 1
        else:
            for pc, prow in self._impl.pivots.items():
                v[pc] = (-int(prow[free_col])) % p
        return v

    def nullspace(self) -> list[tuple[int, ...]]:
        """Canonical nullspace basis (one vector per free column)."""
        pivot_set = set(self._impl.pivots)
        return [
            tuple(self.nullspace_vector(f))
            for f in range(self.cols)
            if f not in pivot_set
        ]

    # -- fast batch constructors ----------------------------------------
    @classmethod
    def from_packed_rows(cls, field: PrimeField, cols: int, rows: Iterable[int],
                         row_labels: Optional[Sequence] = None):
        """Build a GF(2) oracle by absorbing packed integer rows."""
        if field.p != 2:
            raise ValueError("packed rows are a GF(2) representation")
        o = cls(field, cols)
        impl = o._impl
        for idx, r in enumerate(rows):
            new_pivot = impl.absorb(r)
            if new_pivot is not None and row_labels is not None:
                o._pivot_owner[new_pivot] = row_labels[idx]
        return o

    @classmethod
    def from_array(cls, field: PrimeField, a: np.ndarray,
                   row_labels: Optional[Sequence] = None):
        """Build an oracle from a dense int array using batch elimination."""
        o = cls(field, a.shape[1])
        work = np.mod(np.asarray(a, dtype=np.int64), field.p).copy()
        rank, pivot_cols, pivot_src, dependents = _rref_array(
            work, field.p, track_dependents=True
        )
        impl = o._impl
        if field.p == 2:
            for i, c in enumerate(pivot_cols):
                mask = 0
                for j in np.nonzero(work[i])[0]:
                    mask |= 1 << int(j)
                impl.pivots[c] = mask
                impl.pivot_mask |= 1 << c
        else:
            for i, c in enumerate(pivot_cols):
                impl.pivots[c] = work[i].copy()
        impl.dependents = dependents
        if row_labels is not None:
            o._pivot_owner = {
                c: row_labels[src] for c, src in zip(pivot_cols, pivot_src)
            }
        return o
