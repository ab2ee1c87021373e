"""Degree-D vanishing ideals, closures of point sets, and ideal sampling.

The degree-D ideal of a point set E is the nullspace of its monomial
evaluation matrix; a point lies in the degree-D closure of E exactly when
its evaluation row lies in the row space of that matrix.  Membership is
answered by one frozen RankOracle per (E, D), one row reduction per
candidate, instead of evaluating a possibly huge ideal basis.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_CAPS, Caps, check_cap
from .cube import (CubePoint, Mask, MultilinearPoly, monomials_upto,
                   n_monomials, popcount, slice_masks)
from .linalg import PrimeField, RankOracle


def _as_masks(points: Iterable) -> list[Mask]:
    out = []
    for a in points:
        out.append(a.bits if isinstance(a, CubePoint) else int(a))
    return out


def evaluation_bool_matrix(monomials: Sequence[Mask],
                           point_masks: Sequence[Mask]) -> np.ndarray:
    """0/1 matrix: entry (i, j) = 1 iff monomial j is supported inside point i."""
    monos = np.array(monomials, dtype=np.uint64)
    out = np.empty((len(point_masks), len(monomials)), dtype=np.uint8)
    if len(point_masks) == 0 or len(monomials) == 0:
        return out
    pts = np.array(point_masks, dtype=np.uint64)
    chunk = max(1, 40_000_000 // max(1, len(monomials)))
    for lo in range(0, len(pts), chunk):
        sub = pts[lo:lo + chunk]
        out[lo:lo + chunk] = ((monos[None, :] & ~sub[:, None]) == 0)
    return out


def pack_bool_rows(rows: np.ndarray) -> list[int]:
    """Pack 0/1 rows into Python ints, bit j = column j."""
    packed = np.packbits(rows, axis=1, bitorder="little")
    return [int.from_bytes(r.tobytes(), "little") for r in packed]


class EvaluationMatrix:
    """Evaluation rows of all monomials of degree <= D at a point set E.

    Column order is the canonical monomial order; row i belongs to the i-th
    point of E.
    """

    def __init__(self, field: PrimeField, n: int, degree: int,
                 points: Iterable, caps: Caps = DEFAULT_CAPS):
        self.field = field
        self.n = n
        self.degree = degree
        self.points = _as_masks(points)
        check_cap(len(self.points), caps.max_rows, "evaluation matrix rows")
        self.monomials = monomials_upto(n, degree, caps)
        self.caps = caps

    @property
    def n_d(self) -> int:
        return len(self.monomials)

    def bool_matrix(self) -> np.ndarray:
        return evaluation_bool_matrix(self.monomials, self.points)

    def point_row_bool(self, mask: Mask) -> np.ndarray:
        return evaluation_bool_matrix(self.monomials, [mask])[0]

    def oracle(self, labels: bool = False) -> RankOracle:
        """Frozen rank oracle on this matrix's rows."""
        rows = self.bool_matrix()
        row_labels = self.points if labels else None
        if self.field.p == 2:
            return RankOracle.from_packed_rows(
                self.field, self.n_d, pack_bool_rows(rows), row_labels)
        return RankOracle.from_array(self.field, rows, row_labels)

    def row_for_oracle(self, mask: Mask):
        row = self.point_row_bool(mask)
        if self.field.p == 2:
            return pack_bool_rows(row.reshape(1, -1))[0]
        return row.astype(np.int64)


def batch_member(oracle: RankOracle, bool_rows: np.ndarray) -> list[bool]:
    """Row-space membership for many candidate rows at once.

    For odd p the candidate block is eliminated against the stored pivots
    with vectorized updates; for p = 2 the packed-int reduction is already
    cheap and is used row by row.
    """
    field = oracle.field
    if field.p == 2:
        packed = pack_bool_rows(bool_rows)
        return [oracle._impl.member(r) for r in packed]
    p = field.p
    work = bool_rows.astype(np.int64).copy()
    for c in sorted(oracle._impl.pivots):
        prow = oracle._impl.pivots[c]
        vals = work[:, c]
        nz = np.nonzero(vals)[0]
        if nz.size:
            work[nz] = (work[nz] - np.outer(vals[nz], prow)) % p
    return [not np.any(row) for row in work]


def _polys_from_coeff_vectors(vectors, monomials, n, field) -> list[MultilinearPoly]:
    out = []
    for v in vectors:
        terms = {monomials[j]: int(c) for j, c in enumerate(v) if c}
        out.append(MultilinearPoly.from_terms(n, field, terms))
    return out


def ideal_basis(field: PrimeField, n: int, points: Iterable, degree: int,
                caps: Caps = DEFAULT_CAPS) -> list[MultilinearPoly]:
    """Basis of the degree-D vanishing ideal of E (size N_D - rank)."""
    ev = EvaluationMatrix(field, n, degree, points, caps)
    oracle = ev.oracle()
    basis = _polys_from_coeff_vectors(
        oracle.nullspace(), ev.monomials, n, field)
    if __debug__ and basis and ev.points:
        # sampled vanishing check; full verification is quadratic
        rng = random.Random(0xBA5E5)
        pairs = [(rng.choice(ev.points), rng.choice(basis))
                 for _ in range(min(1000, len(ev.points) * len(basis)))]
        assert all(poly.evaluate(pt) == 0 for pt, poly in pairs)
    return basis


@dataclass(frozen=True)
class Candidates:
    """Explicit candidate set: the full cube or a union of weight slices."""

    n: int
    kind: str  # "full" | "slices"
    weights: tuple = ()

    @classmethod
    def full_cube(cls, n: int) -> "Candidates":
        return cls(n, "full")

    @classmethod
    def slices(cls, n: int, weights: Sequence[int]) -> "Candidates":
        return cls(n, "slices", tuple(sorted(set(weights))))

    def masks(self, caps: Caps = DEFAULT_CAPS) -> list[Mask]:
        if self.kind == "full":
            check_cap(1 << self.n, caps.max_slice_points, "full-cube candidates")
            return list(range(1 << self.n))
        total = sum(comb(self.n, w) for w in self.weights)
        check_cap(total, caps.max_slice_points, "candidate slice points")
        out: list[Mask] = []
        for w in self.weights:
            out.extend(slice_masks(self.n, w))
        return out

    def describe(self) -> dict:
        if self.kind == "full":
            return {"kind": "full", "n": self.n}
        return {"kind": "slices", "n": self.n, "weights": list(self.weights)}


@dataclass
class ClosureResult:
    """Rank data of E's evaluation matrix plus closure membership."""

    n: int
    p: int
    degree: int
    e_size: int
    rank: int
    n_d: int
    candidates: Candidates
    member_masks: list
    closure_count: int

    @property
    def per_slice_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for m in self.member_masks:
            w = popcount(m)
            counts[w] = counts.get(w, 0) + 1
        return counts

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "D": self.degree,
            "E_size": self.e_size,
            "rank": self.rank,
            "N_D": self.n_d,
            "candidates": self.candidates.describe(),
            "closure_count": self.closure_count,
            "per_slice_counts": {str(w): c
                                 for w, c in sorted(self.per_slice_counts.items())},
        }


def closure(field: PrimeField, n: int, points: Iterable, degree: int,
            candidates: Candidates, caps: Caps = DEFAULT_CAPS) -> ClosureResult:
    """cl_D(E) restricted to an explicit candidate set.

    A candidate is in the closure iff its evaluation row reduces to zero
    against the frozen row space of E's evaluation matrix.
    """
    ev = EvaluationMatrix(field, n, degree, points, caps)
    oracle = ev.oracle()
    cand_masks = candidates.masks(caps)
    members = []
    if cand_masks:
        rows = evaluation_bool_matrix(ev.monomials, cand_masks)
        flags = batch_member(oracle, rows)
        members = [m for m, ok in zip(cand_masks, flags) if ok]
    return ClosureResult(
        n=n, p=field.p, degree=degree, e_size=len(ev.points),
        rank=oracle.rank, n_d=ev.n_d, candidates=candidates,
        member_masks=members, closure_count=len(members),
    )


def nie_wang_check(field: PrimeField, n: int, points: Iterable, degree: int,
                   caps: Caps = DEFAULT_CAPS):
    """Exact check of |cl_D(E)| / 2^n <= |E| / N_D.

    Returns (lhs, rhs, holds) as exact rationals plus a boolean.
    """
    pts = _as_masks(points)
    res = closure(field, n, pts, degree, Candidates.full_cube(n), caps)
    lhs = Fraction(res.closure_count, 1 << n)
    rhs = Fraction(len(pts), n_monomials(n, degree))
    return lhs, rhs, lhs <= rhs


def hamming_ball(n: int, radius: int, center: Mask = 0) -> list[Mask]:
    """All points within Hamming distance ``radius`` of ``center``."""
    out: list[Mask] = []
    for d in range(radius + 1):
        for m in slice_masks(n, d):
            out.append(m ^ center)
    return out


def ball_fact_check(field: PrimeField, n: int, d: int,
                    caps: Caps = DEFAULT_CAPS) -> bool:
    """True iff no nonzero degree-<=d multilinear polynomial vanishes on a
    radius-d Hamming ball (equivalently, the ball's degree-d ideal is {0})."""
    basis = ideal_basis(field, n, hamming_ball(n, d), d, caps)
    return len(basis) == 0


class IdealSampler:
    """Uniform sampler over the degree-D vanishing ideal of E.

    Emits uniform F_p-combinations of a fixed nullspace basis; the zero
    polynomial appears with probability exactly p^-dim.
    """

    def __init__(self, field: PrimeField, n: int, points: Iterable, degree: int,
                 seed: int, caps: Caps = DEFAULT_CAPS):
        self.field = field
        self.n = n
        self.degree = degree
        ev = EvaluationMatrix(field, n, degree, points, caps)
        self.monomials = ev.monomials
        basis = ev.oracle().nullspace()
        self.basis_matrix = (
            np.array(basis, dtype=np.int64)
            if basis else np.zeros((0, ev.n_d), dtype=np.int64)
        )
        self.rng = random.Random(seed)
        self.caps = caps

    @property
    def dim(self) -> int:
        return self.basis_matrix.shape[0]

    def _coeffs(self) -> np.ndarray:
        return np.array(
            [self.rng.randrange(self.field.p) for _ in range(self.dim)],
            dtype=np.int64,
        )

    def sample_coeff_vector(self) -> np.ndarray:
        """Coefficient vector over the monomial columns of one uniform sample."""
        if self.dim == 0:
            return np.zeros(len(self.monomials), dtype=np.int64)
        return np.mod(self._coeffs() @ self.basis_matrix, self.field.p)

    def sample(self) -> MultilinearPoly:
        vec = self.sample_coeff_vector()
        terms = {self.monomials[j]: int(c) for j, c in enumerate(vec) if c}
        return MultilinearPoly.from_terms(self.n, self.field, terms)

    def sample_values_at(self, mask: Mask, count: int) -> list[int]:
        """Values of ``count`` independent samples at one point (fast path)."""
        row = evaluation_bool_matrix(self.monomials, [mask])[0].astype(np.int64)
        if self.dim == 0:
            return [0] * count
        basis_vals = np.mod(self.basis_matrix @ row, self.field.p)
        out = []
        for _ in range(count):
            out.append(int(np.mod(self._coeffs() @ basis_vals, self.field.p)))
        return out

    def exhaustive_values_at(self, mask: Mask) -> list[int]:
        """Values at one point of every ideal element (all p^dim of them)."""
        check_cap(self.field.p ** self.dim, 10**7, "exhaustive ideal enumeration")
        row = evaluation_bool_matrix(self.monomials, [mask])[0].astype(np.int64)
        basis_vals = np.mod(self.basis_matrix @ row, self.field.p)
        p = self.field.p
        vals = []
        coeffs = [0] * self.dim
        total = p ** self.dim
        for idx in range(total):
            t = idx
            acc = 0
            for bv in basis_vals:
                acc += (t % p) * int(bv)
                t //= p
            vals.append(acc % p)
        return vals


def sample_ideal(field: PrimeField, n: int, points: Iterable, degree: int,
                 seed: int, count: int,
                 caps: Caps = DEFAULT_CAPS) -> list[MultilinearPoly]:
    """``count`` independent uniform elements of the degree-D ideal of E."""
    sampler = IdealSampler(field, n, points, degree, seed, caps)
    return [sampler.sample() for _ in range(count)]
