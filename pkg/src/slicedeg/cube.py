"""Boolean cube points, weight slices, and multilinear polynomials over F_p.

A monomial is represented by its variable bitmask (bit i = variable x_{i+1});
a polynomial is a canonical map monomial-mask -> nonzero coefficient.  Because
multilinear representations of functions on {0,1}^n are unique, two equal
functions built multilinearly always have identical term maps.

Symmetric polynomials admit a compact second representation: a coefficient
vector over the elementary symmetric basis (P = sum_j c_j e_j), which doubles
as a weight -> value certificate table.  Constructors that produce symmetric
polynomials attach this certificate so evaluation and slice statistics stay
exact at variable counts where term maps cannot be materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterator, Optional, Sequence

import numpy as np

from .config import DEFAULT_CAPS, Caps, CapExceeded, check_cap
from .linalg import PrimeField

Mask = int  # monomial / point bitmask


def popcount(x: int) -> int:
    return x.bit_count()


@dataclass(frozen=True)
class CubePoint:
    """A point of {0,1}^n as an n-bit mask."""

    n: int
    bits: Mask

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bits 0x{self.bits:x} out of range for n={self.n}")

    @property
    def weight(self) -> int:
        return popcount(self.bits)


def slice_masks(n: int, k: int) -> Iterator[Mask]:
    """All weight-k masks of n bits in increasing numeric order (Gosper's hack)."""
    if not (0 <= k <= n):
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if k == 0:
        yield 0
        return
    m = (1 << k) - 1
    top = 1 << n
    while m < top:
        yield m
        c = m & -m
        r = m + c
        m = (((r ^ m) >> 2) // c) | r


def enumerate_slice(n: int, k: int, caps: Caps = DEFAULT_CAPS) -> Iterator[CubePoint]:
    """Iterate {0,1}^n_k in canonical (increasing bitmask) order."""
    if n > 63:
        raise CapExceeded(f"slice enumeration limited to n <= 63, got n={n}")
    check_cap(comb(n, k), caps.max_slice_points, f"slice size C({n},{k})")
    for m in slice_masks(n, k):
        yield CubePoint(n, m)


def monomials_upto(n: int, d: int, caps: Caps = DEFAULT_CAPS) -> list[Mask]:
    """All monomial masks of degree <= d in canonical order.

    Canonical order is graded by degree, ties broken by numeric mask value;
    this fixes the column order of every evaluation matrix.
    """
    total = sum(comb(n, j) for j in range(min(d, n) + 1))
    check_cap(total, caps.max_cols, f"monomial count N_{d}")
    out: list[Mask] = []
    for j in range(min(d, n) + 1):
        out.extend(slice_masks(n, j))
    return out


def n_monomials(n: int, d: int) -> int:
    """N_D = sum_{j<=D} C(n,j)."""
    return sum(comb(n, j) for j in range(min(d, n) + 1))


# ---------------------------------------------------------------------------
# elementary-symmetric basis helpers
# ---------------------------------------------------------------------------

def weight_values_from_ecoeffs(n: int, coeffs: Sequence[int],
                               p: Optional[int] = None) -> list[int]:
    """Value at each weight 0..n of sum_j coeffs[j] * e_j (mod p if given)."""
    vals = []
    for w in range(n + 1):
        v = sum(c * comb(w, j) for j, c in enumerate(coeffs) if c)
        vals.append(v % p if p else v)
    return vals


def ecoeffs_from_weight_values(values: Sequence[int], p: int) -> list[int]:
    """Coefficients over the e_j basis matching a weight->value table mod p.

    The evaluation matrix [C(w,j)] is unitriangular, so forward substitution
    solves exactly; every symmetric function has a unique such expansion.
    """
    n = len(values) - 1
    coeffs = [0] * (n + 1)
    for w in range(n + 1):
        acc = sum(coeffs[j] * comb(w, j) for j in range(w)) % p
        coeffs[w] = (values[w] - acc) % p
    return coeffs


@dataclass(frozen=True)
class SliceStats:
    """Nonvanishing count and fraction of a polynomial on one weight slice."""

    m: int
    nonzero_count: int
    slice_size: int

    @property
    def psi(self) -> Fraction:
        if self.slice_size == 0:
            return Fraction(0)
        return Fraction(self.nonzero_count, self.slice_size)


class MultilinearPoly:
    """Sparse multilinear polynomial over F_p on n Boolean variables.

    ``terms`` maps monomial masks to nonzero residues.  A certified-symmetric
    polynomial additionally (or, above the materialization cap, exclusively)
    carries ``sym``: its coefficients over the elementary symmetric basis.
    """

    __slots__ = ("n", "field", "_terms", "_sym")

    def __init__(self, n: int, field: PrimeField,
                 terms: Optional[dict] = None,
                 sym: Optional[tuple] = None):
        if n < 1:
            raise ValueError("n must be positive")
        if terms is None and sym is None:
            raise ValueError("need a term map or symmetric coefficients")
        self.n = n
        self.field = field
        self._terms = terms
        self._sym = sym

    # -- constructors ---------------------------------------------------
    @classmethod
    def from_terms(cls, n: int, field: PrimeField, terms) -> "MultilinearPoly":
        p = field.p
        clean: dict[Mask, int] = {}
        for m, c in dict(terms).items():
            if m < 0 or m >> n:
                raise ValueError(f"monomial mask 0x{m:x} out of range for n={n}")
            c %= p
            if c:
                clean[m] = c
        return cls(n, field, terms=clean)

    @classmethod
    def zero(cls, n: int, field: PrimeField) -> "MultilinearPoly":
        return cls(n, field, terms={}, sym=())

    @classmethod
    def constant(cls, n: int, field: PrimeField, c: int) -> "MultilinearPoly":
        c %= field.p
        if c == 0:
            return cls.zero(n, field)
        return cls(n, field, terms={0: c}, sym=(c,))

    @classmethod
    def from_sym(cls, n: int, field: PrimeField, ecoeffs: Sequence[int],
                 caps: Caps = DEFAULT_CAPS) -> "MultilinearPoly":
        """Symmetric polynomial sum_j ecoeffs[j] * e_j.

        Term maps are materialized only when they fit under the cap; the
        symmetric certificate always stays attached.
        """
        p = field.p
        coeffs = [c % p for c in ecoeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) > n + 1:
            raise ValueError("ecoeffs longer than n+1")
        sym = tuple(coeffs)
        total = sum(comb(n, j) for j, c in enumerate(coeffs) if c)
        terms = None
        if total <= min(caps.max_terms, 200_000):
            terms = {}
            for j, c in enumerate(coeffs):
                if c:
                    for m in slice_masks(n, j):
                        terms[m] = c
        return cls(n, field, terms=terms, sym=sym)

    # -- basic structure --------------------------------------------------
    @property
    def is_zero(self) -> bool:
        if self._sym is not None:
            return len(self._sym) == 0
        return len(self._terms) == 0

    @property
    def degree(self) -> int:
        """Max term degree; 0 for the zero polynomial by convention."""
        if self._sym is not None:
            return len(self._sym) - 1 if self._sym else 0
        if not self._terms:
            return 0
        return max(popcount(m) for m in self._terms)

    @property
    def sym_coeffs(self) -> Optional[tuple]:
        return self._sym

    @property
    def is_symmetric_certified(self) -> bool:
        return self._sym is not None

    def terms_map(self, caps: Caps = DEFAULT_CAPS) -> dict:
        """The canonical term map, materializing a lazy symmetric form."""
        if self._terms is None:
            total = sum(comb(self.n, j) for j, c in enumerate(self._sym) if c)
            check_cap(total, caps.max_terms, "materialized term count")
            terms = {}
            for j, c in enumerate(self._sym):
                if c:
                    for m in slice_masks(self.n, j):
                        terms[m] = c
            self._terms = terms
        return self._terms

    def sorted_terms(self, caps: Caps = DEFAULT_CAPS) -> list[tuple[Mask, int]]:
        """Terms in canonical order: graded by degree, then numeric mask."""
        return sorted(self.terms_map(caps).items(),
                      key=lambda mc: (popcount(mc[0]), mc[0]))

    # -- evaluation -------------------------------------------------------
    def weight_value(self, w: int) -> int:
        """Value on any point of weight w (symmetric polynomials only)."""
        if self._sym is None:
            raise ValueError("no symmetric certificate attached")
        return sum(c * comb(w, j) for j, c in enumerate(self._sym) if c) % self.field.p

    def weight_values(self) -> Optional[tuple]:
        """Weight -> value table when certified symmetric, else None."""
        if self._sym is None:
            return None
        return tuple(self.weight_value(w) for w in range(self.n + 1))

    def evaluate(self, point) -> int:
        """Value at a point given as a CubePoint or a raw bitmask."""
        mask = point.bits if isinstance(point, CubePoint) else point
        if isinstance(point, CubePoint) and point.n != self.n:
            raise ValueError(f"point arity {point.n} != poly arity {self.n}")
        if self._terms is None:
            return self.weight_value(popcount(mask))
        acc = 0
        for m, c in self._terms.items():
            if m & ~mask == 0:
                acc += c
        return acc % self.field.p

    def evaluate_many(self, masks: Sequence[int]) -> np.ndarray:
        """Vectorized evaluation at many point masks (n <= 63)."""
        if self._terms is None and self._sym is not None:
            table = np.array(self.weight_values(), dtype=np.int64)
            weights = np.array([popcount(m) for m in masks], dtype=np.int64)
            return table[weights]
        terms = self.terms_map()
        if not terms:
            return np.zeros(len(masks), dtype=np.int64)
        monos = np.array(list(terms.keys()), dtype=np.uint64)
        coeffs = np.array(list(terms.values()), dtype=np.int64)
        pts = np.array(masks, dtype=np.uint64)
        out = np.empty(len(masks), dtype=np.int64)
        # chunk points so the bool matrix stays small
        chunk = max(1, 8_000_000 // max(1, len(terms)))
        for lo in range(0, len(masks), chunk):
            sub = pts[lo:lo + chunk, None]
            hit = (monos[None, :] & ~sub) == 0
            out[lo:lo + chunk] = hit @ coeffs
        return np.mod(out, self.field.p)

    # -- equality ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, MultilinearPoly):
            return NotImplemented
        if self.n != other.n or self.field.p != other.field.p:
            return False
        if self._sym is not None and other._sym is not None:
            return self._sym == other._sym
        return self.terms_map() == other.terms_map()

    def __repr__(self):
        kind = "sym" if self._sym is not None else "terms"
        size = len(self._sym or ()) if self._terms is None else len(self._terms)
        return f"MultilinearPoly(n={self.n}, p={self.field.p}, {kind}:{size})"


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def eval_poly(poly: MultilinearPoly, a: CubePoint) -> int:
    """P(a) = sum of coefficients of monomials supported inside a."""
    return poly.evaluate(a)


def multilinearize_product(P: MultilinearPoly, Q: MultilinearPoly,
                           caps: Caps = DEFAULT_CAPS) -> MultilinearPoly:
    """The unique multilinear polynomial equal to P*Q pointwise on {0,1}^n.

    Replacing x_i^r by x_i is realized by accumulating products on the union
    of the factor masks.
    """
    if P.n != Q.n or P.field.p != Q.field.p:
        raise ValueError("mismatched arity or field")
    p = P.field.p
    if P.is_symmetric_certified and Q.is_symmetric_certified:
        vals = [(a * b) % p for a, b in zip(P.weight_values(), Q.weight_values())]
        return MultilinearPoly.from_sym(
            P.n, P.field, ecoeffs_from_weight_values(vals, p), caps=caps)
    tp, tq = P.terms_map(caps), Q.terms_map(caps)
    if len(tp) * len(tq) > 10 * caps.max_terms:
        raise CapExceeded(
            f"product of {len(tp)} x {len(tq)} terms exceeds work cap")
    acc: dict[Mask, int] = {}
    for m1, c1 in tp.items():
        for m2, c2 in tq.items():
            m = m1 | m2
            v = (acc.get(m, 0) + c1 * c2) % p
            if v:
                acc[m] = v
            elif m in acc:
                del acc[m]
    check_cap(len(acc), caps.max_terms, "product term count")
    return MultilinearPoly(P.n, P.field, terms=acc)


# substitution targets: constant 0 / constant 1 / variable j / negated variable j
ZERO = "zero"
ONE = "one"
VAR = "var"
NVAR = "nvar"


@dataclass(frozen=True)
class SubstitutionMap:
    """Per-source-variable images into an n_out-variable polynomial ring.

    targets[i] is one of ("zero", None), ("one", None), ("var", j),
    ("nvar", j) describing the image of source variable i.
    """

    n_in: int
    n_out: int
    targets: tuple

    def __post_init__(self):
        if len(self.targets) != self.n_in:
            raise ValueError("every source variable needs exactly one image")
        for kind, j in self.targets:
            if kind in (VAR, NVAR):
                if not (0 <= j < self.n_out):
                    raise ValueError(f"target index {j} out of range")
            elif kind not in (ZERO, ONE):
                raise ValueError(f"unknown target kind {kind!r}")

    @classmethod
    def identity(cls, n: int) -> "SubstitutionMap":
        return cls(n, n, tuple((VAR, i) for i in range(n)))

    @classmethod
    def negation(cls, n: int) -> "SubstitutionMap":
        return cls(n, n, tuple((NVAR, i) for i in range(n)))

    @classmethod
    def permutation(cls, perm: Sequence[int]) -> "SubstitutionMap":
        n = len(perm)
        return cls(n, n, tuple((VAR, perm[i]) for i in range(n)))


def apply_substitution(P: MultilinearPoly, sub: SubstitutionMap,
                       caps: Caps = DEFAULT_CAPS) -> MultilinearPoly:
    """Compose P with affine single-variable images; degree never increases."""
    if sub.n_in != P.n:
        raise ValueError(f"substitution covers {sub.n_in} vars, poly has {P.n}")
    p = P.field.p
    out_field = P.field
    acc: dict[Mask, int] = {}
    for mask, coeff in P.terms_map(caps).items():
        # expand prod of images as a small polynomial over the target vars
        cur: dict[Mask, int] = {0: coeff}
        dead = False
        m = mask
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            kind, j = sub.targets[i]
            if kind == ZERO:
                dead = True
                break
            if kind == ONE:
                continue
            if kind == VAR:
                bit = 1 << j
                nxt = {}
                for mm, cc in cur.items():
                    key = mm | bit
                    nxt[key] = (nxt.get(key, 0) + cc) % p
                cur = {mm: cc for mm, cc in nxt.items() if cc}
            else:  # NVAR: multiply by (1 - y_j)
                nxt: dict[Mask, int] = {}
                bit = 1 << j
                for mm, cc in cur.items():
                    nxt[mm] = (nxt.get(mm, 0) + cc) % p
                    key = mm | bit
                    nxt[key] = (nxt.get(key, 0) - cc) % p
                cur = {mm: cc for mm, cc in nxt.items() if cc}
            if len(cur) > caps.max_terms:
                raise CapExceeded("substitution expansion exceeds term cap")
        if dead:
            continue
        for mm, cc in cur.items():
            v = (acc.get(mm, 0) + cc) % p
            if v:
                acc[mm] = v
            elif mm in acc:
                del acc[mm]
        if len(acc) > caps.max_terms:
            raise CapExceeded("substitution result exceeds term cap")
    return MultilinearPoly(sub.n_out, out_field, terms=acc)


def slice_stats(P: MultilinearPoly, m: int, caps: Caps = DEFAULT_CAPS) -> SliceStats:
    """Exact |NZ_m(P)| and psi_m(P) on the weight-m slice."""
    size = comb(P.n, m)
    if P.is_symmetric_certified:
        nz = size if P.weight_value(m) != 0 else 0
        return SliceStats(m=m, nonzero_count=nz, slice_size=size)
    if P.n > 63:
        raise CapExceeded("slice enumeration needs n <= 63 or a certificate")
    check_cap(size, caps.max_slice_points, f"slice size C({P.n},{m})")
    masks = list(slice_masks(P.n, m))
    vals = P.evaluate_many(masks)
    return SliceStats(m=m, nonzero_count=int(np.count_nonzero(vals)),
                      slice_size=size)


def symmetric_value_table(P: MultilinearPoly,
                          caps: Caps = DEFAULT_CAPS) -> Optional[tuple]:
    """Weight -> value table if P is constant on every slice, else None.

    O(n) for certificate-carrying polynomials; otherwise verified by full
    slice enumeration under the cap.
    """
    if P.is_symmetric_certified:
        return P.weight_values()
    if P.n > 63:
        raise CapExceeded("certificate-free symmetry check needs n <= 63")
    check_cap(1 << P.n, caps.max_slice_points, "full-cube enumeration")
    table = []
    for w in range(P.n + 1):
        masks = list(slice_masks(P.n, w))
        vals = P.evaluate_many(masks)
        first = int(vals[0])
        if np.any(vals != first):
            return None
        table.append(first)
    return tuple(table)


def elementary_symmetric(n: int, j: int, field: PrimeField,
                         caps: Caps = DEFAULT_CAPS) -> MultilinearPoly:
    """e_j on n variables; evaluates to C(w, j) mod p at weight-w points."""
    if not (0 <= j <= n):
        raise ValueError(f"need 0 <= j <= n, got j={j}")
    coeffs = [0] * j + [1]
    return MultilinearPoly.from_sym(n, field, coeffs, caps=caps)


# ---------------------------------------------------------------------------
# JSON polynomial format
# ---------------------------------------------------------------------------

def poly_to_json_dict(P: MultilinearPoly, caps: Caps = DEFAULT_CAPS) -> dict:
    """{"p", "n", "terms": [{"mask": hex, "c": coeff}, ...]} in canonical order."""
    return {
        "p": P.field.p,
        "n": P.n,
        "terms": [{"mask": hex(m), "c": c} for m, c in P.sorted_terms(caps)],
    }


def poly_from_json_dict(d: dict) -> MultilinearPoly:
    field = PrimeField(int(d["p"]))
    n = int(d["n"])
    terms = {}
    for t in d["terms"]:
        m = int(t["mask"], 16)
        c = int(t["c"])
        if not (1 <= c < field.p):
            raise ValueError(f"coefficient {c} outside [1, p)")
        terms[m] = c
    return MultilinearPoly.from_terms(n, field, terms)
