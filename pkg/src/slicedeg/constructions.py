"""Explicit polynomial constructions paired with exact evaluators.

Everything here is exact where it matters: probability computations on
acceptance paths use big rationals (never floats), weight-window
interpolation is done over the integers via Newton forward differences, and
symmetric constructions carry weight -> value certificates so error sums
stay exact at variable counts far beyond term materialization.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Optional, Sequence

import mpmath as mp

from .config import DEFAULT_CAPS, Caps, CapExceeded, check_cap
from .cube import (CubePoint, Mask, MultilinearPoly, NVAR, ONE, VAR, ZERO,
                   SubstitutionMap, apply_substitution, multilinearize_product,
                   popcount, slice_masks)
from .distinguish import p_adic_part
from .linalg import PrimeField

_DPS = 40

# constants tried, in order, wherever an instance needs "a large enough C";
# the first value passing the instance's exact check is chosen and reported
C_LADDER = (2, 5, 10, 20, 40)


# ---------------------------------------------------------------------------
# single-gap construction from binomial digit periodicity
# ---------------------------------------------------------------------------

def lucas_poly(n: int, i: int, q: int, p: int,
               caps: Caps = DEFAULT_CAPS) -> MultilinearPoly:
    """Degree p^l polynomial vanishing on slice i and nonzero on all of
    slice i+q, where p^l is the largest power of p dividing q.

    The polynomial is e_{p^l} - a, with a the (l+1)-th base-p digit of i;
    its value at weight w is C(w, p^l) - a mod p.
    """
    if i < 0 or q < 1 or i + q > n:
        raise ValueError(f"need 0 <= i and i+q <= n, got i={i}, q={q}, n={n}")
    field = PrimeField(p)
    pl = p_adic_part(q, p)
    digit = (i // pl) % p
    coeffs = [0] * (pl + 1)
    coeffs[0] = (-digit) % p
    coeffs[pl] = 1
    return MultilinearPoly.from_sym(n, field, coeffs, caps=caps)


# ---------------------------------------------------------------------------
# weight-window interpolation over the integers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightWindow:
    """Target values on a contiguous weight interval [lo, hi] of [0, n]."""

    n: int
    lo: int
    hi: int
    values: tuple

    def __post_init__(self):
        if not (0 <= self.lo <= self.hi <= self.n):
            raise ValueError(f"window [{self.lo},{self.hi}] not inside [0,{self.n}]")
        if len(self.values) != self.hi - self.lo + 1:
            raise ValueError("value count must match window length")
        if any(v not in (0, 1) for v in self.values):
            raise ValueError("window targets must be 0/1")

    @property
    def length(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class IntegerSymPoly:
    """A symmetric multilinear polynomial with integer coefficients,
    stored over the elementary symmetric basis."""

    n: int
    ecoeffs: tuple

    @property
    def degree(self) -> int:
        return max((j for j, c in enumerate(self.ecoeffs) if c), default=0)

    def value_at_weight(self, w: int) -> int:
        return sum(c * comb(w, j) for j, c in enumerate(self.ecoeffs) if c)

    def reduce_mod(self, field: PrimeField,
                   caps: Caps = DEFAULT_CAPS) -> MultilinearPoly:
        return MultilinearPoly.from_sym(self.n, field, list(self.ecoeffs),
                                        caps=caps)


def _binom_neg(a: int, m: int) -> int:
    """C(-a, m) over the integers: (-1)^m C(a+m-1, m)."""
    if m < 0:
        return 0
    if m == 0:
        return 1
    if a == 0:
        return 0
    return (-1) ** m * comb(a + m - 1, m)


def interpolate_window_int(window: WeightWindow) -> IntegerSymPoly:
    """Integer-coefficient symmetric polynomial of degree <= |I|-1 matching
    the window targets at every point whose weight lies in I.

    Built from Newton forward differences in the falling basis C(w - lo, j),
    expanded over the elementary symmetric basis by Vandermonde convolution;
    all coefficients stay integers.
    """
    a, vals = window.lo, list(window.values)
    L = len(vals)
    diffs = list(vals)
    deltas = [diffs[0]]
    for _ in range(1, L):
        diffs = [diffs[i + 1] - diffs[i] for i in range(len(diffs) - 1)]
        deltas.append(diffs[0])
    ecoeffs = [0] * L
    for idx in range(L):
        ecoeffs[idx] = sum(
            deltas[j] * _binom_neg(a, j - idx) for j in range(idx, L)
        )
    while ecoeffs and ecoeffs[-1] == 0:
        ecoeffs.pop()
    return IntegerSymPoly(n=window.n, ecoeffs=tuple(ecoeffs))


def interpolate_window(window: WeightWindow, field: PrimeField,
                       caps: Caps = DEFAULT_CAPS) -> MultilinearPoly:
    """The integer interpolant reduced mod p (with symmetric certificate)."""
    return interpolate_window_int(window).reduce_mod(field, caps)


def _strict_interval_weights(lo: Fraction, hi: Fraction, limit: int):
    """Integer weights strictly between lo and hi, clipped to [0, limit]."""
    start = math.floor(lo) + 1
    end = math.ceil(hi) - 1
    return range(max(0, start), min(limit, end) + 1)


# ---------------------------------------------------------------------------
# the sampling junta
# ---------------------------------------------------------------------------

@dataclass
class SampledJunta:
    """A junta polynomial: an inner symmetric window polynomial on m sampled
    coordinates of the full n-variable cube.

    The composed value at a point depends only on the weight of the point
    restricted to the sampled coordinates (indices are distinct), which makes
    slice error probabilities exact hypergeometric sums.
    """

    n: int
    k: int
    q: int
    eps: float
    C: int
    m: int
    indices: tuple
    inner_table: tuple           # value of the inner polynomial at weights 0..m
    inner_ecoeffs: tuple         # inner polynomial mod p over the e-basis
    degree: int
    p: int
    window: tuple                # union interpolation interval (lo, hi)
    zero_weights: tuple          # inner weights constrained to 0
    one_weights: tuple           # inner weights constrained to 1
    deviations: tuple = ("indices sampled without replacement (distinct), "
                         "not i.i.d. uniform",)

    @property
    def index_mask(self) -> int:
        mask = 0
        for i in self.indices:
            mask |= 1 << i
        return mask

    def value_at(self, mask: Mask) -> int:
        return self.inner_table[popcount(mask & self.index_mask)]

    def to_poly(self, caps: Caps = DEFAULT_CAPS) -> MultilinearPoly:
        """Materialize as a polynomial on the full n variables."""
        field = PrimeField(self.p)
        idx = list(self.indices)
        total = sum(comb(self.m, j)
                    for j, c in enumerate(self.inner_ecoeffs) if c)
        check_cap(total, caps.max_terms, "junta term count")
        from itertools import combinations
        terms: dict[Mask, int] = {}
        for j, c in enumerate(self.inner_ecoeffs):
            if not c:
                continue
            for sub in combinations(idx, j):
                m = 0
                for i in sub:
                    m |= 1 << i
                terms[m] = c
        return MultilinearPoly.from_terms(self.n, field, terms)


def sampling_poly(n: int, k: int, q: int, eps: float, C: int, seed: int,
                  caps: Caps = DEFAULT_CAPS) -> SampledJunta:
    """Low-degree junta that vanishes on most of slice k and is nonzero on
    most of slice k+q, built by sampling m = ceil(C (a/d^2) ln(1/eps))
    coordinates and interpolating an inner window polynomial with zero
    target on weights in ((a-d/2)m, (a+d/2)m) and one target on
    ((a+d/2)m, (a+3d/2)m), a = k/n, d = q/n.
    """
    if not (0 < k < n) or q < 1:
        raise ValueError("need 0 < k < n and q >= 1")
    if not (0 < eps < 1):
        raise ValueError("eps must lie in (0,1)")
    alpha = Fraction(k, n)
    delta = Fraction(q, n)
    m = math.ceil(C * float(alpha / delta**2) * math.log(1 / eps))
    if m > n:
        raise CapExceeded(
            f"sample count m={m} exceeds n={n}; distinct sampling impossible")
    m = max(m, 1)
    zero_w = tuple(_strict_interval_weights((alpha - delta / 2) * m,
                                            (alpha + delta / 2) * m, m))
    one_w = tuple(_strict_interval_weights((alpha + delta / 2) * m,
                                           (alpha + 3 * delta / 2) * m, m))
    constrained = sorted(set(zero_w) | set(one_w))
    if constrained:
        lo, hi = constrained[0], constrained[-1]
        targets = []
        ones = set(one_w)
        for w in range(lo, hi + 1):
            targets.append(1 if w in ones else 0)  # gap weights extend the 0 side
        window = WeightWindow(n=m, lo=lo, hi=hi, values=tuple(targets))
        inner_int = interpolate_window_int(window)
    else:
        lo = hi = 0
        inner_int = IntegerSymPoly(n=m, ecoeffs=())
    return _finish_junta(n, k, q, eps, C, m, seed, inner_int, (lo, hi),
                         zero_w, one_w)


def _finish_junta(n, k, q, eps, C, m, seed, inner_int, window, zero_w, one_w,
                  p: int = 2) -> SampledJunta:
    field = PrimeField(p)
    ecoeffs = tuple(c % p for c in inner_int.ecoeffs)
    while ecoeffs and ecoeffs[-1] == 0:
        ecoeffs = ecoeffs[:-1]
    table = tuple(
        sum(c * comb(w, j) for j, c in enumerate(ecoeffs) if c) % p
        for w in range(m + 1)
    )
    degree = max((j for j, c in enumerate(ecoeffs) if c), default=0)
    rng = random.Random(seed)
    indices = tuple(sorted(rng.sample(range(n), m)))
    return SampledJunta(
        n=n, k=k, q=q, eps=eps, C=C, m=m, indices=indices,
        inner_table=table, inner_ecoeffs=ecoeffs, degree=degree, p=p,
        window=window, zero_weights=tuple(zero_w), one_weights=tuple(one_w),
    )


def junta_exact_slice_error(j: SampledJunta, weight: int, target: str) -> Fraction:
    """Exact probability over uniform weight-``weight`` points that the
    junta misses its target ("zero": value != 0; "nonzero": value == 0).

    The restricted weight on the m distinct sampled coordinates is
    hypergeometric, so the miss probability is an exact rational sum.
    """
    if target not in ("zero", "nonzero"):
        raise ValueError("target must be 'zero' or 'nonzero'")
    n, m, w = j.n, j.m, weight
    denom = comb(n, w)
    num = 0
    for jj in range(max(0, w - (n - m)), min(m, w) + 1):
        val = j.inner_table[jj]
        miss = (val != 0) if target == "zero" else (val == 0)
        if miss:
            num += comb(m, jj) * comb(n - m, w - jj)
    return Fraction(num, denom)


def pick_sampling_constant(n: int, k: int, q: int, eps: float, seed: int,
                           ladder: Sequence[int] = C_LADDER,
                           caps: Caps = DEFAULT_CAPS):
    """Smallest ladder constant whose junta meets the exact error check
    psi_k <= eps and psi_K >= 1 - eps.  Returns (junta, err_k, err_K) or
    None when no ladder constant passes."""
    for C in ladder:
        try:
            junta = sampling_poly(n, k, q, eps, C, seed, caps)
        except CapExceeded:
            continue
        err_k = junta_exact_slice_error(junta, k, "zero")
        err_K = junta_exact_slice_error(junta, k + q, "nonzero")
        with mp.workdps(_DPS):
            ok = (mp.mpf(err_k.numerator) / err_k.denominator <= eps
                  and mp.mpf(err_K.numerator) / err_K.denominator <= eps)
        if ok:
            return junta, err_k, err_K
    return None


# ---------------------------------------------------------------------------
# permutation-product error reduction
# ---------------------------------------------------------------------------

def random_permutation(n: int, rng: random.Random) -> list[int]:
    perm = list(range(n))
    rng.shuffle(perm)
    return perm


def relabel(P: MultilinearPoly, perm: Sequence[int],
            caps: Caps = DEFAULT_CAPS) -> MultilinearPoly:
    """P(x_{perm(1)}, ..., x_{perm(n)}) via a permutation substitution."""
    return apply_substitution(P, SubstitutionMap.permutation(list(perm)), caps)


def error_reduce(Q: MultilinearPoly, r: int, seed: int,
                 caps: Caps = DEFAULT_CAPS) -> MultilinearPoly:
    """Multilinearized product of r independently relabeled copies of Q.

    Degree grows to at most r * deg(Q); the expected nonzero fraction on any
    slice is the r-th power of Q's.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    rng = random.Random(seed)
    out = relabel(Q, random_permutation(Q.n, rng), caps)
    for _ in range(r - 1):
        nxt = relabel(Q, random_permutation(Q.n, rng), caps)
        out = multilinearize_product(out, nxt, caps)
    return out


# ---------------------------------------------------------------------------
# probabilistic polynomials and majority-composition error reduction
# ---------------------------------------------------------------------------

@dataclass
class ProbabilisticPoly:
    """A random polynomial: a seeded sampler plus an optional explicit
    finite support [(poly, probability)] with probabilities summing to 1."""

    n: int
    field: PrimeField
    degree_bound: int
    sampler: Callable[[random.Random], MultilinearPoly]
    support: Optional[list] = None

    def sample(self, rng: random.Random) -> MultilinearPoly:
        poly = self.sampler(rng)
        if poly.degree > self.degree_bound:
            raise AssertionError("sampler violated its degree bound")
        return poly

    @classmethod
    def deterministic(cls, poly: MultilinearPoly) -> "ProbabilisticPoly":
        return cls(n=poly.n, field=poly.field, degree_bound=poly.degree,
                   sampler=lambda rng: poly,
                   support=[(poly, Fraction(1))])

    @classmethod
    def from_support(cls, support: Sequence) -> "ProbabilisticPoly":
        support = [(poly, Fraction(pr)) for poly, pr in support]
        total = sum(pr for _, pr in support)
        if total != 1:
            raise ValueError(f"support probabilities sum to {total}, not 1")
        polys = [poly for poly, _ in support]
        n, field = polys[0].n, polys[0].field
        bound = max(poly.degree for poly in polys)

        def sampler(rng: random.Random) -> MultilinearPoly:
            u = Fraction(rng.randrange(10**9), 10**9)
            acc = Fraction(0)
            for poly, pr in support:
                acc += pr
                if u < acc:
                    return poly
            return support[-1][0]

        return cls(n=n, field=field, degree_bound=bound, sampler=sampler,
                   support=list(support))

    def per_point_error(self, mask: Mask, f_value: int) -> Fraction:
        """Exact disagreement probability at one point (finite support only)."""
        if self.support is None:
            raise ValueError("per-point error needs an explicit support")
        p = self.field.p
        return sum((pr for poly, pr in self.support
                    if poly.evaluate(mask) != f_value % p), Fraction(0))


def majority_poly(ell: int, field: PrimeField,
                  caps: Caps = DEFAULT_CAPS) -> MultilinearPoly:
    """Exact multilinear polynomial of the ell-variable majority function."""
    values = tuple(1 if 2 * w > ell else 0 for w in range(ell + 1))
    window = WeightWindow(n=ell, lo=0, hi=ell, values=values)
    return interpolate_window(window, field, caps)


def _compose_majority(maj: MultilinearPoly, copies: Sequence[MultilinearPoly],
                      caps: Caps) -> MultilinearPoly:
    """M(P_1, ..., P_ell): substitute polynomials into the majority terms."""
    n, field = copies[0].n, copies[0].field
    acc: dict[Mask, int] = {}
    p = field.p
    for mono, coeff in maj.terms_map(caps).items():
        prod = MultilinearPoly.constant(n, field, coeff)
        mm = mono
        while mm:
            i = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            prod = multilinearize_product(prod, copies[i], caps)
        for m, c in prod.terms_map(caps).items():
            v = (acc.get(m, 0) + c) % p
            if v:
                acc[m] = v
            elif m in acc:
                del acc[m]
    return MultilinearPoly(n, field, terms=acc)


def pp_error_reduce(P: ProbabilisticPoly, eps: float, delta: float,
                    caps: Caps = DEFAULT_CAPS) -> ProbabilisticPoly:
    """Error reduction by majority of ell independent copies.

    ell is the smallest odd integer >= 3 log(1/delta) / log(1/eps); the
    composed degree bound is ell times the input bound.  The error model
    assumes wrong outputs are Boolean (majority of values, not of events).
    """
    if not (0 < delta < eps <= 1 / 3):
        raise ValueError("need 0 < delta < eps <= 1/3")
    ratio = 3 * math.log(1 / delta) / math.log(1 / eps)
    ell = max(1, math.ceil(ratio))
    if ell % 2 == 0:
        ell += 1
    if ell == 1:
        return P
    maj = majority_poly(ell, P.field, caps)

    def sampler(rng: random.Random) -> MultilinearPoly:
        copies = [P.sample(rng) for _ in range(ell)]
        return _compose_majority(maj, copies, caps)

    support = None
    if P.support is not None and len(P.support) ** ell <= 4096:
        from itertools import product as iproduct
        support = []
        for combo in iproduct(P.support, repeat=ell):
            pr = math.prod((c[1] for c in combo), start=Fraction(1))
            composed = _compose_majority(maj, [c[0] for c in combo], caps)
            support.append((composed, pr))
    return ProbabilisticPoly(
        n=P.n, field=P.field, degree_bound=ell * P.degree_bound,
        sampler=sampler, support=support,
    )


# ---------------------------------------------------------------------------
# coin-problem construction and exact error evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoinInstance:
    """Bias-distinguishing instance: accept mostly-on window around n/2,
    reject window around (1/2 - delta) n."""

    p: int
    delta: Fraction
    eps: Fraction
    C: int
    n: int

    def __post_init__(self):
        if not (0 < self.delta <= Fraction(1, 2)):
            raise ValueError("delta must lie in (0, 1/2]")
        if not (0 < self.eps < 1):
            raise ValueError("eps must lie in (0, 1)")

    @classmethod
    def from_sizing(cls, p: int, delta: Fraction, eps: Fraction,
                    C: int) -> "CoinInstance":
        """n from the sizing rule n = ceil(C log(1/eps) / delta^2)."""
        with mp.workdps(_DPS):
            raw = C * mp.log(mp.mpf(eps.denominator) / eps.numerator) \
                / (mp.mpf(delta.numerator) / delta.denominator) ** 2
            n = int(mp.ceil(raw))
        return cls(p=p, delta=delta, eps=eps, C=C, n=n)

    @property
    def edges(self) -> tuple:
        """(low, mid, high) window edges as exact rationals."""
        half = Fraction(1, 2)
        return ((half - 3 * self.delta / 2) * self.n,
                (half - self.delta / 2) * self.n,
                (half + self.delta / 2) * self.n)

    def zero_weights(self) -> tuple:
        lo, mid, _ = self.edges
        return tuple(_strict_interval_weights(lo, mid, self.n))

    def one_weights(self) -> tuple:
        _, mid, hi = self.edges
        return tuple(_strict_interval_weights(mid, hi, self.n))

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "delta": f"{self.delta.numerator}/{self.delta.denominator}",
            "eps": f"{self.eps.numerator}/{self.eps.denominator}",
            "C": self.C,
            "n": self.n,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "CoinInstance":
        delta = Fraction(d["delta"])
        eps = Fraction(d["eps"])
        C = int(d.get("C", 2))
        if "n" in d:
            return cls(p=int(d["p"]), delta=delta, eps=eps, C=C, n=int(d["n"]))
        return cls.from_sizing(int(d["p"]), delta, eps, C)


def coin_build(inst: CoinInstance,
               caps: Caps = DEFAULT_CAPS) -> MultilinearPoly:
    """Window interpolant: 0 strictly inside the biased window, 1 strictly
    inside the unbiased window, reduced mod p, with a weight certificate."""
    zero_w, one_w = inst.zero_weights(), inst.one_weights()
    constrained = sorted(set(zero_w) | set(one_w))
    if not constrained:
        raise ValueError("both target windows are empty at this n")
    lo, hi = constrained[0], constrained[-1]
    ones = set(one_w)
    values = tuple(1 if w in ones else 0 for w in range(lo, hi + 1))
    window = WeightWindow(n=inst.n, lo=lo, hi=hi, values=values)
    return interpolate_window(window, PrimeField(inst.p), caps)


def coin_error_exact(table: Sequence[int], alpha: Fraction,
                     accept_side: str = "one") -> Fraction:
    """Exact Pr over the alpha-biased product measure that the table value
    counts as acceptance: sum of C(n,w) a^w (1-a)^(n-w) over those weights.

    accept_side selects the acceptance predicate on values: "one" (== 1),
    "nonzero" (!= 0), "zero" (== 0), or "not-one" (!= 1).
    """
    preds = {
        "one": lambda v: v == 1,
        "nonzero": lambda v: v != 0,
        "zero": lambda v: v == 0,
        "not-one": lambda v: v != 1,
    }
    if accept_side not in preds:
        raise ValueError(f"unknown accept side {accept_side!r}")
    pred = preds[accept_side]
    n = len(table) - 1
    a = Fraction(alpha)
    total = Fraction(0)
    for w, v in enumerate(table):
        if pred(v):
            total += comb(n, w) * a**w * (1 - a) ** (n - w)
    return total


def coin_verify_errors(inst: CoinInstance, poly: MultilinearPoly):
    """(error under the unbiased measure, error under the biased measure).

    The Boolean output accepts exactly on value 1, so the unbiased error is
    Pr[value != 1] at bias 1/2 and the biased error is Pr[value == 1] at
    bias 1/2 - delta.  Both are exact rationals.
    """
    table = poly.weight_values()
    half = Fraction(1, 2)
    err_unbiased = coin_error_exact(table, half, "not-one")
    err_biased = coin_error_exact(table, half - inst.delta, "one")
    return err_unbiased, err_biased


def coin_collapse(P: MultilinearPoly, n: int, seed: int,
                  caps: Caps = DEFAULT_CAPS) -> MultilinearPoly:
    """Replace each of P's variables by a uniformly random one of y_1..y_n."""
    rng = random.Random(seed)
    targets = tuple((VAR, rng.randrange(n)) for _ in range(P.n))
    return apply_substitution(P, SubstitutionMap(P.n, n, targets), caps)


def xor_shift(P: MultilinearPoly, y, caps: Caps = DEFAULT_CAPS) -> MultilinearPoly:
    """P(x_1 xor y_1, ..., x_n xor y_n): negate exactly the variables set in y."""
    mask = y.bits if isinstance(y, CubePoint) else int(y)
    targets = tuple(
        (NVAR, i) if (mask >> i) & 1 else (VAR, i) for i in range(P.n)
    )
    return apply_substitution(P, SubstitutionMap(P.n, P.n, targets), caps)


# ---------------------------------------------------------------------------
# repetition lift: repeat coordinates, pad, and permute
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RepetitionLift:
    """Schema of the repeat-s-times / pad / random-permutation substitution
    that turns an n-variable polynomial into an n'-variable one.

    A weight-w input maps to a (deterministic) weight w*s + r1 image; the
    random permutation makes the image uniform on its slice.
    """

    n_prime: int
    s: int
    r1: int
    r2: int

    def __post_init__(self):
        if self.s < 1 or not (0 <= self.r1 < self.s) or not (0 <= self.r2 < self.s):
            raise ValueError("need s >= 1 and r1, r2 in [0, s)")

    @property
    def n(self) -> int:
        return self.n_prime * self.s + self.s + self.r2

    def base_targets(self) -> list:
        """Images of the unpermuted coordinates: s copies of each variable,
        then r1 ones, then s + r2 - r1 zeros."""
        targets = []
        for i in range(self.n_prime):
            targets.extend([(VAR, i)] * self.s)
        targets.extend([(ONE, None)] * self.r1)
        targets.extend([(ZERO, None)] * (self.s + self.r2 - self.r1))
        return targets

    def build(self, seed: int) -> SubstitutionMap:
        """Seeded substitution for an n-variable source polynomial."""
        rng = random.Random(seed)
        base = self.base_targets()
        perm = random_permutation(self.n, rng)
        # source variable c of the big polynomial reads position perm[c] of
        # the assembled string
        targets = tuple(base[perm[c]] for c in range(self.n))
        return SubstitutionMap(self.n, self.n_prime, targets)

    def image_weight(self, w: int) -> int:
        return w * self.s + self.r1

    def image_of(self, x_mask: Mask, seed: int) -> Mask:
        """The image point of one input under the seeded assembly."""
        rng = random.Random(seed)
        bits = []
        for i in range(self.n_prime):
            bits.extend([(x_mask >> i) & 1] * self.s)
        bits.extend([1] * self.r1)
        bits.extend([0] * (self.s + self.r2 - self.r1))
        perm = random_permutation(self.n, rng)
        out = 0
        for c in range(self.n):
            if bits[perm[c]]:
                out |= 1 << c
        return out


def repetition_lift(n_prime: int, s: int, r1: int, r2: int) -> RepetitionLift:
    return RepetitionLift(n_prime=n_prime, s=s, r1=r1, r2=r2)


# ---------------------------------------------------------------------------
# covering hyperplane families on the middle slice
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GalvinFamily:
    """Hyperplanes <u_i, x> = b_i with half-weight normal vectors."""

    n: int
    items: tuple                   # ((u_mask, b), ...)
    t: Optional[int] = None        # balance threshold, when known
    degenerate: bool = False       # b-range exits the feasible [0, n/2]
    shifted: bool = False          # n/4 not integral; centered at floor(n/4)

    def __post_init__(self):
        if self.n % 2:
            raise ValueError("n must be even")
        for u, b in self.items:
            if popcount(u) != self.n // 2:
                raise ValueError(f"vector 0x{u:x} does not have weight n/2")

    @property
    def size(self) -> int:
        return len(self.items)

    def balanced_items(self, t: Optional[int] = None) -> list:
        """Items with |b - n/4| <= t."""
        thr = self.t if t is None else t
        if thr is None:
            raise ValueError("no balance threshold available")
        center = Fraction(self.n, 4)
        return [(u, b) for u, b in self.items if abs(b - center) <= thr]

    def to_json_dict(self) -> dict:
        d = {"n": self.n,
             "items": [{"u_mask": hex(u), "b": b} for u, b in self.items]}
        if self.t is not None:
            d["t"] = self.t
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "GalvinFamily":
        items = tuple((int(it["u_mask"], 16), int(it["b"])) for it in d["items"])
        return cls(n=int(d["n"]), items=items, t=d.get("t"))


def galvin_tight_family(n: int, eps, C: int) -> GalvinFamily:
    """The literal 2t+1 family: all vectors 1^{n/2} 0^{n/2}, intercepts
    floor(n/4) - t .. floor(n/4) + t, t = ceil(C sqrt(n ln(1/eps))).

    Intercepts outside the feasible inner-product range [0, n/2] are kept
    (they cover nothing); the family is flagged degenerate when that
    happens rather than rejected.
    """
    if n % 2:
        raise ValueError("n must be even")
    eps = float(eps)
    if not (0 < eps < 1):
        raise ValueError("eps must lie in (0,1)")
    t = math.ceil(C * math.sqrt(n * math.log(1 / eps)))
    base = n // 4
    shifted = n % 4 != 0
    u = (1 << (n // 2)) - 1
    items = tuple((u, b) for b in range(base - t, base + t + 1))
    return GalvinFamily(n=n, items=items, t=t,
                        degenerate=(t >= n // 4), shifted=shifted)


def galvin_coverage(F: GalvinFamily, caps: Caps = DEFAULT_CAPS,
                    monte_carlo: Optional[int] = None,
                    seed: int = 0):
    """Fraction of the middle slice covered by some hyperplane.

    Exact when all normal vectors coincide (hypergeometric sum) or when the
    middle slice is enumerable; otherwise requires monte_carlo samples and
    returns (estimate, 95% CI half-width).
    """
    n = F.n
    half = n // 2
    if F.size == 0:
        return Fraction(0)
    first_u = F.items[0][0]
    if all(u == first_u for u, _ in F.items):
        hit_values = {b for _, b in F.items if 0 <= b <= half}
        num = sum(comb(half, x) * comb(half, half - x) for x in hit_values)
        return Fraction(num, comb(n, half))
    if comb(n, half) <= caps.max_slice_points:
        import numpy as np
        covered = 0
        us = [(u, b) for u, b in F.items]
        vs = np.fromiter(slice_masks(n, half), dtype=np.uint64,
                         count=comb(n, half))
        hit = np.zeros(len(vs), dtype=bool)
        for u, b in us:
            if 0 <= b <= half:
                hit |= np.bitwise_count(vs & np.uint64(u)) == b
        return Fraction(int(hit.sum()), comb(n, half))
    if monte_carlo is None:
        raise CapExceeded(
            "middle slice too large for exact coverage; pass monte_carlo=N")
    rng = random.Random(seed)
    hits = 0
    positions = list(range(n))
    for _ in range(monte_carlo):
        chosen = rng.sample(positions, half)
        v = 0
        for i in chosen:
            v |= 1 << i
        if any(popcount(v & u) == b for u, b in F.items):
            hits += 1
    est = hits / monte_carlo
    ci = 1.96 * math.sqrt(max(est * (1 - est), 1e-12) / monte_carlo)
    return est, ci


def galvin_poly(F: GalvinFamily, field: PrimeField,
                balance_filter: bool = False,
                caps: Caps = DEFAULT_CAPS) -> MultilinearPoly:
    """Multilinearized product of (<u_i, x> - b_i) over the (optionally
    balance-filtered) family, coefficients mod p; degree <= retained count."""
    items = F.balanced_items() if balance_filter else list(F.items)
    if len(items) > 25:
        raise CapExceeded(f"{len(items)} product factors exceed the cap of 25")
    out = MultilinearPoly.constant(F.n, field, 1)
    for u, b in items:
        terms = {0: (-b) % field.p}
        mm = u
        while mm:
            i = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            terms[1 << i] = 1
        factor = MultilinearPoly.from_terms(F.n, field, terms)
        out = multilinearize_product(out, factor, caps)
    return out


# ---------------------------------------------------------------------------
# numeric bound checkers
# ---------------------------------------------------------------------------

def bernstein_bound(m: int, q, theta) -> mp.mpf:
    """Deviation bound 2 exp(-theta^2 / (2 m q (1-q) + 2 theta / 3))."""
    with mp.workdps(_DPS):
        qf = mp.mpf(Fraction(q).numerator) / Fraction(q).denominator \
            if not isinstance(q, float) else mp.mpf(q)
        th = mp.mpf(theta)
        return 2 * mp.e ** (-(th**2) / (2 * m * qf * (1 - qf) + 2 * th / 3))


@dataclass(frozen=True)
class BinomRatioReport:
    """Bounds on C(n, floor(n/2)-s) / C(n, floor(n/2)-r) for r <= s <= n/4."""

    n: int
    r: int
    s: int
    ratio: Fraction
    lower: mp.mpf            # e^(-8 s (s-r) / n), the working convention
    upper: mp.mpf            # e^(-2 r (s-r) / n)
    holds: bool
    printed_holds: bool      # the (r-s)-sign variant, reported only


def binom_ratio_check(n: int, r: int, s: int) -> BinomRatioReport:
    """Exact binomial ratio against both sign conventions of the bound.

    The working convention puts (s-r) in the exponents (both bounds then lie
    in (0, 1]); the variant with (r-s) is evaluated and flagged, never
    asserted.
    """
    if not (0 <= r <= s <= Fraction(n, 4)):
        raise ValueError(f"need 0 <= r <= s <= n/4, got r={r}, s={s}, n={n}")
    ratio = Fraction(comb(n, n // 2 - s), comb(n, n // 2 - r))
    with mp.workdps(_DPS):
        lower = mp.e ** (mp.mpf(-8 * s * (s - r)) / n)
        upper = mp.e ** (mp.mpf(-2 * r * (s - r)) / n)
        printed_lower = mp.e ** (mp.mpf(-8 * s * (r - s)) / n)
        printed_upper = mp.e ** (mp.mpf(-2 * r * (r - s)) / n)
        rat = mp.mpf(ratio.numerator) / ratio.denominator
        holds = bool(lower <= rat <= upper)
        printed_holds = bool(printed_lower <= rat <= printed_upper)
    return BinomRatioReport(n=n, r=r, s=s, ratio=ratio, lower=lower,
                            upper=upper, holds=holds,
                            printed_holds=printed_holds)


@dataclass(frozen=True)
class HyperRatioReport:
    """Telescoping check of the paired-binomial decay bound."""

    n: int
    m: int
    k: int
    ell: int
    ratio: Fraction
    steps_exact_ok: bool     # each step ratio <= 1 - 2j/m, exact rationals
    steps_exp_ok: bool       # each step ratio <= exp(-2j/m), high precision
    assembled_bound: mp.mpf  # exp(-(k(k-1) - ell(ell-1))/m)
    assembled_ok: bool


def _paired(n: int, m: int, j: int) -> int:
    return comb(n // 2, m // 2 - j) * comb(n // 2, (m + 1) // 2 + j)


def hyper_ratio_check(n: int, m: int, k: int, ell: int = 0) -> HyperRatioReport:
    """Verify each telescoping step and the assembled product bound.

    Step j: paired(j+1)/paired(j) <= 1 - 2j/m <= exp(-2j/m), where
    paired(j) = C(n/2, floor(m/2)-j) C(n/2, ceil(m/2)+j).  The assembled
    bound multiplies the step bounds (constant 2 in the exponent).
    """
    if n % 2 or not (0 <= m <= n // 2):
        raise ValueError("need even n and 0 <= m <= n/2")
    if not (0 <= ell <= k <= m // 2):
        raise ValueError("need 0 <= ell <= k <= floor(m/2)")
    steps_exact = True
    steps_exp = True
    with mp.workdps(_DPS):
        for j in range(ell, k):
            step = Fraction(_paired(n, m, j + 1), _paired(n, m, j))
            if step > 1 - Fraction(2 * j, m):
                steps_exact = False
            if mp.mpf(step.numerator) / step.denominator > mp.e ** (mp.mpf(-2 * j) / m):
                steps_exp = False
        ratio = Fraction(_paired(n, m, k), _paired(n, m, ell))
        assembled = mp.e ** (-mp.mpf(k * (k - 1) - ell * (ell - 1)) / m)
        assembled_ok = bool(
            mp.mpf(ratio.numerator) / ratio.denominator <= assembled)
    return HyperRatioReport(n=n, m=m, k=k, ell=ell, ratio=ratio,
                            steps_exact_ok=steps_exact, steps_exp_ok=steps_exp,
                            assembled_bound=assembled, assembled_ok=assembled_ok)
