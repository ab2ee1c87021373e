"""Exact and robust minimum degree for distinguishing two weight slices.

The exact solver finds the least d such that some degree-<=d multilinear
polynomial vanishes on all of slice k yet is nonzero somewhere on slice K,
by testing whether a slice-K evaluation row escapes the row space of slice
k's evaluation matrix.  Because both slices are orbits of the symmetric
group and the row space of a full slice is permutation-invariant, escape at
one representative point settles the whole slice; small-case tests verify
this against full closure computations.

Robust variants relax the vanishing constraint on an explicit error set,
either heuristically (upper bound) or by brute force over all small error
sets (exact oracle at tiny scale).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Optional, Sequence

import mpmath as mp
import numpy as np

from .config import DEFAULT_CAPS, Caps, check_cap
from .closure import EvaluationMatrix, IdealSampler, evaluation_bool_matrix, pack_bool_rows
from .cube import Mask, MultilinearPoly, slice_masks, slice_stats
from .linalg import PrimeField, RankOracle

_DPS = 40  # working precision for threshold arithmetic (>= 30 significant digits)


def _mpf_fraction(fr: Fraction) -> mp.mpf:
    with mp.workdps(_DPS):
        return mp.mpf(fr.numerator) / mp.mpf(fr.denominator)


def p_adic_part(q: int, p: int) -> int:
    """Largest power of p dividing q."""
    if q <= 0:
        raise ValueError("q must be positive")
    out = 1
    while q % p == 0:
        q //= p
        out *= p
    return out


@dataclass(frozen=True)
class SliceDistinguishInstance:
    """Parameter bundle (n, p, k, K) with the derived gap quantities."""

    n: int
    p: int
    k: int
    K: int

    def __post_init__(self):
        PrimeField(self.p)  # validates primality
        if not (0 <= self.k <= self.n and 0 <= self.K <= self.n):
            raise ValueError("slices must lie in [0, n]")
        if self.k == self.K:
            raise ValueError("k and K must differ")
        if not (0 < self.k < self.n):
            raise ValueError("k must be strictly inside (0, n) so alpha > 0")

    @property
    def q(self) -> int:
        return abs(self.K - self.k)

    @property
    def alpha(self) -> Fraction:
        return min(Fraction(self.k, self.n), 1 - Fraction(self.k, self.n))

    @property
    def delta(self) -> Fraction:
        return Fraction(self.q, self.n)

    @property
    def q_prime(self) -> int:
        return p_adic_part(self.q, self.p)

    @property
    def s(self) -> int:
        return self.q // self.q_prime

    @property
    def t(self) -> Optional[int]:
        """The gap when it is a p-power, else None."""
        return self.q if self.q == self.q_prime else None

    @property
    def ell(self) -> Optional[Fraction]:
        return Fraction(self.q * self.q, self.n) if self.t is not None else None


@dataclass(frozen=True)
class RobustThresholds:
    """Numeric thresholds of the robust slice-distinguishing degree bounds.

    All values are high-precision floats (mpmath, >= 30 significant digits);
    machine doubles underflow on instances like exp(-3200).
    """

    eps0_main: mp.mpf
    eps1_main: mp.mpf
    eps0_ext: mp.mpf
    eps1_ext: mp.mpf
    special_eps_lo: mp.mpf       # 2^(-n/100)
    special_eps_hi: mp.mpf       # e^(-200)
    special_ell_lo: int          # 100
    main_side_ok: bool       # 100 q < k < n - 100 q
    ext_side_ok: bool        # 200 q < k < n - 200 q

    def special_ell_hi(self, eps) -> mp.mpf:
        """Upper end of the valid ell range: ln(1/eps)/2."""
        with mp.workdps(_DPS):
            return -mp.log(mp.mpf(eps)) / 2


def thresholds(inst: SliceDistinguishInstance) -> RobustThresholds:
    """Evaluate every threshold expression of the instance exactly.

    eps0_main = min(e^(-100 d^2 n / a), 1/1000), eps1_main = e^(-d^2 n /(100 a)),
    and the extension variants with the extra factor s and constants 1000/2000.
    """
    with mp.workdps(_DPS):
        base = _mpf_fraction(inst.delta ** 2 * inst.n / inst.alpha)
        base_s = base / inst.s
        eps0_main = min(mp.e ** (-100 * base), mp.mpf(1) / 1000)
        eps1_main = mp.e ** (-base / 100)
        eps0_ext = min(mp.e ** (-1000 * base_s), mp.mpf(1) / 2000)
        eps1_ext = mp.e ** (-base_s / 1000)
        special_eps_lo = mp.mpf(2) ** (-mp.mpf(inst.n) / 100)
        special_eps_hi = mp.e ** (-200)
    q, k, n = inst.q, inst.k, inst.n
    return RobustThresholds(
        eps0_main=eps0_main, eps1_main=eps1_main,
        eps0_ext=eps0_ext, eps1_ext=eps1_ext,
        special_eps_lo=special_eps_lo, special_eps_hi=special_eps_hi, special_ell_lo=100,
        main_side_ok=(100 * q < k < n - 100 * q),
        ext_side_ok=(200 * q < k < n - 200 * q),
    )


@dataclass
class DistinguishReport:
    """Result of an exact, heuristic, or exhaustive degree search."""

    degree: int
    mode: str                      # "exact" | "heuristic-upper-bound" | "exhaustive"
    n: int
    p: int
    k: int
    K: int
    outside_count: int             # slice-K points outside the closure at `degree`
    per_degree_outside: dict
    slice_sizes: tuple
    psi_k: Optional[Fraction] = None
    psi_K: Optional[Fraction] = None
    psi_K_expected: Optional[Fraction] = None   # (1-1/p) * outside fraction
    psi_K_max: Optional[Fraction] = None        # outside fraction (trivial upper)
    witness: Optional[MultilinearPoly] = None
    error_set: Optional[list] = None
    seed: Optional[int] = None

    def to_json_dict(self) -> dict:
        d = {
            "degree": self.degree,
            "mode": self.mode,
            "n": self.n, "p": self.p, "k": self.k, "K": self.K,
            "outside_count": self.outside_count,
            "per_degree_outside": {str(k): v
                                   for k, v in sorted(self.per_degree_outside.items())},
            "slice_sizes": list(self.slice_sizes),
            "seed": self.seed,
        }
        for name in ("psi_k", "psi_K", "psi_K_expected", "psi_K_max"):
            v = getattr(self, name)
            if v is not None:
                d[name] = f"{v.numerator}/{v.denominator}"
        if self.error_set is not None:
            d["error_set"] = [hex(m) for m in self.error_set]
        d["has_witness"] = self.witness is not None
        return d


def _slice_oracle(field: PrimeField, n: int, k: int, d: int,
                  caps: Caps, labels: bool = False):
    ev = EvaluationMatrix(field, n, d, slice_masks(n, k), caps)
    return ev, ev.oracle(labels=labels)


def _witness_from_oracle(ev: EvaluationMatrix, oracle: RankOracle,
                         outside_mask: Mask) -> MultilinearPoly:
    """An ideal element nonzero at a point outside the closure.

    Entry f of the residue of the point's row equals the value at the point
    of the canonical nullspace polynomial for free column f, so any nonzero
    residue entry indexes a witness directly.
    """
    row = ev.row_for_oracle(outside_mask)
    res = oracle.residue(row)
    free = next(f for f, v in enumerate(res) if v)
    vec = oracle.nullspace_vector(free)
    terms = {ev.monomials[j]: c for j, c in enumerate(vec) if c}
    return MultilinearPoly.from_terms(ev.n, ev.field, terms)


def exact_min_degree(n: int, p: int, k: int, K: int,
                     caps: Caps = DEFAULT_CAPS,
                     want_witness: bool = True) -> DistinguishReport:
    """Least d such that some degree-<=d polynomial vanishes on all of slice k
    and is nonzero at some point of slice K.

    Ascends d from 0; at each degree tests whether the representative
    slice-K row escapes the slice-k row space (escape is slice-wide by
    permutation symmetry).
    """
    inst = SliceDistinguishInstance(n=n, p=p, k=k, K=K)
    field = PrimeField(p)
    check_cap(comb(n, k), caps.max_slice_points, f"slice size C({n},{k})")
    check_cap(comb(n, K), caps.max_slice_points, f"slice size C({n},{K})")
    rep = next(slice_masks(n, K))
    size_K = comb(n, K)
    per_degree: dict[int, int] = {}
    for d in range(n + 1):
        ev, oracle = _slice_oracle(field, n, k, d, caps)
        row = ev.row_for_oracle(rep)
        if oracle.member(row):
            per_degree[d] = 0
            continue
        per_degree[d] = size_K
        report = DistinguishReport(
            degree=d, mode="exact", n=n, p=p, k=k, K=K,
            outside_count=size_K, per_degree_outside=per_degree,
            slice_sizes=(comb(n, k), size_K),
            psi_K_expected=Fraction(p - 1, p),
            psi_K_max=Fraction(1),
        )
        if want_witness:
            w = _witness_from_oracle(ev, oracle, rep)
            report.witness = w
            report.psi_k = slice_stats(w, k, caps).psi
            report.psi_K = slice_stats(w, K, caps).psi
        return report
    raise AssertionError("no distinguisher up to degree n; this cannot happen")


@dataclass
class SweepRow:
    n: int
    k: int
    K: int
    gap: int
    expected: int          # largest p-power dividing the gap
    degree: int
    ok: bool


def gap_degree_sweep(p: int, n_values: Sequence[int], gaps: str = "ppower",
                  caps: Caps = DEFAULT_CAPS):
    """Exact minimum degree across a grid, compared against the p-adic part
    of the gap.

    gaps: "ppower" sweeps gaps that are powers of p, "composite" the rest,
    "all" both.  A p-power gap g requires g <= k <= n - g (below k = g the
    equality genuinely fails, e.g. n=6, k=1, K=5 over F_2 has degree 2, not
    4); a composite gap g only requires its p-adic part q' <= k and
    k + g <= n.  Rows share the slice-k rank oracle across all gaps, so each
    (n, k, degree) is eliminated once.

    Returns (rows, violations).
    """
    if gaps not in ("ppower", "composite", "all"):
        raise ValueError(f"unknown gap class {gaps!r}")
    field = PrimeField(p)
    rows: list[SweepRow] = []
    violations: list[SweepRow] = []
    for n in n_values:
        for k in range(1, n):
            targets = {}
            for g in range(1, n - k + 1):
                qp = p_adic_part(g, p)
                is_pp = qp == g
                lo = g if is_pp else max(1, qp)
                if not (lo <= k <= n - g):
                    continue
                if gaps == "ppower" and not is_pp:
                    continue
                if gaps == "composite" and is_pp:
                    continue
                targets[k + g] = qp
            if not targets:
                continue
            max_expected = max(targets.values())
            unresolved = dict(targets)
            found: dict[int, int] = {}
            for d in range(0, max_expected + 1):
                if not unresolved:
                    break
                ev, oracle = _slice_oracle(field, n, k, d, caps)
                for K in list(unresolved):
                    row = ev.row_for_oracle(next(slice_masks(n, K)))
                    if not oracle.member(row):
                        found[K] = d
                        del unresolved[K]
            for K, expected in sorted(targets.items()):
                degree = found.get(K, max_expected + 1)  # ">expected" sentinel
                row = SweepRow(n=n, k=k, K=K, gap=K - k, expected=expected,
                               degree=degree, ok=(degree == expected))
                rows.append(row)
                if not row.ok:
                    violations.append(row)
    return rows, violations


def exhaustive_robust(n: int, p: int, k: int, K: int, max_removals: int,
                      caps: Caps = DEFAULT_CAPS) -> DistinguishReport:
    """Exact robust minimum degree over ALL error sets of size <= max_removals.

    Brute-force oracle: min over error sets E0 of the least d at which some
    slice-K point escapes the closure of slice k minus E0.  Practical only
    for tiny n; raises on combinatorial explosion.
    """
    SliceDistinguishInstance(n=n, p=p, k=k, K=K)
    field = PrimeField(p)
    size_k = comb(n, k)
    total_sets = sum(comb(size_k, j) for j in range(max_removals + 1))
    check_cap(total_sets * size_k, 10**8, "exhaustive robust work")
    from itertools import combinations

    k_masks = list(slice_masks(n, k))
    K_masks = list(slice_masks(n, K))
    per_degree: dict[int, int] = {}
    for d in range(n + 1):
        monos_ev = EvaluationMatrix(field, n, d, k_masks, caps)
        k_rows_bool = monos_ev.bool_matrix()
        K_rows_bool = evaluation_bool_matrix(monos_ev.monomials, K_masks)
        if field.p == 2:
            k_rows = pack_bool_rows(k_rows_bool)
            K_rows = pack_bool_rows(K_rows_bool)
        else:
            k_rows = [r.astype(np.int64) for r in k_rows_bool]
            K_rows = [r.astype(np.int64) for r in K_rows_bool]
        best: Optional[tuple] = None
        for r in range(max_removals + 1):
            for removed in combinations(range(size_k), r):
                removed_set = set(removed)
                oracle = RankOracle(field, monos_ev.n_d)
                impl_absorb = oracle._impl.absorb
                for i, row in enumerate(k_rows):
                    if i not in removed_set:
                        impl_absorb(row)
                member = oracle._impl.member
                outside = sum(1 for row in K_rows if not member(row))
                if outside:
                    best = (removed, outside)
                    break
            if best:
                break
        if best is None:
            per_degree[d] = 0
            continue
        removed, outside = best
        per_degree[d] = outside
        return DistinguishReport(
            degree=d, mode="exhaustive", n=n, p=p, k=k, K=K,
            outside_count=outside, per_degree_outside=per_degree,
            slice_sizes=(size_k, comb(n, K)),
            error_set=[k_masks[i] for i in removed],
        )
    raise AssertionError("no distinguisher up to degree n; this cannot happen")


def robust_search(inst: SliceDistinguishInstance, eps0_budget: Fraction,
                  strategy: str = "uniform", restarts: int = 4, seed: int = 0,
                  target_psi_K: Optional[Fraction] = None,
                  confirm_samples: int = 24,
                  caps: Caps = DEFAULT_CAPS) -> DistinguishReport:
    """Heuristic upper bound on the robust minimum degree.

    Picks an error set E0 on slice k within the budget (uniform random or
    greedy removal of rank-critical points), then finds the least d at which
    the ideal of slice k minus E0 escapes on slice K strongly enough:
    with no target, one escaping point suffices; with a target psi, the
    expected nonzero fraction (1 - 1/p) * outside-fraction must reach it.
    The reported degree is an upper bound on the true robust minimum.
    """
    if strategy not in ("uniform", "greedy"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if not (0 <= eps0_budget < 1):
        raise ValueError("eps0_budget must lie in [0, 1)")
    n, p, k, K = inst.n, inst.p, inst.k, inst.K
    field = PrimeField(p)
    size_k, size_K = comb(n, k), comb(n, K)
    check_cap(size_k + size_K, caps.max_slice_points, "slice sizes")
    removals = int(eps0_budget * size_k)
    k_masks = list(slice_masks(n, k))
    K_masks = list(slice_masks(n, K))
    master = random.Random(seed)
    restart_seeds = [master.randrange(2**63) for _ in range(restarts)]
    if removals == 0 or strategy == "greedy":
        restart_seeds = restart_seeds[:1]

    best: Optional[DistinguishReport] = None
    for rs in restart_seeds:
        rng = random.Random(rs)
        per_degree: dict[int, int] = {}
        for d in range(n + 1):
            ev = EvaluationMatrix(field, n, d, k_masks, caps)
            if removals == 0:
                error_set: list[Mask] = []
            elif strategy == "uniform":
                error_set = sorted(rng.sample(k_masks, removals))
            else:
                full_oracle = ev.oracle(labels=True)
                deps = full_oracle.pivot_dependents
                owners = full_oracle.pivot_owner
                order = sorted(owners, key=lambda c: (deps.get(c, 0), c))
                error_set = sorted(owners[c] for c in order[:removals])
            error = set(error_set)
            keep = [m for m in k_masks if m not in error]
            sub_ev = EvaluationMatrix(field, n, d, keep, caps)
            oracle = sub_ev.oracle()
            if removals == 0:
                # full slice: escape at one representative settles the orbit
                row = sub_ev.row_for_oracle(K_masks[0])
                outside = 0 if oracle.member(row) else size_K
            else:
                rows_bool = evaluation_bool_matrix(sub_ev.monomials, K_masks)
                if p == 2:
                    rows = pack_bool_rows(rows_bool)
                else:
                    rows = [r.astype(np.int64) for r in rows_bool]
                outside = sum(1 for row in rows if not oracle._impl.member(row))
            per_degree[d] = outside
            expected = Fraction(p - 1, p) * Fraction(outside, size_K)
            hit = outside >= 1 if target_psi_K is None else expected >= target_psi_K
            if not hit:
                continue
            report = DistinguishReport(
                degree=d, mode="exact" if removals == 0 else "heuristic-upper-bound",
                n=n, p=p, k=k, K=K, outside_count=outside,
                per_degree_outside=per_degree, slice_sizes=(size_k, size_K),
                psi_K_expected=expected, psi_K_max=Fraction(outside, size_K),
                error_set=error_set, seed=rs,
            )
            # confirm with sampled ideal elements (exact psi of the best draw)
            if confirm_samples > 0 and comb(n, K) <= caps.max_slice_points:
                sampler = IdealSampler(field, n, keep, d, seed=rs, caps=caps)
                best_poly, best_nz = None, -1
                for _ in range(confirm_samples):
                    poly = sampler.sample()
                    nz = slice_stats(poly, K, caps).nonzero_count
                    if nz > best_nz:
                        best_poly, best_nz = poly, nz
                if best_poly is not None:
                    report.witness = best_poly
                    report.psi_k = slice_stats(best_poly, k, caps).psi
                    report.psi_K = slice_stats(best_poly, K, caps).psi
            break
        else:
            continue
        if (best is None or report.degree < best.degree
                or (report.degree == best.degree
                    and (report.error_set or []) < (best.error_set or []))):
            best = report
    assert best is not None
    return best


@dataclass
class MidsliceConsistencyReport:
    """Falsification-harness outcome for the special-case degree bound."""

    n: int
    t: int
    p: int
    ell: Fraction
    psi_low: Fraction       # nonzero fraction at slice floor(n/2) - t
    psi_mid: Fraction       # nonzero fraction at slice floor(n/2)
    ell_in_range: bool
    eps_window_nonempty: bool
    psi_mid_ok: bool
    hypotheses_hold: bool
    degree: int
    degree_threshold: Fraction   # t / 25
    degree_ok: bool
    consistent: bool

    def to_json_dict(self) -> dict:
        return {
            "n": self.n, "t": self.t, "p": self.p,
            "ell": f"{self.ell.numerator}/{self.ell.denominator}",
            "psi_low": f"{self.psi_low.numerator}/{self.psi_low.denominator}",
            "psi_mid": f"{self.psi_mid.numerator}/{self.psi_mid.denominator}",
            "ell_in_range": self.ell_in_range,
            "eps_window_nonempty": self.eps_window_nonempty,
            "psi_mid_ok": self.psi_mid_ok,
            "hypotheses_hold": self.hypotheses_hold,
            "degree": self.degree,
            "degree_ok": self.degree_ok,
            "consistent": self.consistent,
        }


def midslice_consistency(n: int, t: int, p: int, witness: MultilinearPoly,
                    caps: Caps = DEFAULT_CAPS) -> MidsliceConsistencyReport:
    """Check a candidate against the special-case hypotheses and degree bound.

    The hypotheses require, for some eps in [2^(-n/100), e^(-200)] with
    ell = t^2/n in [100, ln(1/eps)/2]: nonzero fraction <= eps at slice
    floor(n/2) - t and >= e^(-ell/2) at slice floor(n/2).  A candidate is a
    counterexample only if the hypotheses hold and its degree is below t/25.
    This is a falsification harness, never a proof.
    """
    if p_adic_part(t, p) != t:
        raise ValueError(f"t={t} must be a power of p={p}")
    if witness.n != n:
        raise ValueError("witness arity mismatch")
    m = n // 2
    if m - t < 0:
        raise ValueError("t too large for n")
    ell = Fraction(t * t, n)
    psi_low = slice_stats(witness, m - t, caps).psi
    psi_mid = slice_stats(witness, m, caps).psi
    with mp.workdps(_DPS):
        ell_f = _mpf_fraction(ell)
        eps_lo = max(_mpf_fraction(psi_low), mp.mpf(2) ** (-mp.mpf(n) / 100))
        eps_hi = min(mp.e ** (-200), mp.e ** (-2 * ell_f))
        ell_in_range = bool(ell_f >= 100)
        eps_window_nonempty = bool(eps_lo <= eps_hi)
        psi_mid_ok = bool(_mpf_fraction(psi_mid) >= mp.e ** (-ell_f / 2))
    hypotheses = ell_in_range and eps_window_nonempty and psi_mid_ok
    threshold = Fraction(t, 25)
    degree = witness.degree
    degree_ok = Fraction(degree) >= threshold
    return MidsliceConsistencyReport(
        n=n, t=t, p=p, ell=ell, psi_low=psi_low, psi_mid=psi_mid,
        ell_in_range=ell_in_range, eps_window_nonempty=eps_window_nonempty,
        psi_mid_ok=psi_mid_ok, hypotheses_hold=hypotheses,
        degree=degree, degree_threshold=threshold, degree_ok=degree_ok,
        consistent=(not hypotheses) or degree_ok,
    )
