"""Parallel and concurrent families, the lattice slope/intercept sets, and the
structure report for a line configuration on [w] x [h].

Window bounds involve N^(1/3), which is irrational in general; every such
comparison is decided exactly by cubing both sides.
"""

from __future__ import annotations

import heapq
import math
import statistics
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .energy import NumberSet, add_energy, mult_energy, mult_energy_bipartite
from .errors import InvalidArgument, ResourceLimit
from .exactnum import as_number, is_rational
from .geom import (AnalyzerConfig, GridSpec, Line, ProductSet, _count_positive,
                   classify_proper, grid_counts, is_proper, per_line_counts)
from .numtheory import coprime_pairs


@dataclass(frozen=True)
class SlopeWindow:
    """Window constants: t within a factor k_t of N^(alpha-1/3), s within k_s of N^(2/3-alpha)."""

    k_t: Fraction = Fraction(2)
    k_s: Fraction = Fraction(2)

    def __post_init__(self):
        if Fraction(self.k_t) < 1 or Fraction(self.k_s) < 1:
            raise InvalidArgument("window constants must be >= 1")


@dataclass
class ParallelFamily:
    slope: object
    lines: list
    sizes: list
    intercept_set: NumberSet

    def __len__(self):
        return len(self.lines)


@dataclass
class ConcurrentFamily:
    center: tuple
    lines: list

    def __len__(self):
        return len(self.lines)


@dataclass
class StructureReport:
    N: int
    n_lines: int
    n_proper: int
    incidences: int
    rich_slopes: int
    rich_threshold: int
    max_parallel: int
    median_family_size: float
    max_concurrent: int
    concurrency_method: str
    beta_hat: float
    gamma_hat: float
    slope_set_match: float
    intercept_coverage: float
    intercepts_in_set: bool
    slope_mult_energy: int
    intercept_add_energy_histogram: list
    families: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "families"}
        return d


# -- exact window arithmetic ------------------------------------------------------

def _ceil_cbrt_times(a: Fraction, N: int) -> int:
    """Smallest integer D >= 0 with D >= a * N^(1/3), for a >= 0."""
    a = Fraction(a)
    if a <= 0:
        return 0
    D = max(0, math.floor(float(a) * N ** (1 / 3)) - 2)
    while D ** 3 < a ** 3 * N:
        D += 1
    return D


def _floor_cbrt_times(a: Fraction, N: int) -> int:
    """Largest integer D >= 0 with D <= a * N^(1/3)."""
    a = Fraction(a)
    D = max(0, math.ceil(float(a) * N ** (1 / 3)) + 2)
    while D > 0 and D ** 3 > a ** 3 * N:
        D -= 1
    return D


def _window(center_num: int, k: Fraction, N: int) -> tuple[int, int]:
    """Integer range of x with center/k <= x <= k*center, center = center_num / N^(1/3)."""
    k = Fraction(k)
    # x >= c/(k N^(1/3))  <=>  (x k)^3 N >= c^3
    lo = 1
    while (lo * k) ** 3 * N < center_num ** 3:
        lo += 1
    # x <= k c / N^(1/3)  <=>  x^3 N <= k^3 c^3
    hi = max(0, math.floor(float(k) * center_num / N ** (1 / 3)) + 2)
    while hi > 0 and hi ** 3 * N > k ** 3 * center_num ** 3:
        hi -= 1
    return lo, hi


def _check_alpha(g: GridSpec):
    # 1/3 < alpha <= 1/2  <=>  h < w^2 and w <= h
    if not (g.h < g.w * g.w and g.w <= g.h):
        raise InvalidArgument(f"grid {g.w}x{g.h} has alpha={g.alpha:.4f} outside (1/3, 1/2]")


def slope_windows(g: GridSpec, win: SlopeWindow) -> dict:
    """Integer windows for t (non-steep) and s (steep)."""
    return {"t": _window(g.w, win.k_t, g.N), "s": _window(g.h, win.k_s, g.N)}


def theorem4_slope_pairs(g: GridSpec, win: SlopeWindow = SlopeWindow()) -> list[tuple[int, int]]:
    """Coprime (s, t) of the rich positive slopes, non-steep part first.

    Non-steep: t in its window, s <= t*h/w.  Steep: s in its window, t < s*w/h.
    """
    _check_alpha(g)
    w, h = g.w, g.h
    t_lo, t_hi = slope_windows(g, win)["t"]
    s_lo, s_hi = slope_windows(g, win)["s"]
    flat = coprime_pairs(t_lo, t_hi, lambda t: Fraction(t * h, w))
    # steep part enumerated with roles swapped; strict bound t < s*w/h
    steep = coprime_pairs(s_lo, s_hi, lambda s: -(-s * w // h) - 1)
    return flat + [(s, t) for (t, s) in steep]


def theorem4_slope_set(g: GridSpec, win: SlopeWindow = SlopeWindow()) -> list[Fraction]:
    """Sorted positive slopes; the negative half is the mirror image."""
    return sorted({Fraction(s, t) for s, t in theorem4_slope_pairs(g, win)})


def intercept_ranges(g: GridSpec, s: int, t: int, k) -> tuple[int, int]:
    """(J, I): the j-range [h - s N^(1/3)/k] and the i-range [w - t N^(1/3)/k]."""
    k = Fraction(k)
    J = g.h - _ceil_cbrt_times(Fraction(s) / k, g.N)
    I = g.w - _ceil_cbrt_times(Fraction(t) / k, g.N)
    return max(J, 0), max(I, 0)


def intercept_numerators(g: GridSpec, s: int, t: int, k) -> np.ndarray:
    """Sorted distinct u = j t - i s, so the intercepts are u / t."""
    J, I = intercept_ranges(g, s, t, k)
    parts = []
    if J > 0:
        j = np.arange(1, J + 1, dtype=np.int64)
        i = np.arange(1, t + 1, dtype=np.int64)
        parts.append((j[None, :] * t - i[:, None] * s).ravel())
    if I > 0:
        j = np.arange(1, s + 1, dtype=np.int64)
        i = np.arange(1, I + 1, dtype=np.int64)
        parts.append((j[None, :] * t - i[:, None] * s).ravel())
    if not parts:
        return np.zeros(0, dtype=np.int64)
    return np.unique(np.concatenate(parts))


def theorem4_intercept_set(g: GridSpec, slope, k) -> NumberSet:
    """{j - i s/t : i in [t], j in [h - s N^(1/3)/k]} u {i in [w - t N^(1/3)/k], j in [s]}."""
    slope = Fraction(slope)
    if slope <= 0:
        raise InvalidArgument("positive canonical slope required")
    s, t = slope.numerator, slope.denominator
    return NumberSet(tuple(Fraction(int(u), t) for u in intercept_numerators(g, s, t, k)))


def in_intercept_set(g: GridSpec, s: int, t: int, k, u: np.ndarray) -> np.ndarray:
    """Membership of intercepts u/t in the set above, without materializing it."""
    J, I = intercept_ranges(g, s, t, k)
    u = np.asarray(u, dtype=np.int64)
    # branch 1: unique i in [1, t] with j = (u + i s)/t integral
    inv = pow(s, -1, t) if t > 1 else 0
    i0 = (-u * inv) % t
    i0 = np.where(i0 == 0, t, i0)
    j = (u + i0 * s) // t
    b1 = (j >= 1) & (j <= J)
    # branch 2: unique j in [1, s] with i = (j t - u)/s integral
    inv2 = pow(t, -1, s) if s > 1 else 0
    j0 = (u * inv2) % s
    j0 = np.where(j0 == 0, s, j0)
    i = (j0 * t - u) // s
    b2 = (i >= 1) & (i <= I)
    return b1 | b2


# -- families ---------------------------------------------------------------------

def _slope_order(slope):
    return (slope is None, slope if slope is not None else 0)


def group_parallel(L: Sequence[Line], counts: Sequence[int] | None = None) -> list[ParallelFamily]:
    """Partition by exact slope; largest family first, ties by slope."""
    groups: dict = defaultdict(list)
    for i, ln in enumerate(L):
        groups[ln.slope].append(i)
    fams = []
    for slope, idx in groups.items():
        lines = [L[i] for i in idx]
        sizes = [int(counts[i]) for i in idx] if counts is not None else []
        fams.append(ParallelFamily(slope, lines, sizes, NumberSet.of(ln.intercept for ln in lines)))
    fams.sort(key=lambda f: (-len(f.lines), _slope_order(f.slope)))
    return fams


def _intersection(l1: Line, l2: Line):
    if l1.slope == l2.slope:
        return None
    if l1.slope is None:
        x = l1.intercept
        return (x, l2.slope * x + l2.intercept)
    if l2.slope is None:
        x = l2.intercept
        return (x, l1.slope * x + l1.intercept)
    x = (l2.intercept - l1.intercept) / (l1.slope - l2.slope)
    return (x, l1.slope * x + l1.intercept)


def find_concurrent(L: Sequence[Line], min_size: int = 3, cap: int = 20_000) -> list[ConcurrentFamily]:
    """Disjoint pencils of at least ``min_size`` lines, largest first.

    All pairwise intersections are bucketed by exact point; the largest pencil
    is taken, its lines are removed from the others, and so on.
    """
    L = list(dict.fromkeys(L))
    if len(L) > cap:
        raise ResourceLimit(f"find_concurrent capped at {cap} lines, got {len(L)}")
    through: dict = defaultdict(set)
    for i in range(len(L)):
        for j in range(i + 1, len(L)):
            p = _intersection(L[i], L[j])
            if p is not None:
                through[p].update((i, j))
    order = lambda p: (p[0], p[1])
    heap = [(-len(ix), order(p), p) for p, ix in through.items()]
    heapq.heapify(heap)
    taken: set = set()
    out = []
    while heap:
        neg, key, p = heapq.heappop(heap)
        live = through[p] - taken
        if len(live) < max(min_size, 2):
            continue
        if len(live) < -neg:
            heapq.heappush(heap, (-len(live), key, p))
            continue
        lines = [L[i] for i in sorted(live)]
        if not all(ln.contains(*p) for ln in lines):
            raise AssertionError("pencil verification failed")
        out.append(ConcurrentFamily(p, lines))
        taken |= live
    return out


def _line_coeffs(ln: Line) -> tuple[int, int, int]:
    """Integers (A, B, C) with A x + B y + C = 0 for a rational line."""
    if ln.slope is None:
        c = Fraction(ln.intercept)
        return c.denominator, 0, -c.numerator
    m, c = Fraction(ln.slope), Fraction(ln.intercept)
    lcm = math.lcm(m.denominator, c.denominator)
    return int(m * lcm), -lcm, int(c * lcm)


def max_pencil_pairwise(L: Sequence[Line]) -> int:
    """Size of the largest set of lines of L through one point (exact, O(|L|^2)).

    Rational lines only.  Intersections are kept as reduced integer projective
    triples so equal points compare equal.
    """
    L = list(dict.fromkeys(L))
    if len(L) < 2:
        return len(L)
    co = np.asarray([_line_coeffs(ln) for ln in L], dtype=np.int64)
    best = 1
    for i in range(len(L) - 1):
        a1, b1, c1 = co[i]
        a2, b2, c2 = co[i + 1:, 0], co[i + 1:, 1], co[i + 1:, 2]
        Z = a1 * b2 - a2 * b1
        X = b1 * c2 - b2 * c1
        Y = c1 * a2 - c2 * a1
        ok = Z != 0
        if not ok.any():
            continue
        X, Y, Z = X[ok], Y[ok], Z[ok]
        sgn = np.where(Z < 0, -1, 1)
        g = np.gcd(np.gcd(X, Y), Z)
        pts = np.stack([X * sgn // g, Y * sgn // g, Z * sgn // g], axis=1)
        _, mult = np.unique(pts, axis=0, return_counts=True)
        best = max(best, int(mult.max()) + 1)
    return best


def max_pencil_on_grid(g: GridSpec, L: Sequence[Line]) -> int:
    """Largest number of lines of L through a single point of [w] x [h].

    Lines of one slope are disjoint, so this is the largest pencil centred at a
    lattice point.
    """
    tally = np.zeros((g.w + 1) * (g.h + 1), dtype=np.int64)
    groups: dict = defaultdict(list)
    for ln in L:
        groups[ln.slope].append(ln.intercept)
    xs = np.arange(1, g.w + 1, dtype=np.int64)
    for slope, cs in groups.items():
        if slope is None:
            for c in cs:
                if is_rational(c) and Fraction(c).denominator == 1 and 1 <= c <= g.w:
                    tally[int(c) * (g.h + 1) + 1: int(c) * (g.h + 1) + g.h + 1] += 1
            continue
        if not is_rational(slope):
            continue
        slope = Fraction(slope)
        num, den = slope.numerator, slope.denominator
        cu = [int(Fraction(c) * den) for c in cs
              if is_rational(c) and (Fraction(c) * den).denominator == 1]
        if not cu:
            continue
        cu = np.asarray(cu, dtype=np.int64)
        # y * den = num * x + c * den
        yden = num * xs[None, :] + cu[:, None]
        y = yden // den
        ok = (yden % den == 0) & (y >= 1) & (y <= g.h)
        xx = np.broadcast_to(xs[None, :], yden.shape)
        tally += np.bincount(xx[ok] * (g.h + 1) + y[ok], minlength=len(tally))
    return int(tally.max()) if len(tally) else 0


# -- the lattice verifier ------------------------------------------------------------

def _canonical_positive(slope) -> tuple[int, int, int]:
    slope = Fraction(slope)
    sign = 1 if slope > 0 else -1
    slope = abs(slope)
    return slope.numerator, slope.denominator, sign


def verify_lattice_structure(g: GridSpec, L: Sequence[Line], cfg: AnalyzerConfig = AnalyzerConfig(),
                             win: SlopeWindow = SlopeWindow(), rich_c: Fraction | None = None,
                             counts: Sequence[int] | None = None,
                             concurrency: str = "auto") -> StructureReport:
    """Measure the structure of L on [w] x [h].

    Rich slopes carry at least ``rich_c * N^(2/3)`` proper lines; by default the
    threshold is ``cfg.rich_fraction`` of the largest proper family.  The maximum
    pencil is exact ("pairwise") up to ``cfg.pairwise_cap`` proper lines and the
    largest lattice-point pencil ("lattice-points") above that, unless
    ``concurrency`` picks one method explicitly.
    """
    N = g.N
    counts = grid_counts(g, L) if counts is None else np.asarray(counts)
    proper_idx = [i for i, c in enumerate(counts) if is_proper(int(c), N, cfg.k)]
    proper = [L[i] for i in proper_idx]
    fams = group_parallel(proper, [counts[i] for i in proper_idx])
    fams = [f for f in fams if f.slope is not None and f.slope != 0]
    max_parallel = len(fams[0]) if fams else 0
    if rich_c is None:
        threshold = max(1, math.ceil(max_parallel * Fraction(cfg.rich_fraction)))
    else:
        threshold = max(1, _ceil_cbrt_times(Fraction(rich_c), N * N))
    rich = [f for f in fams if len(f) >= threshold]

    slope_set = set()
    try:
        slope_set = set(theorem4_slope_set(g, win))
    except InvalidArgument:
        pass
    slopes = {abs(Fraction(f.slope)) for f in fams}
    match = (sum(1 for s in slopes if s in slope_set) / len(slopes)) if slopes else 0.0

    # every family is checked against the intercept set; rows and energies cover all of them
    coverage, inside, energies, fam_rows = [], True, [], []
    rich_ids = {id(f) for f in rich}
    for f in fams:
        s, t, sign = _canonical_positive(f.slope)
        cs = [Fraction(ln.intercept) for ln in f.lines]
        if sign < 0:
            cs = [g.h + 1 - c for c in cs]
        u = np.asarray([int(c * t) for c in cs], dtype=np.int64)
        total = len(intercept_numerators(g, s, t, cfg.k))
        member = in_intercept_set(g, s, t, cfg.k, u)
        fam_inside = bool(member.all())
        inside &= fam_inside
        cov = len(np.unique(u[member])) / total if total else 0.0
        is_rich = id(f) in rich_ids
        if is_rich:
            coverage.append(cov)
        e_plus = add_energy(u.tolist())
        energies.append(e_plus)
        fam_rows.append({"slope": str(f.slope), "s": s, "t": t, "sign": sign, "size": len(f),
                         "rich": is_rich, "coverage": cov, "intercepts_in_set": fam_inside,
                         "intercept_add_energy": e_plus})

    method = concurrency
    if method == "auto":
        method = "pairwise" if len(proper) <= cfg.pairwise_cap else "lattice-points"
    if method == "pairwise":
        if len(proper) > cfg.pairwise_cap:
            raise ResourceLimit(f"pairwise pencil search capped at {cfg.pairwise_cap} lines")
        max_conc = max_pencil_pairwise(proper) if len(proper) >= 2 else 0
    elif method == "lattice-points":
        max_conc = max_pencil_on_grid(g, proper)
    else:
        raise InvalidArgument(f"unknown concurrency method {concurrency!r}")

    return StructureReport(
        N=N,
        n_lines=len(L),
        n_proper=len(proper),
        incidences=int(np.sum(counts)),
        rich_slopes=len(rich),
        rich_threshold=threshold,
        max_parallel=max_parallel,
        median_family_size=float(statistics.median(len(f) for f in rich)) if rich else 0.0,
        max_concurrent=max_conc,
        concurrency_method=method,
        beta_hat=math.log(max_parallel) / math.log(N) if max_parallel > 0 and N > 1 else 0.0,
        gamma_hat=math.log(max_conc) / math.log(N) if max_conc > 0 and N > 1 else 0.0,
        slope_set_match=float(match),
        intercept_coverage=float(statistics.fmean(coverage)) if coverage else 0.0,
        intercepts_in_set=bool(inside),
        slope_mult_energy=mult_energy(f.slope for f in rich),
        intercept_add_energy_histogram=energies,
        families=fam_rows,
    )


def analyze_configuration(P: ProductSet, L: Sequence[Line], cfg: AnalyzerConfig = AnalyzerConfig()) -> dict:
    """Properness, parallel families and pencils for lines on an arbitrary product set."""
    counts = per_line_counts(P, L)
    part = classify_proper(P, L, cfg, counts)
    index = {ln: i for i, ln in enumerate(L)}
    fams = group_parallel(part.proper, [counts[index[ln]] for ln in part.proper])
    pencils = find_concurrent(part.proper, min_size=2, cap=cfg.pairwise_cap)
    N = len(P)
    slope_e, icept_e = family_energy_profile(fams)
    max_par = len(fams[0]) if fams else 0
    max_conc = len(pencils[0]) if pencils else 0
    return {
        "N": N,
        "n_lines": len(L),
        "n_proper": len(part.proper),
        "n_underfull": len(part.underfull),
        "n_overfull": len(part.overfull),
        "incidences": int(sum(counts)),
        "max_parallel": max_par,
        "max_concurrent": max_conc,
        "beta_hat": math.log(max_par) / math.log(N) if max_par and N > 1 else 0.0,
        "gamma_hat": math.log(max_conc) / math.log(N) if max_conc and N > 1 else 0.0,
        "slope_mult_energy": slope_e,
        "intercept_add_energy_histogram": icept_e,
        "families": [{"slope": "V" if f.slope is None else str(f.slope), "size": len(f),
                      "intercept_add_energy": e} for f, e in zip(fams, icept_e)],
    }


# -- energy injection for pencils ---------------------------------------------------

@dataclass
class InjectionCheck:
    lhs: int
    rhs: int
    passed: bool
    per_line: list


def concurrency_energy_check(P: ProductSet, center, L: Sequence[Line]) -> InjectionCheck:
    """Check E×(A', B') >= sum over lines of m_l^2 for a pencil through ``center``.

    A' and B' are the coordinates translated so the center is the origin, with 0
    removed; m_l counts points of A' x B' on l.  Axis-parallel lines are dropped.
    """
    cx, cy = (as_number(c) for c in center)
    for ln in L:
        if not ln.contains(cx, cy):
            raise InvalidArgument(f"line {ln} does not pass through the center")
    A2 = [a - cx for a in P.A if a != cx]
    B2 = set(b - cy for b in P.B if b != cy)
    per_line = []
    for ln in L:
        if ln.slope is None or ln.slope == 0:
            continue
        per_line.append(sum(1 for a in A2 if ln.slope * a in B2))
    lhs = mult_energy_bipartite(A2, B2)
    rhs = sum(m * m for m in per_line)
    return InjectionCheck(lhs, rhs, lhs >= rhs, per_line)


def family_energy_profile(families: Sequence[ParallelFamily]) -> tuple[int, list[int]]:
    """E×(slopes) and E+(intercepts) of each family."""
    slopes = [f.slope for f in families if f.slope is not None]
    return mult_energy(slopes), [add_energy(f.intercept_set) for f in families]
