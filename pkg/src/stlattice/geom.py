"""Points, lines, Cartesian-product point sets and exact incidence counting."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .energy import NumberSet
from .errors import InvalidArgument, ResourceLimit
from .exactnum import Number, as_number, format_number, is_rational, parse_number

DEFAULT_ORACLE_CAP = 50_000_000


@dataclass(frozen=True)
class GridSpec:
    """The lattice [w] x [h]; w plays n^alpha and h plays n^(1-alpha)."""

    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise InvalidArgument(f"grid dimensions must be positive, got {self.w}x{self.h}")

    @property
    def N(self) -> int:
        return self.w * self.h

    @property
    def alpha(self) -> float:
        return math.log(self.w) / math.log(self.N) if self.N > 1 else 0.5

    @classmethod
    def from_alpha(cls, N: int, alpha: float) -> "GridSpec":
        """Nearest integer grid: w = round(N**alpha), h = round(N / w)."""
        w = max(1, round(N ** alpha))
        return cls(w, max(1, round(N / w)))

    def product_set(self) -> "ProductSet":
        return ProductSet(NumberSet.interval(self.w), NumberSet.interval(self.h))


@dataclass(frozen=True)
class ProductSet:
    A: NumberSet
    B: NumberSet

    @classmethod
    def of(cls, A: Iterable, B: Iterable) -> "ProductSet":
        return cls(NumberSet.of(A), NumberSet.of(B))

    def __len__(self):
        return len(self.A) * len(self.B)

    def points(self):
        return [(a, b) for a in self.A for b in self.B]

    def as_grid(self) -> GridSpec | None:
        """The GridSpec this set equals, if it is [w] x [h]."""
        w, h = len(self.A), len(self.B)
        if w and h and self.A.elements == NumberSet.interval(w).elements \
                and self.B.elements == NumberSet.interval(h).elements:
            return GridSpec(w, h)
        return None


@dataclass(frozen=True)
class Line:
    """y = slope*x + intercept, or x = intercept when slope is None."""

    slope: Number | None
    intercept: Number

    @classmethod
    def make(cls, slope, intercept) -> "Line":
        return cls(None if slope is None else as_number(slope), as_number(intercept))

    @classmethod
    def through(cls, point, slope) -> "Line":
        x, y = (as_number(c) for c in point)
        if slope is None:
            return cls(None, x)
        slope = as_number(slope)
        return cls(slope, y - slope * x)

    @property
    def vertical(self) -> bool:
        return self.slope is None

    def contains(self, x, y) -> bool:
        if self.slope is None:
            return x == self.intercept
        return self.slope * x + self.intercept == y

    def sort_key(self):
        return (self.slope is None, self.slope if self.slope is not None else 0, self.intercept)

    def __str__(self):
        if self.slope is None:
            return f"V {format_number(self.intercept)}"
        return f"S {format_number(self.slope)} {format_number(self.intercept)}"


def parse_line(text: str) -> Line:
    parts = text.split()
    if len(parts) == 2 and parts[0] == "V":
        return Line(None, parse_number(parts[1]))
    if len(parts) == 3 and parts[0] == "S":
        return Line(parse_number(parts[1]), parse_number(parts[2]))
    raise InvalidArgument(f"cannot parse line {text!r}")


@dataclass(frozen=True)
class AnalyzerConfig:
    k: Fraction = Fraction(4)
    oracle_cap: int = DEFAULT_ORACLE_CAP
    pairwise_cap: int = 20_000
    rich_fraction: Fraction = Fraction(1, 8)

    def __post_init__(self):
        if Fraction(self.k) < 1:
            raise InvalidArgument("properness constant k must be >= 1")


# -- counting -------------------------------------------------------------------

def incidences_oracle(P: ProductSet, L: Sequence[Line], cap: int = DEFAULT_ORACLE_CAP) -> int:
    """Count (point, line) memberships by substituting every point in every line."""
    if len(P) * len(L) > cap:
        raise ResourceLimit(f"|P|*|L| = {len(P) * len(L)} exceeds oracle cap {cap}")
    pts = P.points()
    return sum(1 for ln in L for (x, y) in pts if ln.contains(x, y))


def line_count(P: ProductSet, ln: Line, _bset=None, _aset=None) -> int:
    if ln.slope is None:
        aset = _aset if _aset is not None else set(P.A.elements)
        return len(P.B) if ln.intercept in aset else 0
    bset = _bset if _bset is not None else set(P.B.elements)
    return sum(1 for a in P.A if ln.slope * a + ln.intercept in bset)


def per_line_counts(P: ProductSet, L: Sequence[Line]) -> list[int]:
    g = P.as_grid()
    if g is not None:
        return grid_counts(g, L).tolist()
    bset, aset = set(P.B.elements), set(P.A.elements)
    return [line_count(P, ln, bset, aset) for ln in L]


def incidences_fast(P: ProductSet, L: Sequence[Line]) -> int:
    """I(P, L) via hash membership in B, or lattice arithmetic when P is a grid."""
    return int(sum(per_line_counts(P, L)))


def _count_positive(w: int, h: int, s: int, t: int, u):
    """Lattice points of [w] x [h] on y = (s x + u)/t, s, t > 0 coprime, u integer(s).

    Such a line has integer points exactly at x = x0 (mod t) with
    x0 = -u * s^-1 (mod t); y stays in [1, h] for (t - u)/s <= x <= (t h - u)/s.
    Works elementwise on numpy int64 arrays or on Python ints.
    """
    inv = pow(s, -1, t) if t > 1 else 0
    x0 = (-u * inv) % t
    lo = -((u - t) // s)            # ceil((t - u) / s)
    hi = (t * h - u) // s
    if isinstance(u, np.ndarray):
        lo = np.maximum(lo, 1)
        hi = np.minimum(hi, w)
        first = lo + (x0 - lo) % t
        return np.where(first <= hi, (hi - first) // t + 1, 0)
    lo, hi = max(lo, 1), min(hi, w)
    first = lo + (x0 - lo) % t
    return (hi - first) // t + 1 if first <= hi else 0


def grid_line_count(g: GridSpec, ln: Line) -> int:
    """Exact number of points of [w] x [h] on ``ln``, computed arithmetically."""
    if ln.slope is None:
        c = ln.intercept
        return g.h if is_rational(c) and c == int(c) and 1 <= c <= g.w else 0
    slope, c = ln.slope, ln.intercept
    if not is_rational(slope) or not is_rational(c):
        # an irrational slope meets Z^2 at most once; count by substitution
        return sum(1 for x in range(1, g.w + 1)
                   if is_rational(slope * x + c) and _in_range(slope * x + c, g.h))
    slope, c = Fraction(slope), Fraction(c)
    if slope == 0:
        return g.w if c.denominator == 1 and 1 <= c <= g.h else 0
    if slope < 0:
        # mirror y -> h + 1 - y
        slope, c = -slope, g.h + 1 - c
    s, t = slope.numerator, slope.denominator
    u = c * t
    if u.denominator != 1:
        return 0
    return int(_count_positive(g.w, g.h, s, t, int(u)))


def _in_range(v, h) -> bool:
    v = Fraction(v)
    return v.denominator == 1 and 1 <= v <= h


def grid_counts(g: GridSpec, L: Sequence[Line]) -> np.ndarray:
    """Vectorized grid_line_count: groups lines by slope and counts per group."""
    out = np.zeros(len(L), dtype=np.int64)
    groups: dict = {}
    for i, ln in enumerate(L):
        groups.setdefault(ln.slope, []).append(i)
    for slope, idx in groups.items():
        if slope is None or not is_rational(slope) or slope == 0:
            for i in idx:
                out[i] = grid_line_count(g, L[i])
            continue
        slope = Fraction(slope)
        neg = slope < 0
        s, t = abs(slope.numerator), slope.denominator
        us, ok = [], []
        for i in idx:
            c = L[i].intercept
            if not is_rational(c):
                out[i] = grid_line_count(g, L[i])
                continue
            c = Fraction(c)
            if neg:
                c = g.h + 1 - c
            u = c * t
            if u.denominator == 1:
                us.append(int(u))
                ok.append(i)
        if ok:
            out[np.asarray(ok)] = _count_positive(g.w, g.h, s, t, np.asarray(us, dtype=np.int64))
    return out


def grid_line_count_bruteforce(g: GridSpec, ln: Line) -> int:
    """Reference count: substitute every column x and test the resulting y."""
    if ln.slope is None:
        return g.h if ln.intercept in range(1, g.w + 1) else 0
    total = 0
    for x in range(1, g.w + 1):
        y = ln.slope * x + ln.intercept
        total += y in range(1, g.h + 1)
    return total


# -- properness and steepness ------------------------------------------------------

def is_proper(count: int, N: int, k) -> bool:
    """count in (N^(1/3)/k, k N^(1/3)], decided exactly by cubing."""
    k = Fraction(k)
    return (count * k) ** 3 > N and count ** 3 <= k ** 3 * N


@dataclass
class ProperPartition:
    proper: list = field(default_factory=list)
    underfull: list = field(default_factory=list)
    overfull: list = field(default_factory=list)


def classify_proper(P, L: Sequence[Line], cfg: AnalyzerConfig = AnalyzerConfig(),
                    counts: Sequence[int] | None = None) -> ProperPartition:
    """Split L into proper / underfull / overfull lines with respect to P.

    ``P`` is a GridSpec or a ProductSet.
    """
    if isinstance(P, GridSpec):
        N = P.N
        counts = grid_counts(P, L) if counts is None else counts
    else:
        N = len(P)
        counts = per_line_counts(P, L) if counts is None else counts
    k = Fraction(cfg.k)
    part = ProperPartition()
    for ln, c in zip(L, counts):
        c = int(c)
        if (c * k) ** 3 <= N:
            part.underfull.append(ln)
        elif c ** 3 > k ** 3 * N:
            part.overfull.append(ln)
        else:
            part.proper.append(ln)
    return part


def steepness(g: GridSpec, slope) -> str:
    """'steep' iff s/t > h/w; the boundary counts as non-steep."""
    slope = Fraction(slope)
    if slope <= 0:
        raise InvalidArgument("steepness is defined for positive slopes")
    return "steep" if slope * g.w > g.h else "non-steep"


def mirror_line(g: GridSpec, ln: Line) -> Line:
    """Image of ``ln`` under y -> h + 1 - y."""
    if ln.slope is None:
        return ln
    return Line(-ln.slope, g.h + 1 - ln.intercept)


# -- file formats ------------------------------------------------------------------

def write_points(path, P: ProductSet) -> None:
    with open(path, "w") as fh:
        for a, b in P.points():
            fh.write(f"{format_number(a)} {format_number(b)}\n")


def read_points(path) -> list[tuple]:
    out = []
    with open(path) as fh:
        for raw in fh:
            raw = raw.strip()
            if not raw or raw.startswith("#"):
                continue
            parts = raw.split()
            if len(parts) != 2:
                raise InvalidArgument(f"bad point line {raw!r}")
            out.append((parse_number(parts[0]), parse_number(parts[1])))
    return out


def points_to_product(points: Sequence[tuple]) -> ProductSet:
    """The product set spanned by ``points``; they must form a full product."""
    P = ProductSet.of({p[0] for p in points}, {p[1] for p in points})
    if len(P) != len(set(points)):
        raise InvalidArgument("points file is not a Cartesian product A x B")
    return P


def write_lines(path, L: Sequence[Line]) -> None:
    with open(path, "w") as fh:
        for ln in L:
            fh.write(f"{ln}\n")


def read_lines(path) -> list[Line]:
    with open(path) as fh:
        return [parse_line(raw) for raw in fh if raw.strip() and not raw.startswith("#")]


def count_histogram(counts: Iterable[int]) -> dict[int, int]:
    return dict(sorted(Counter(int(c) for c in counts).items()))
