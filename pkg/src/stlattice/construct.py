"""Generators of extremal point-line configurations and GAP point sets."""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .energy import NumberSet
from .errors import InvalidArgument
from .exactnum import as_number
from .geom import GridSpec, Line, ProductSet, _count_positive, steepness
from .structure import SlopeWindow, intercept_numerators, theorem4_slope_pairs


@dataclass(frozen=True)
class GapSpec:
    """Generalized arithmetic progression {a + sum k_j b_j : 0 <= k_j < n_j}."""

    a: object
    steps: tuple
    lengths: tuple

    def __post_init__(self):
        if len(self.steps) != len(self.lengths):
            raise InvalidArgument("steps and lengths differ in length")
        if any(n < 1 for n in self.lengths):
            raise InvalidArgument("GAP lengths must be >= 1")

    @property
    def d(self) -> int:
        return len(self.steps)

    @property
    def size(self) -> int:
        out = 1
        for n in self.lengths:
            out *= n
        return out


@dataclass
class GapResult:
    elements: NumberSet
    proper: bool


def gap_set(spec: GapSpec) -> GapResult:
    """The GAP's elements, sorted and deduplicated; ``proper`` iff no collisions."""
    a = as_number(spec.a)
    steps = [as_number(b) for b in spec.steps]
    vals = [a + sum((k * b for k, b in zip(ks, steps)), Fraction(0))
            for ks in product(*(range(n) for n in spec.lengths))]
    elems = NumberSet.of(vals)
    return GapResult(elems, len(elems) == spec.size)


@dataclass
class ConstructManifest:
    kind: str
    grid: tuple
    params: dict
    slopes: list = field(default_factory=list)      # [s, t, sign, lines]
    candidates: int = 0
    selected: int = 0
    min_selected_count: int = 0
    lines_sha256: str = ""

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=1)


def _lines_digest(L: Sequence[Line]) -> str:
    h = hashlib.sha256()
    for ln in L:
        h.update(str(ln).encode())
        h.update(b"\n")
    return h.hexdigest()


def construct_elekes(r: int):
    """P = [r] x [2r^2], lines y = a x + b with a in [r], b in [r^2]."""
    if r < 1:
        raise InvalidArgument("r must be >= 1")
    P = ProductSet(NumberSet.interval(r), NumberSet.interval(2 * r * r))
    L = [Line(Fraction(a), Fraction(b)) for a in range(1, r + 1) for b in range(1, r * r + 1)]
    man = ConstructManifest("elekes", (r, 2 * r * r), {"r": r},
                            [[a, 1, 1, r * r] for a in range(1, r + 1)],
                            len(L), len(L), r, _lines_digest(L))
    return P, L, man


def _slope_candidates(g: GridSpec, s: int, t: int, k, complete: bool):
    """Intercept numerators u (intercept u/t) and exact counts for slope s/t > 0."""
    w, h = g.w, g.h
    if complete:
        # every line through the t leftmost columns or the s bottom rows
        i1, j1 = np.meshgrid(np.arange(1, min(t, w) + 1), np.arange(1, h + 1), indexing="ij")
        i2, j2 = np.meshgrid(np.arange(1, w + 1), np.arange(1, min(s, h) + 1), indexing="ij")
        u = np.unique(np.concatenate([(j1 * t - i1 * s).ravel(), (j2 * t - i2 * s).ravel()]))
        u = u.astype(np.int64)
    else:
        u = intercept_numerators(g, s, t, k)
    counts = _count_positive(w, h, s, t, u) if len(u) else np.zeros(0, dtype=np.int64)
    if not complete:
        top = -(-w // t) if steepness(g, Fraction(s, t)) == "non-steep" else -(-h // s)
        keep = counts >= max(top - 1, 1)
        u, counts = u[keep], counts[keep]
    else:
        keep = counts > 0
        u, counts = u[keep], counts[keep]
    return u, counts


def construct_general_alpha(g: GridSpec, win: SlopeWindow = SlopeWindow(), k=Fraction(4),
                            n_lines: int | None = None, complete: bool = False):
    """Lines of the rich slopes on [w] x [h], best-covered first.

    For each slope s/t of the rich slope set (both signs) the candidate lines
    are the distinct lines through the t leftmost columns and the s bottom rows.
    By default only lines whose intercept lies in the lattice intercept set and
    whose count is ceil(w/t) or ceil(w/t)-1 (ceil(h/s) or ceil(h/s)-1 when
    steep) are kept; ``complete=True`` keeps every such line.  Candidates are
    ranked by count descending, then (t, s, sign, intercept) ascending.
    """
    pairs = theorem4_slope_pairs(g, win)
    cols = {key: [] for key in ("u", "count", "s", "t", "sign", "num")}
    for s, t in pairs:
        u, c = _slope_candidates(g, s, t, k, complete)
        for sign in (-1, 1):
            # negative slope: mirror y -> h + 1 - y, intercept (h + 1) - u/t
            num = u if sign > 0 else (g.h + 1) * t - u
            cols["num"].append(num)
            cols["count"].append(c)
            for key, val in (("s", s), ("t", t), ("sign", sign)):
                cols[key].append(np.full(len(u), val, dtype=np.int64))
    if pairs:
        arr = {key: np.concatenate(v) for key, v in cols.items() if key != "u"}
    else:
        arr = {key: np.zeros(0, dtype=np.int64) for key in ("count", "s", "t", "sign", "num")}
    total = len(arr["count"])
    if n_lines is None:
        n_lines = total
    if n_lines > total:
        raise InvalidArgument(f"requested {n_lines} lines but only {total} candidates are available")
    order = np.lexsort((arr["num"], arr["sign"], arr["s"], arr["t"], -arr["count"]))[:n_lines]
    L = []
    per_slope: dict = {}
    for i in order.tolist():
        s, t, sign, num = int(arr["s"][i]), int(arr["t"][i]), int(arr["sign"][i]), int(arr["num"][i])
        L.append(Line(Fraction(sign * s, t), Fraction(num, t)))
        per_slope[(t, s, sign)] = per_slope.get((t, s, sign), 0) + 1
    man = ConstructManifest(
        "general", (g.w, g.h),
        {"k": str(Fraction(k)), "k_t": str(Fraction(win.k_t)), "k_s": str(Fraction(win.k_s)),
         "n_lines": n_lines, "complete": complete},
        [[s, t, sign, n] for (t, s, sign), n in sorted(per_slope.items())],
        total, len(L), int(arr["count"][order[-1]]) if len(order) else 0, _lines_digest(L))
    return g.product_set(), L, man


def construct_erdos(m: int, n_lines: int | None = None, win: SlopeWindow = SlopeWindow(),
                    k=Fraction(4), complete: bool = False):
    """The m x m grid configuration (alpha = 1/2)."""
    if m < 2:
        raise InvalidArgument("m must be >= 2")
    P, L, man = construct_general_alpha(GridSpec(m, m), win, k, n_lines, complete)
    man.kind = "erdos"
    return P, L, man


def construct_random(g: GridSpec, n_lines: int, seed: int = 0):
    """Baseline: lines through random grid points with slopes +-s/t, where (s, t) is a
    uniformly random coprime pair in [N]^2."""
    if n_lines < 0:
        raise InvalidArgument("n_lines must be >= 0")
    rng = random.Random(seed)
    L = set()
    while len(L) < n_lines:
        s, t = rng.randint(1, g.N), rng.randint(1, g.N)
        if math.gcd(s, t) != 1:
            continue
        slope = Fraction(s, t) * rng.choice((-1, 1))
        L.add(Line.through((rng.randint(1, g.w), rng.randint(1, g.h)), slope))
    L = sorted(L, key=Line.sort_key)
    man = ConstructManifest("random", (g.w, g.h), {"seed": seed, "n_lines": n_lines}, [],
                            n_lines, n_lines, 0, _lines_digest(L))
    return g.product_set(), L, man


def construct_pencil(center, slopes: Sequence) -> list[Line]:
    """One line per slope through ``center``; None is the vertical slope."""
    norm = [None if s is None else as_number(s) for s in slopes]
    if len(set(norm)) != len(norm):
        raise InvalidArgument("duplicate slopes in pencil")
    return [Line.through(center, s) for s in norm]
