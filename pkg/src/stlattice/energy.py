"""Additive and multiplicative energies, representation counts, shifted intervals.

Every count here is exact.  The hashed paths group ordered pairs by their exact
sum or product and return the sum of squared multiplicities; the ``*_oracle``
functions enumerate quadruples directly and exist to validate them.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgument, ResourceLimit
from .exactnum import Number, QuadExt, as_number, is_rational, st_of

ORACLE_CAP = 60
R2_ORACLE_CAP = 200
# dense integer convolution is used when the spread of the set is at most this
_DENSE_SPREAD = 1 << 22


@dataclass(frozen=True)
class NumberSet:
    """Sorted, deduplicated exact numbers; ``shift`` records x for [n] + x."""

    elements: tuple = ()
    shift: Number | None = None

    @classmethod
    def of(cls, values: Iterable, shift=None) -> "NumberSet":
        return cls(tuple(sorted({as_number(v) for v in values})),
                   None if shift is None else as_number(shift))

    @classmethod
    def interval(cls, n: int, shift=None) -> "NumberSet":
        """[n] = {1..n}, optionally translated by ``shift``."""
        if shift is None or shift == 0:
            return cls(tuple(Fraction(j) for j in range(1, n + 1)))
        x = as_number(shift)
        return cls(tuple(j + x for j in range(1, n + 1)), x)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        return x in set(self.elements)


@dataclass
class EnergyReport:
    set_sizes: tuple[int, int]
    additive: int
    multiplicative: int
    sumset_size: int
    method: str = "hashed"
    bipartite: int | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "set_sizes": list(self.set_sizes),
            "additive": self.additive,
            "multiplicative": self.multiplicative,
            "sumset_size": self.sumset_size,
            "method": self.method,
        }
        if self.bipartite is not None:
            out["bipartite_multiplicative"] = self.bipartite
        out.update(self.extra)
        return out


def _elements(A) -> list:
    if isinstance(A, NumberSet):
        return list(A.elements)
    return sorted({as_number(a) for a in A})


def _square_sum(counts: Iterable[int]) -> int:
    return sum(c * c for c in counts)


# -- representation counts ---------------------------------------------------

def r_mm(m: int, k) -> int:
    """Number of (x, y) in [m]^2 with x/y = k, as floor(m / max(s(k), t(k)))."""
    if m < 1:
        raise InvalidArgument("m must be >= 1")
    s, t = st_of(k)
    return m // max(s, t)


def r_mm_bruteforce(m: int, k) -> int:
    k = Fraction(k)
    return sum(1 for x in range(1, m + 1) for y in range(1, m + 1) if Fraction(x, y) == k)


def r2_mm(m: int, k, cap: int = R2_ORACLE_CAP) -> int:
    """|{(x, y, z, w) in [m]^4 : xy / (zw) = k}| by counting products over [m]^2."""
    if m < 1:
        raise InvalidArgument("m must be >= 1")
    if m > cap:
        raise ResourceLimit(f"r2_mm oracle capped at m <= {cap}, got {m}")
    s, t = st_of(k)
    if max(s, t) > m * m:
        return 0
    prods = Counter(x * y for x in range(1, m + 1) for y in range(1, m + 1))
    # xy * t == zw * s  <=>  zw = v * t / s
    total = 0
    for v, c in prods.items():
        if (v * t) % s == 0:
            total += c * prods.get(v * t // s, 0)
    return total


# -- sums and energies ---------------------------------------------------------

def sumset(A) -> NumberSet:
    xs = _elements(A)
    return NumberSet(tuple(sorted({a + b for a in xs for b in xs})))


def _integer_scale(xs: Sequence) -> int | None:
    """Common denominator if every element is rational, else None."""
    if not all(is_rational(x) for x in xs):
        return None
    return math.lcm(*(Fraction(x).denominator for x in xs)) if xs else 1


def _autocorrelation_counts(ints: Sequence[int]) -> np.ndarray:
    """Counts c[v] = #{(a, b) : a + b = v} for distinct ints, exact.

    Kronecker substitution: pack the indicator into one big integer with
    32-bit slots, square it, unpack.  Slot width bounds counts by 2**32.
    """
    lo = min(ints)
    idx = np.asarray(ints, dtype=np.int64) - lo
    ind = np.zeros(int(idx.max()) + 1, dtype="<u4")
    ind[idx] = 1
    big = int.from_bytes(ind.tobytes(), "little")
    sq = big * big
    nbytes = 4 * (2 * len(ind) - 1)
    return np.frombuffer(sq.to_bytes(nbytes, "little"), dtype="<u4").astype(np.int64)


def add_energy(A) -> int:
    """E+(A) = #{(a, b, c, d) in A^4 : a + b = c + d}."""
    xs = _elements(A)
    if not xs:
        return 0
    den = _integer_scale(xs)
    if den is not None:
        ints = [int(Fraction(x) * den) for x in xs]
        if max(ints) - min(ints) <= _DENSE_SPREAD and len(ints) > 64:
            c = _autocorrelation_counts(ints)
            return int((c * c).sum())
    return _square_sum(Counter(a + b for a in xs for b in xs).values())


def add_energy_oracle(A) -> int:
    xs = _elements(A)
    if len(xs) > ORACLE_CAP:
        raise ResourceLimit(f"oracle capped at |A| <= {ORACLE_CAP}")
    sums = [a + b for a, b in product(xs, repeat=2)]
    # every quadruple is compared directly; no hashing
    return sum(1 for u in sums for v in sums if u == v)


def mult_energy(A) -> int:
    """E×(A) = #{(a, b, c, d) in A^4 : ab = cd}; zeros are counted literally."""
    xs = _elements(A)
    return _square_sum(Counter(a * b for a in xs for b in xs).values())


def mult_energy_oracle(A) -> int:
    xs = _elements(A)
    if len(xs) > ORACLE_CAP:
        raise ResourceLimit(f"oracle capped at |A| <= {ORACLE_CAP}")
    prods = [a * b for a, b in product(xs, repeat=2)]
    return sum(1 for u in prods for v in prods if u == v)


def mult_energy_bipartite(A, B) -> int:
    """#{(a, b, a', b') in (A x B)^2 : ab = a'b'}."""
    xs, ys = _elements(A), _elements(B)
    return _square_sum(Counter(a * b for a in xs for b in ys).values())


def mult_energy_bipartite_oracle(A, B) -> int:
    xs, ys = _elements(A), _elements(B)
    if max(len(xs), len(ys)) > ORACLE_CAP:
        raise ResourceLimit(f"oracle capped at |A|, |B| <= {ORACLE_CAP}")
    prods = [a * b for a in xs for b in ys]
    return sum(1 for u in prods for v in prods if u == v)


def mult_energy_via_ratios(A, m: int) -> int:
    """E×(A, [m]) summed as r_mm(m, a/b) over ordered pairs; needs 0 not in A.

    Pairs whose ratio is not a positive rational contribute nothing.
    """
    xs = _elements(A)
    if any(x == 0 for x in xs):
        raise InvalidArgument("0 in A")
    total = 0
    for a in xs:
        for b in xs:
            q = a / b
            if is_rational(q) and q > 0:
                total += r_mm(m, q)
    return total


# -- shifted intervals -----------------------------------------------------------

def _reject_zero(xs):
    if any(x == 0 for x in xs):
        raise InvalidArgument("A must not contain 0")


def shifted_mult_energy(A, n: int, x) -> int:
    """E×(A, [n] + x) for nonzero A and exact shift x."""
    xs = _elements(A)
    _reject_zero(xs)
    return mult_energy_bipartite(xs, NumberSet.interval(n, x))


def r_xn(x, n: int, y) -> int:
    """#{(p, q) in [n]^2 : y = (p + x)/(q + x)}."""
    x, y = as_number(x), as_number(y)
    if is_rational(x):
        raise InvalidArgument("r_xn needs an irrational shift")
    return sum(1 for p in range(1, n + 1) for q in range(1, n + 1) if (p + x) / (q + x) == y)


def shifted_energy_by_ratios(A, n: int, x) -> int:
    """|A|*n + #{(a1, a2) : a2/a1 = (p+x)/(q+x) for some p != q}, for irrational x.

    Exact only for irrational x, where every ratio other than 1 is represented
    at most once.  Uses the rearrangement (p+x)a1 = (q+x)a2.
    """
    xs = _elements(A)
    _reject_zero(xs)
    x = as_number(x)
    if is_rational(x):
        raise InvalidArgument("irrational shift required")
    ratios = {(p + x) / (q + x) for p in range(1, n + 1) for q in range(1, n + 1) if p != q}
    return len(xs) * n + sum(1 for a1 in xs for a2 in xs if a2 / a1 in ratios)


# -- normalization to integers -------------------------------------------------

def _ratio_classes(xs) -> list[list]:
    """Classes under a ~ b iff b/a is a positive rational; order of first appearance."""
    classes: list[list] = []
    for a in xs:
        for cls in classes:
            q = a / cls[0]
            if is_rational(q) and q > 0:
                cls.append(a)
                break
        else:
            classes.append([a])
    return classes


def normalize_to_integers(A, n: int | None = None) -> NumberSet:
    """Nonzero integers B with |B| = |A| and E×(A, [n]) <= E×(B, [n]).

    Each ratio class j is divided by its first element and multiplied by
    M**(10 (j-1)) so classes land in separated decades, then all denominators
    are cleared.  M starts at max(10, ceil(max |a|)) and grows tenfold in the
    rare case that two scaled classes collide.  ``n`` is accepted for symmetry
    with the energy it preserves; the construction does not depend on it.
    """
    xs = _elements(A)
    _reject_zero(xs)
    if not xs:
        return NumberSet()
    classes = _ratio_classes(xs)
    big = max(10, math.ceil(max(abs(float(a)) for a in xs)))
    while True:
        scaled = []
        for j, cls in enumerate(classes):
            rep = cls[0]
            scaled += [Fraction(a / rep) * big ** (10 * j) for a in cls]
        if len(set(scaled)) == len(xs):
            break
        big *= 10
    den = math.lcm(*(c.denominator for c in scaled))
    return NumberSet.of(int(c * den) for c in scaled)


# -- reports ------------------------------------------------------------------------

def energy_report(A, interval: int | None = None, shift=None, oracle: bool = False) -> EnergyReport:
    xs = _elements(A)
    if oracle:
        add, mult = add_energy_oracle(xs), mult_energy_oracle(xs)
    else:
        add, mult = add_energy(xs), mult_energy(xs)
    rep = EnergyReport((len(xs), interval or 0), add, mult, len(sumset(xs)),
                       "oracle" if oracle else "hashed")
    if interval is not None:
        B = NumberSet.interval(interval, shift)
        if shift is not None and shift != 0:
            _reject_zero(xs)
        rep.bipartite = (mult_energy_bipartite_oracle(xs, B) if oracle
                         else mult_energy_bipartite(xs, B))
    return rep
