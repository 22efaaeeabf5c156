import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from stlattice.energy import NumberSet
from stlattice.errors import InvalidArgument, ResourceLimit
from stlattice.exactnum import sqrt
from stlattice.geom import (AnalyzerConfig, GridSpec, Line, ProductSet, classify_proper,
                            count_histogram, grid_counts, grid_line_count,
                            grid_line_count_bruteforce, incidences_fast, incidences_oracle,
                            is_proper, mirror_line, parse_line, points_to_product, read_lines,
                            read_points, steepness, write_lines, write_points)

F = Fraction
G10 = GridSpec(10, 11)


def elekes2():
    P = ProductSet(NumberSet.interval(2), NumberSet.interval(8))
    L = [Line.make(a, b) for a in (1, 2) for b in range(1, 5)]
    return P, L


@pytest.mark.parametrize("count", [incidences_oracle, incidences_fast])
def test_incidence_examples(count):
    P, L = elekes2()
    assert count(P, []) == 0
    assert count(ProductSet.of([1, 2], [1, 2]), [Line.make(1, 0)]) == 2
    assert count(P, L) == 16


def test_oracle_cap():
    P = GridSpec(100, 100).product_set()
    with pytest.raises(ResourceLimit):
        incidences_oracle(P, [Line.make(1, 0)] * 2, cap=10_000)


def test_figure1_counts():
    through11 = lambda sl: Line.through((1, 1), sl)
    assert grid_line_count(G10, through11(F(1, 3))) == 4
    assert grid_line_count(G10, through11(1)) == 10
    assert grid_line_count(G10, Line.make(2, -1)) == 6
    for sl in (F(1, 3), 1, 2):
        ln = through11(sl)
        assert grid_line_count(G10, ln) == grid_line_count_bruteforce(G10, ln)
    assert incidences_fast(G10.product_set(), [through11(2)]) <= 6


def test_steepness():
    assert steepness(G10, F(1, 3)) == "non-steep"
    assert steepness(G10, 2) == "steep"
    assert steepness(GridSpec(7, 7), 1) == "non-steep"
    assert steepness(G10, F(11, 10)) == "non-steep"
    with pytest.raises(InvalidArgument):
        steepness(G10, -1)


def test_grid_count_exhaustive_small_slopes():
    for w, h in ((1, 1), (5, 9), (13, 7), (50, 50)):
        g = GridSpec(w, h)
        lines = []
        for s in range(1, 11):
            for t in range(1, 11):
                if math.gcd(s, t) != 1:
                    continue
                for u in range(-s * w, t * h + 1, max(1, (t * h + s * w) // 40)):
                    for sign in (1, -1):
                        c = F(u, t) if sign > 0 else g.h + 1 - F(u, t)
                        lines.append(Line(F(sign * s, t), c))
        fast = grid_counts(g, lines)
        for ln, c in zip(lines, fast):
            assert c == grid_line_count_bruteforce(g, ln) == grid_line_count(g, ln)
            s, t = abs(ln.slope.numerator), ln.slope.denominator
            assert c <= min(-(-w // t), -(-h // s))


def test_grid_count_special_lines():
    g = GridSpec(6, 4)
    assert grid_line_count(g, Line(None, F(3))) == 4
    assert grid_line_count(g, Line(None, F(7))) == 0
    assert grid_line_count(g, Line(None, F(5, 2))) == 0
    assert grid_line_count(g, Line(F(0), F(2))) == 6
    assert grid_line_count(g, Line(F(1, 2), F(1, 3))) == 0
    assert grid_line_count(g, Line.through((2, 3), sqrt(2))) == 1
    assert grid_line_count(g, Line(sqrt(2), F(0))) == 0


@given(st.integers(1, 30), st.integers(1, 30), st.integers(-12, 12).filter(bool),
       st.integers(1, 12), st.fractions(min_value=-40, max_value=40, max_denominator=12))
def test_mirror_preserves_counts(w, h, s, t, c):
    g = GridSpec(w, h)
    ln = Line(F(s, t), c)
    assert grid_line_count(g, ln) == grid_line_count(g, mirror_line(g, ln))
    assert grid_line_count(g, ln) == grid_line_count_bruteforce(g, ln)


def _random_instance(rng, max_points):
    ka = rng.randint(1, 100)
    kb = max(1, min(100, max_points // ka))
    A = {F(rng.randint(-30, 30), rng.choice((1, 1, 2, 3))) for _ in range(ka)}
    B = {F(rng.randint(-30, 30), rng.choice((1, 1, 2))) for _ in range(kb)}
    P = ProductSet.of(A, B)
    pts = P.points()
    L = []
    for _ in range(rng.randint(0, 60)):
        p, q = rng.sample(pts, 2) if len(pts) > 1 else (pts[0], pts[0])
        if p[0] == q[0]:
            L.append(Line(None, p[0]))
        else:
            L.append(Line.through(p, (q[1] - p[1]) / (q[0] - p[0])))
    return P, L


def test_fast_equals_oracle_random():
    rng = random.Random(20240101)
    for _ in range(200):
        P, L = _random_instance(rng, 1000)
        assert incidences_fast(P, L) == incidences_oracle(P, L)


def test_fast_equals_oracle_full_scale():
    # |P| at the documented maximum of 10^4
    rng = random.Random(7)
    P = ProductSet.of(range(1, 101), [F(k, 2) for k in range(1, 101)])
    pts = P.points()
    L = [Line.through(rng.choice(pts), F(rng.randint(-6, 6), rng.randint(1, 6))) for _ in range(250)]
    assert incidences_fast(P, L) == incidences_oracle(P, L)


def test_properness():
    g = GridSpec(16, 64)
    assert is_proper(12, g.N, 2)
    assert not is_proper(5, g.N, 2) and is_proper(6, g.N, 2)
    assert is_proper(20, g.N, 2) and not is_proper(21, g.N, 2)
    part = classify_proper(g, [Line(F(1), F(100)), Line(F(0), F(3)), Line(None, F(5)),
                               Line.through((1, 1), F(4))], AnalyzerConfig(k=2))
    assert Line(F(1), F(100)) in part.underfull
    # the row y = 3 carries 16 points, inside (5.04, 20.16]
    assert Line(None, F(5)) in part.overfull and Line(F(0), F(3)) in part.proper
    assert Line.through((1, 1), F(4)) in part.proper


def test_axis_parallel_never_proper():
    g = GridSpec(40, 200)     # w, h far from N^(1/3) = 20
    L = [Line(None, F(x)) for x in range(1, 41)] + [Line(F(0), F(y)) for y in range(1, 201)]
    assert classify_proper(g, L, AnalyzerConfig(k=Fraction(3, 2))).proper == []


def test_product_set_matches_grid_for_classification():
    g = GridSpec(9, 12)
    L = [Line.through((1, y), F(1, 2)) for y in range(1, 13)]
    a = classify_proper(g, L)
    b = classify_proper(g.product_set(), L)
    assert (a.proper, a.underfull, a.overfull) == (b.proper, b.underfull, b.overfull)


def test_config_validation():
    with pytest.raises(InvalidArgument):
        AnalyzerConfig(k=F(1, 2))
    with pytest.raises(InvalidArgument):
        GridSpec(0, 3)


def test_from_alpha():
    g = GridSpec.from_alpha(2 ** 15, 0.4)
    assert (g.w, g.h) == (64, 512)
    assert abs(g.alpha - 0.4) < 1e-9


def test_file_roundtrip(tmp_path):
    P = ProductSet.of([1, F(1, 2), 1 + sqrt(2)], [3, -1])
    L = [Line(None, F(2)), Line(F(-1, 3), F(7, 2)), Line(sqrt(2), 1 - sqrt(2))]
    write_points(tmp_path / "p", P)
    write_lines(tmp_path / "l", L)
    assert points_to_product(read_points(tmp_path / "p")) == P
    assert read_lines(tmp_path / "l") == L
    assert str(L[1]) == "S -1/3 7/2" and str(L[0]) == "V 2"
    with pytest.raises(InvalidArgument):
        parse_line("Q 1 2")
    with pytest.raises(InvalidArgument):
        points_to_product([(F(1), F(1)), (F(2), F(2))])


def test_histogram():
    assert count_histogram([3, 1, 3, 0]) == {0: 1, 1: 1, 3: 2}
