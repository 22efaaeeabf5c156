import math
from fractions import Fraction

import pytest

from stlattice.construct import (GapSpec, construct_elekes, construct_erdos, construct_general_alpha,
                                 construct_pencil, construct_random, gap_set)
from stlattice.energy import sumset
from stlattice.errors import InvalidArgument
from stlattice.exactnum import sqrt
from stlattice.geom import GridSpec, Line, grid_counts, incidences_fast, incidences_oracle, steepness
from stlattice.structure import SlopeWindow, theorem4_intercept_set, theorem4_slope_set
from stlattice.sweep import fit_loglog

F = Fraction


@pytest.mark.parametrize("r,points,lines,inc", [(1, 2, 1, 1), (2, 16, 8, 16), (8, 1024, 512, 4096)])
def test_elekes(r, points, lines, inc):
    P, L, man = construct_elekes(r)
    assert (len(P), len(L)) == (points, lines)
    assert incidences_fast(P, L) == inc == r ** 4
    if r <= 2:
        assert incidences_oracle(P, L) == inc
    assert round(len(L) ** (4 / 3)) == inc
    assert man.kind == "elekes"


def test_elekes_rejects_zero():
    with pytest.raises(InvalidArgument):
        construct_elekes(0)


def test_complete_4x4_diagonals():
    g = GridSpec(4, 4)
    _, L, _ = construct_general_alpha(g, SlopeWindow(4, 4), complete=True)
    diag = sorted((ln for ln in L if ln.slope == 1), key=lambda ln: ln.intercept)
    assert [ln.intercept for ln in diag] == [F(c) for c in range(-3, 4)]
    assert grid_counts(g, diag).tolist() == [1, 2, 3, 4, 3, 2, 1]
    anti = [ln for ln in L if ln.slope == -1]
    assert sorted(grid_counts(g, anti).tolist()) == [1, 1, 2, 2, 3, 3, 4]


def test_erdos_delegates():
    a = construct_erdos(4, None, SlopeWindow(2, 2))
    b = construct_general_alpha(GridSpec(4, 4), SlopeWindow(2, 2))
    assert a[1] == b[1] and a[2].lines_sha256 == b[2].lines_sha256 and a[2].kind == "erdos"


def test_erdos_m2_has_both_diagonals():
    _, L, _ = construct_erdos(2)
    assert Line(F(1), F(0)) in L and Line(F(-1), F(3)) in L
    with pytest.raises(InvalidArgument):
        construct_erdos(1)


def test_erdos_incidence_exponent():
    ns, inc = [], []
    for m in (16, 32, 64):
        P, L, _ = construct_erdos(m, m * m)
        ns.append(m * m)
        inc.append(incidences_fast(P, L))
    fit = fit_loglog(ns, inc)
    assert 1.25 <= fit.exponent <= 1.42


def test_half_alpha_incidence_scale():
    g = GridSpec.from_alpha(2 ** 12, 0.5)
    P, L, _ = construct_general_alpha(g, n_lines=g.N)
    assert 0.1 <= incidences_fast(P, L) / g.N ** (4 / 3) <= 10


def test_too_many_lines():
    g = GridSpec(16, 64)
    _, L, man = construct_general_alpha(g)
    with pytest.raises(InvalidArgument, match=str(len(L))):
        construct_general_alpha(g, n_lines=len(L) + 1)


def test_lines_follow_class_prediction():
    for g in (GridSpec.from_alpha(2 ** 12, 0.4), GridSpec.from_alpha(2 ** 15, 0.45)):
        _, L, _ = construct_general_alpha(g)
        counts = grid_counts(g, L)
        assert len(set(L)) == len(L)
        slopes = set(theorem4_slope_set(g))
        for ln, c in zip(L, counts.tolist()):
            sl = abs(ln.slope)
            assert sl in slopes
            top = -(-g.w // sl.denominator) if steepness(g, sl) == "non-steep" else -(-g.h // sl.numerator)
            assert c in (top, top - 1)


def test_intercepts_drawn_from_set():
    g = GridSpec.from_alpha(2 ** 12, 0.4)
    _, L, _ = construct_general_alpha(g)
    cache = {}
    for ln in L:
        sl = abs(ln.slope)
        if sl not in cache:
            cache[sl] = set(theorem4_intercept_set(g, sl, 4))
        c = ln.intercept if ln.slope > 0 else g.h + 1 - ln.intercept
        assert c in cache[sl]


def test_ranking_order():
    g = GridSpec.from_alpha(2 ** 12, 0.4)
    _, L, _ = construct_general_alpha(g)
    counts = grid_counts(g, L).tolist()
    assert counts == sorted(counts, reverse=True)


def test_manifest_deterministic():
    g = GridSpec.from_alpha(2 ** 12, 0.4)
    a = construct_general_alpha(g, n_lines=3000)[2].to_json()
    b = construct_general_alpha(g, n_lines=3000)[2].to_json()
    assert a == b
    _, L, man = construct_general_alpha(g, n_lines=3000)
    assert sum(n for *_, n in man.slopes) == len(L) == man.selected


def test_random_baseline_deterministic():
    g = GridSpec(20, 50)
    a = construct_random(g, 300, seed=5)
    b = construct_random(g, 300, seed=5)
    assert a[1] == b[1] and len(set(a[1])) == 300
    assert construct_random(g, 300, seed=6)[1] != a[1]


def test_gap_examples():
    assert list(gap_set(GapSpec(1, (1,), (5,))).elements) == [1, 2, 3, 4, 5]
    r = gap_set(GapSpec(0, (1, 10), (3, 2)))
    assert list(r.elements) == [0, 1, 2, 10, 11, 12] and r.proper
    r = gap_set(GapSpec(0, (1, 2), (3, 2)))
    assert list(r.elements) == [0, 1, 2, 3, 4] and not r.proper
    assert GapSpec(0, (1, 2), (3, 2)).d == 2 and GapSpec(0, (1, 2), (3, 2)).size == 6
    with pytest.raises(InvalidArgument):
        GapSpec(0, (1,), (0,))


def test_gap_sumsets_small():
    ap = gap_set(GapSpec(F(1, 2), (3,), (17,))).elements
    assert len(sumset(ap)) == 2 * len(ap) - 1
    two = gap_set(GapSpec(0, (1, sqrt(2)), (6, 5)))
    assert two.proper and len(sumset(two.elements)) <= 4 * len(two.elements)


def test_pencil_examples():
    assert construct_pencil((0, 0), [1, 2]) == [Line(F(1), F(0)), Line(F(2), F(0))]
    assert construct_pencil((1, 1), [F(1, 2)]) == [Line(F(1, 2), F(1, 2))]
    assert construct_pencil((3, 7), [None]) == [Line(None, F(3))]
    with pytest.raises(InvalidArgument):
        construct_pencil((0, 0), [1, F(2, 2)])
