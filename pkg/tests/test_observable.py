from fractions import Fraction

import pytest

from hexwalk import cyclo
from hexwalk.cyclo import CycNum
from hexwalk.domains import strip, trapezoid, triangle
from hexwalk.enumerator import walks_in
from hexwalk.observable import (
    ObservableError,
    boundary_contour_sum,
    boundary_phase_check,
    compute_observable,
    contour_integral,
    interior_vertices,
    vertex_residual,
)

XC = cyclo.constant("x_c")


def test_tria1_values():
    f = compute_observable(triangle(0), (0, 0))
    assert f[(0, 0)] == CycNum(1)
    assert f[(1, 3)] == cyclo.zeta(5) * XC
    assert f.exact


def test_counts_when_phases_vanish():
    d = triangle(1)
    f = compute_observable(d, (0, 0), sigma=0, x=CycNum(1))
    counts = {}
    for w in walks_in(d, (0, 0), len(d.mids())):
        counts[w.end] = counts.get(w.end, 0) + 1
    assert {m: CycNum(c) for m, c in counts.items()} == {m: v for m, v in f.values.items() if not v.is_zero()}


@pytest.mark.parametrize("k", [0, 1, 2])
def test_vertex_relation_triangles(k):
    f = compute_observable(triangle(k), (0, 0))
    vs = interior_vertices(f)
    assert vs
    assert all(vertex_residual(f, v).is_zero() for v in vs)


def test_vertex_relation_trapezoid():
    f = compute_observable(trapezoid(4, (1, 3)), (1, 3))
    assert all(vertex_residual(f, v).is_zero() for v in interior_vertices(f))
    assert contour_integral(f).is_zero()


def test_off_critical_fails():
    f = compute_observable(triangle(1), (0, 0), x=CycNum(Fraction(1, 2)))
    bad = [v for v in interior_vertices(f) if not vertex_residual(f, v).is_zero()]
    assert bad


@pytest.mark.parametrize("k", [0, 1, 2])
def test_contour_integral(k):
    f = compute_observable(triangle(k), (0, 0))
    assert contour_integral(f).is_zero()
    assert boundary_contour_sum(f).is_zero()


def test_contour_is_sum_of_residuals_off_critical():
    f = compute_observable(triangle(1), (0, 0), x=CycNum(Fraction(1, 3)))
    total = sum((vertex_residual(f, v) for v in interior_vertices(f)), CycNum(0))
    assert contour_integral(f) == total
    assert boundary_contour_sum(f) == total
    assert not total.is_zero()


def test_boundary_phases():
    f = compute_observable(triangle(2), (0, 0))
    res = boundary_phase_check(f)
    assert res and all(ok for _, ok in res.values())


def test_unbounded_needs_cap():
    with pytest.raises(ObservableError):
        compute_observable(strip(1), (0, 0))
    f = compute_observable(strip(1), (0, 0), L=4)
    assert not f.exact


def test_start_outside():
    with pytest.raises(ObservableError):
        compute_observable(triangle(0), (5, 3))
