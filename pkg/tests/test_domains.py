import json

import pytest

from hexwalk.domains import (
    DomainError,
    explicit,
    from_json,
    half_plane,
    is_simply_connected,
    load_vertex_file,
    offset_triangle,
    plane,
    rotate_translate_triangle,
    small_triangle_at,
    strip,
    trapezoid,
    triangle,
)
from hexwalk.hexlattice import is_mid, rotate_about


def box_scan_triangle(n):
    # oracle: Y >= 0, 3X + Y <= 6n, -3X + Y <= 6n, scanned over a bounding box
    return sorted(
        (x, y)
        for x in range(-2 * n - 2, 2 * n + 3)
        for y in range(-2, 6 * n + 3)
        if is_mid(x, y) and y >= 0 and 3 * x + y <= 6 * n and -3 * x + y <= 6 * n
    )


def test_tria1_mids():
    assert [tuple(m) for m in triangle(0).mids()] == [(-1, 3), (0, 0), (1, 3)]


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_triangle_matches_box_scan(k):
    assert [tuple(m) for m in triangle(k).mids()] == box_scan_triangle(2 * k + 1)


def test_tria1_labels():
    t = triangle(0)
    assert t.side_label((1, 3)) == "RightSide"
    assert t.side_label((-1, 3)) == "LeftSide"
    assert t.side_label((0, 0)) == "RealAxis"


def test_strips_and_half_plane():
    s0 = strip(0)
    assert s0.contains((4, 0)) and not s0.contains((1, 3)) and not s0.contains((1, -3))
    assert strip(1).side_label((2, 6)) == "TopLine(1)"
    u = half_plane()
    assert u.contains((0, 0)) and not u.contains((1, -3))
    assert plane().contains((101, -99))
    with pytest.raises(DomainError):
        strip(-1)
    with pytest.raises(DomainError):
        strip(1).mids()


@pytest.mark.parametrize("i,x", [(1, (1, 3)), (2, (5, 3)), (2, (1, 9))])
def test_trapezoid_labels_exclusive(i, x):
    d = trapezoid(i, x)
    for m in d.mids():
        labels = d.sides_of(m)
        assert len(labels) <= 2
        if len(labels) == 2:
            # corners only: two lines meet at a single mid-edge
            assert sum(1 for p in d.mids() if set(d.sides_of(p)) == set(labels)) == 1


def test_rotated_triangle_contains_corner():
    assert rotate_translate_triangle(0, (0, 0)).contains((0, 0))


def test_rotated_triangle_reaches_below_axis():
    # x on the right side of Tria_3
    x = (5, 3)
    assert triangle(1).side_label(x) == "RightSide"
    d = rotate_translate_triangle(1, x)
    assert any(m[1] < 0 for m in d.mids())
    assert all(m[1] >= 0 for m in trapezoid(1, x).mids())


def test_rotation_group_action():
    mids = triangle(1).mids()
    for m in mids:
        r = m
        for _ in range(6):
            r = rotate_about(r, (2, 0), 1)
        assert tuple(r) == tuple(m)
        assert tuple(rotate_about(rotate_about(m, (2, 0), 1), (2, 0), -1)) == tuple(m)


def test_small_triangle_base_on_axis():
    y = (1, 9)
    d = small_triangle_at(y, 1.5)
    assert any(m[1] == 0 for m in d.mids())
    assert all(m[1] >= 0 for m in d.mids())
    assert d.contains(y)


def test_offset_triangle():
    d = offset_triangle(2, 0)
    assert set(d.mids()) < set(triangle(2).mids())
    with pytest.raises(DomainError):
        offset_triangle(1, 2)


def test_explicit_and_file(tmp_path):
    d = explicit([(0, 2)])
    assert sorted(tuple(m) for m in d.mids()) == [(-1, 3), (0, 0), (1, 3)]
    assert d.vertices() == [(0, 2)]
    f = tmp_path / "v.txt"
    f.write_text("0 2\n# comment\n\n")
    assert load_vertex_file(f).mids() == d.mids()
    f.write_text("0 2\n1\n")
    with pytest.raises(DomainError, match=":2:"):
        load_vertex_file(f)
    with pytest.raises(DomainError):
        explicit([(0, 0)])


def test_json_round_trip():
    for d in (triangle(2), strip(3), trapezoid(2, (5, 3)), explicit([(0, 2), (2, 4)])):
        assert from_json(json.loads(json.dumps(d.to_json()))).mids_in_box(-12, 12, -6, 30) == \
            d.mids_in_box(-12, 12, -6, 30)


def test_simply_connected():
    assert is_simply_connected(triangle(2))
    assert is_simply_connected(trapezoid(1, (1, 3)))


def test_boundary_mids_triangle():
    t = triangle(0)
    assert sorted(tuple(m) for m in t.boundary_mids()) == [(-1, 3), (0, 0), (1, 3)]
    assert t.vertices() == [(0, 2)]
