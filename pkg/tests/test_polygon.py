from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from plugkit.polygon import (
    ConvexPolygon,
    connected_components,
    fmt,
    frac,
    half_plane,
    parse_fraction,
    squared_diameter,
)

small = st.fractions(min_value=-5, max_value=5, max_denominator=12)


def test_frac_rejects_floats():
    with pytest.raises(TypeError):
        frac(0.5)
    assert frac("3/4") == F(3, 4)


def test_fmt_roundtrip():
    assert fmt(F(-3, 2)) == "-3/2"
    assert fmt(F(2)) == "2/1"
    assert parse_fraction(fmt(F(7, 9))) == F(7, 9)


def test_box_area_and_bounds():
    b = ConvexPolygon.box(0, 2, -1, F(1, 2))
    assert b.area() == 3
    assert b.bounds() == (0, 2, -1, F(1, 2))


def test_clip_by_diagonal():
    tri = ConvexPolygon.box(0, 1, 0, 1).clip(half_plane(-1, 1, 0))  # z >= r
    assert tri.area() == F(1, 2)
    assert tri.contains((0, 1)) and not tri.contains((1, 0))


def test_shared_edge_is_not_interior_overlap():
    a = ConvexPolygon.box(0, 1, 0, 1)
    b = ConvexPolygon.box(1, 2, 0, 1)
    assert a.intersects(b)
    assert not a.interiors_overlap(b)
    assert connected_components([a, b, ConvexPolygon.box(5, 6, 5, 6)]) == [[0, 1], [2]]


def test_squared_diameter_of_union():
    assert squared_diameter([ConvexPolygon.box(0, 1, 0, 1), ConvexPolygon.box(2, 3, 0, 1)]) == 10


@given(small, small, st.fractions(min_value=F(1, 10), max_value=4, max_denominator=10),
       st.fractions(min_value=F(1, 10), max_value=4, max_denominator=10))
def test_affine_image_scales_area_by_det(x0, y0, w, h):
    box = ConvexPolygon.box(x0, x0 + w, y0, y0 + h)
    m = ((F(2), F(1)), (F(1, 2), F(3)))
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    assert box.affine_image(m, (F(1), F(-1))).area() == det * box.area()


@given(small, small)
def test_intersection_is_subset(a, b):
    p = ConvexPolygon.box(-1, 1, -1, 1)
    q = ConvexPolygon.box(a, a + 2, b, b + 2)
    inter = p.intersect(q)
    if not inter.empty:
        assert inter.subset_of(p) and inter.subset_of(q)
        assert inter.area() <= min(p.area(), q.area())
