import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from nestcde.geom import (
    AABB,
    EPS,
    AABBRelation,
    Edge,
    InvalidPolygonError,
    Point,
    SimplePolygon,
    Transformation,
    aabb_relation,
    circle_edge_distance,
    Circle,
    edges_intersect,
    naive_collision,
    naive_inside,
    point_in_polygon,
    point_segment_distance,
    polygon_area,
    segments_intersect,
    segments_intersect_matrix,
    transform_point,
    transform_polygon,
    winding_number,
)
from nestcde.shapes import regular_polygon, rectangle, star_polygon

coord = st.floats(-50, 50, allow_nan=False)


# ---------------------------------------------------------------- oracles


def _exact_orient(a, b, c):
    v = (Fraction(b[0]) - Fraction(a[0])) * (Fraction(c[1]) - Fraction(a[1])) - (
        Fraction(b[1]) - Fraction(a[1])
    ) * (Fraction(c[0]) - Fraction(a[0]))
    return (v > 0) - (v < 0)


def segment_distance(a1, a2, b1, b2) -> float:
    """Exact crossing test, otherwise the min endpoint-to-segment distance."""
    o1, o2 = _exact_orient(b1, b2, a1), _exact_orient(b1, b2, a2)
    o3, o4 = _exact_orient(a1, a2, b1), _exact_orient(a1, a2, b2)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return 0.0
    return min(
        point_segment_distance(*a1, *b1, *b2),
        point_segment_distance(*a2, *b1, *b2),
        point_segment_distance(*b1, *a1, *a2),
        point_segment_distance(*b2, *a1, *a2),
    )


# ---------------------------------------------------------------- AABB


def test_aabb_basics():
    a = AABB(0, 0, 2, 1)
    assert a.width == 2 and a.height == 1
    assert a.contains(AABB(0.5, 0.2, 1, 0.8))
    assert not a.contains(AABB(1, 0, 3, 1))
    assert a.overlaps(AABB(2, 1, 3, 3))  # touching corners overlap (closed boxes)
    assert a.inflated(1) == AABB(-1, -1, 3, 2)
    assert a.union(AABB(-1, 5, 0, 6)) == AABB(-1, 0, 2, 6)


def test_aabb_relation():
    a = AABB(0, 0, 4, 4)
    assert aabb_relation(a, AABB(5, 5, 6, 6)) is AABBRelation.DISJOINT
    assert aabb_relation(a, AABB(1, 1, 2, 2)) is AABBRelation.A_CONTAINS_B
    assert aabb_relation(AABB(1, 1, 2, 2), a) is AABBRelation.B_CONTAINS_A
    assert aabb_relation(a, AABB(3, 3, 6, 6)) is AABBRelation.INTERSECTING
    assert aabb_relation(a, a) is AABBRelation.A_CONTAINS_B


# ---------------------------------------------------------------- polygons


def test_polygon_is_normalized_ccw():
    cw = SimplePolygon([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert cw.area == pytest.approx(1.0)
    assert cw.vertices[0] == Point(1, 0)


@pytest.mark.parametrize(
    "pts, msg",
    [
        ([(0, 0), (1, 0)], "at least 3"),
        ([(0, 0), (1, 1), (2, 2)], "zero area"),
        ([(0, 0), (4, 0), (1, 3), (4, 4)], "intersect"),
        ([(0, 0), (1, 0), (1, 0), (0, 1)], "zero-length"),
        ([(0, 0), (2, 0), (1, 0), (1, 1), (0, 1)], "fold|intersect"),
        ([(0, 0), (1, float("nan")), (0, 1)], "non-finite"),
    ],
)
def test_invalid_polygons_rejected(pts, msg):
    with pytest.raises(InvalidPolygonError, match=msg):
        SimplePolygon(pts)


def test_polygon_immutable(unit_square):
    with pytest.raises(AttributeError):
        unit_square.area = 3
    with pytest.raises(ValueError):
        unit_square.coords[0, 0] = 9


def test_shoelace_area():
    # trapezoid with parallel sides 5 and 3, height 2 -> 8
    assert polygon_area(SimplePolygon([(0, 0), (5, 0), (4, 2), (1, 2)])) == pytest.approx(8.0)


# ---------------------------------------------------------------- transformations


@given(st.floats(-10, 10), st.booleans(), coord, coord, coord, coord)
def test_transformation_inverse(rot, flip, tx, ty, px, py):
    t = Transformation(rot, flip, (tx, ty))
    back = t.inverse_point(transform_point(Point(px, py), t))
    assert back.x == pytest.approx(px, abs=1e-9) and back.y == pytest.approx(py, abs=1e-9)


@given(st.floats(0, 2 * math.pi), st.booleans())
def test_transform_polygon_keeps_area_and_orientation(rot, flip):
    s = SimplePolygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
    m = transform_polygon(s, Transformation(rot, flip, (3.0, -1.0)))
    assert m.area == pytest.approx(s.area)
    rebuilt = SimplePolygon(m.vertices)
    assert rebuilt.vertices == m.vertices  # already CCW, so no reversal
    assert point_in_polygon(m.poi.center, m)
    assert m.poi.radius == s.poi.radius


def test_flip_mirrors_x():
    s = rectangle(2, 1)
    m = transform_polygon(s, Transformation(0.0, True))
    assert m.aabb == AABB(-2, 0, 0, 1)


# ---------------------------------------------------------------- segment predicates


@pytest.mark.parametrize(
    "seg, expected",
    [
        ((0, 0, 2, 2, 0, 2, 2, 0), True),  # proper crossing
        ((0, 0, 1, 0, 1, 0, 2, 1), True),  # shared endpoint
        ((0, 0, 2, 0, 1, 0, 1, 1), True),  # T-junction
        ((0, 0, 2, 0, 1, 0, 3, 0), True),  # collinear overlap
        ((0, 0, 1, 0, 2, 0, 3, 0), False),  # collinear, apart
        ((0, 0, 1, 0, 0, 1, 1, 1), False),  # parallel
        ((0, 0, 2, 0, 1, 0.5 * EPS, 1, 1), True),  # gap below the contact distance
        ((0, 0, 2, 0, 1, 2 * EPS, 1, 1), False),  # gap above it
        ((0, 0, 1e-3, 0, 5e-4, 2 * EPS, 5e-4, 1), False),  # short edge: still a distance
    ],
)
def test_segments_intersect_cases(seg, expected):
    assert segments_intersect(*seg) is expected
    a = np.array([seg[:2]]), np.array([seg[2:4]])
    b = np.array([seg[4:6]]), np.array([seg[6:]])
    assert bool(segments_intersect_matrix(*a, *b)[0, 0]) is expected


@given(st.lists(coord, min_size=8, max_size=8))
def test_segments_intersect_matches_distance_oracle(c):
    a1, a2, b1, b2 = (c[0], c[1]), (c[2], c[3]), (c[4], c[5]), (c[6], c[7])
    assume(a1 != a2 and b1 != b2)
    d = segment_distance(a1, a2, b1, b2)
    assume(abs(d - EPS) > 1e-3 * EPS)
    assert segments_intersect(*a1, *a2, *b1, *b2) == (d <= EPS)


@given(st.integers(0, 2**32 - 1))
def test_scalar_and_matrix_predicates_agree(seed):
    rng = np.random.default_rng(seed)
    # small integer grid plus sub-EPS jitter hits touching and collinear cases often
    pts = rng.integers(0, 5, (4, 12, 2)).astype(float)
    pts[2:] += rng.normal(0.0, EPS, pts[2:].shape) * (rng.random(pts[2:].shape) < 0.5)
    m = segments_intersect_matrix(pts[0], pts[1], pts[2], pts[3])
    for i in range(12):
        for j in range(12):
            assert m[i, j] == segments_intersect(*pts[0, i], *pts[1, i], *pts[2, j], *pts[3, j])


def test_edges_intersect_wraps_scalar():
    assert edges_intersect(Edge(Point(0, 0), Point(1, 1)), Edge(Point(0, 1), Point(1, 0)))
    with pytest.raises(ValueError):
        Edge.of(1, 1, 1, 1)


def test_point_segment_and_circle_distance():
    assert point_segment_distance(0, 1, -1, 0, 1, 0) == pytest.approx(1.0)
    assert point_segment_distance(3, 4, 0, 0, 0, 0) == pytest.approx(5.0)
    assert circle_edge_distance(Circle(Point(0, 2), 0.5), Edge(Point(-1, 0), Point(1, 0))) == pytest.approx(1.5)


# ---------------------------------------------------------------- inclusion


def test_point_in_polygon_half_open(unit_square):
    assert point_in_polygon(Point(0.5, 0.5), unit_square)
    assert not point_in_polygon(Point(1.5, 0.5), unit_square)
    # vertex-height rays are counted once
    tri = SimplePolygon([(0, 0), (2, 1), (0, 2)])
    assert point_in_polygon(Point(-1, 1), tri) is False
    assert point_in_polygon(Point(1, 1), tri) is True


def test_point_in_polygon_counts_edges(unit_square):
    c = Counter()
    point_in_polygon(Point(0.5, 0.5), unit_square, c)
    assert c["ray_edge_tests"] == 4


@given(st.integers(0, 2**32 - 1), coord, coord)
def test_ray_cast_matches_winding_number(seed, x, y):
    s = star_polygon(np.random.default_rng(seed), 12, radius=40.0)
    p = Point(x, y)
    dist = min(point_segment_distance(x, y, *e) for e in s.flat_edges)
    assume(dist > 1e-6)
    assert point_in_polygon(p, s) == (winding_number(p, s) != 0)


# ---------------------------------------------------------------- naive collision


def test_naive_collision_cases(unit_square):
    far = rectangle(1, 1, 3, 0)
    assert not naive_collision(unit_square, far)
    assert naive_collision(unit_square, rectangle(1, 1, 0.5, 0.5))
    assert naive_collision(unit_square, rectangle(1, 1, 1, 0))  # touching edge
    inner = rectangle(0.2, 0.2, 0.4, 0.4)
    assert naive_collision(unit_square, inner) and naive_collision(inner, unit_square)


def test_naive_collision_work_count():
    # two disjoint 140-gons: every edge pair (140^2) then one ray cast each way (2 x 140)
    a = regular_polygon(140, 1.0)
    b = regular_polygon(140, 1.0, cx=5.0)
    c = Counter()
    assert not naive_collision(a, b, c)
    assert c["edge_pair_tests"] == 19600
    assert c["ray_edge_tests"] == 280


def test_naive_inside(unit_square):
    big = rectangle(4, 4, -1, -1)
    assert naive_inside(unit_square, big)
    assert not naive_inside(big, unit_square)
    assert not naive_inside(rectangle(1, 1, 3, 3), big)  # crosses
    assert not naive_inside(rectangle(1, 1, 5, 5), big)  # outside
    assert not naive_inside(rectangle(1, 1, -1, 0), big)  # touches the boundary


def test_contact_verdict_is_monotone_under_enlargement():
    # a vertex sits 0.8 EPS from a short edge that is part of a longer collinear run:
    # merging the run must not change the verdict
    gap = 0.8 * EPS
    tooth = SimplePolygon([(0, -1), (0.3, -1), (0.3, -gap), (0.2, -gap), (0.2, -0.5), (0, -0.5)])
    fine = SimplePolygon([(0, 0), (0.25, 0), (0.4, 0), (1, 0), (1, 1), (0, 1)])
    coarse = SimplePolygon([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert naive_collision(tooth, fine) and naive_collision(tooth, coarse)
