import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nestcde.geom import Circle, Edge, Point, SimplePolygon, Transformation, point_segment_distance, segments_intersect, transform_point
from nestcde.poi import polylabel, signed_distances
from nestcde.shapes import L_SHAPE, rectangle, regular_polygon, smooth_blob, star_polygon
from nestcde.surrogate import (
    _SEED,
    PIER_MIN_GAIN,
    Surrogate,
    SurrogateConfig,
    build_surrogate,
    generate_piers,
    generate_poi,
    generate_poles,
    residual_metric,
    sample_interior,
)

seeds = st.integers(0, 2**32 - 1)


def boundary_distance(s: SimplePolygon, x: float, y: float) -> float:
    return min(point_segment_distance(x, y, *e) for e in s.flat_edges)


def test_signed_distances_against_loop():
    s = star_polygon(np.random.default_rng(3), 15, 10.0)
    pts = np.random.default_rng(4).uniform(-15, 15, (300, 2))
    d = signed_distances(pts, s.coords)
    for (x, y), v in zip(pts, d):
        assert abs(v) == pytest.approx(boundary_distance(s, x, y), rel=1e-9, abs=1e-12)


def test_polylabel_respects_holes():
    sq = rectangle(4, 4).coords
    x, y, d = polylabel(sq, 1e-4)
    assert (x, y, d) == pytest.approx((2, 2, 2), abs=1e-3)
    # a hole over the center pushes the label into a corner region
    x2, y2, d2 = polylabel(sq, 1e-4, [(2.0, 2.0, 1.5)])
    assert math.hypot(x2 - 2, y2 - 2) - 1.5 >= d2 - 1e-3
    assert d2 < 2


def test_poi_square():
    c = generate_poi(rectangle(2, 2))
    assert c.radius == pytest.approx(1.0, abs=1e-3)
    assert c.center == pytest.approx((1, 1), abs=1e-3)


def test_poi_l_shape_analytic():
    # incircle of the L touches the two outer sides and the reflex corner: r = 2 - sqrt(2)
    c = generate_poi(SimplePolygon(L_SHAPE))
    assert c.radius == pytest.approx(2 - math.sqrt(2), abs=2e-3 * math.hypot(2, 2))


@given(seeds)
def test_poles_are_inscribed_and_ordered(seed):
    s = star_polygon(np.random.default_rng(seed), 20, 5.0, spikiness=0.6)
    cfg = SurrogateConfig(max_poles=5)
    poles = generate_poles(s, cfg)
    assert 1 <= len(poles) <= 5
    radii = [c.radius for c in poles]
    assert radii == sorted(radii, reverse=True)
    assert all(r >= cfg.min_pole_radius_ratio * radii[0] for r in radii)
    d = signed_distances(np.array([c.center for c in poles]), s.coords)
    assert np.all(d >= np.array(radii))


def test_no_poles_requested():
    assert generate_poles(rectangle(3, 1), SurrogateConfig(max_poles=0)) == []


@given(seeds)
def test_piers_lie_inside(seed):
    s = star_polygon(np.random.default_rng(seed), 16, 5.0, spikiness=0.8)
    cfg = SurrogateConfig(max_poles=2, n_piers=2, interior_samples=800)
    sur = build_surrogate(s, cfg)
    for e in sur.piers:
        t = np.linspace(0, 1, 50)[:, None]
        pts = np.array(e.start) + t * (np.array(e.end) - np.array(e.start))
        assert np.all(signed_distances(pts, s.coords) > 0)
        assert not any(segments_intersect(*e.start, *e.end, *f) for f in s.flat_edges)


def test_zero_piers():
    s = rectangle(10, 1)
    assert generate_piers(s, generate_poles(s), SurrogateConfig(n_piers=0)) == []


def test_rectangle_pier_spans_lobes():
    s = rectangle(10, 1)
    pole = [Circle(Point(5.0, 0.5), 0.5)]
    samples = sample_interior(s, 10_000, np.random.default_rng(0))
    piers = generate_piers(s, pole, SurrogateConfig(n_piers=1))
    assert len(piers) == 1
    (x1, y1), (x2, y2) = piers[0]
    assert abs(math.atan2(y2 - y1, x2 - x1) % math.pi) < 1e-9 or abs(math.atan2(y2 - y1, x2 - x1) % math.pi - math.pi) < 1e-9
    assert residual_metric(s, pole, piers, samples) < residual_metric(s, pole, [], samples)


def test_round_blob_piers_each_pay_their_way():
    s = regular_polygon(64, 5.0)
    cfg = SurrogateConfig()
    poles = generate_poles(s, cfg)
    # the same sample set the generator scores against
    samples = sample_interior(s, cfg.interior_samples, np.random.default_rng(_SEED))
    before = residual_metric(s, poles, [], samples)
    piers = generate_piers(s, poles, cfg)
    for k in range(len(piers)):
        prev = residual_metric(s, poles, piers[:k], samples)
        assert prev - residual_metric(s, poles, piers[: k + 1], samples) > 0.5 * PIER_MIN_GAIN * prev
    assert residual_metric(s, poles, piers, samples) <= before


@given(seeds, st.floats(0.05, 0.95), st.floats(0.05, 0.95), st.floats(0, math.pi))
def test_residual_metric_monotone(seed, u, v, theta):
    s = smooth_blob(np.random.default_rng(seed), 40, 3.0)
    samples = sample_interior(s, 1000, np.random.default_rng(seed))
    poles = generate_poles(s, SurrogateConfig(max_poles=2))
    base = residual_metric(s, poles, [], samples)
    x0, y0, x1, y1 = s.aabb
    c = Point(x0 + u * (x1 - x0), y0 + v * (y1 - y0))
    extra_pole = Circle(c, 0.2)
    extra_pier = Edge(c, Point(c.x + math.cos(theta), c.y + math.sin(theta)))
    assert residual_metric(s, poles + [extra_pole], [], samples) <= base
    assert residual_metric(s, poles, [extra_pier], samples) <= base


@given(st.floats(0, 2 * math.pi), st.booleans(), st.floats(-5, 5), st.floats(-5, 5))
def test_surrogate_transform_tracks_points(rot, flip, tx, ty):
    s = SimplePolygon(L_SHAPE)
    sur = build_surrogate(s, SurrogateConfig(max_poles=3, n_piers=1, interior_samples=500))
    t = Transformation(rot, flip, (tx, ty))
    moved = sur.transform(t)
    for a, b in zip(sur.poles, moved.poles):
        assert b.center == transform_point(a.center, t) and b.radius == a.radius
    for a, b in zip(sur.piers, moved.piers):
        assert b.start == transform_point(a.start, t) and b.end == transform_point(a.end, t)


def test_surrogate_deterministic():
    s = star_polygon(np.random.default_rng(9), 30, 4.0)
    assert build_surrogate(s) == build_surrogate(s)
    assert Surrogate().empty and not build_surrogate(s).empty


@pytest.mark.parametrize(
    "kw", [{"max_poles": -1}, {"n_piers": -1}, {"min_pole_radius_ratio": 1.5}, {"poi_precision": 0}, {"interior_samples": 0}]
)
def test_config_validation(kw):
    with pytest.raises(ValueError):
        SurrogateConfig(**kw)
