import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from layerpot import (ClosureError, Curve, CurveError, SelfIntersectionError, arc_piece,
                      build_polyline, line_piece, make_curve, neighborhood, refine_near,
                      tangent_angle)
from layerpot.curve import Corner, find_self_intersections


def star_polygon(radii, phase=0.0):
    n = len(radii)
    ang = phase + 2 * np.pi * np.arange(n) / n
    p = np.asarray(radii) * np.exp(1j * ang)
    return np.append(p, p[0])


def test_circle_geometry(circle):
    assert circle.length == pytest.approx(2 * np.pi, abs=1e-6)
    assert circle.diameter == pytest.approx(2.0, abs=1e-6)
    assert circle.signed_area == pytest.approx(np.pi, abs=1e-5)


def test_open_polyline_raises_closure():
    with pytest.raises(ClosureError):
        Curve([0, 1, 1 + 1j])


def test_pentagram_is_rejected():
    star = np.exp(4j * np.pi * np.arange(6) / 5)  # pentagram, positive signed area
    with pytest.raises(SelfIntersectionError):
        Curve(star)
    assert find_self_intersections(star).size > 0


def test_clockwise_is_rejected_unless_reoriented():
    sq = np.array([0, 1j, 1 + 1j, 1, 0])
    with pytest.raises(CurveError):
        Curve(sq)
    assert Curve.from_points(sq, orient=True).signed_area == pytest.approx(1.0)


def test_piece_gap_names_pieces():
    a = line_piece(0, 1, name="bottom")
    b = line_piece(1.5, 1j, name="slanted")
    c = line_piece(1j, 0, name="left")
    with pytest.raises(ClosureError, match="bottom"):
        build_polyline([a, b, c])


def test_neighborhood_on_circle(circle):
    nb = neighborhood(circle, 1.0, 0.1)
    assert nb.measure == pytest.approx(4 * np.arcsin(0.05), rel=1e-5)
    assert len(nb.subarcs) == 1
    with pytest.raises(ValueError):
        neighborhood(circle, 1.0, 0.0)


def test_tangent_angle_reports_corners():
    sq = Curve([0, 1, 1 + 1j, 1j, 0])
    t = tangent_angle(sq, 1.0)
    assert isinstance(t, Corner)
    assert t.before == pytest.approx(0.0)
    assert t.after == pytest.approx(np.pi / 2)
    assert tangent_angle(sq, 0.5) == pytest.approx(0.0)


def test_refine_near_identity_for_small_factor(circle):
    assert refine_near(circle, 1.0, 0.1, factor=1) is circle
    finer = refine_near(circle, 1.0, 0.1, factor=4)
    assert finer.n_segments > circle.n_segments
    assert finer.length == pytest.approx(circle.length, abs=1e-6)


def test_piece_evaluation_is_exact_on_circle(circle):
    seg = np.arange(0, circle.n_segments, 97)
    z = circle.eval(seg, np.full(seg.size, 0.37))
    assert np.max(np.abs(np.abs(z) - 1)) < 1e-14


def test_json_csv_roundtrip(tmp_path, circle):
    circle.to_json(tmp_path / "c.json")
    back = Curve.from_json(tmp_path / "c.json")
    assert np.array_equal(back.vertices, circle.vertices)
    circle.to_csv(tmp_path / "c.csv")
    back = Curve.from_csv(tmp_path / "c.csv")
    assert np.array_equal(back.vertices, circle.vertices)
    d = json.loads((tmp_path / "c.json").read_text())
    assert d["generator_id"] == "circle"


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.5, 2.0), min_size=5, max_size=40),
       st.floats(-np.pi, np.pi), st.complex_numbers(max_magnitude=10))
def test_rigid_motion_invariance(radii, rot, shift):
    c = Curve(star_polygon(radii))
    moved = Curve(np.exp(1j * rot) * c.vertices + shift)
    assert moved.length == pytest.approx(c.length, rel=1e-12)
    assert moved.diameter == pytest.approx(c.diameter, rel=1e-9)
    assert moved.signed_area == pytest.approx(c.signed_area, rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.5, 2.0), min_size=5, max_size=40))
def test_star_polygon_winding(radii):
    c = Curve(star_polygon(radii))
    assert c.winding_number(np.array([0.0]))[0] == 1
    assert c.winding_number(np.array([10.0 + 10j]))[0] == 0
    back = Curve.from_json(c.to_dict())
    assert np.array_equal(back.vertices, c.vertices)


def test_arc_pieces_glue_into_closed_curve():
    pieces = [arc_piece(0, 1, 0, np.pi, "upper"), line_piece(-1, 1, "diameter")]
    c = build_polyline(pieces, h=1e-2)
    assert c.length == pytest.approx(np.pi + 2, abs=1e-4)
    assert c.describe_segment(0).startswith("piece 'upper'")


def test_zoo_curves_are_simple():
    for name in ("ex1", "ex2", "ex3", "ex4", "lyapunov", "ellipse"):
        c = make_curve(name)
        assert find_self_intersections(c.vertices).size == 0
