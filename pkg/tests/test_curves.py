import numpy as np
import pytest

from hoferbilliards import (
    FourierSupportSpec,
    SampledCurve,
    build_fourier_table,
    c0_distance,
    disc_table,
    rigid_motion,
    shift_mark,
    unit_square,
)
from hoferbilliards.curves import PolygonSpec, curve_centroid
from hoferbilliards.errors import CurvatureNotPositive

TWO_PI = 2 * np.pi


def test_disc_conventions(disc):
    assert np.allclose(disc.position(0.0), [1 / TWO_PI, 0.0], atol=1e-15)
    assert np.allclose(disc.tangent(0.0), [0.0, 1.0], atol=1e-15)
    q = np.linspace(0, 1, 64, endpoint=False)
    assert np.allclose(disc.curvature(q), TWO_PI)


def test_fourier_circle_is_disc(disc):
    t = build_fourier_table(FourierSupportSpec(5.0))
    q = np.linspace(0, 1, 257)
    assert np.abs(t.position(q) - disc.position(q)).max() < 1e-10


def test_fourier_table_length_one():
    t = build_fourier_table(FourierSupportSpec(1.0, cos=[0.0, 0.1]))
    # closed-form cumulative arc length over a full revolution
    assert abs(float(t.spec.arclength(TWO_PI)) - 1.0) < 1e-10
    # independent polyline check
    n = 1 << 15
    pts = t.position(np.arange(n) / n)
    poly = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=-1).sum()
    assert abs(poly - 1.0) < 1e-6


def test_fourier_curvature_guard():
    with pytest.raises(CurvatureNotPositive):
        build_fourier_table(FourierSupportSpec(1.0, cos=[0.0, 0.4]))


def test_unit_tangent_and_positive_curvature(mild_ellipse, disc):
    q = np.arange(1024) / 1024
    for t in (disc, mild_ellipse):
        assert np.abs(np.linalg.norm(t.tangent(q), axis=-1) - 1).max() < 1e-8
        assert t.curvature(q).min() > 0


def test_position_periodicity(mild_ellipse):
    q = np.linspace(0, 1, 17)
    assert np.abs(mild_ellipse.position(q + 1) - mild_ellipse.position(q)).max() < 1e-10


def test_first_harmonic_translates():
    base = FourierSupportSpec(1.0, cos=[0.0, 0.1])
    moved = FourierSupportSpec(1.0, cos=[0.3, 0.1], sin=[0.05])
    a = build_fourier_table(base)
    b = build_fourier_table(moved)
    shift = curve_centroid(a) - curve_centroid(b)
    assert c0_distance(a, rigid_motion(b, 0.0, shift)) < 1e-8


def test_arclength_inversion_roundtrip(mild_ellipse):
    q = np.linspace(0, 1, 101, endpoint=False)
    theta = mild_ellipse.theta_of_q(q)
    assert np.abs(mild_ellipse.spec.arclength(theta) - q).max() < 1e-10


def test_c0_distance_identical(disc, mild_ellipse):
    assert c0_distance(disc, disc) == 0.0
    assert c0_distance(mild_ellipse, mild_ellipse) == 0.0


def test_c0_distance_translation(disc):
    moved = rigid_motion(disc, 0.0, (0.05, 0.0))
    assert abs(c0_distance(disc, moved) - 0.05) < 1e-9


def test_c0_distance_mark_rotation(disc):
    r = 0.25
    expected = np.sin(np.pi * r) / np.pi  # chord of the rotation angle
    assert abs(c0_distance(disc, shift_mark(disc, r)) - expected) < 1e-7


def test_sampled_curve_matches_disc(disc):
    t = SampledCurve.from_function(lambda q: disc.position(q), samples=257)
    q = np.linspace(0, 1, 33)
    assert np.abs(t.position(q) - disc.position(q)).max() < 1e-10
    assert t.strictly_convex
    assert np.abs(t.curvature(q) - TWO_PI).max() < 1e-6


def test_polygon_validation():
    sq = unit_square()
    assert abs(sq.edge_lengths.sum() - 1.0) < 1e-12
    with pytest.raises(ValueError):
        PolygonSpec(np.array([[0, 0], [1, 0], [1, 1], [0, 1]]))  # perimeter 4
    with pytest.raises(ValueError):
        PolygonSpec(np.array([[0.125, -0.125], [-0.125, -0.125], [-0.125, 0.125], [0.125, 0.125]]))


def test_rigid_motion_preserves_geometry(mild_ellipse):
    g = rigid_motion(mild_ellipse, 0.7, (0.3, -0.2))
    q = np.linspace(0, 1, 64, endpoint=False)
    assert np.abs(np.linalg.norm(g.tangent(q), axis=-1) - 1).max() < 1e-10
    assert np.abs(g.curvature(q) - mild_ellipse.curvature(q)).max() < 1e-12
    d = np.linalg.norm(g.position(q) - g.position(q + 0.5), axis=-1)
    d0 = np.linalg.norm(mild_ellipse.position(q) - mild_ellipse.position(q + 0.5), axis=-1)
    assert np.abs(d - d0).max() < 1e-12
