import numpy as np
import pytest

from hoferbilliards import c0_distance, regular_polygon, unit_square
from hoferbilliards import smoothing as sm
from hoferbilliards.billiard import forward_arrays, map_jacobian
from hoferbilliards.curves import PolygonBoundary
from hoferbilliards.errors import InvalidWidth, MarkInCorner
from hoferbilliards.homotopy import path_geometric_length


@pytest.fixture(scope="module")
def square_family():
    return sm.family_from_polygon(unit_square())


def test_profile_matches_corner_outside_width():
    p = sm.make_profile(1.0, 0.01)
    assert p.f(0.02) == pytest.approx(0.02, abs=1e-15)
    assert p.f(-0.015) == pytest.approx(0.015, abs=1e-15)
    assert abs(p.f(0.01) - 0.01) < 1e-12
    assert p.f(0.0) > 0


def test_profile_convex_and_smooth():
    p = sm.make_profile(1.3, 0.008)
    x = np.linspace(-0.012, 0.012, 2001)
    assert np.all(p.ddf(x) >= 0)
    # derivative consistency by finite differences
    h = 1e-6
    fd = (p.f(x + h) - p.f(x - h)) / (2 * h)
    assert np.abs(fd - p.df(x)).max() < 1e-5


def test_profile_zero_value_moment():
    m = sm.standard_mollifier()
    p = sm.make_profile(2.0, 0.01)
    assert p.f(0.0) == pytest.approx(2.0 * 0.01 * m.abs_moment, rel=1e-10)


def test_profile_delta_positive():
    p = sm.make_profile(1.0, 0.01)
    assert p.delta > 0
    # crude sandwich: the profile graph is shorter than the corner graph but
    # longer than the straight chord between the junctions
    chord = 2 * 0.01
    assert p.arc_length > chord
    assert p.arc_length < 2 * 0.01 * np.hypot(1, 1)


def test_square_corner_slope():
    sq = unit_square()
    fam = sm.family_from_polygon(sq)
    assert np.allclose(fam.slopes, 1.0, atol=1e-12)


def test_invalid_width():
    with pytest.raises(InvalidWidth):
        sm.make_profile(1.0, 0.0)
    with pytest.raises(InvalidWidth):
        sm.family_from_polygon(unit_square(), width=0.2)


def test_mark_in_corner():
    with pytest.raises(MarkInCorner):
        sm.family_from_polygon(unit_square(mark=0.25), width=0.01)


def test_slice_has_length_one(square_family):
    c = square_family.curve(1.0)
    n = 1 << 15
    pts = c.position(np.arange(n) / n)
    poly = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=-1).sum()
    assert abs(poly - 1.0) < 1e-6
    q = np.arange(2048) / 2048
    assert np.abs(np.linalg.norm(c.tangent(q), axis=-1) - 1).max() < 1e-12


def test_affine_length_law(square_family):
    fam = square_family
    # independent length check: dense polyline of the raw curve
    for s in (1.0, 0.5, 0.25):
        n = 1 << 16
        pts = fam.raw_position(s, np.arange(n) / n)
        poly = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=-1).sum()
        affine = fam.base_length - s * fam.total_delta
        assert abs(fam.length_at(s) - affine) < 1e-12
        assert abs(poly - affine) < 1e-5


def test_coincides_with_polygon_outside_corners(square_family):
    fam = square_family
    pb = PolygonBoundary(fam.polygon)
    # plane point at the middle of edge 1 is shared by gamma_s and the polygon
    for s in (1.0, 0.5):
        q = fam.edge_point_parameter(s, 1, fam.edge_len[1] / 2)
        p1 = fam.raw_position(s, q)
        mid = 0.5 * (fam.polygon.vertices[1] + fam.polygon.vertices[2])
        assert np.linalg.norm(p1 - mid) < 1e-12


def test_c0_convergence_to_polygon(square_family):
    fam = square_family
    pb = PolygonBoundary(fam.polygon)
    dists = [c0_distance(fam.curve(s), pb, grid=2048) for s in (1.0, 0.5, 0.25, 0.125)]
    assert all(a > b for a, b in zip(dists, dists[1:]))
    assert dists[-1] < 5e-4


def test_family_speed_uniformly_bounded(square_family):
    fam = square_family
    scales = [1.0, 0.5, 0.25, 1 / 8, 1 / 16, 1 / 32, 1 / 64]
    speeds = [sm.family_speed(fam, s, q_nodes=2048) for s in scales]
    assert all(np.isfinite(v) for v in speeds)
    # normalization inflates the raw bound by at most |lambda'| R + lambda * C
    lam = fam.scale_factor(1.0)
    raw_bound = fam.edge_speed_bound() + 3.0 * fam.base_length
    assert max(speeds) <= fam.total_delta * 0.5 * lam**2 + lam * raw_bound


def test_edge_point_speed_bound(square_family):
    fam = square_family
    s0 = 0.5
    # quarter point of edge 1 (the midpoint is degenerate for the square)
    q0 = fam.edge_point_parameter(s0, 1, fam.edge_len[1] / 4)
    h = 1e-5
    d = (fam.raw_position(s0 + h, q0) - fam.raw_position(s0 - h, q0)) / (2 * h)
    assert np.linalg.norm(d) <= fam.edge_speed_bound() + 1e-9


def test_hexagon_speeds_finite():
    fam = sm.family_from_polygon(regular_polygon(6))
    for s in (1.0, 0.25, 1 / 16):
        v = sm.family_speed(fam, s, q_nodes=1024)
        assert np.isfinite(v) and v >= 0


def test_cauchy_tail_convergence(square_family):
    tail = sm.cauchy_tail(square_family, 1.0, q_nodes=2048)
    assert np.all(np.diff(tail.increments) < 0)
    diffs = np.abs(np.diff(tail.corrected))
    assert diffs[-1] < 1e-3 * tail.value
    tail_half = sm.cauchy_tail(square_family, 0.5, q_nodes=2048)
    assert tail_half.value < tail.value
    # crude integral bound on the difference
    vmax = tail.speeds.max()
    assert tail.value - tail_half.value <= vmax * 0.5 + 1e-12


def test_cauchy_tail_stable_under_deeper_grid(square_family):
    t8 = sm.cauchy_tail(square_family, 1.0, levels=8, q_nodes=2048)
    t16 = sm.cauchy_tail(square_family, 1.0, levels=16, q_nodes=2048)
    assert abs(t16.value - t8.value) < 1e-3 * t8.value


def test_independence_gap_zero_for_same_family(square_family):
    gap = sm.profile_independence_gap(square_family, square_family, 0.25, t_nodes=5, q_nodes=512)
    assert gap < 1e-12


def test_independence_slope():
    famA = sm.family_from_polygon(unit_square(), width=0.01)
    famB = sm.family_from_polygon(unit_square(), width=0.005)
    slope, gaps = sm.independence_slope(famA, famB, q_nodes=2048)
    assert 0.9 <= slope <= 1.1
    scales = np.array([0.25, 0.125, 0.0625, 0.03125, 0.015625, 0.0078125])
    ratios = gaps / scales
    assert ratios.max() <= 2.0 * ratios.min()


def test_restricted_path_tail_bounds_summable(square_family):
    # d_C-style upper bounds between consecutive dyadic slices are summable
    uppers = []
    for k in range(0, 5):
        lo, hi = 2.0 ** -(k + 1), 2.0**-k
        path = sm.restricted_path(square_family, lo, hi)
        uppers.append(path_geometric_length(path, s_nodes=9, q_nodes=512))
    assert all(a > b for a, b in zip(uppers, uppers[1:]))
    assert uppers[-1] < 1e-3


def test_lift_identity_at_zero(square_family):
    assert sm.positive_curvature_lift(square_family, 0.25, 0.0) is square_family.curve(0.25)


def test_lift_strictly_convex_and_close(square_family):
    eps = 1e-3
    lift = sm.positive_curvature_lift(square_family, 0.25, eps)
    assert lift.strictly_convex
    assert c0_distance(lift, square_family.curve(0.25), grid=2048) <= 2 * eps
    q = np.arange(512) / 512
    assert lift.curvature(q).min() > 0


def test_lift_supports_billiard_map(square_family):
    lift = sm.positive_curvature_lift(square_family, 0.25, 1e-3)
    J = map_jacobian(lift, np.linspace(0, 1, 5, endpoint=False), np.full(5, 0.4))
    det = J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0]
    assert np.abs(det - 1).max() < 1e-6
    Q1, P1 = forward_arrays(lift, np.array([0.3]), np.array([0.2]))
    Q2, P2 = forward_arrays(lift, Q1, -P1)
    assert abs((Q2 - 0.3) % 1.0) < 1e-8 or abs((Q2 - 0.3) % 1.0 - 1.0) < 1e-8
