from math import inf

import numpy as np
import pytest

from hoferbilliards import rigid_motion
from hoferbilliards import persistence as pe
from hoferbilliards.errors import ResolutionTooLarge


def test_sampled_functional_closed_form(disc):
    g = pe.sample_orbit_functional(disc, 2, 64)
    q = np.arange(64) / 64
    expected = (2 / np.pi) * np.abs(np.sin(np.pi * np.subtract.outer(q, q)))
    assert np.abs(g.values - expected).max() < 1e-12
    assert g.values.max() == pytest.approx(2 / np.pi, abs=1e-12)


def test_resolution_budget(disc):
    with pytest.raises(ResolutionTooLarge):
        pe.sample_orbit_functional(disc, 3, 512)


def test_constant_function_barcode():
    g = pe.GridFunction(2, 8, np.full((8, 8), 3.0))
    bar = pe.sublevel_barcode(g)
    assert bar.degree(0) == [(3.0, inf)]
    assert bar.degree(1) == [(3.0, inf), (3.0, inf)]
    assert bar.degree(2) == [(3.0, inf)]


@pytest.mark.parametrize("n,m", [(2, 12), (3, 5)])
def test_torus_betti_numbers(disc, n, m):
    g = pe.sample_orbit_functional(disc, n, m)
    bar = pe.sublevel_barcode(g)
    assert pe.betti_numbers(bar) == pe.expected_torus_betti(n)


def test_disc_barcode_structure(disc):
    bar = pe.sublevel_barcode(pe.sample_orbit_functional(disc, 2, 64))
    h0 = bar.infinite_births(0)
    assert len(h0) == 1 and h0[0] == pytest.approx(0.0, abs=1e-15)
    assert bar.infinite_births(2)[0] == pytest.approx(2 / np.pi, abs=1e-12)


def test_disc_barcode_refinement_stability(disc):
    bar64 = pe.sublevel_barcode(pe.sample_orbit_functional(disc, 2, 64))
    bar128 = pe.sublevel_barcode(pe.sample_orbit_functional(disc, 2, 128))
    g64 = pe.sample_orbit_functional(disc, 2, 64)
    cell_gap = pe._cell_oscillation(g64.values)
    for d in range(3):
        ends64 = sorted(e for _, e in bar64.finite(d))
        ends128 = sorted(e for _, e in bar128.finite(d))
        if not ends64 and not ends128:
            continue
        hi64 = ends64[-1] if ends64 else 0.0
        hi128 = ends128[-1] if ends128 else 0.0
        assert abs(hi64 - hi128) <= cell_gap


def test_barcode_shift():
    rng = np.random.default_rng(1)
    g = pe.GridFunction(2, 10, rng.uniform(0, 1, (10, 10)))
    bar = pe.sublevel_barcode(g)
    barc = pe.sublevel_barcode(g.shifted(0.3))
    for d in range(3):
        got = barc.degree(d)
        want = bar.shifted(0.3).degree(d)
        assert len(got) == len(want)
        for (b1, e1), (b2, e2) in zip(sorted(got), sorted(want)):
            assert b1 == pytest.approx(b2, abs=1e-12)
            if e1 == inf or e2 == inf:
                assert e1 == e2
            else:
                assert e1 == pytest.approx(e2, abs=1e-12)


def test_tie_break_invariance():
    rng = np.random.default_rng(2)
    vals = rng.integers(0, 4, (6, 6)).astype(float)  # many ties
    g = pe.GridFunction(2, 6, vals)
    a = pe.sublevel_barcode(g, tie_break="lex")
    b = pe.sublevel_barcode(g, tie_break="revlex")
    for d in range(3):
        assert sorted(a.degree(d)) == sorted(b.degree(d))


def test_bottleneck_identity_and_shift(disc):
    g = pe.sample_orbit_functional(disc, 2, 24)
    bar = pe.sublevel_barcode(g)
    for d in range(3):
        assert pe.bottleneck_distance(bar, bar, d) == 0.0
    barc = pe.sublevel_barcode(g.shifted(0.25))
    for d in range(3):
        assert pe.bottleneck_distance(bar, barc, d) == pytest.approx(0.25, abs=1e-12)


def test_bottleneck_infinite_mismatch():
    a = pe.Barcode(2, {0: [(0.0, inf)]})
    b = pe.Barcode(2, {0: [(0.0, inf), (0.1, inf)]})
    assert pe.bottleneck_distance(a, b, 0) == inf


def test_bottleneck_brute_force_agreement():
    rng = np.random.default_rng(3)
    for _ in range(30):
        def rand_bar():
            bars = []
            for _ in range(int(rng.integers(0, 4))):
                b = rng.uniform(0, 1)
                bars.append((b, b + rng.uniform(0.01, 1)))
            return pe.Barcode(2, {1: bars + [(rng.uniform(0, 1), inf)]})

        A, B = rand_bar(), rand_bar()
        assert pe.bottleneck_distance(A, B, 1) == pytest.approx(
            pe.bottleneck_brute_force(A, B, 1), abs=1e-12
        )


def test_discrete_stability_inequality():
    rng = np.random.default_rng(4)
    g = rng.uniform(0, 1, (12, 12))
    h = g + rng.uniform(-0.05, 0.05, (12, 12))
    bar_g = pe.sublevel_barcode(pe.GridFunction(2, 12, g))
    bar_h = pe.sublevel_barcode(pe.GridFunction(2, 12, h))
    sup = float(np.abs(g - h).max())
    for d in range(3):
        assert pe.bottleneck_distance(bar_g, bar_h, d) <= sup + 1e-12


def test_stability_check_trivial(disc):
    rep = pe.stability_check(disc, disc, 2, 24)
    assert all(v == 0.0 for v in rep.bottlenecks.values())


def test_stability_check_translated(disc):
    rep = pe.stability_check(disc, rigid_motion(disc, 0.0, (0.2, 0.0)), 2, 24)
    assert all(v < 1e-12 for v in rep.bottlenecks.values())


def test_stability_check_ellipse(disc, mild_ellipse):
    rep = pe.stability_check(disc, mild_ellipse, 2, 64)
    assert rep.passed
    for d, v in rep.bottlenecks.items():
        assert v <= rep.gap.gap + rep.slack + 1e-12


def test_stability_check_three_bounces(disc, mild_ellipse):
    rep = pe.stability_check(disc, mild_ellipse, 3, 8)
    assert rep.passed
    assert set(rep.bottlenecks) == {0, 1, 2, 3}


def test_grid_serialization_roundtrip(tmp_path, disc):
    g = pe.sample_orbit_functional(disc, 2, 16)
    path = tmp_path / "grid.bin"
    pe.save_grid(path, g)
    g2 = pe.load_grid(path)
    assert g2.dim == 2 and g2.resolution == 16
    assert np.array_equal(g.values, g2.values)
