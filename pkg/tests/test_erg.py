import math

import numpy as np
import pytest
from scipy.integrate import quad

from resist_curve.erg import (
    BoundaryModel,
    area_in_domain,
    bin_values,
    expected_boundary_curvature,
    heuristic_node_curvature,
    heuristic_resistance,
    monte_carlo_profile,
    segment_area,
)
from resist_curve.errors import MissingGeometry, OutOfRange, ZeroArea
from resist_curve.generators import ErgConfig
from resist_curve.graph import build_graph


def test_segment_area_identities():
    r = 1.3
    assert segment_area(-r, r) == pytest.approx(math.pi * r * r)
    assert segment_area(0.0, r) == pytest.approx(math.pi * r * r / 2)
    assert segment_area(r, r) == pytest.approx(0.0, abs=1e-14)
    t = np.linspace(-r, r, 11)
    assert np.allclose(segment_area(t, r) + segment_area(-t, r), math.pi * r * r)
    assert segment_area(0.5, 1.0) == pytest.approx(0.6142, abs=1e-4)
    with pytest.raises(OutOfRange):
        segment_area(1.5, 1.0)


def test_segment_area_by_quadrature():
    r, t = 1.0, 0.3
    want = quad(lambda s: 2 * math.sqrt(r * r - s * s), t, r)[0]
    assert segment_area(t, r) == pytest.approx(want, rel=1e-10)


def test_area_in_domain():
    assert area_in_domain(5.0, 1.0) == pytest.approx(math.pi)
    assert area_in_domain(0.0, 1.0) == pytest.approx(math.pi / 2)


def test_heuristic_resistance():
    s = math.pi
    assert heuristic_resistance(s, s, 2.0) == pytest.approx(1 / math.pi)
    assert heuristic_resistance(1.0, 2.0, 0.5) == pytest.approx(2 * heuristic_resistance(1.0, 2.0, 1.0))
    with pytest.raises(ZeroArea):
        heuristic_resistance(0.0, 1.0, 1.0)


def test_model_at_boundary_and_beyond():
    m = BoundaryModel(r=1.0)
    assert expected_boundary_curvature(0.0, m) == pytest.approx(0.5 * (1 - math.log(2)), abs=1e-9)
    assert expected_boundary_curvature(2.0, m) == 0.0
    assert expected_boundary_curvature(7.0, m) == 0.0
    with pytest.raises(OutOfRange):
        expected_boundary_curvature(-0.1, m)


def test_model_against_adaptive_quadrature():
    r = 1.0
    m = BoundaryModel(r=r)
    for D in (0.2, 0.7, 1.4):
        f = lambda t: 2 * math.sqrt(r * r - t * t) / segment_area(max(-r, t - D), r)  # noqa: E731
        integral = quad(f, D - r, min(D, r), epsabs=1e-13, epsrel=1e-12, limit=200)[0]
        want = segment_area(D - r, r) / (2 * math.pi) - 0.5 * integral
        assert expected_boundary_curvature(D, m) == pytest.approx(want, abs=1e-9)


def test_model_continuity():
    m = BoundaryModel(r=1.0)
    for x in (1.0, 2.0):
        lo = expected_boundary_curvature(x - 1e-9, m)
        hi = expected_boundary_curvature(x + 1e-9, m)
        assert abs(lo - hi) <= 1e-6


def test_model_is_scale_free():
    # depends only on D/r
    a = expected_boundary_curvature(0.6, BoundaryModel(r=1.0))
    b = expected_boundary_curvature(1.2, BoundaryModel(r=2.0))
    assert a == pytest.approx(b, abs=1e-9)


def test_total_area_change():
    r = 1.0
    assert quad(lambda t: 2 * math.sqrt(r * r - t * t), -r, r)[0] == pytest.approx(math.pi * r * r)


def test_model_rejects_few_panels():
    with pytest.raises(ValueError):
        BoundaryModel(r=1.0, panels=50)


def test_heuristic_node_curvature():
    m = BoundaryModel(r=1.0, lam=2.0)
    g = build_graph([(0, 1)], n=3)
    pos = np.zeros((3, 2))
    D = np.array([5.0, 5.0, 5.0])
    p = heuristic_node_curvature(g, pos, D, m)
    inv = 1 / (2.0 * math.pi)
    assert p[2] == pytest.approx(1.0)
    assert p[0] == pytest.approx(1 - 0.5 * inv - 0.5 * inv)
    with pytest.raises(MissingGeometry):
        heuristic_node_curvature(g, None, D, m)
    with pytest.raises(MissingGeometry):
        heuristic_node_curvature(g, pos, D[:2], m)


def test_bin_accounting():
    edges = np.linspace(0, 4, 5)
    x = np.array([0.1, 0.2, 1.5, 3.9, 4.0])
    v = np.array([1.0, 3.0, 5.0, 7.0, 9.0])
    b = bin_values(x, v, edges)
    assert b.count.tolist() == [2, 1, 0, 2]
    assert b.mean[0] == 2.0 and np.isnan(b.mean[2])
    assert b.std[0] == pytest.approx(math.sqrt(2))
    assert np.isnan(b.std[1])
    assert np.allclose(b.centers, [0.5, 1.5, 2.5, 3.5])


def test_small_profile_run():
    cfg = ErgConfig(R=3.0, r=1.0, N=150, seed=2)
    run = monte_carlo_profile(cfg, 3, 6)
    assert run.bins.count.sum() == len(run.p) == sum(run.nodes_per_sample)
    assert len(list(run.csv_rows())) == 6
    assert run.model[-1] == 0.0
    again = monte_carlo_profile(cfg, 3, 6)
    assert np.array_equal(run.p, again.p)
