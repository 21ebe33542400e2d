import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from resist_curve.curvature import (
    bounds_report,
    curvature_report,
    distance_characterizations,
    equilibrium_curvature,
    limit_link_curvature,
    limit_node_curvature,
    node_curvature,
    sigma_squared,
    sigma_squared_distance,
    sigma_squared_inverse,
    simplex_embedding,
    variance,
)
from resist_curve.errors import NonLinearTail, NotADistribution
from resist_curve.generators import (
    complete_graph,
    cycle_graph,
    path_graph,
    random_connected_graph,
    random_tree,
    star_graph,
)
from resist_curve.graph import build_graph, laplacian
from resist_curve.resistance import effective_resistance

from conftest import random_graphs


def test_path_three():
    rep = curvature_report(path_graph(3))
    assert np.allclose(rep.p, [0.5, 0.0, 0.5])
    assert np.allclose(rep.kappa, [1.0, 1.0])


def test_cycle_five():
    rep = curvature_report(cycle_graph(5))
    assert np.allclose(rep.p, 0.2)
    assert np.allclose(rep.kappa, 4 / 4)


def test_isolated_node_has_unit_curvature():
    g = build_graph([(0, 1)], n=3)
    rep = curvature_report(g)
    assert rep.p[2] == 1.0
    assert rep.p.sum() == pytest.approx(2.0)


def test_tree_formula_with_weights():
    g = random_tree(15, seed=4, weights=(0.2, 5.0))
    rep = curvature_report(g)
    d = g.degrees
    assert np.allclose(rep.p, 1 - d / 2)
    i, j = g.links[:, 0], g.links[:, 1]
    assert np.allclose(rep.kappa, g.weights * (4 - d[i] - d[j]))


def test_sum_of_p_is_number_of_components():
    g = build_graph([(0, 1, 2.0), (1, 2, 1.0), (3, 4, 0.5), (4, 5, 1.0), (3, 5, 1.0)], n=7)
    assert node_curvature(g, effective_resistance(g)).sum() == pytest.approx(3.0)


def _bapat_parts(g):
    prof = effective_resistance(g)
    q = laplacian(g)
    p = node_curvature(g, prof)
    s2 = sigma_squared(prof, p)[0]
    return prof.omega, q, p, s2


@given(st.integers(2, 14), st.integers(0, 25), st.integers(0, 10**6))
def test_resistance_matrix_identities(n, extra, seed):
    g = random_connected_graph(n, extra, seed)
    om, q, p, s2 = _bapat_parts(g)
    u = np.ones(n)
    eye = np.eye(n)
    assert np.allclose(q @ om, -2 * eye + 2 * np.outer(p, u), atol=1e-7)
    assert np.allclose(om @ p, 2 * s2 * u, atol=1e-7)
    assert np.allclose(np.linalg.inv(om), -q / 2 + np.outer(p, p) / (2 * s2), atol=1e-7 * max(1, np.abs(q).max()))
    assert s2 > 0


def test_sigma_squared_three_ways():
    for g in random_graphs(10, 3, 12, seed=7):
        prof = effective_resistance(g)
        p = node_curvature(g, prof)
        s2 = sigma_squared(prof, p)[0]
        assert sigma_squared_inverse(prof)[0] == pytest.approx(s2, rel=1e-9)
        for x in (0, g.n - 1):
            assert sigma_squared_distance(g, prof, x) == pytest.approx(s2, rel=1e-9)


def test_sigma_squared_single_edge():
    prof = effective_resistance(build_graph([(0, 1)]))
    assert sigma_squared(prof, np.array([0.5, 0.5]))[0] == pytest.approx(0.25)


def test_equilibrium_matches_definition():
    for g in random_graphs(10, 2, 15, seed=8):
        prof = effective_resistance(g)
        assert np.allclose(equilibrium_curvature(prof), node_curvature(g, prof), atol=1e-9)


def test_distance_characterization():
    for g in random_graphs(10, 3, 15, seed=9):
        prof = effective_resistance(g)
        p = node_curvature(g, prof)
        for x in (0, 1):
            est = distance_characterizations(g, prof, x)
            assert math.isnan(est[x])
            mask = np.arange(g.n) != x
            assert np.allclose(est[mask], p[mask], atol=1e-9)


def test_variance_is_half_quadratic_form():
    g = random_connected_graph(8, 5, seed=1)
    prof = effective_resistance(g)
    f = np.full(8, 1 / 8)
    assert variance(prof, f) == pytest.approx(0.5 * f @ prof.omega @ f)
    with pytest.raises(NotADistribution):
        variance(prof, np.ones(8))


def test_simplex_embedding_reproduces_resistances():
    g = random_connected_graph(9, 7, seed=2)
    prof = effective_resistance(g)
    emb = simplex_embedding(prof)
    e = np.eye(9)
    for i in range(9):
        for j in range(9):
            assert emb.sq_dist(emb.point(e[i]), emb.point(e[j])) == pytest.approx(prof.omega[i, j], abs=1e-9)
    # the curvature vector is the circumcentre: equidistant from all vertices
    p = node_curvature(g, prof)
    s2 = sigma_squared(prof, p)[0]
    c = emb.point(p)
    for i in range(9):
        assert emb.sq_dist(c, emb.point(e[i])) == pytest.approx(s2, abs=1e-9)


def test_bounds_hold_and_equalities():
    for g in random_graphs(20, 2, 14, seed=10) + [random_tree(10, 1), star_graph(6), cycle_graph(6)]:
        prof = effective_resistance(g)
        rep = curvature_report(g, prof)
        recs = bounds_report(g, prof, rep.p, rep.kappa)
        assert all(r.passed for r in recs), [r for r in recs if not r.passed]


def test_cut_node_with_degree_two_is_flat():
    # two triangles joined at a path node of degree 2
    g = build_graph([(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 6)])
    rep = curvature_report(g)
    assert rep.p[3] == pytest.approx(0.0, abs=1e-12)
    assert rep.p[2] < 0


def test_lazy_limit_is_exact_and_slope_is_half_degree():
    g = random_connected_graph(8, 6, seed=3)
    prof = effective_resistance(g)
    p = node_curvature(g, prof)
    k = g.weighted_degrees
    for i in range(g.n):
        fit = limit_node_curvature(g, i, profile=prof, full=True)
        assert fit.value == pytest.approx(p[i], abs=1e-9)
        assert fit.slope == pytest.approx(k[i] / 2, abs=1e-6)


def test_lazy_link_limit():
    g = random_connected_graph(8, 6, seed=4)
    rep = curvature_report(g)
    prof = effective_resistance(g)
    for e, (i, j) in enumerate(g.links):
        fit = limit_link_curvature(g, (int(i), int(j)), profile=prof, full=True)
        assert fit.value == pytest.approx(rep.kappa[e], abs=1e-8)
        assert fit.slope == pytest.approx(-2 * g.weights[e] / prof.link_omega[e], rel=1e-6)


def test_heat_limit_and_its_slope():
    g = random_connected_graph(7, 5, seed=5)
    prof = effective_resistance(g)
    p = node_curvature(g, prof)
    q = laplacian(g)
    slope = g.weighted_degrees - (q @ p) / 2
    for i in range(g.n):
        fit = limit_node_curvature(g, i, [0.02], profile=prof, walk="heat", full=True)
        assert fit.value == pytest.approx(p[i], abs=1e-6)
        assert fit.slope == pytest.approx(slope[i], abs=1e-3)


def test_heat_limit_single_edge():
    # 1 - rho^T Omega rho / (4t) = 1/2 + t/2 + ... : slope 1 - (Qp)/2 = 1
    g = build_graph([(0, 1)])
    fit = limit_node_curvature(g, 0, [0.05], walk="heat", full=True)
    assert fit.value == pytest.approx(0.5, abs=1e-8)
    assert fit.slope == pytest.approx(1.0, abs=1e-4)


def test_lazy_times_are_checked():
    g = complete_graph(4)
    with pytest.raises(ValueError):
        limit_node_curvature(g, 0, [1.0, 0.5, 0.25])
    with pytest.raises(ValueError):
        limit_node_curvature(g, 0, [0.01, 0.005])


def test_affine_check_catches_curvature():
    from resist_curve.diffusion import affine_limit

    with pytest.raises(NonLinearTail):
        affine_limit([0.1, 0.05, 0.025], [1.0 + 0.1**2, 1.0 + 0.05**2, 1.0 + 0.025**2])


def test_report_json_shape():
    g = build_graph([(0, 1), (2, 3), (3, 4)], n=5)
    obj = curvature_report(g).to_json(g)
    assert len(obj["nodes"]) == 5 and len(obj["links"]) == 3
    assert len(obj["components"]) == 2
