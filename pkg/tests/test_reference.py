import math

import numpy as np
import pytest
from scipy.stats import wasserstein_distance

from resist_curve.curvature import curvature_report
from resist_curve.errors import InfeasibleMarginals, InvalidFaceDegree
from resist_curve.generators import cycle_graph, path_graph, platonic_graph, random_tree
from resist_curve.graph import build_graph
from resist_curve.reference import (
    combinatorial_curvature,
    comparison_table,
    forman_curvature,
    forman_curvature_weighted,
    lly_normalized_curvature,
    ollivier_curvature_resistance,
    wasserstein1,
)
from resist_curve.resistance import effective_resistance

from conftest import random_graphs


@pytest.mark.parametrize(
    "d, faces, want",
    [
        (3, [3, 3, 3], 0.5),  # tetrahedron
        (3, [4, 4, 4], 0.25),  # cube
        (4, [3, 3, 3, 3], 1 / 3),  # octahedron
        (3, [5, 5, 5], 0.1),  # dodecahedron
        (5, [3] * 5, 1 / 6),  # icosahedron
        (4, [4, 4, 4, 4], 0.0),  # square lattice
        (2, [math.inf, math.inf], 0.0),  # path interior
        (1, [math.inf], 0.5),  # leaf
    ],
)
def test_combinatorial_curvature(d, faces, want):
    assert combinatorial_curvature(d, faces) == pytest.approx(want)


def test_combinatorial_curvature_rejects_bad_faces():
    with pytest.raises(InvalidFaceDegree):
        combinatorial_curvature(3, [2, 3, 3])


def test_forman_unit_weights():
    g = build_graph([(0, 1), (1, 2), (1, 3), (3, 4)])
    assert forman_curvature(g, (1, 3)) == 4 - 3 - 2
    assert forman_curvature_weighted(g, (1, 3)) == pytest.approx(forman_curvature(g, (1, 3)))


def test_forman_weighted_scales_with_node_weight():
    g = path_graph(3)
    val = forman_curvature_weighted(g, (0, 1), node_weights=[2.0, 2.0, 2.0])
    assert val == pytest.approx(2 * forman_curvature(g, (0, 1)))


def test_wasserstein_on_line_metric_matches_scipy():
    g = path_graph(7)
    om = effective_resistance(g).omega  # |i - j| on a unit path
    rng = np.random.default_rng(0)
    for _ in range(10):
        mu = rng.random(7) * (rng.random(7) < 0.6)
        nu = rng.random(7) * (rng.random(7) < 0.6)
        mu[0] += 0.1
        nu[6] += 0.1
        mu, nu = mu / mu.sum(), nu / nu.sum()
        want = wasserstein_distance(np.arange(7), np.arange(7), mu, nu)
        plan = wasserstein1(mu, nu, om)
        assert plan.cost == pytest.approx(want, abs=1e-9)
        dense = plan.dense(7)
        assert np.allclose(dense.sum(axis=1), mu, atol=1e-9)
        assert np.allclose(dense.sum(axis=0), nu, atol=1e-9)


def test_wasserstein_rejects_bad_marginals():
    om = effective_resistance(path_graph(3)).omega
    with pytest.raises(InfeasibleMarginals):
        wasserstein1([1, 0, 0], [0.5, 0, 0], om)
    g = build_graph([(0, 1)], n=3)
    with pytest.raises(InfeasibleMarginals):
        wasserstein1([1, 0, 0], [0, 0, 1], effective_resistance(g).omega)


def test_trees_have_equal_curvatures():
    for seed in range(5):
        g = random_tree(9, seed)
        rows = comparison_table(g)
        for i, j, kap, kor, klly, kfr, ok in rows:
            assert ok
            assert kor == pytest.approx(kap, abs=1e-6)
            assert kfr == pytest.approx(kap, abs=1e-6)


def test_triangle_ordering():
    g = cycle_graph(3)
    prof = effective_resistance(g)
    kor = ollivier_curvature_resistance(g, prof, (0, 1))
    assert forman_curvature(g, (0, 1)) / prof.link_omega[0] == 0
    assert curvature_report(g, prof).kappa[0] == pytest.approx(2.0)
    assert kor >= 2.0 - 1e-9


def test_sandwich_on_random_graphs():
    for g in random_graphs(10, 3, 10, seed=21):
        assert all(r[-1] for r in comparison_table(g))


def test_normalized_variant_on_regular_graph():
    # with k = d constant the normalized walk equals the lazy walk at t' = t/d
    g = platonic_graph("cube")
    prof = effective_resistance(g)
    a = ollivier_curvature_resistance(g, prof, (0, 1))
    b = lly_normalized_curvature(g, prof, (0, 1))
    assert b == pytest.approx(a / 3, abs=1e-7)
