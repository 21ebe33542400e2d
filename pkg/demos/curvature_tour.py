"""Node and link resistance curvature on a few small graphs.

Trees have p_i = 1 - d_i/2 exactly, transitive graphs spread curvature
evenly, and a bridge between two dense clusters shows up as a strongly
negative link.

    python3 demos/curvature_tour.py
"""
import numpy as np

from resist_curve import curvature_report
from resist_curve.generators import complete_graph, cycle_graph, platonic_graph, random_tree
from resist_curve.graph import build_graph


def show(name, g):
    rep = curvature_report(g)
    print(f"{name}: n={g.n} m={g.m} sum p={rep.p.sum():.6f}")
    print("  p     :", np.round(rep.p, 4))
    print("  kappa :", np.round(rep.kappa, 4))


show("random tree", random_tree(8, seed=1))
show("cycle C7", cycle_graph(7))
show("cube", platonic_graph("cube"))

# two K5 joined by a single bridge: the bridge ends carry negative curvature
pairs = [(i, j) for i in range(5) for j in range(i + 1, 5)]
pairs += [(i + 5, j + 5) for i, j in pairs] + [(4, 5)]
g = build_graph(pairs)
rep = curvature_report(g)
k = g.link_index(4, 5)
print(f"barbell: bridge kappa = {rep.kappa[k]:.4f}, typical clique kappa = {np.median(rep.kappa):.4f}")
print(f"complete K6 kappa = {curvature_report(complete_graph(6)).kappa[0]:.4f} (2 rho with rho = 1)")
