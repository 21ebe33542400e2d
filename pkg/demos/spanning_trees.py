"""Relative resistance as the probability that a link lies in a random tree.

Draws weighted uniform spanning trees with Wilson's algorithm and compares
inclusion frequencies with c_ij * omega_ij, then checks that the mean
combinatorial curvature of the sampled trees recovers p.

    python3 demos/spanning_trees.py
"""
import numpy as np

from resist_curve import curvature_report, effective_resistance
from resist_curve.generators import random_connected_graph
from resist_curve.trees import TreeSampler, tree_degrees

g = random_connected_graph(7, 5, seed=2)
prof = effective_resistance(g)
samples = 200_000
trees = TreeSampler(g).sample(samples, seed=0)
freq = np.bincount(trees.ravel(), minlength=g.m) / samples

print(" link      c*omega   sampled   z-score")
for e, (i, j) in enumerate(g.links):
    q = prof.relative[e]
    sd = np.sqrt(max(q * (1 - q), 1e-300) / samples)
    print(f" ({i},{j})   {q:8.5f}  {freq[e]:8.5f}  {(freq[e] - q) / sd:+6.2f}")

p = curvature_report(g, prof).p
comb = (1 - tree_degrees(g, trees) / 2).mean(axis=0)
print("p             :", np.round(p, 4))
print("mean tree p_i :", np.round(comb, 4))
