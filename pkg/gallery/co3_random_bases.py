"""
Random bases in Co3
===================

Co3 acting on 276 points is too large for an exhaustive search.  Random
tuples still tell a clear story: 6 points are almost always a base, 5 never
seem to be.
"""

from permbase import library
from permbase.basesize import OrbitTree, q_montecarlo, random_base_search

G = library.load("Co3")
print(G)
tree = OrbitTree(G)

cert, used = random_base_search(G, 6, 1000, tree=tree)
print(f"6-base after {used} tries: {cert.points}")
print("trace:", cert.stabilizer_order_trace)

# 10^6 trials take under a minute; fewer is enough to see the pattern
for c in (5, 6):
    est = q_montecarlo(G, c, 20000, seed=1, tree=tree)
    print(f"c = {c}: Q ~ {est.estimate:.4f}  95% interval [{est.low:.4f}, {est.high:.4f}]")
