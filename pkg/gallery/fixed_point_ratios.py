"""
Fixed point ratios and the class-sum bound
==========================================

For x in G acting on the cosets of H, fpr(x) is the share of points fixed by
x.  It can be read off the permutation or from how the classes of H fuse
into G.  Summing |x^G| fpr(x)^c over prime-order classes bounds the chance
that c random points fail to be a base.
"""

from permbase import library
from permbase.basesize import q_exact, qhat_from_inventory
from permbase.classes import class_inventory, fpr_comparison

G, H = library.load("M12"), library.load("M11")
rows, action = fpr_comparison(G, H)
for rec, fixes, fusion in rows:
    print(f"{rec.label:>4} |x^G| = {rec.class_size:>6}  fpr = {fixes}  (fusion: {fusion})")

# exact Q against the bound, c = 1..5
Q = action.quotient_group
inv = class_inventory(Q, prime_only=True)
for c in range(1, 6):
    q = q_exact(Q, c)
    qhat = qhat_from_inventory(inv, c).total
    print(f"c = {c}:  Q = {float(q):.5f}   Qhat = {float(qhat):.5f}")

# the bound only helps once it drops below 1; for M12 it never does by c = 5
print(qhat_from_inventory(inv, 5).to_text())
