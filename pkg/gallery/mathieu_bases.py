"""
Base sizes of the Mathieu groups
================================

A base is a set of points whose pointwise stabilizer is trivial.  Here we
compute the smallest one for the Mathieu groups on their natural points and
for M12 on the cosets of M11, and check the proofs.
"""

from permbase import library
from permbase.basesize import (greedy_base, minimal_base_size_exact, verify_certificate,
                               verify_transcript)
from permbase.group import coset_action

M24 = library.load("M24")
print(M24, "base", M24.chain.base)

# a greedy base always fixes a point in a largest orbit of what is left
g = greedy_base(M24)
print("greedy:", g.points, g.stabilizer_order_trace)

# the exact search starts from that upper bound and works down
for name in ("M24", "M23", "M22"):
    G = library.load(name)
    res = minimal_base_size_exact(G)
    print(f"b({name}) = {res.b}  witness {res.witness.points}")
    # both halves of the answer can be rechecked from scratch
    assert verify_certificate(G, res.witness) == []
    assert verify_transcript(G, res.lower) == []

# M12 acting on the 12 cosets of M11
act = coset_action(library.load("M12"), library.load("M11"))
res = minimal_base_size_exact(act.quotient_group)
print("b(M12 on M12/M11) =", res.b)

# for small degree the order alone rules out short bases: 12^4 < |M12|
print(12 ** 4, "<", act.quotient_group.order, "so no 4-tuple can be a base")
