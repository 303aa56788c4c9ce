"""
Permutation characters from Weyl group data
===========================================

The number of points of G/P fixed by a semisimple element can be written
as a sum over the classes of the Weyl group.  We check it against brute
force in SL3(3) and then evaluate it for an involution of E6.
"""

import itertools

from permbase import library
from permbase.weylchar import (ParabolicCharQuery, WeylGroupData, build_root_system,
                               chi_semisimple, parabolic_index_poly)

# SL3(3) on complete flags: count fixed flags of diagonal elements directly
G, flags, diag, pts = library.sl3_flag_action(3)
W = WeylGroupData(build_root_system("A2"))
for a, b in itertools.product((1, 2), repeat=2):
    c = pow(a * b, -1, 3)
    x = diag(a, b, c)
    # a root is in J when its value a/b, b/c or a/c is 1; in F3 each unit
    # is its own inverse, so a/b = a*b
    J = [n for n, r in (("a1", a * b), ("a2", b * c), ("a0", a * c)) if r % 3 == 1]
    J = J if len(J) < 3 else ["a1", "a2"]
    value = chi_semisimple(ParabolicCharQuery("A2", J, [], q=3), W).value
    print(f"diag{(a, b, c)}  J = {J}  formula {value}  fixed flags {x.num_fixed()}")

# E6 on the cosets of the parabolic with Levi D4
E6 = build_root_system("E6")
print("|G:P| =", parabolic_index_poly(E6, ["a2", "a3", "a4", "a5"]))

# an involution whose centralizer has type A5 A1
res = chi_semisimple(ParabolicCharQuery("E6", ["a0", "a1", "a3", "a4", "a5", "a6"],
                                        ["a2", "a3", "a4", "a5"]))
print("chi(x) =", res.polynomial)
print("at q = 3:", res.polynomial(3))
