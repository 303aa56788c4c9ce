"""Constructions of the permutation groups shipped in ``permbase/data``.

The shipped generator files are produced by :func:`write_data`; at run time
groups are read back from those files.  Every construction here is checked
against the literature order in :data:`KNOWN_ORDERS` before it is written.
"""
from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np

from .errors import InputError
from .graphs import find_automorphism
from .group import (GroupHandle, derived_subgroup, load_group, orbits, parse_group_text,
                    pointwise_stabilizer, save_group)
from .perm import Permutation

DATA_DIR = Path(__file__).parent / "data"

KNOWN_ORDERS = {
    "M11": 7920,
    "M12": 95040,
    "M22": 443520,
    "M23": 10200960,
    "M24": 244823040,
    "HS": 44352000,
    "M22_in_HS": 443520,
    "Co3": 495766656000,
    "McL.2_in_Co3": 1796256000,
    "S6": 720,
    "PGL2_5": 120,
    "S8": 40320,
    "S4wrS2": 1152,
    "PGL4_3": 12130560,
    "L4_3": 6065280,
    "L4_3.2_2": 12130560,
    "AutL4_3": 24261120,
    "SL3_2_flags": 168,
    "SL3_3_flags": 5616,
}


def symmetric(n, name=None):
    gens = []
    if n > 1:
        gens.append(Permutation.from_cycles(n, [(0, 1)]))
    if n > 2:
        gens.append(Permutation.from_cycles(n, [tuple(range(n))]))
    return GroupHandle.from_generators(gens, degree=n, name=name or f"S{n}")


def alternating(n, name=None):
    gens = [Permutation.from_cycles(n, [(i, i + 1, i + 2)]) for i in range(n - 2)]
    return GroupHandle.from_generators(gens, degree=n, name=name or f"A{n}")


def cyclic(n, name=None):
    gens = [Permutation.from_cycles(n, [tuple(range(n))])] if n > 1 else []
    return GroupHandle.from_generators(gens, degree=n, name=name or f"C{n}")


def _projective_line_map(p, f):
    """Permutation of PL(p) = {0..p-1, inf=p} from a map on that set."""
    return Permutation([f(x) for x in range(p + 1)])


def _psl2_generators(p, scale):
    inf = p
    return [
        _projective_line_map(p, lambda x: inf if x == inf else (x + 1) % p),
        _projective_line_map(p, lambda x: inf if x == inf else (scale * x) % p),
        _projective_line_map(p, lambda x: 0 if x == inf else
                             (inf if x == 0 else (-pow(x, -1, p)) % p)),
    ]


def mathieu24():
    """M24 = <PSL2(23), delta> on PL(23), with delta(x) = x^3/9 on squares and
    9x^3 on non-squares (0 and infinity fixed)."""
    p = 23
    squares = {x * x % p for x in range(1, p)}

    def delta(x):
        if x in (0, p):
            return x
        if x in squares:
            return pow(x, 3, p) * pow(9, -1, p) % p
        return 9 * pow(x, 3, p) % p

    gens = _psl2_generators(p, 2) + [_projective_line_map(p, delta)]
    return GroupHandle.from_generators(gens, name="M24")


def mathieu12():
    """M12 = <PSL2(11), (2 10)(3 4)(5 9)(6 7)> on PL(11)."""
    gens = _psl2_generators(11, 4) + [Permutation.from_cycles(12, [(2, 10), (3, 4), (5, 9), (6, 7)])]
    return GroupHandle.from_generators(gens, name="M12")


def restrict(G, points, name=""):
    """Restriction of a group to an invariant set of points (relabelled 0..)."""
    points = list(points)
    index = {p: i for i, p in enumerate(points)}
    gens = []
    for g in G.generators:
        img = [index[int(g.images[p])] for p in points]
        if not all(i == j for i, j in enumerate(img)):
            gens.append(Permutation(img))
    return GroupHandle.from_generators(gens, degree=len(points), name=name)


def stabilizer_on_rest(G, fixed, name=""):
    S = pointwise_stabilizer(G, fixed)
    rest = [p for p in range(G.degree) if p not in set(fixed)]
    return restrict(S, rest, name)


def octads(M24):
    """The 759 octads: the five points {0..4} plus the 3-orbit of their
    pointwise stabilizer, closed under M24."""
    K = pointwise_stabilizer(M24, [0, 1, 2, 3, 4])
    three = [o for o in orbits(24, [g.images for g in K.generators]) if len(o) == 3]
    first = frozenset([0, 1, 2, 3, 4] + three[0])
    seen, todo = {first}, [first]
    while todo:
        o = todo.pop()
        for g in M24.generators:
            n = frozenset(int(g.images[x]) for x in o)
            if n not in seen:
                seen.add(n)
                todo.append(n)
    return sorted(seen, key=sorted)


def _act_on_blocks(g, blocks, index):
    return [index[frozenset(int(g.images[x]) for x in b)] for b in blocks]


def higman_sims(M24=None):
    """HS on the 100 vertices of the Higman-Sims graph.

    Vertex 0 is the special vertex, 1..22 the points of S(3,6,22) and the
    rest its 77 hexads.  The graph automorphism group is HS.2; HS is its
    derived subgroup.  Returns (HS, M22 as stabilizer of vertex 0).
    """
    M24 = M24 or mathieu24()
    hexads = [o - {22, 23} for o in octads(M24) if {22, 23} <= o]
    n = 100
    adj = np.zeros((n, n), dtype=np.int64)
    adj[0, 1:23] = adj[1:23, 0] = 1
    for j, h in enumerate(hexads):
        for x in h:
            adj[1 + x, 23 + j] = adj[23 + j, 1 + x] = 1
        for k, h2 in enumerate(hexads):
            if k != j and not (h & h2):
                adj[23 + j, 23 + k] = 1
    S = pointwise_stabilizer(M24, [22, 23])
    index = {h: j for j, h in enumerate(hexads)}
    gens = []
    for g in S.generators:
        img = [0] + [1 + int(g.images[x]) for x in range(22)]
        img += [23 + j for j in _act_on_blocks(g, hexads, index)]
        gens.append(Permutation(img))
    extra = find_automorphism(adj, [0], [1])
    big = GroupHandle.from_generators(gens + [Permutation(extra)], name="HS.2?")
    HS = big if big.order == KNOWN_ORDERS["HS"] else derived_subgroup(big)
    HS = GroupHandle.from_generators(HS.chain.generator_perms()[:0] + _few_generators(HS),
                                     degree=100, name="HS")
    M22 = pointwise_stabilizer(HS, [0])
    M22 = GroupHandle.from_generators(_few_generators(M22), degree=100, name="M22_in_HS")
    return HS, M22


def _few_generators(G, seed=1):
    """A short generating list for ``G`` (random elements until they generate)."""
    import random
    rng = random.Random(seed)
    for k in range(2, 8):
        for _ in range(10):
            gens = [G.random_element(rng) for _ in range(k)]
            H = GroupHandle.from_generators(gens, degree=G.degree)
            if H.order == G.order:
                return gens
    return G.chain.generator_perms()


def conway3(M24=None):
    """Co3 on 276 points: the regular two-graph on 23 points + 253 heptads.

    M23 acts on the two-graph; an automorphism of the descendant at point 0
    (the McLaughlin graph) moving a point to a heptad gives the rest.
    """
    M24 = M24 or mathieu24()
    hept = [o - {23} for o in octads(M24) if 23 in o]
    V = 23 + len(hept)
    seidel = np.zeros((V, V), dtype=np.int64)
    seidel[:23, :23] = -1
    for j, h in enumerate(hept):
        for i in range(23):
            seidel[i, 23 + j] = seidel[23 + j, i] = 1 if i in h else -1
        for k, h2 in enumerate(hept):
            if j != k:
                seidel[23 + j, 23 + k] = 1 if len(h & h2) == 1 else -1
    np.fill_diagonal(seidel, 0)
    # regular two-graph: Seidel eigenvalues 5 and -55
    if not np.array_equal(seidel @ seidel + 50 * seidel, 275 * np.eye(V, dtype=np.int64)):
        raise InputError("two-graph construction failed")
    d = seidel[0].copy()
    d[0] = 1
    switched = d[:, None] * seidel * d[None, :]
    mcl = (switched[1:, 1:] == 1).astype(np.int64)
    np.fill_diagonal(mcl, 0)
    extra = find_automorphism(mcl, [0], [30])
    M23 = pointwise_stabilizer(M24, [23])
    index = {h: j for j, h in enumerate(hept)}
    gens = []
    for g in M23.generators:
        img = [int(g.images[x]) for x in range(23)]
        img += [23 + j for j in _act_on_blocks(g, hept, index)]
        gens.append(Permutation(img))
    gens.append(Permutation(np.concatenate([[0], extra + 1])))
    G = GroupHandle.from_generators(gens, name="Co3")
    return GroupHandle.from_generators(_few_generators(G), degree=V, name="Co3")


def pgl2_5_in_s6():
    """S6 with a transitive PGL2(5) acting on the projective line over F5."""
    S6 = symmetric(6)
    H = GroupHandle.from_generators(_psl2_generators(5, 2), name="PGL2_5")
    return S6, H


def s8_with_wreath():
    S8 = symmetric(8)
    H = GroupHandle.from_generators([
        Permutation.from_cycles(8, [(0, 1)]),
        Permutation.from_cycles(8, [(0, 1, 2, 3)]),
        Permutation.from_cycles(8, [(0, 4), (1, 5), (2, 6), (3, 7)]),
    ], name="S4wrS2")
    return S8, H


# --- groups of Lie type over prime fields ------------------------------------

def projective_points(n, p):
    """Normalized nonzero vectors of F_p^n (first nonzero coordinate 1)."""
    pts = []
    for v in itertools.product(range(p), repeat=n):
        nz = [x for x in v if x]
        if nz and nz[0] == 1:
            pts.append(v)
    return pts


def _normalize(v, p):
    v = [x % p for x in v]
    for x in v:
        if x:
            inv = pow(x, -1, p)
            return tuple(y * inv % p for y in v)
    raise InputError("zero vector")


def _mat_inv_mod(M, p):
    n = len(M)
    A = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        r = next(r for r in range(c, n) if A[r][c] % p)
        A[c], A[r] = A[r], A[c]
        inv = pow(A[c][c], -1, p)
        A[c] = [x * inv % p for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [(x - f * y) % p for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def _row_times(v, M, p):
    n = len(M)
    return tuple(sum(v[i] * M[i][j] for i in range(n)) % p for j in range(n))


def _col_times(M, u, p):
    n = len(M)
    return tuple(sum(M[i][j] * u[j] for j in range(n)) % p for i in range(n))


def matrix_on_points_and_hyperplanes(M, p, points, index):
    """Permutation induced on points (v -> vM) followed by hyperplanes with
    normal u (u -> M^-1 u), both labelled by ``points``."""
    Minv = _mat_inv_mod(M, p)
    npts = len(points)
    img = [index[_normalize(_row_times(v, M, p), p)] for v in points]
    img += [npts + index[_normalize(_col_times(Minv, u, p), p)] for u in points]
    return Permutation(img)


def _gl_generators(n, p):
    T = [[int(i == j) for j in range(n)] for i in range(n)]
    T[0][1] = 1
    C = [[int(j == (i + 1) % n) for j in range(n)] for i in range(n)]
    D = [[int(i == j) for j in range(n)] for i in range(n)]
    D[0][0] = p - 1 if p > 2 else 1
    return T, C, D


def aut_l4_3():
    """Aut(L4(3)) = PGL4(3).<duality> on 40 points + 40 planes of PG(3,3).

    Returns (Aut, PGL4(3), L4(3), L4(3).2_2), all of degree 80.
    """
    p, n = 3, 4
    pts = projective_points(n, p)
    index = {v: i for i, v in enumerate(pts)}
    T, C, D = _gl_generators(n, p)
    mats = [matrix_on_points_and_hyperplanes(M, p, pts, index) for M in (T, C, D)]
    tau = Permutation([40 + i for i in range(40)] + list(range(40)))
    Aut = GroupHandle.from_generators(mats + [tau], name="AutL4_3")
    PGL = GroupHandle.from_generators(mats, degree=80, name="PGL4_3")
    L = derived_subgroup(PGL)
    L = GroupHandle.from_generators(_few_generators(L), degree=80, name="L4_3")
    L22 = GroupHandle.from_generators(L.generators + [tau], degree=80, name="L4_3.2_2")
    return Aut, PGL, L, L22


def sl3_flag_action(p):
    """SL3(p) acting on the complete flags (point < line) of PG(2,p).

    Returns (group, flags, diag) where ``diag(a, b, c)`` gives the permutation
    induced by a diagonal matrix.
    """
    pts = projective_points(3, p)
    index = {v: i for i, v in enumerate(pts)}
    flags = [(a, b) for a in range(len(pts)) for b in range(len(pts))
             if sum(x * y for x, y in zip(pts[a], pts[b])) % p == 0]
    findex = {f: i for i, f in enumerate(flags)}

    def perm_of(M):
        on = matrix_on_points_and_hyperplanes(M, p, pts, index).images
        npts = len(pts)
        return Permutation([findex[(int(on[a]), int(on[npts + b]) - npts)] for a, b in flags])

    gens = []
    for i, j in itertools.permutations(range(3), 2):
        M = [[int(r == c) for c in range(3)] for r in range(3)]
        M[i][j] = 1
        gens.append(perm_of(M))
    G = GroupHandle.from_generators(gens, name=f"SL3_{p}_flags")

    def diag(a, b, c):
        return perm_of([[a % p, 0, 0], [0, b % p, 0], [0, 0, c % p]])

    return G, flags, diag, pts


# --- shipped data -------------------------------------------------------------

def build_all():
    M24 = mathieu24()
    M23 = stabilizer_on_rest(M24, [23], "M23")
    M22 = stabilizer_on_rest(M24, [22, 23], "M22")
    M12 = mathieu12()
    M11 = pointwise_stabilizer(M12, [11])
    M11 = GroupHandle.from_generators(_few_generators(M11), degree=12, name="M11")
    HS, M22hs = higman_sims(M24)
    Co3 = conway3(M24)
    S6, PGL25 = pgl2_5_in_s6()
    S8, W = s8_with_wreath()
    Aut, PGL, L, L22 = aut_l4_3()
    sl32 = sl3_flag_action(2)[0]
    sl33 = sl3_flag_action(3)[0]
    groups = [M24, M23, M22, M12, M11, HS, M22hs, Co3, S6, PGL25, S8, W,
              Aut, PGL, L, L22, sl32, sl33]
    for G in groups:
        want = KNOWN_ORDERS.get(G.name)
        if want is not None and G.order != want:
            raise InputError(f"{G.name}: order {G.order}, expected {want}")
    return groups


def write_data(directory=DATA_DIR):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for G in build_all():
        save_group(G, directory / f"{G.name}.grp")


def data_path(name):
    path = DATA_DIR / f"{name}.grp"
    if not path.exists():
        raise FileNotFoundError(path)
    return path


def load(name, seed=0):
    """Load a shipped group by name, certifying its order when known."""
    return load_group(data_path(name), seed=seed, order=KNOWN_ORDERS.get(name))


def transitive_corpus(max_degree=8):
    """The shipped transitive groups of degree <= ``max_degree``."""
    text = (DATA_DIR / "transitive_le8.txt").read_text()
    out = []
    for block in text.split("---")[1:]:
        degree, name, gens = parse_group_text(block, "transitive_le8.txt")
        if degree <= max_degree:
            out.append(GroupHandle.from_generators(gens, degree=degree, name=name))
    return out


if __name__ == "__main__":
    write_data()
