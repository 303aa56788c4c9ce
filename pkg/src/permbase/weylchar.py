"""Root systems, Weyl groups and the semisimple permutation-character sum.

For a split group of Lie type with Weyl group W, a semisimple element x
attached to (J, w) and a parabolic subgroup with Weyl group W_H, the value of
the permutation character on x is

    sum_i  |W|/|C_i| * |W_H ∩ C_i|/|W_H| * |W_J w ∩ C_i|/|W_J|
           * eps_i * |C(x)°|_{p'} / |T_i|

over the classes C_i of W, where |T_i| = det(q - w_i) on the reflection
representation and eps_i = (-1)^(rank - r_i), r_i being the multiplicity of
q - 1 in |T_i|.  Everything is exact: polynomials have integer coefficients
and the sum is put over a common denominator and divided out.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import zip_longest

import numpy as np
import sympy
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InputError, InternalError, ResourceError
from .group import GroupHandle
from .perm import Permutation

ENUMERATION_LIMIT = 10**6


# --- polynomials -----------------------------------------------------------------

class IntPolynomial:
    """Polynomial in q with integer coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        c = [int(x) for x in coeffs]
        for x, y in zip(c, coeffs):
            if x != y:
                raise InputError(f"non-integer coefficient {y}")
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def q(cls):
        return cls((0, 1))

    @classmethod
    def const(cls, a):
        return cls((a,))

    @classmethod
    def q_power_minus_one(cls, d):
        return cls((-1,) + (0,) * (d - 1) + (1,))

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPolynomial.const(other)
        return isinstance(other, IntPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = _as_poly(other)
        return IntPolynomial(a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=0))

    __radd__ = __add__

    def __neg__(self):
        return IntPolynomial(-a for a in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if not self.coeffs or not other.coeffs:
            return IntPolynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = IntPolynomial.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, q):
        v = 0
        for a in reversed(self.coeffs):
            v = v * q + a
        return v

    def divmod_exact(self, other):
        """(quotient, remainder) over the rationals, as Fraction lists."""
        return _divmod(list(map(Fraction, self.coeffs)), list(map(Fraction, other.coeffs)))

    def exact_div(self, other):
        quo, rem = self.divmod_exact(other)
        if any(rem):
            raise InternalError(f"({self}) is not divisible by ({other})")
        if any(x.denominator != 1 for x in quo):
            raise InternalError(f"({self}) / ({other}) has non-integer coefficients")
        return IntPolynomial(int(x) for x in quo)

    def multiplicity_of_root_one(self):
        m, p = 0, self
        one = IntPolynomial((-1, 1))
        while not p.is_zero() and p(1) == 0:
            p = p.exact_div(one)
            m += 1
        return m

    def __repr__(self):
        return f"IntPolynomial({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            a = self.coeffs[k]
            if not a:
                continue
            mono = "" if k == 0 else ("q" if k == 1 else f"q^{k}")
            mag = abs(a)
            body = str(mag) if (mag != 1 or k == 0) else ""
            body += mono
            sign = "-" if a < 0 else "+"
            parts.append((sign, body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s


def _as_poly(x):
    return x if isinstance(x, IntPolynomial) else IntPolynomial.const(x)


def _divmod(num, den):
    while den and den[-1] == 0:
        den.pop()
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    num = list(num)
    quo = [Fraction(0)] * max(len(num) - len(den) + 1, 0)
    for k in range(len(num) - len(den), -1, -1):
        c = num[k + len(den) - 1] / den[-1]
        quo[k] = c
        if c:
            for j, d in enumerate(den):
                num[k + j] -= c * d
    rem = num[:len(den) - 1]
    return quo, rem


class RationalPolynomial:
    """Polynomial with Fraction coefficients; only what the character sum needs."""

    def __init__(self, coeffs=()):
        self.coeffs = [Fraction(c) for c in coeffs]

    def add_scaled(self, poly, a):
        c = self.coeffs
        if len(c) < len(poly.coeffs):
            c.extend([Fraction(0)] * (len(poly.coeffs) - len(c)))
        for i, b in enumerate(poly.coeffs):
            c[i] += a * b

    def exact_div(self, den):
        quo, rem = _divmod(self.coeffs, [Fraction(x) for x in den.coeffs])
        if any(rem):
            raise InputError("character sum does not simplify to a polynomial")
        if any(x.denominator != 1 for x in quo):
            raise InputError("character sum has non-integer coefficients")
        return IntPolynomial(int(x) for x in quo)


def poincare_polynomial(degrees):
    """prod (1 + q + ... + q^(d-1)): the length generating function."""
    out = IntPolynomial.const(1)
    for d in degrees:
        out = out * IntPolynomial((1,) * d)
    return out


# --- root systems ------------------------------------------------------------------

def _chain(n, length=2):
    g = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        g[i, i] = length
        if i + 1 < n:
            g[i, i + 1] = g[i + 1, i] = -length // 2
    return g


def _gram(kind, n):
    """Twice the invariant form on simple roots (Bourbaki numbering), with
    short roots of squared length 2."""
    if kind == "A" and n >= 1:
        return _chain(n)
    if kind == "B" and n >= 2:
        g = _chain(n, 4)
        g[n - 1, n - 1] = 2
        return g
    if kind == "C" and n >= 2:
        g = _chain(n)
        g[n - 1, n - 1] = 4
        g[n - 2, n - 1] = g[n - 1, n - 2] = -2
        return g
    if kind == "D" and n >= 4:
        g = _chain(n)
        g[n - 2, n - 1] = g[n - 1, n - 2] = 0
        g[n - 3, n - 1] = g[n - 1, n - 3] = -1
        return g
    if kind == "E" and n in (6, 7, 8):
        g = np.zeros((n, n), dtype=np.int64)
        np.fill_diagonal(g, 2)
        edges = [(0, 2), (1, 3), (2, 3)] + [(i, i + 1) for i in range(3, n - 1)]
        for i, j in edges:
            g[i, j] = g[j, i] = -1
        return g
    if kind == "F" and n == 4:
        return np.array([[4, -2, 0, 0], [-2, 4, -2, 0], [0, -2, 2, -1], [0, 0, -1, 2]])
    if kind == "G" and n == 2:
        return np.array([[2, -3], [-3, 6]])
    raise InputError(f"unknown root system type {kind}{n}")


_DEGREES = {
    "A": lambda n: list(range(2, n + 2)),
    "B": lambda n: list(range(2, 2 * n + 1, 2)),
    "C": lambda n: list(range(2, 2 * n + 1, 2)),
    "D": lambda n: list(range(2, 2 * n - 1, 2)) + [n],
    "E": lambda n: {6: [2, 5, 6, 8, 9, 12], 7: [2, 6, 8, 10, 12, 14, 18],
                    8: [2, 8, 12, 14, 18, 20, 24, 30]}[n],
    "F": lambda n: [2, 6, 8, 12],
    "G": lambda n: [2, 6],
}


def reflection_degrees(kind, n):
    return _DEGREES[kind](n)


def parse_type_label(label):
    label = label.strip()
    if label[:1].isdigit():
        raise InputError(f"twisted type {label!r} is not supported; only split data is evaluated")
    parts = re.findall(r"([A-Ga-g])\s*(\d+)", label)
    rest = re.sub(r"([A-Ga-g])\s*(\d+)|[\sx+*×]", "", label)
    if not parts or rest:
        raise InputError(f"cannot parse root system type {label!r}")
    out = []
    for k, n in parts:
        n = int(n)
        if n > 8:
            raise InputError(f"rank {n} exceeds 8 for a single factor")
        _gram(k.upper(), n)
        out.append((k.upper(), n))
    return out


def _reflect(v, beta, gram):
    # v - 2 (v, beta)/(beta, beta) beta
    num = 2 * int(v @ gram @ beta)
    den = int(beta @ gram @ beta)
    if num % den:
        raise InternalError("non-integral reflection coefficient")
    return v - (num // den) * beta


@dataclass
class RootSystemData:
    type_label: str
    rank: int
    components: list
    gram: np.ndarray
    cartan_matrix: np.ndarray
    simple_roots: np.ndarray
    all_roots: np.ndarray
    highest_root: np.ndarray
    index: dict = field(repr=False, default_factory=dict)

    @property
    def positive(self):
        return (self.all_roots >= 0).all(axis=1)

    def root_index(self, v):
        return self.index[tuple(int(x) for x in v)]

    def node(self, name):
        """Root vector for 'a0' (highest root of the first factor) or 'a1'..'an'."""
        m = re.fullmatch(r"a(\d+)", name.strip())
        if not m:
            raise InputError(f"bad node name {name!r}")
        k = int(m.group(1))
        if k == 0:
            return self.highest_root
        if not 1 <= k <= self.rank:
            raise InputError(f"node {name} out of range for rank {self.rank}")
        return self.simple_roots[k - 1]

    def degrees(self):
        return [d for k, n in self.components for d in reflection_degrees(k, n)]


def build_root_system(type_label):
    comps = parse_type_label(type_label)
    rank = sum(n for _, n in comps)
    gram = np.zeros((rank, rank), dtype=np.int64)
    o = 0
    for k, n in comps:
        gram[o:o + n, o:o + n] = _gram(k, n)
        o += n
    diag = np.diag(gram)
    cartan = 2 * gram // diag[:, None]
    simple = np.eye(rank, dtype=np.int64)
    roots = [tuple(r) for r in simple]
    seen = set(roots)
    i = 0
    while i < len(roots):
        v = np.array(roots[i])
        i += 1
        for a in simple:
            w = tuple(int(x) for x in _reflect(v, a, gram))
            if w not in seen:
                seen.add(w)
                roots.append(w)
    # positive roots by height, then negative ones
    roots.sort(key=lambda r: (min(r) < 0, sum(map(abs, r)), r))
    arr = np.array(roots, dtype=np.int64)
    pos = arr[(arr >= 0).all(axis=1)]
    # highest root of the first factor
    k0, n0 = comps[0]
    first = pos[(pos[:, n0:] == 0).all(axis=1)] if len(comps) > 1 else pos
    highest = first[np.argmax(first.sum(axis=1))]
    index = {tuple(int(x) for x in r): j for j, r in enumerate(arr)}
    return RootSystemData(type_label, rank, comps, gram, cartan, simple, arr, highest, index)


def _closure_count(vectors, gram):
    vecs = [np.array(v, dtype=np.int64) for v in vectors]
    seen = {tuple(v) for v in vecs}
    todo = list(seen)
    while todo:
        v = np.array(todo.pop())
        for a in vecs:
            w = tuple(int(x) for x in _reflect(v, a, gram))
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def _span_rank(vectors):
    if not vectors:
        return 0
    return sympy.Matrix([list(map(int, v)) for v in vectors]).rank()


def subsystem_components(rs, vectors):
    """Types (kind, rank) of the root subsystem generated by ``vectors``."""
    vecs = [np.array(v, dtype=np.int64) for v in vectors]
    n = len(vecs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if int(vecs[i] @ rs.gram @ vecs[j]) != 0:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(vecs[i])
    out = []
    for comp in groups.values():
        roots = _closure_count(comp, rs.gram)
        r = _span_rank(comp)
        if r != len(comp):
            raise InputError("roots in J are linearly dependent")
        N = len(roots)
        lengths = {int(np.array(x) @ rs.gram @ np.array(x)) for x in roots}
        out.append(_identify(r, N, len(lengths) > 1))
    return sorted(out)


def _identify(r, N, two_lengths):
    if not two_lengths:
        if N == r * (r + 1):
            return ("A", r)
        if r >= 4 and N == 2 * r * (r - 1):
            return ("D", r)
        if (r, N) in ((6, 72), (7, 126), (8, 240)):
            return ("E", r)
    else:
        if r == 2 and N == 12:
            return ("G", 2)
        if r == 4 and N == 48:
            return ("F", 4)
        if N == 2 * r * r:
            return ("B", r)
    raise InternalError(f"unrecognized root subsystem: rank {r}, {N} roots")


# --- Weyl groups ---------------------------------------------------------------------

class WeylGroupData:
    """W as a permutation group on the roots, with its conjugacy classes."""

    def __init__(self, rs, limit=ENUMERATION_LIMIT):
        self.rs = rs
        self.limit = limit
        self.simple_idx = [rs.root_index(a) for a in rs.simple_roots]
        self.generators = [self.reflection(a) for a in rs.simple_roots]
        self.matrices = [self.matrix(g) for g in self.generators]
        self.order = 1
        for d in rs.degrees():
            self.order *= d
        self.reflection_count = int(rs.positive.sum())
        self._elements = None

    @property
    def degree(self):
        return len(self.rs.all_roots)

    def reflection(self, beta):
        beta = np.asarray(beta, dtype=np.int64)
        imgs = [self.rs.root_index(_reflect(v, beta, self.rs.gram)) for v in self.rs.all_roots]
        return np.array(imgs, dtype=np.intp)

    def from_word(self, word):
        """Element s_{i1} s_{i2} ... (applied left to right), 1-based indices."""
        g = np.arange(self.degree, dtype=np.intp)
        for i in word:
            if not 1 <= i <= self.rs.rank:
                raise InputError(f"simple reflection index {i} out of range")
            g = self.generators[i - 1][g]
        return g

    def matrix(self, w):
        """Integer matrix of w on the root lattice (columns: images of simple roots)."""
        return self.rs.all_roots[w[self.simple_idx]].T.copy()

    def key(self, elems):
        """Integer key of elements (rows), from the images of the simple roots."""
        elems = np.atleast_2d(elems)
        k = np.zeros(len(elems), dtype=np.int64)
        for i in self.simple_idx:
            k = k * self.degree + elems[:, i]
        return k

    def _enumerate(self):
        if self._elements is not None:
            return
        if self.order > self.limit:
            raise ResourceError(f"|W| = {self.order} exceeds the enumeration limit {self.limit}")
        elems = subgroup_elements(self, self.generators)
        if len(elems) != self.order:
            raise InternalError(f"enumerated {len(elems)} elements, expected {self.order}")
        keys = self.key(elems)
        order = np.argsort(keys)
        self._elements = elems[order]
        self._keys = keys[order]
        n = len(elems)
        rows, cols = [], []
        for s in self.generators:
            conj = s[self._elements[:, s]]
            rows.append(np.arange(n))
            cols.append(self.lookup(conj))
        graph = coo_matrix((np.ones(n * len(rows), dtype=np.int8),
                            (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
        _, labels = connected_components(graph, directed=True, connection="weak")
        # renumber classes: identity first, then by size, then by first element
        ident = self.lookup(np.arange(self.degree)[None, :])[0]
        first = {}
        for i, lab in enumerate(labels):
            first.setdefault(lab, i)
        sizes = np.bincount(labels)
        ordering = sorted(first, key=lambda lab: (lab != labels[ident], sizes[lab], first[lab]))
        remap = np.empty(len(ordering), dtype=np.int64)
        for new, lab in enumerate(ordering):
            remap[lab] = new
        self._class_of = remap[labels]
        self.class_sizes = [int(sizes[lab]) for lab in ordering]
        self.class_reps = [self._elements[first[lab]] for lab in ordering]

    def lookup(self, elems):
        idx = np.searchsorted(self._keys, self.key(elems))
        if (idx >= len(self._keys)).any() or (self._keys[idx] != self.key(elems)).any():
            raise InputError("element is not in W")
        return idx

    @property
    def elements(self):
        self._enumerate()
        return self._elements

    @property
    def classes(self):
        """List of (representative, size)."""
        self._enumerate()
        return list(zip(self.class_reps, self.class_sizes))

    def class_of(self, elems):
        self._enumerate()
        return self._class_of[self.lookup(elems)]

    def lengths(self, elems):
        pos = self.rs.positive
        return (~pos[np.atleast_2d(elems)[:, pos]]).sum(axis=1)


def subgroup_elements(W, gens, limit=ENUMERATION_LIMIT):
    """All elements of the subgroup of W generated by root permutations."""
    gens = [np.asarray(g) for g in gens if not np.array_equal(g, np.arange(W.degree))]
    if not gens:
        return np.arange(W.degree, dtype=np.intp)[None, :]
    G = GroupHandle.from_generators([Permutation(g, check=False) for g in gens], degree=W.degree)
    if G.order > limit:
        raise ResourceError(f"subgroup of order {G.order} exceeds the enumeration limit {limit}")
    return G.chain.elements()


def torus_order_poly(W, w):
    """det(q I - w) on the reflection representation."""
    M = sympy.Matrix(W.matrix(np.asarray(w)).tolist())
    q = sympy.Symbol("q")
    cp = sympy.Poly(M.charpoly(q).as_expr(), q)
    return IntPolynomial(reversed([int(c) for c in cp.all_coeffs()]))


def relative_rank(W, w):
    """Multiplicity of the eigenvalue 1 of w."""
    M = sympy.Matrix(W.matrix(np.asarray(w)).tolist())
    return W.rs.rank - (M - sympy.eye(W.rs.rank)).rank()


def _levi_degrees(rs, vectors):
    return [d for k, n in subsystem_components(rs, vectors) for d in reflection_degrees(k, n)]


def parabolic_index_poly(rs, levi_subset):
    """|W|_q / |W_L|_q, the number of points of G/P as a polynomial in q."""
    vecs = [rs.node(x) if isinstance(x, str) else rs.simple_roots[x - 1] for x in levi_subset]
    for v in vecs:
        if v.sum() != 1 or (v < 0).any():
            raise InputError("the Levi subset must consist of simple roots")
    return poincare_polynomial(rs.degrees()).exact_div(poincare_polynomial(_levi_degrees(rs, vecs)))


def split_centralizer_order_pprime(rs, J):
    """p'-part of |C(x)°| for x attached to (J, 1): prod over J's reflection
    degrees of (q^d - 1), times (q - 1)^(rank - rank J)."""
    vecs = [rs.node(x) for x in J]
    out = IntPolynomial.const(1)
    for d in _levi_degrees(rs, vecs):
        out = out * IntPolynomial.q_power_minus_one(d)
    return out * IntPolynomial((-1, 1)) ** (rs.rank - _span_rank(vecs))


# --- the character sum -------------------------------------------------------------

@dataclass
class ParabolicCharQuery:
    type_label: str
    J: list
    parabolic_subset: list
    w_word: list = field(default_factory=list)
    centralizer_pprime_poly: IntPolynomial | None = None
    q: int | None = None
    mode: str = "chi"


@dataclass
class CharResult:
    polynomial: IntPolynomial
    value: int | None
    terms: list


def _validate_J(rs, J):
    names = [x.strip() for x in J]
    if len(set(names)) != len(names):
        raise InputError("J has repeated nodes")
    if len(names) > rs.rank or (len(rs.components) == 1 and len(names) == rs.rank + 1):
        raise InputError("J must be a proper subset of the extended simple system")
    for x in names:
        rs.node(x)
    return names


def chi_semisimple(query, W=None):
    rs = W.rs if W is not None else build_root_system(query.type_label)
    W = W or WeylGroupData(rs)
    J = _validate_J(rs, query.J)
    if query.w_word:
        if query.centralizer_pprime_poly is None:
            raise InputError("w != 1 requires the centralizer polynomial to be supplied")
    cpoly = query.centralizer_pprime_poly or split_centralizer_order_pprime(rs, J)
    levi = [rs.node(x) for x in query.parabolic_subset]
    for v in levi:
        if v.sum() != 1 or (v < 0).any():
            raise InputError("the parabolic subset must consist of simple roots")

    W._enumerate()
    k = len(W.class_sizes)
    WH = subgroup_elements(W, [W.reflection(v) for v in levi])
    WJ = subgroup_elements(W, [W.reflection(rs.node(x)) for x in J])
    w = W.from_word(query.w_word)
    coset = w[WJ]
    h_counts = np.bincount(W.class_of(WH), minlength=k)
    j_counts = np.bincount(W.class_of(coset), minlength=k)

    terms = []
    for i in range(k):
        if not h_counts[i] or not j_counts[i]:
            continue
        a = Fraction(W.order, W.class_sizes[i]) * Fraction(int(h_counts[i]), len(WH)) \
            * Fraction(int(j_counts[i]), len(WJ))
        T = torus_order_poly(W, W.class_reps[i])
        r = T.multiplicity_of_root_one()
        eps = -1 if (rs.rank - r) % 2 else 1
        terms.append((i, eps * a, T))

    distinct = list(dict.fromkeys(T for _, _, T in terms))
    den = IntPolynomial.const(1)
    for T in distinct:
        den = den * T
    num = RationalPolynomial()
    for _, a, T in terms:
        num.add_scaled(cpoly * den.exact_div(T), a)
    poly = num.exact_div(den)
    value = poly(query.q) if query.q is not None else None
    return CharResult(poly, value, terms)


# --- query files -------------------------------------------------------------------

def _node_list(text):
    return [t.strip() for t in text.split(",") if t.strip()]


def parse_query(text):
    """Parse a key: value query file.

    Keys: type, mode (chi | index), J, w (identity or a word such as
    ``1 3 2``), parabolic, centralizer (coefficients, lowest first), q.
    """
    fields = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise InputError(f"line {lineno}: expected 'key: value'")
        k, v = line.split(":", 1)
        fields[k.strip().lower()] = v.strip()
    if "type" not in fields:
        raise InputError("query needs a 'type' line")
    mode = fields.get("mode", "chi")
    if mode not in ("chi", "index"):
        raise InputError(f"unknown mode {mode!r}")
    w = fields.get("w", "identity")
    word = [] if w in ("", "identity", "1") else [int(t) for t in re.split(r"[\s,]+", w) if t]
    cent = None
    if fields.get("centralizer"):
        cent = IntPolynomial(int(t) for t in _node_list(fields["centralizer"]))
    q = int(fields["q"]) if fields.get("q") else None
    return ParabolicCharQuery(fields["type"], _node_list(fields.get("j", "")),
                              _node_list(fields.get("parabolic", "")), word, cent, q, mode)


def run_query(query):
    rs = build_root_system(query.type_label)
    if query.mode == "index":
        poly = parabolic_index_poly(rs, query.parabolic_subset)
        return CharResult(poly, poly(query.q) if query.q is not None else None, [])
    return chi_semisimple(query)
