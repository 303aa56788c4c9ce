"""Bases: verification, greedy and exact search, the probability Q(G,c) of a
random c-tuple failing to be a base, and the class-sum upper bound for it.

Most of the work happens on an :class:`OrbitTree`.  A node is a canonical
prefix of points; it stores the pointwise stabilizer K of the prefix, the
orbits of K and, lazily, elements of K carrying each point to the smallest
point of its orbit.  Children are obtained by fixing an orbit representative.
Every tuple of points can be pushed down the tree by such elements, so
searches only ever look at orbit representatives.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import binomtest

from .chain import rebase
from .errors import InputError, ResourceError, StateError
from .group import GroupHandle, coset_action, pointwise_stabilizer
from .perm import DTYPE, Permutation, inverse_array

DEFAULT_NODE_BUDGET = 10**6
DEFAULT_TUPLE_BUDGET = 10**9


class _Node:
    __slots__ = ("prefix", "order", "chain", "orbit_of", "reps", "sizes", "moved",
                 "max_orbit", "parent", "label", "gens", "ginv", "_to_rep")

    def __init__(self, prefix, chain, degree):
        self.prefix = prefix
        self.chain = chain
        self.order = chain.order
        self.gens = chain.strong_generators()
        self.ginv = [inverse_array(g) for g in self.gens]
        orbit_of = np.full(degree, -1, dtype=np.int64)
        parent = np.full(degree, -1, dtype=np.int64)
        label = np.full(degree, -1, dtype=np.int64)
        reps, sizes = [], []
        glists = [g.tolist() for g in self.gens]
        for start in range(degree):
            if orbit_of[start] >= 0:
                continue
            idx = len(reps)
            orbit_of[start] = idx
            orb = [start]
            i = 0
            while i < len(orb):
                p = orb[i]
                i += 1
                for j, g in enumerate(glists):
                    q = g[p]
                    if orbit_of[q] < 0:
                        orbit_of[q] = idx
                        parent[q] = p
                        label[q] = j
                        orb.append(q)
            reps.append(start)
            sizes.append(len(orb))
        self.orbit_of = orbit_of
        self.reps = reps
        self.sizes = sizes
        self.moved = [(r, s) for r, s in zip(reps, sizes) if s > 1]
        self.moved.sort(key=lambda t: (-t[1], t[0]))
        self.max_orbit = max(sizes) if sizes else 1
        self.parent = parent
        self.label = label
        self._to_rep = {}

    def rep_of(self, p):
        return self.reps[self.orbit_of[p]]

    def size_of(self, p):
        return self.sizes[self.orbit_of[p]]

    def to_rep(self, p):
        """Element of K taking ``p`` to its orbit representative."""
        t = self._to_rep.get(p)
        if t is None:
            t = np.arange(len(self.orbit_of), dtype=DTYPE)
            q = p
            while self.parent[q] >= 0:
                t = self.ginv[self.label[q]][t]
                q = int(self.parent[q])
            self._to_rep[p] = t
        return t


class OrbitTree:
    """Canonical prefixes of point tuples, built on demand."""

    def __init__(self, G, seed=0):
        self.G = G
        self.degree = G.degree
        self.seed = seed
        self.nodes = {(): _Node((), G.chain, G.degree)}
        self.built = 1

    @property
    def root(self):
        return self.nodes[()]

    def child(self, node, r):
        key = node.prefix + (r,)
        ch = self.nodes.get(key)
        if ch is None:
            rng = random.Random(f"{self.seed}:{key}")
            chain = rebase(node.chain, [r], rng=rng).tail(1)
            ch = _Node(key, chain, self.degree)
            self.nodes[key] = ch
            self.built += 1
        return ch

    def walk(self, points):
        """Push a tuple down the tree.

        Returns (path, order) where ``path`` lists the nodes met and
        ``order`` is the order of the pointwise stabilizer of the tuple.
        Points fixed by the running stabilizer are skipped.
        """
        pts = [int(p) for p in points]
        node = self.root
        path = [node]
        for i in range(len(pts)):
            if node.order == 1:
                break
            p = pts[i]
            s = node.size_of(p)
            if s == 1:
                continue
            t = node.to_rep(p)
            for j in range(i + 1, len(pts)):
                pts[j] = int(t[pts[j]])
            if i == len(pts) - 1:
                return path, node.order // s
            node = self.child(node, node.rep_of(p))
            path.append(node)
        return path, node.order


# --- certificates --------------------------------------------------------------

@dataclass
class BaseCertificate:
    points: list
    stabilizer_order_trace: list
    group_name: str = ""
    degree: int = 0
    group_order: int = 0

    @property
    def size(self):
        return len(self.points)

    def to_text(self):
        return "\n".join([
            "# base certificate",
            f"group: {self.group_name}",
            f"degree: {self.degree}",
            f"group_order: {self.group_order}",
            "points: " + " ".join(map(str, self.points)),
            "trace: " + " ".join(map(str, self.stabilizer_order_trace)),
        ]) + "\n"

    @classmethod
    def from_text(cls, text):
        fields = _parse_fields(text)
        try:
            return cls(
                points=[int(t) for t in fields["points"].split()],
                stabilizer_order_trace=[int(t) for t in fields["trace"].split()],
                group_name=fields.get("group", ""),
                degree=int(fields.get("degree", 0)),
                group_order=int(fields.get("group_order", 0)),
            )
        except (KeyError, ValueError) as e:
            raise InputError(f"malformed base certificate: {e}") from None


def _parse_fields(text):
    out = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if ":" in line:
            k, v = line.split(":", 1)
            out[k.strip()] = v.strip()
    return out


def stabilizer_trace(G, points, seed=0):
    """Orders of the pointwise stabilizers of the prefixes of ``points``."""
    for p in points:
        if not 0 <= p < G.degree:
            raise InputError(f"point {p} out of range for degree {G.degree}")
    if not points:
        return []
    chain = rebase(G.chain, points, seed=seed)
    distinct = list(dict.fromkeys(points))
    trace, seen = [], set()
    for p in points:
        seen.add(p)
        m = sum(1 for q in distinct if q in seen)
        trace.append(chain.tail(m).order)
    return trace


def is_base(G, points, seed=0):
    """(True, certificate) if the pointwise stabilizer of ``points`` is trivial,
    else (False, None)."""
    points = [int(p) for p in points]
    trace = stabilizer_trace(G, points, seed=seed)
    final = trace[-1] if trace else G.order
    if final != 1:
        return False, None
    return True, BaseCertificate(points, trace, G.name, G.degree, G.order)


def verify_certificate(G, cert, seed=1):
    """Recheck a base certificate from scratch; returns a list of problems."""
    problems = []
    if cert.degree and cert.degree != G.degree:
        problems.append(f"degree {cert.degree} != {G.degree}")
        return problems
    if cert.group_order and cert.group_order != G.order:
        problems.append(f"group order {cert.group_order} != {G.order}")
    tr = cert.stabilizer_order_trace
    if len(tr) != len(cert.points):
        problems.append("trace length differs from number of points")
    prev = G.order
    for t in tr:
        if t > prev or prev % t:
            problems.append(f"trace entry {t} does not divide {prev}")
        prev = t
    if (tr[-1] if tr else G.order) != 1:
        problems.append("trace does not end in 1")
    try:
        fresh = stabilizer_trace(G, cert.points, seed=seed)
    except InputError as e:
        return problems + [str(e)]
    if fresh != tr:
        problems.append(f"recomputed trace {fresh} differs from {tr}")
    if pointwise_stabilizer(G, cert.points, seed=seed).order != 1:
        problems.append("pointwise stabilizer is not trivial")
    return problems


def greedy_base(G, tree=None):
    """Base built by always fixing a point in a largest orbit of the current
    stabilizer (smallest such point)."""
    tree = tree or OrbitTree(G)
    node = tree.root
    points = []
    while node.order > 1:
        if not node.moved:
            raise InputError(f"action is not faithful: kernel of order {node.order}")
        r = node.moved[0][0]
        points.append(r)
        node = tree.child(node, r)
    return BaseCertificate(points, stabilizer_trace(G, points), G.name, G.degree, G.order)


# --- exhaustive search -----------------------------------------------------------

@dataclass
class LowerBoundTranscript:
    c: int
    method: str = "exhaustive-canonical"
    tuples_examined: int = 0
    orbit_reduction_used: bool = True
    verdict: str = ""
    explored: list = field(default_factory=list)
    pruned: list = field(default_factory=list)
    complete: bool = False

    def to_text(self):
        lines = [
            "# lower bound transcript",
            f"c: {self.c}",
            f"method: {self.method}",
            f"tuples_examined: {self.tuples_examined}",
            f"orbit_reduction_used: {str(self.orbit_reduction_used).lower()}",
            f"complete: {str(self.complete).lower()}",
            f"verdict: {self.verdict}",
        ]
        lines += ["E " + " ".join(map(str, p)) for p in self.explored]
        lines += ["P " + " ".join(map(str, p)) for p in self.pruned]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        explored, pruned, rest = [], [], []
        for line in text.splitlines():
            if line.startswith("E ") or line == "E":
                explored.append(tuple(int(t) for t in line[1:].split()))
            elif line.startswith("P ") or line == "P":
                pruned.append(tuple(int(t) for t in line[1:].split()))
            else:
                rest.append(line)
        f = _parse_fields("\n".join(rest))
        try:
            return cls(int(f["c"]), f.get("method", ""), int(f.get("tuples_examined", 0)),
                       f.get("orbit_reduction_used") == "true", f.get("verdict", ""),
                       explored, pruned, f.get("complete") == "true")
        except (KeyError, ValueError) as e:
            raise InputError(f"malformed transcript: {e}") from None

    def covers(self, tree, points):
        """Whether the canonical image of ``points`` lies in the searched region."""
        explored, pruned = set(self.explored), set(self.pruned)
        path, _ = tree.walk(points)
        for node in path:
            if node.prefix in pruned:
                return True
            if len(node.prefix) < self.c and node.prefix not in explored:
                return False
        return True


class _Exhausted(Exception):
    pass


def _search(tree, c, budget):
    """Depth-first search for a base of size at most ``c``.

    Returns (prefix or None, transcript).
    """
    tr = LowerBoundTranscript(c)
    counter = [0]

    def dfs(node, d):
        counter[0] += 1
        if counter[0] > budget:
            raise _Exhausted
        if node.order == 1:
            return node.prefix
        if node.order > node.max_orbit ** d:
            tr.pruned.append(node.prefix)
            return None
        tr.explored.append(node.prefix)
        for r, s in node.moved:
            tr.tuples_examined += 1
            if d == 1:
                if s == node.order:
                    return node.prefix + (r,)
                continue
            found = dfs(tree.child(node, r), d - 1)
            if found is not None:
                return found
        return None

    try:
        found = dfs(tree.root, c)
    except _Exhausted:
        tr.verdict = f"search budget of {budget} nodes exhausted"
        return None, tr
    tr.complete = found is None
    tr.verdict = f"no base of size {c} exists" if found is None else "base found"
    return found, tr


def verify_transcript(G, transcript, seed=1):
    """Check that a transcript's recorded region closes up on a fresh tree.

    Every explored node must have each moved orbit representative either
    checked at the last level, explored, or pruned by the order bound, and
    every pruned node must satisfy the bound.  Returns a list of problems.
    """
    tree = OrbitTree(G, seed=seed)
    explored, pruned = set(transcript.explored), set(transcript.pruned)
    c = transcript.c
    problems = []
    if () not in explored and () not in pruned:
        problems.append("root is neither explored nor pruned")

    def node_for(prefix):
        node = tree.root
        for r in prefix:
            if node.rep_of(r) != r or node.size_of(r) == 1:
                raise InputError(f"prefix {prefix} is not canonical")
            node = tree.child(node, r)
        return node

    for prefix in sorted(pruned):
        node = node_for(prefix)
        d = c - len(prefix)
        if not node.order > node.max_orbit ** d:
            problems.append(f"pruned node {prefix} does not satisfy the order bound")
    for prefix in sorted(explored):
        node = node_for(prefix)
        d = c - len(prefix)
        if node.order == 1:
            problems.append(f"explored node {prefix} is already a base")
        for r, s in node.moved:
            if d == 1:
                if s == node.order:
                    problems.append(f"{prefix + (r,)} is a base")
            elif d > 1:
                key = prefix + (r,)
                if key not in explored and key not in pruned:
                    if tree.child(node, r).order == 1:
                        problems.append(f"{key} is a base")
                    else:
                        problems.append(f"child {key} was not searched")
    return problems


@dataclass
class BaseSizeResult:
    b: int | None
    lo: int
    hi: int
    witness: BaseCertificate
    lower: LowerBoundTranscript | None
    exact: bool
    transcripts: list = field(default_factory=list)

    def __iter__(self):
        return iter((self.b, self.witness, self.lower))


def _order_lower_bound(G):
    """Least c with degree^c >= |G| (a c-base embeds G into c-tuples)."""
    c, n, reach = 0, max(G.degree, 1), 1
    while reach < G.order:
        reach *= n
        c += 1
    return c


def minimal_base_size_exact(G, budget=DEFAULT_NODE_BUDGET, seed=0, tree=None):
    """Exact base size with a witness base and an exhaustive lower bound.

    Starts from a greedy base and searches for strictly smaller ones until a
    search comes back empty.  If the node budget runs out the result is an
    interval and ``exact`` is False.
    """
    tree = tree or OrbitTree(G, seed=seed)
    best = greedy_base(G, tree)
    hi = best.size
    lo = _order_lower_bound(G)
    transcripts = []
    lower = None
    exact = False
    c = hi - 1
    while c >= 0:
        found, tr = _search(tree, c, budget)
        transcripts.append(tr)
        if found is not None:
            ok, cert = is_base(G, list(found), seed=seed)
            if not ok:
                raise StateError(f"search returned a non-base {found}")
            best, hi = cert, len(found)
            c = hi - 1
            continue
        if tr.complete:
            lower = tr
            lo = c + 1
            exact = True
        break
    if c < 0:
        exact, lo = True, 0
    return BaseSizeResult(hi if exact else None, lo, hi, best, lower, exact, transcripts)


# --- Q(G, c) --------------------------------------------------------------------

def q_exact(G, c, budget=DEFAULT_TUPLE_BUDGET, tree=None):
    """Exact probability that c independent uniform points do not form a base."""
    if c < 0:
        raise InputError("c must be nonnegative")
    n = G.degree
    if n ** c > budget:
        raise ResourceError(f"{n}^{c} tuples exceed the budget {budget}; use q_montecarlo")
    if G.order == 1:
        return Fraction(0)
    tree = tree or OrbitTree(G)
    memo = {}

    def bases(node, d):
        # number of d-tuples completing node.prefix to a base
        if node.order == 1:
            return n ** d
        if d == 0 or node.order > node.max_orbit ** d:
            return 0
        key = (node.prefix, d)
        if key in memo:
            return memo[key]
        fixed = n - sum(s for _, s in node.moved)
        total = fixed * bases(node, d - 1)
        for r, s in node.moved:
            if s == node.order:
                total += s * n ** (d - 1)
            elif d > 1:
                total += s * bases(tree.child(node, r), d - 1)
        memo[key] = total
        return total

    return 1 - Fraction(bases(tree.root, c), n ** c)


@dataclass
class MonteCarloEstimate:
    estimate: float
    low: float
    high: float
    trials: int
    failures: int
    example_base: list | None = None
    seed: int = 0


def _wilson(failures, trials):
    ci = binomtest(failures, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def q_montecarlo(G, c, trials, seed=0, tree=None):
    """Estimate Q(G,c) from ``trials`` uniform c-tuples (Wilson 95% interval)."""
    if trials < 1:
        raise InputError("trials must be at least 1")
    if G.order == 1:
        lo, hi = _wilson(0, trials)
        return MonteCarloEstimate(0.0, lo, hi, trials, 0, [], seed)
    tree = tree or OrbitTree(G, seed=seed)
    rng = np.random.default_rng(seed)
    failures = 0
    example = None
    chunk = 65536
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        tuples = rng.integers(0, G.degree, size=(m, c)).tolist()
        for t in tuples:
            _, order = tree.walk(t)
            if order == 1:
                if example is None:
                    example = t
            else:
                failures += 1
        done += m
    lo, hi = _wilson(failures, trials)
    return MonteCarloEstimate(failures / trials, lo, hi, trials, failures, example, seed)


def random_base_search(G, c, trials, seed=0, tree=None):
    """Look for a base among random c-tuples; stops at the first one found."""
    if trials < 1:
        raise InputError("trials must be at least 1")
    tree = tree or OrbitTree(G, seed=seed)
    rng = np.random.default_rng(seed)
    for i in range(trials):
        t = rng.integers(0, G.degree, size=c).tolist()
        if tree.walk(t)[1] == 1:
            ok, cert = is_base(G, t)
            return cert, i + 1
    return None, trials


# --- the class-sum bound ----------------------------------------------------------

@dataclass
class LedgerRow:
    label: str
    class_size: int
    fpr: Fraction
    contribution: Fraction


@dataclass
class BoundLedger:
    c: int
    per_class_contributions: list
    total: Fraction
    source: str = "computed"
    certified: bool = True

    def to_csv(self):
        import csv
        import io
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "class_size", "fpr", "contribution", "contribution_decimal"])
        for r in self.per_class_contributions:
            w.writerow([r.label, r.class_size, _frac(r.fpr), _frac(r.contribution),
                        f"{float(r.contribution):.6g}"])
        w.writerow(["total", "", "", _frac(self.total), f"{float(self.total):.6g}"])
        return buf.getvalue()

    def to_text(self):
        lines = [f"Qhat(G, {self.c})  source={self.source}"
                 + ("" if self.certified else "  [uncertified]")]
        for r in self.per_class_contributions:
            lines.append(f"  {r.label:>6}  |x^G|={r.class_size:<12} fpr={_frac(r.fpr):<12}"
                         f" {_frac(r.contribution)}  (~{float(r.contribution):.6g})")
        lines.append(f"  total = {_frac(self.total)}  (~{float(self.total):.6g})")
        return "\n".join(lines) + "\n"


def _frac(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _is_prime(n):
    return n > 1 and all(n % k for k in range(2, int(n ** 0.5) + 1))


def qhat_from_inventory(inv, c, degree=None):
    """Sum of |x^G| fpr(x)^c over prime-order classes of a complete inventory."""
    if not inv.complete:
        raise StateError("class inventory is not certified complete")
    n = degree or inv.group.degree
    rows, total = [], Fraction(0)
    for rec in inv.records:
        if not _is_prime(rec.element_order):
            continue
        f = Fraction(rec.fixed_point_count, n)
        contrib = rec.class_size * f ** c
        rows.append(LedgerRow(rec.label, rec.class_size, f, contrib))
        total += contrib
    return BoundLedger(c, rows, total, "computed", True)


def qhat_from_table(rows, c):
    """Same sum from imported class-table rows (flagged uncertified)."""
    out, total = [], Fraction(0)
    for row in rows:
        f = row.ratio()
        contrib = row.class_size * f ** c
        out.append(LedgerRow(row.label, row.class_size, f, contrib))
        total += contrib
    return BoundLedger(c, out, total, "imported-table", False)


def aggregate_bound(A, B, c):
    """B (A/B)^c, bounding a sum of |x_i^G| fpr(x_i)^c over classes with
    total size B and total intersection size A."""
    if B == 0:
        raise InputError("B must be positive")
    if A < 0 or B < 0 or c < 1:
        raise InputError("need A >= 0, B >= 1, c >= 1")
    return B * Fraction(A, B) ** c


# --- conjugate intersections --------------------------------------------------------

@dataclass
class IntersectionWitness:
    conjugators: list
    intersection_order: int
    points: list = field(default_factory=list)


def intersection_order_bruteforce(H, conjugators, limit=10**6):
    """|H ∩ H^x1 ∩ ...| by testing every element of H (|H| <= limit)."""
    if H.order > limit:
        raise ResourceError(f"|H| = {H.order} is too large to enumerate")
    elems = H.chain.elements()
    keep = np.ones(len(elems), dtype=bool)
    for x in conjugators:
        xi = inverse_array(x.images)
        # h lies in H^x = x^-1 H x  iff  x h x^-1 lies in H
        conj = xi[elems[:, x.images]]
        for i in np.flatnonzero(keep):
            if not H.chain.contains_array(conj[i]):
                keep[i] = False
    return int(keep.sum())


def witness_from_base(action, points):
    """Conjugators x_i with H ∩ H^x_1 ∩ ... trivial from a base of the coset
    action whose first point is 0 (the coset H)."""
    if not points or points[0] != 0:
        raise InputError("first base point must be 0, the coset of H itself")
    return [action.point_to_coset[p] for p in points[1:]]


def base_from_witness(action, conjugators):
    return [0] + [action.point_of(x) for x in conjugators]


def conjugate_intersection_witness(G, H, k, budget=10**5, seed=0, action=None):
    """Random search for k conjugates of H (H itself first) meeting trivially.

    A failure is evidence only, never a proof of nonexistence.
    """
    if budget < 1:
        raise InputError("budget must be positive")
    if k < 1:
        raise InputError("k must be at least 1")
    action = action or coset_action(G, H, seed=seed)
    Q = action.quotient_group
    tree = OrbitTree(Q, seed=seed)
    rng = np.random.default_rng(seed)
    for _ in range(budget):
        pts = [0] + rng.integers(0, Q.degree, size=k - 1).tolist()
        if tree.walk(pts)[1] == 1:
            conj = witness_from_base(action, pts)
            order = pointwise_stabilizer(Q, pts).order
            return IntersectionWitness(conj, order, pts)
    return None
