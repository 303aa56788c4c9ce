"""Groups given by generators: handles, stabilizers, coset actions, file I/O."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import factorial
from pathlib import Path

import numpy as np

from .chain import StabilizerChain, build_chain, rebase, schreier_sims
from .errors import InputError, ResourceError
from .perm import DTYPE, Permutation, inverse_array

DEFAULT_INDEX_BUDGET = 10**6


@dataclass
class GroupHandle:
    degree: int
    generators: list
    chain: StabilizerChain
    name: str = ""

    @classmethod
    def from_generators(cls, generators, degree=None, name="", seed=0, order=None):
        generators = list(generators)
        if degree is None:
            if not generators:
                raise InputError("degree required for an empty generating set")
            degree = generators[0].degree
        for g in generators:
            if g.degree != degree:
                raise InputError(f"generator degrees differ ({g.degree} vs {degree})")
        if order is None:
            chain = build_chain(generators, seed=seed, degree=degree)
        else:
            chain = schreier_sims([g.images for g in generators], degree, seed=seed,
                                  known_order=order)
        return cls(degree, generators, chain, name)

    @classmethod
    def from_chain(cls, chain, name=""):
        return cls(chain.degree, chain.generator_perms(), chain, name)

    @property
    def order(self):
        return self.chain.order

    def identity(self):
        return Permutation.identity(self.degree)

    def contains(self, p):
        return self.chain.contains(p)

    def random_element(self, rng):
        return self.chain.random_element(rng)

    def elements(self):
        return [Permutation(a, check=False) for a in self.chain.elements()]

    def orbits(self):
        return orbits(self.degree, [g.images for g in self.generators])

    def is_transitive(self):
        return len(self.orbits()) == 1

    def __repr__(self):
        return f"GroupHandle({self.name or '?'}, degree={self.degree}, order={self.order})"


def orbits(degree, gens):
    """Orbits of the group generated by image arrays, each sorted, ordered by
    smallest point."""
    seen = np.full(degree, -1, dtype=np.int64)
    out = []
    for start in range(degree):
        if seen[start] >= 0:
            continue
        orb = [start]
        seen[start] = start
        i = 0
        while i < len(orb):
            p = orb[i]
            i += 1
            for g in gens:
                q = int(g[p])
                if seen[q] < 0:
                    seen[q] = start
                    orb.append(q)
        out.append(sorted(orb))
    return out


def is_subgroup(G, H):
    return H.degree == G.degree and all(G.chain.contains_array(h.images) for h in H.generators)


def pointwise_stabilizer(G, points, seed=0):
    """Subgroup of ``G`` fixing every listed point (duplicates ignored)."""
    pts = list(dict.fromkeys(int(p) for p in points))
    for p in pts:
        if not 0 <= p < G.degree:
            raise InputError(f"point {p} out of range for degree {G.degree}")
    if not pts:
        return G
    chain = rebase(G.chain, pts, seed=seed).tail(len(pts))
    label = f"{G.name}_({','.join(map(str, pts))})" if G.name else ""
    return GroupHandle.from_chain(chain, label)


def subgroup(G, generators, name="", seed=0):
    """Subgroup generated by elements claimed to lie in ``G`` (verified)."""
    generators = list(generators)
    for g in generators:
        if g.degree != G.degree or not G.chain.contains_array(g.images):
            raise InputError(f"{g!r} is not an element of {G.name or 'the group'}")
    return GroupHandle.from_generators(generators, degree=G.degree, name=name, seed=seed)


def normal_closure(G, generators, seed=0):
    """Smallest normal subgroup of ``G`` containing ``generators``."""
    gens = [g for g in generators if not g.is_identity()]
    K = GroupHandle.from_generators(gens, degree=G.degree, seed=seed)
    changed = True
    while changed:
        changed = False
        for k in list(K.generators):
            for s in G.generators:
                c = k.conjugate(s)
                if not K.contains(c):
                    gens.append(c)
                    K = GroupHandle.from_generators(gens, degree=G.degree, seed=seed)
                    changed = True
    return K


def derived_subgroup(G, seed=0):
    comms = []
    gs = G.generators
    for i, a in enumerate(gs):
        for b in gs[i + 1:]:
            c = a.inverse() * b.inverse() * a * b
            if not c.is_identity():
                comms.append(c)
    return normal_closure(G, comms, seed=seed)


@dataclass
class CosetActionResult:
    quotient_group: GroupHandle
    index: int
    point_to_coset: list
    faithful: bool
    images_of_generators: list = field(default_factory=list)
    subgroup: GroupHandle | None = None
    _lookup: dict = field(default_factory=dict, repr=False)

    def point_of(self, g):
        """The point (coset index) of the coset ``H*g``."""
        H = self.subgroup
        if not hasattr(self, "_orbit_arrays"):
            self._orbit_arrays = [np.array(lev.orbit, dtype=DTYPE) for lev in H.chain.levels]
        return self._lookup[_coset_key(H.chain, g.images, self._orbit_arrays).tobytes()]

    def image(self, x):
        """The permutation induced by ``x`` on the cosets."""
        return Permutation([self.point_of(r * x) for r in self.point_to_coset])


def _coset_key(Hchain, g, orbit_arrays):
    """Canonical element of the right coset H*g (minimal base images)."""
    c = g
    for lev, orb in zip(Hchain.levels, orbit_arrays):
        if len(orb) == 1:
            continue
        delta = int(orb[int(np.argmin(c[orb]))])
        c = c[lev.trans[delta]]
    return c


def coset_action(G, H, index_budget=DEFAULT_INDEX_BUDGET, seed=0):
    """Action of ``G`` by right multiplication on the right cosets of ``H``.

    Point 0 is the coset ``H`` itself.
    """
    if H.degree != G.degree:
        raise InputError("subgroup and group have different degrees")
    if not is_subgroup(G, H):
        raise InputError(f"{H.name or 'H'} is not a subgroup of {G.name or 'G'}")
    if G.order % H.order:
        raise InputError("|H| does not divide |G|")
    index = G.order // H.order
    if index > index_budget:
        raise ResourceError(f"index {index} exceeds the coset budget {index_budget}")
    orbit_arrays = [np.array(lev.orbit, dtype=DTYPE) for lev in H.chain.levels]
    ident = np.arange(G.degree, dtype=DTYPE)
    reps = [ident]
    lookup = {_coset_key(H.chain, ident, orbit_arrays).tobytes(): 0}
    gens = [s.images for s in G.generators]
    images = [np.empty(index, dtype=DTYPE) for _ in gens]
    i = 0
    while i < len(reps):
        g = reps[i]
        for s, img in zip(gens, images):
            gs = s[g]
            k = _coset_key(H.chain, gs, orbit_arrays).tobytes()
            j = lookup.get(k)
            if j is None:
                j = len(reps)
                lookup[k] = j
                reps.append(gs)
            img[i] = j
        i += 1
    if len(reps) != index:
        raise InputError(f"found {len(reps)} cosets, expected {index}")
    perms = [Permutation(img) for img in images]
    Q = GroupHandle.from_generators(perms, degree=index,
                                    name=f"{G.name}/{H.name}" if G.name else "", seed=seed)
    return CosetActionResult(Q, index, [Permutation(r, check=False) for r in reps],
                             Q.order == G.order, perms, H, lookup)


def check_group_invariants(G):
    """Raise if a handle violates its structural invariants."""
    for g in G.generators:
        if g.degree != G.degree:
            raise InputError("generator degree mismatch")
        if not G.chain.contains(g):
            raise InputError("generator fails membership in its own chain")
    if factorial(G.degree) % G.order:
        raise InputError("group order does not divide degree!")


# --- text file format ------------------------------------------------------

def parse_group_text(text, source="<string>"):
    degree = name = None
    gens = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("degree:"):
            try:
                degree = int(line.split(":", 1)[1])
            except ValueError:
                raise InputError(f"{source}:{lineno}: bad degree line") from None
            continue
        if line.startswith("name:"):
            name = line.split(":", 1)[1].strip()
            continue
        if degree is None:
            raise InputError(f"{source}:{lineno}: generator before 'degree:' header")
        try:
            row = [int(t) for t in line.split()]
        except ValueError:
            raise InputError(f"{source}:{lineno}: non-integer token") from None
        if len(row) != degree:
            raise InputError(f"{source}:{lineno}: expected {degree} images, got {len(row)}")
        try:
            gens.append(Permutation(row))
        except InputError as e:
            raise InputError(f"{source}:{lineno}: {e}") from None
    if degree is None:
        raise InputError(f"{source}: missing 'degree:' header")
    return degree, name or "", gens


def format_group_text(degree, name, generators):
    lines = [f"degree: {degree}", f"name: {name}"]
    lines += [" ".join(map(str, g.images.tolist())) for g in generators]
    return "\n".join(lines) + "\n"


def load_group(path, seed=0, order=None):
    path = Path(path)
    degree, name, gens = parse_group_text(path.read_text(), str(path))
    return GroupHandle.from_generators(gens, degree=degree, name=name or path.stem,
                                       seed=seed, order=order)


def save_group(G, path):
    Path(path).write_text(format_group_text(G.degree, G.name, G.generators))
