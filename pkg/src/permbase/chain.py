"""Stabilizer chains built by Schreier-Sims.

Construction is randomized (random elements are sifted and residues added as
new strong generators) and is then certified in one of two ways:

* when the true order is known in advance, reaching it certifies the chain,
  because a partial chain can never overshoot ``|G|``;
* otherwise every Schreier generator of every level is sifted (bottom-up
  deterministic check), which proves the chain complete.

Everything in here works on raw ``numpy`` image arrays; the public
:class:`~permbase.perm.Permutation` wrapper is only used at the boundary.
"""
from __future__ import annotations

import random

import numpy as np

from .errors import InputError, InternalError
from .perm import DTYPE, Permutation, inverse_array


class Level:
    """One level of the chain: a base point, the strong generators fixing all
    earlier base points, and an explicit transversal of the basic orbit."""

    __slots__ = ("point", "gens", "trans", "inv", "orbit")

    def __init__(self, point, degree):
        self.point = point
        self.gens = []
        ident = np.arange(degree, dtype=DTYPE)
        self.trans = {point: ident}
        self.inv = {point: ident}
        self.orbit = [point]

    def add_generator(self, h):
        self.gens.append(h)
        trans, inv = self.trans, self.inv
        new = []
        for p in self.orbit:
            q = int(h[p])
            if q not in trans:
                u = h[trans[p]]
                trans[q] = u
                inv[q] = inverse_array(u)
                new.append(q)
        i = 0
        while i < len(new):
            p = new[i]
            i += 1
            up = trans[p]
            for s in self.gens:
                q = int(s[p])
                if q not in trans:
                    u = s[up]
                    trans[q] = u
                    inv[q] = inverse_array(u)
                    new.append(q)
        self.orbit.extend(new)


def _first_moved(h):
    moved = np.flatnonzero(h != np.arange(len(h)))
    return int(moved[0]) if moved.size else None


class StabilizerChain:
    """A base and strong generating set with explicit transversals.

    Immutable once returned by :func:`schreier_sims`; concurrent read-only
    queries are safe.
    """

    def __init__(self, degree, levels, certified_by):
        self.degree = degree
        self.levels = levels
        self.certified_by = certified_by
        self._ident = np.arange(degree, dtype=DTYPE)

    @property
    def base(self):
        return [lev.point for lev in self.levels]

    @property
    def orbit_lengths(self):
        return [len(lev.orbit) for lev in self.levels]

    @property
    def order(self):
        o = 1
        for lev in self.levels:
            o *= len(lev.orbit)
        return o

    def tail(self, m):
        """Chain of the pointwise stabilizer of the first ``m`` base points."""
        return StabilizerChain(self.degree, self.levels[m:], self.certified_by)

    def strong_generators(self):
        seen, out = set(), []
        for lev in self.levels:
            for g in lev.gens:
                k = g.tobytes()
                if k not in seen:
                    seen.add(k)
                    out.append(g)
        return out

    def generator_perms(self):
        return [Permutation(g, check=False) for g in self.strong_generators()]

    def sift_array(self, g, start=0):
        levels = self.levels
        for i in range(start, len(levels)):
            lev = levels[i]
            inv = lev.inv.get(int(g[lev.point]))
            if inv is None:
                return g, i
            g = inv[g]
        return g, len(levels)

    def contains_array(self, g):
        res, _ = self.sift_array(g)
        return bool(np.array_equal(res, self._ident))

    def contains(self, p):
        if p.degree != self.degree:
            raise InputError(f"degree {p.degree} does not match chain degree {self.degree}")
        return self.contains_array(p.images)

    def random_array(self, rng):
        g = self._ident
        for lev in reversed(self.levels):
            u = lev.trans[lev.orbit[rng.randrange(len(lev.orbit))]]
            g = u[g]
        return g

    def random_element(self, rng):
        return Permutation(self.random_array(rng), check=False)

    def element_from_images(self, images):
        """Unique element mapping base point i to ``images[i]``, or None."""
        g = self._ident
        for lev, target in zip(self.levels, images):
            pre = inverse_array(g)[target]
            u = lev.trans.get(int(pre))
            if u is None:
                return None
            g = g[u]
        return g

    def elements(self):
        """All elements as an array of shape (order, degree); small groups only."""
        out = self._ident[None, :]
        for lev in reversed(self.levels):
            us = np.stack([lev.trans[p] for p in lev.orbit])
            # every g in out, then each transversal element u
            out = us[:, out].transpose(1, 0, 2).reshape(-1, self.degree)
        return out


class _ProductReplacement:
    def __init__(self, gens, degree, rng):
        self.rng = rng
        ident = np.arange(degree, dtype=DTYPE)
        slots = list(gens) or [ident]
        while len(slots) < 10:
            slots = slots + slots
        self.slots = [s.copy() for s in slots[:max(10, len(gens))]]
        self.acc = ident
        for _ in range(50):
            self()

    def __call__(self):
        rng, slots = self.rng, self.slots
        i = rng.randrange(len(slots))
        j = rng.randrange(len(slots) - 1)
        if j >= i:
            j += 1
        sj = slots[j] if rng.random() < 0.5 else inverse_array(slots[j])
        if rng.random() < 0.5:
            slots[i] = sj[slots[i]]
        else:
            slots[i] = slots[i][sj]
        self.acc = slots[i][self.acc]
        return self.acc


def _sift(levels, g, start=0):
    for i in range(start, len(levels)):
        lev = levels[i]
        inv = lev.inv.get(int(g[lev.point]))
        if inv is None:
            return g, i
        g = inv[g]
    return g, len(levels)


def _add_residue(levels, h, j, degree):
    if j == len(levels):
        pt = _first_moved(h)
        if pt is None:
            raise InternalError("tried to add the identity as a strong generator")
        levels.append(Level(pt, degree))
    for i in range(j + 1):
        levels[i].add_generator(h)


def _order(levels):
    o = 1
    for lev in levels:
        o *= len(lev.orbit)
    return o


def _deterministic_check(levels, degree):
    ident = np.arange(degree, dtype=DTYPE)
    i = len(levels) - 1
    while i >= 0:
        lev = levels[i]
        restart = None
        for p in list(lev.orbit):
            up = lev.trans[p]
            for s in list(lev.gens):
                q = int(s[p])
                sg = lev.inv[q][s[up]]
                if np.array_equal(sg, ident):
                    continue
                res, j = _sift(levels, sg, i + 1)
                if not np.array_equal(res, ident):
                    _add_residue(levels, res, j, degree)
                    restart = j
                    break
            if restart is not None:
                break
        if restart is None:
            i -= 1
        else:
            i = min(restart, len(levels) - 1)


def schreier_sims(gens, degree, seed=0, base_prefix=(), known_order=None,
                  sampler=None, rng=None):
    """Build a certified stabilizer chain.

    ``gens`` are image arrays.  ``base_prefix`` fixes the first base points
    (repeats are dropped).  With ``known_order`` and a uniform ``sampler``
    (callable taking an rng) the randomized phase alone is certified.
    """
    gens = [np.asarray(g, dtype=DTYPE) for g in gens]
    for g in gens:
        if len(g) != degree:
            raise InputError(f"generator of degree {len(g)} given for degree {degree}")
    rng = rng or random.Random(seed)
    ident = np.arange(degree, dtype=DTYPE)
    levels = []
    for pt in dict.fromkeys(int(p) for p in base_prefix):
        if not 0 <= pt < degree:
            raise InputError(f"base point {pt} out of range for degree {degree}")
        levels.append(Level(pt, degree))

    def feed(g):
        res, j = _sift(levels, g)
        if np.array_equal(res, ident):
            return False
        _add_residue(levels, res, j, degree)
        return True

    if known_order is not None and sampler is not None:
        misses = 0
        while _order(levels) < known_order:
            if not feed(sampler(rng)):
                misses += 1
                if misses > 200:
                    break
        if _order(levels) == known_order:
            return StabilizerChain(degree, levels, "known-order")
        if _order(levels) > known_order:
            raise InternalError("chain order exceeds the stated group order")

    for g in gens:
        feed(g)
    if known_order is not None and _order(levels) == known_order:
        return StabilizerChain(degree, levels, "known-order")
    if gens:
        pr = _ProductReplacement(gens, degree, rng)
        streak = 0
        while streak < 25:
            if known_order is not None and _order(levels) == known_order:
                return StabilizerChain(degree, levels, "known-order")
            streak = 0 if feed(pr()) else streak + 1
    _deterministic_check(levels, degree)
    if known_order is not None and _order(levels) != known_order:
        raise InternalError(f"group order {_order(levels)} differs from stated {known_order}")
    return StabilizerChain(degree, levels, "schreier-generators")


def build_chain(generators, seed=0, degree=None):
    """Chain for the group generated by ``Permutation`` objects."""
    if degree is None:
        if not generators:
            raise InputError("degree required for an empty generating set")
        degree = generators[0].degree
    if degree < 1:
        raise InputError("degree must be positive")
    for g in generators:
        if g.degree != degree:
            raise InputError(f"generator degrees differ ({g.degree} vs {degree})")
    return schreier_sims([g.images for g in generators], degree, seed=seed)


def rebase(chain, prefix, seed=0, rng=None):
    """Chain of the same group whose base starts with ``prefix``."""
    return schreier_sims(chain.strong_generators(), chain.degree,
                         base_prefix=prefix, known_order=chain.order,
                         sampler=chain.random_array, rng=rng or random.Random(seed))
