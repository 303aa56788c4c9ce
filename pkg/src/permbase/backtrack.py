"""Backtrack searches through a stabilizer chain: conjugating elements and
centralizers.

An element ``g`` with ``x^g = y`` (that is ``g^-1 x g = y``) satisfies
``(p^x)^g = (p^g)^y`` for every point ``p``, so once the image of one point of
an ``x``-cycle is chosen the images of the whole cycle are forced.  The chain
is rebased so that whole ``x``-cycles appear consecutively in the base; most
levels then have a single candidate and the branching happens only where a
new cycle starts.
"""
from __future__ import annotations

import random

import numpy as np

from .chain import rebase, schreier_sims
from .errors import InputError
from .group import GroupHandle
from .perm import DTYPE, Permutation


def _cycle_lengths(a):
    n = len(a)
    out = np.zeros(n, dtype=np.int64)
    for s in range(n):
        if out[s]:
            continue
        cyc = [s]
        j = int(a[s])
        while j != s:
            cyc.append(j)
            j = int(a[j])
        out[cyc] = len(cyc)
    return out


def adapted_prefix(base, x):
    """Base points followed by the rest of their ``x``-cycles, cycle by cycle."""
    prefix, seen = [], set()
    for b in base:
        if b in seen:
            continue
        p = b
        while p not in seen:
            seen.add(p)
            prefix.append(p)
            p = int(x[p])
    return prefix


class _Search:
    """Depth-first search for g in the chain with x^g = y."""

    def __init__(self, levels, x, y):
        self.levels = levels
        self.x = x
        self.y = y
        self.xlen = _cycle_lengths(x)
        self.ylen = _cycle_lengths(y)
        n = len(x)
        self.img = np.full(n, -1, dtype=np.int64)
        self.used = np.zeros(n, dtype=bool)
        self.nodes = 0

    def fix_cycles_of(self, points):
        x = self.x
        for b in points:
            p = b
            while self.img[p] < 0:
                self.img[p] = p
                self.used[p] = True
                p = int(x[p])

    def _assign(self, b, gamma):
        x, y, img, used = self.x, self.y, self.img, self.used
        done = []
        p, q = b, gamma
        for _ in range(int(self.xlen[b])):
            img[p] = q
            used[q] = True
            done.append((p, q))
            p, q = int(x[p]), int(y[q])
        return done

    def _undo(self, done):
        for p, q in done:
            self.img[p] = -1
            self.used[q] = False

    def run(self, start, P, invP, top_candidates=None):
        """Return the first solution found below level ``start``, or None."""
        self.nodes += 1
        levels = self.levels
        if start == len(levels):
            if np.array_equal(P[self.x], self.y[P]):
                return P
            return None
        lev = levels[start]
        b = lev.point
        forced = int(self.img[b])
        if forced >= 0:
            d = int(invP[forced])
            if d not in lev.trans:
                return None
            return self.run(start + 1, P[lev.trans[d]], lev.inv[d][invP])
        L = self.xlen[b]
        if top_candidates is not None:
            cands = top_candidates
        else:
            cands = lev.orbit
        ylen, used = self.ylen, self.used
        for d in cands:
            gamma = int(P[d])
            if ylen[gamma] != L or used[gamma]:
                continue
            done = self._assign(b, gamma)
            res = self.run(start + 1, P[lev.trans[d]], lev.inv[d][invP])
            self._undo(done)
            if res is not None:
                return res
        return None


def _orbit(point, gens):
    orb = [point]
    seen = {point}
    i = 0
    while i < len(orb):
        p = orb[i]
        i += 1
        for g in gens:
            q = int(g[p])
            if q not in seen:
                seen.add(q)
                orb.append(q)
    return orb


def _orbit_reps(points, gens):
    reps, seen = [], set()
    for p in points:
        if p in seen:
            continue
        reps.append(p)
        seen.update(_orbit(p, gens))
    return reps


def conjugating_element(G, x, y, centralizer_y=None, seed=0):
    """An element g of G with g^-1 x g = y, or None.

    ``centralizer_y`` (a GroupHandle for C_G(y)) is optional; when given only
    one top-level image per C_G(y)-orbit is tried.
    """
    if x.degree != G.degree or y.degree != G.degree:
        raise InputError("degree mismatch")
    if x.cycle_type() != y.cycle_type():
        return None
    xa, ya = x.images, y.images
    chain = rebase(G.chain, adapted_prefix(G.chain.base, xa), seed=seed)
    levels = chain.levels
    if not levels:
        return Permutation(xa, check=False) if np.array_equal(xa, ya) else None
    search = _Search(levels, xa, ya)
    ident = np.arange(G.degree, dtype=DTYPE)
    top = levels[0].orbit
    if centralizer_y is not None:
        top = _orbit_reps(top, [g.images for g in centralizer_y.generators])
    res = search.run(0, ident, ident, top_candidates=top)
    return None if res is None else Permutation(res, check=False)


def are_conjugate(G, x, y, centralizer_y=None, seed=0):
    return conjugating_element(G, x, y, centralizer_y, seed) is not None


def centralizer(G, x, seed=0):
    """C_G(x) with exact order, by level-by-level subgroup search."""
    if x.degree != G.degree:
        raise InputError("degree mismatch")
    if not G.chain.contains(x):
        raise InputError("element is not in the group")
    xa = x.images
    chain = rebase(G.chain, adapted_prefix(G.chain.base, xa), seed=seed)
    levels = chain.levels
    n = G.degree
    ident = np.arange(n, dtype=DTYPE)
    found = []
    order = 1
    xlen = _cycle_lengths(xa)
    for i in reversed(range(len(levels))):
        lev = levels[i]
        b = lev.point
        reached = set(_orbit(b, found))
        excluded = set()
        for d in lev.orbit:
            if d in reached or d in excluded:
                continue
            if xlen[d] != xlen[b]:
                excluded.add(d)
                continue
            search = _Search(levels, xa, xa)
            search.fix_cycles_of([levels[j].point for j in range(i)])
            res = search.run(i, ident, ident, top_candidates=[d])
            if res is None:
                excluded.update(_orbit(d, found))
            else:
                found.append(res)
                reached = set(_orbit(b, found))
                grown = set()
                for e in excluded:
                    grown.update(_orbit(e, found))
                excluded = grown
        order *= len(reached)
    gens = [Permutation(g, check=False) for g in found]
    if order == 1:
        ch = schreier_sims([], n)
    else:
        ch = schreier_sims(found, n, known_order=order, rng=random.Random(seed))
    return GroupHandle(n, gens, ch, f"C({G.name})" if G.name else "")
