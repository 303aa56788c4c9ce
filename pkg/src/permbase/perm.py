"""Permutations of {0, ..., n-1}.

Products are read left to right: ``p * q`` applies ``p`` first, then ``q``.
Images are stored as an immutable numpy array, so ``p.images[i]`` is the
image of point ``i``.
"""
from __future__ import annotations

from math import gcd

import numpy as np

from .errors import InputError

DTYPE = np.intp


def _frozen(arr):
    arr = np.ascontiguousarray(arr, dtype=DTYPE)
    arr.flags.writeable = False
    return arr


def inverse_array(a):
    inv = np.empty_like(a)
    inv[a] = np.arange(len(a), dtype=a.dtype)
    return inv


class Permutation:
    __slots__ = ("images", "_key")

    def __init__(self, images, check=True):
        arr = np.asarray(images, dtype=DTYPE)
        if arr.ndim != 1:
            raise InputError("permutation images must be one-dimensional")
        if check:
            n = len(arr)
            if n and (arr.min() < 0 or arr.max() >= n
                      or np.unique(arr).size != n):
                raise InputError(f"not a bijection on 0..{n - 1}: {arr.tolist()}")
        self.images = _frozen(arr)
        self._key = None

    @classmethod
    def identity(cls, degree):
        return cls(np.arange(degree, dtype=DTYPE), check=False)

    @classmethod
    def from_cycles(cls, degree, cycles):
        img = np.arange(degree, dtype=DTYPE)
        for cyc in cycles:
            cyc = list(cyc)
            if len(set(cyc)) != len(cyc):
                raise InputError(f"repeated point in cycle {cyc}")
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                if not 0 <= a < degree:
                    raise InputError(f"point {a} out of range for degree {degree}")
                img[a] = b
        return cls(img)

    @property
    def degree(self):
        return len(self.images)

    def key(self):
        if self._key is None:
            self._key = self.images.tobytes()
        return self._key

    def __hash__(self):
        return hash(self.key())

    def __eq__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.degree == other.degree and self.key() == other.key()

    def __mul__(self, other):
        if not isinstance(other, Permutation):
            return NotImplemented
        if other.degree != self.degree:
            raise InputError("degree mismatch in product")
        return Permutation(other.images[self.images], check=False)

    def __call__(self, point):
        return int(self.images[point])

    def inverse(self):
        return Permutation(inverse_array(self.images), check=False)

    def __invert__(self):
        return self.inverse()

    def __pow__(self, k):
        k = int(k)
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = np.arange(self.degree, dtype=DTYPE)
        cur = base.images
        while k:
            if k & 1:
                result = cur[result]
            cur = cur[cur]
            k >>= 1
        return Permutation(result, check=False)

    def conjugate(self, g):
        """``g^-1 * self * g``; maps the cycle (a b ..) to (a^g b^g ..)."""
        return g.inverse() * self * g

    def is_identity(self):
        return bool(np.array_equal(self.images, np.arange(self.degree)))

    def cycles(self, include_fixed=False):
        seen = np.zeros(self.degree, dtype=bool)
        out = []
        img = self.images
        for start in range(self.degree):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            j = int(img[start])
            while j != start:
                cyc.append(j)
                seen[j] = True
                j = int(img[j])
            if len(cyc) > 1 or include_fixed:
                out.append(tuple(cyc))
        return out

    def cycle_type(self):
        """Sorted tuple of all cycle lengths, fixed points included."""
        return tuple(sorted(len(c) for c in self.cycles(include_fixed=True)))

    def order(self):
        o = 1
        for c in self.cycles():
            o = o * len(c) // gcd(o, len(c))
        return o

    def fixed_points(self):
        return np.flatnonzero(self.images == np.arange(self.degree)).tolist()

    def num_fixed(self):
        return int(np.count_nonzero(self.images == np.arange(self.degree)))

    def is_even(self):
        return sum(len(c) - 1 for c in self.cycles()) % 2 == 0

    def __repr__(self):
        cyc = self.cycles()
        if not cyc:
            return f"Permutation(degree={self.degree}, ())"
        body = "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)
        return f"Permutation(degree={self.degree}, {body})"

    def __lt__(self, other):
        return self.images.tolist() < other.images.tolist()
