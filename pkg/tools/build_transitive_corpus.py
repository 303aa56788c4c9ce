"""Generate the shipped list of transitive groups of degree at most 8.

Groups are found by descending through random subgroups: starting from S_n,
subgroups generated by random powers of one to three random elements of an
already found group are kept when transitive.  Index-2 subgroups of every
found group are then added until nothing new appears, which reaches the
2-groups that random generation tends to miss.  Duplicates up to conjugacy in
S_n are removed with an exact test over all of S_n.  The run stops once the
known number of classes for each degree is reached.

    python3 tools/build_transitive_corpus.py  # writes src/permbase/data/transitive_le8.txt
"""
import itertools
import random
import sys
from pathlib import Path

import numpy as np

from permbase import library
from permbase.group import GroupHandle
from permbase.perm import Permutation

EXPECTED = {1: 1, 2: 1, 3: 2, 4: 5, 5: 5, 6: 16, 7: 7, 8: 50}
OUT = Path(__file__).resolve().parents[1] / "src/permbase/data/transitive_le8.txt"


def encode(arr, n):
    return (arr * (n ** np.arange(n))).sum(axis=-1)


def invariant(G):
    """Order and the multiset of cycle types (as sorted point-cycle lengths)."""
    E = G.chain.elements()
    m, n = E.shape
    rows = np.arange(m)[:, None]
    lengths = np.zeros((m, n), dtype=np.int64)
    cur = E.copy()
    ident = np.arange(n)
    for k in range(1, n + 1):
        hit = (cur == ident) & (lengths == 0)
        lengths[hit] = k
        cur = E[rows, cur]
    types, counts = np.unique(np.sort(lengths, axis=1), axis=0, return_counts=True)
    return (G.order, tuple(map(tuple, types.tolist())), tuple(counts.tolist()))


def conjugate_in_sn(G, H, Sn, n):
    """Is there g in S_n with g^-1 G g = H?"""
    hkeys = np.sort(encode(H.chain.elements(), n))
    ok = np.ones(len(Sn), dtype=bool)
    ginv = np.argsort(Sn, axis=1)
    rows = np.arange(len(Sn))[:, None]
    for s in G.generators:
        # images of g^-1 s g: apply g^-1, then s, then g
        c = Sn[rows, s.images[ginv]]
        k = encode(c, n)
        pos = np.clip(np.searchsorted(hkeys, k), 0, len(hkeys) - 1)
        ok &= hkeys[pos] == k
        if not ok.any():
            return False
    return bool(ok.any())


def index_two_subgroups(G, rng):
    """All subgroups of index 2, as kernels of maps G -> G/<squares>."""
    n = G.degree
    E = G.chain.elements()
    rows = np.arange(len(E))[:, None]
    sq = np.unique(E[rows, E], axis=0)
    S = GroupHandle.from_generators([Permutation(r) for r in sq], degree=n)
    span = S.chain.elements()
    mask = {int(k): 0 for k in encode(span, n)}
    bits = 0
    for g in E:
        if int(encode(g, n)) in mask:
            continue
        prod = g[span]
        new = {int(k): mask[int(k0)] | (1 << bits)
               for k, k0 in zip(encode(prod, n), encode(span, n))}
        mask.update(new)
        span = np.vstack([span, prod])
        bits += 1
    coords = np.array([mask[int(k)] for k in encode(E, n)])
    out = []
    for f in range(1, 1 << bits):
        par = np.array([bin(c & f).count("1") % 2 for c in coords])
        inside = E[par == 0]
        gens = []
        H = GroupHandle.from_generators([], degree=n)
        while H.order * 2 < G.order:
            x = Permutation(inside[rng.randrange(len(inside))])
            if not H.contains(x):
                gens.append(x)
                H = GroupHandle.from_generators(gens, degree=n)
        out.append(H)
    return out


def find(n, rng, max_rounds=200000):
    Sn = np.array(list(itertools.permutations(range(n))), dtype=np.intp)
    top = library.symmetric(n) if n > 1 else GroupHandle.from_generators([], degree=1)
    found = {invariant(top): [top]}
    queue = [top]
    total = 1
    rounds = 0
    def admit(H):
        key = invariant(H)
        bucket = found.setdefault(key, [])
        if any(K.order == H.order and conjugate_in_sn(H, K, Sn, n) for K in bucket):
            return False
        bucket.append(H)
        queue.append(H)
        return True

    while total < EXPECTED[n] and rounds < max_rounds:
        rounds += 1
        if rounds % 5000 == 0:
            print(f"  degree {n}: {total} classes after {rounds} samples", file=sys.stderr)
        G = rng.choice(queue)
        k = rng.randint(1, 3)
        gens = []
        for _ in range(k):
            x = G.random_element(rng)
            o = x.order()
            divs = [d for d in range(1, o + 1) if o % d == 0]
            gens.append(x ** rng.choice(divs))
        gens = [g for g in gens if not g.is_identity()]
        if not gens:
            continue
        H = GroupHandle.from_generators(gens, degree=n)
        if not H.is_transitive():
            continue
        total += admit(H)
        if rounds % 2000 == 0 and total < EXPECTED[n]:
            done = 0
            while done < len(queue) and total < EXPECTED[n]:
                for H in index_two_subgroups(queue[done], rng):
                    if H.is_transitive():
                        total += admit(H)
                done += 1
    groups = [G for b in found.values() for G in b]
    groups.sort(key=lambda G: (G.order, invariant(G)))
    return groups, rounds


def main():
    rng = random.Random(20240917)
    lines = ["# transitive permutation groups of degree <= 8, one per S_n-conjugacy class",
             "# generated by tools/build_transitive_corpus.py; each block is a group file"]
    for n in range(1, 9):
        groups, rounds = find(n, rng)
        print(f"degree {n}: {len(groups)} classes after {rounds} samples", file=sys.stderr)
        if len(groups) != EXPECTED[n]:
            raise SystemExit(f"degree {n}: found {len(groups)}, expected {EXPECTED[n]}")
        for i, G in enumerate(groups, 1):
            gens = G.generators or [Permutation.identity(n)]
            lines.append("---")
            lines.append(f"degree: {n}")
            lines.append(f"name: T{n}_{i}")
            lines.append(f"# order {G.order}")
            lines += [" ".join(map(str, g.images.tolist())) for g in gens]
    OUT.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
