"""Graph automorphisms by individualization and colour refinement.

Only used to manufacture one extra generator when a classical group is known
to be the automorphism group of a strongly regular graph (HS, McL) and a
large subgroup is already in hand.
"""
from __future__ import annotations

import numpy as np


def _refine(adj, colours):
    """Jointly refine the colourings of several copies of one graph.

    Returns the refined colourings, or None when cell sizes stop matching
    (no isomorphism extends the current individualization).
    """
    n = adj.shape[0]
    k = max(int(c.max()) for c in colours) + 1
    while True:
        rows = []
        for c in colours:
            onehot = np.zeros((n, k), dtype=np.int64)
            onehot[np.arange(n), c] = 1
            rows.append(np.column_stack([c, adj @ onehot]))
        uniq, inv = np.unique(np.vstack(rows), axis=0, return_inverse=True)
        inv = inv.ravel()
        new = [inv[i * n:(i + 1) * n] for i in range(len(colours))]
        counts = [np.bincount(c, minlength=len(uniq)) for c in new]
        if any(not np.array_equal(counts[0], cnt) for cnt in counts[1:]):
            return None
        if len(uniq) == k:
            return new
        colours, k = new, len(uniq)


def find_automorphism(adj, source, target):
    """An automorphism of the graph with adjacency ``adj`` mapping the vertex
    sequence ``source`` onto ``target``, or None."""
    adj = np.asarray(adj, dtype=np.int64)
    n = adj.shape[0]
    ca = np.zeros(n, dtype=np.int64)
    cb = np.zeros(n, dtype=np.int64)
    for i, (v, w) in enumerate(zip(source, target), start=1):
        ca[v] = i
        cb[w] = i
    return _search(adj, ca, cb)


def _search(adj, ca, cb):
    refined = _refine(adj, [ca, cb])
    if refined is None:
        return None
    ca, cb = refined
    n = len(ca)
    sizes = np.bincount(ca)
    if sizes.max() == 1:
        m = np.empty(n, dtype=np.int64)
        m[np.argsort(ca)] = np.argsort(cb)
        if np.array_equal(adj[np.ix_(m, m)], adj):
            return m
        return None
    cell = int(np.argmin(np.where(sizes > 1, sizes, n + 1)))
    v = int(np.flatnonzero(ca == cell)[0])
    k = int(ca.max()) + 1
    for w in np.flatnonzero(cb == cell):
        ca2, cb2 = ca.copy(), cb.copy()
        ca2[v] = k
        cb2[int(w)] = k
        m = _search(adj, ca2, cb2)
        if m is not None:
            return m
    return None
