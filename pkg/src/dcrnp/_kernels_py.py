"""Pure-Python fallback for the compiled graph kernels.

Mirrors ``_kernels`` exactly: same signatures, same arithmetic, bit-identical
output arrays.  Used when the extension is absent or DCRNP_PURE is set.
"""
from __future__ import annotations

from collections import deque

import numpy as np

BACKEND = "python"
INF = 1 << 20

SINK = 0
SENSOR = 1
CANDIDATE = 2


def build_adjacency(coords, kinds, r, big_r):
    """CSR adjacency (indptr, indices) for points under the two-radius rule."""
    xy = np.ascontiguousarray(coords, dtype=np.float64)
    kd = np.ascontiguousarray(kinds, dtype=np.int8)
    n = xy.shape[0]
    diff = xy[:, None, :] - xy[None, :, :]
    d2 = (diff * diff).sum(axis=-1)
    sensor = kd == SENSOR
    lim = np.where(sensor[:, None] | sensor[None, :], r * r, big_r * big_r)
    adj = d2 <= lim
    np.fill_diagonal(adj, False)
    indptr = np.zeros(n + 1, dtype=np.int32)
    np.cumsum(adj.sum(axis=1), out=indptr[1:])
    indices = np.nonzero(adj)[1].astype(np.int32)
    return indptr, indices


def bfs(indptr, indices, source, allowed):
    """Hop counts and canonical parents from ``source`` over allowed nodes."""
    n = len(indptr) - 1
    ip = indptr.tolist() if hasattr(indptr, "tolist") else list(indptr)
    idx = indices.tolist() if hasattr(indices, "tolist") else list(indices)
    ok = allowed.tolist() if hasattr(allowed, "tolist") else list(allowed)
    if source < 0 or source >= n or not ok[source]:
        raise ValueError("source %d is not an allowed node" % source)

    dist = [INF] * n
    parent = [-1] * n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for e in range(ip[u], ip[u + 1]):
            v = idx[e]
            if ok[v] and dist[v] == INF:
                dist[v] = du
                queue.append(v)
    # canonical parent: first (lowest-id) neighbor one layer up
    for w in range(n):
        dw = dist[w]
        if dw != 0 and dw != INF:
            for e in range(ip[w], ip[w + 1]):
                v = idx[e]
                if ok[v] and dist[v] == dw - 1:
                    parent[w] = v
                    break
    return np.asarray(dist, dtype=np.int32), np.asarray(parent, dtype=np.int32)
