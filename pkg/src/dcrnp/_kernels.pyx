"""Compiled graph kernels: disk-rule adjacency and hop-count BFS."""

import numpy as np

BACKEND = "cython"
INF = 1 << 20

SINK = 0
SENSOR = 1
CANDIDATE = 2

cdef int C_INF = 1 << 20
cdef signed char C_SENSOR = 1


def build_adjacency(coords, kinds, double r, double big_r):
    """CSR adjacency (indptr, indices) for points under the two-radius rule.

    A pair is linked when its Euclidean distance is at most r if either
    endpoint is a sensor, at most big_r otherwise.  Comparisons are exact
    (squared distances against squared radii, no epsilon).  Neighbor lists
    come out sorted ascending by node id.
    """
    coords = np.ascontiguousarray(coords, dtype=np.float64)
    kinds = np.ascontiguousarray(kinds, dtype=np.int8)
    cdef double[:, ::1] xy = coords
    cdef signed char[::1] kd = kinds
    cdef Py_ssize_t n = xy.shape[0]
    cdef double rr = r * r
    cdef double bb = big_r * big_r

    deg = np.zeros(n, dtype=np.int32)
    cdef int[::1] dg = deg
    cdef Py_ssize_t i, j
    cdef double dx, dy, d2, lim
    for i in range(n):
        for j in range(i + 1, n):
            dx = xy[i, 0] - xy[j, 0]
            dy = xy[i, 1] - xy[j, 1]
            d2 = dx * dx + dy * dy
            lim = rr if (kd[i] == C_SENSOR or kd[j] == C_SENSOR) else bb
            if d2 <= lim:
                dg[i] += 1
                dg[j] += 1

    indptr = np.zeros(n + 1, dtype=np.int32)
    np.cumsum(deg, out=indptr[1:])
    indices = np.empty(int(indptr[n]), dtype=np.int32)
    cursor = indptr[:n].copy()
    cdef int[::1] ip = indptr
    cdef int[::1] idx = indices
    cdef int[::1] cur = cursor
    for i in range(n):
        for j in range(i + 1, n):
            dx = xy[i, 0] - xy[j, 0]
            dy = xy[i, 1] - xy[j, 1]
            d2 = dx * dx + dy * dy
            lim = rr if (kd[i] == C_SENSOR or kd[j] == C_SENSOR) else bb
            if d2 <= lim:
                idx[cur[i]] = <int> j
                cur[i] += 1
                idx[cur[j]] = <int> i
                cur[j] += 1
    return indptr, indices


def bfs(indptr, indices, int source, allowed):
    """Hop counts and canonical parents from ``source`` over allowed nodes.

    Returns (dist, parent) int32 arrays.  Unreached or disallowed nodes get
    dist INF and parent -1.  The parent of a reached node is its lowest-id
    neighbor one layer closer to the source.
    """
    indptr = np.ascontiguousarray(indptr, dtype=np.int32)
    indices = np.ascontiguousarray(indices, dtype=np.int32)
    allowed = np.ascontiguousarray(allowed, dtype=np.uint8)
    cdef int[::1] ip = indptr
    cdef int[::1] idx = indices
    cdef unsigned char[::1] ok = allowed
    cdef Py_ssize_t n = ip.shape[0] - 1
    if source < 0 or source >= n or not ok[source]:
        raise ValueError("source %d is not an allowed node" % source)

    dist_arr = np.full(n, C_INF, dtype=np.int32)
    parent_arr = np.full(n, -1, dtype=np.int32)
    queue_arr = np.empty(n, dtype=np.int32)
    cdef int[::1] dist = dist_arr
    cdef int[::1] par = parent_arr
    cdef int[::1] q = queue_arr
    cdef Py_ssize_t head = 0, tail = 0
    cdef int u, v, du
    cdef Py_ssize_t e, w

    dist[source] = 0
    q[tail] = source
    tail += 1
    while head < tail:
        u = q[head]
        head += 1
        du = dist[u] + 1
        for e in range(ip[u], ip[u + 1]):
            v = idx[e]
            if ok[v] and dist[v] == C_INF:
                dist[v] = du
                q[tail] = v
                tail += 1
    # canonical parent: first (lowest-id) neighbor one layer up
    for w in range(n):
        if dist[w] != 0 and dist[w] != C_INF:
            for e in range(ip[w], ip[w + 1]):
                v = idx[e]
                if ok[v] and dist[v] == dist[w] - 1:
                    par[w] = v
                    break
    return dist_arr, parent_arr
