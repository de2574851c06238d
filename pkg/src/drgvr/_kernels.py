"""JIT-compiled inner loops.

Every kernel is valid pure Python/numpy; numba only makes it fast. If numba
is unavailable the same functions run interpreted (slow but identical).
Wrappers in the public modules normalize dtypes before calling in here so the
compiled signatures stay stable across calls.
"""

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


@njit(cache=True)
def replay_marks(xi, u):
    """Replay the birth/removal process.

    xi : uint8[n], 1 = birth at that step
    u  : float64[n], uniform used only at removal steps

    Returns (alive_unsorted, removal_target, counts, alive_before):
      alive_unsorted : labels alive after step n (swap-remove order)
      removal_target : int64[n], removed label per step, 0 = none
      counts         : int64[n+1], |V_t| for t = 0..n
      alive_before   : int64[n+1], alive_before[t] = |V_{t-1}| if a vertex
                       was born at step t, else 0
    """
    n = xi.shape[0]
    alive = np.empty(n, dtype=np.int64)
    removal = np.zeros(n, dtype=np.int64)
    counts = np.empty(n + 1, dtype=np.int64)
    counts[0] = 0
    alive_before = np.zeros(n + 1, dtype=np.int64)
    k = 0
    for t in range(1, n + 1):
        if xi[t - 1] == 1:
            alive_before[t] = k
            alive[k] = t
            k += 1
        elif k > 0:
            idx = int(u[t - 1] * k)
            if idx >= k:
                idx = k - 1
            removal[t - 1] = alive[idx]
            k -= 1
            alive[idx] = alive[k]
        counts[t] = k
    return alive[:k].copy(), removal, counts, alive_before


@njit(cache=True)
def pick_column_edges(counts, upool):
    """Sample, for each column j, counts[j] distinct earlier ranks < j.

    counts : int64[m], counts[j] <= j
    upool  : float64 pool of uniforms

    Returns (src, dst, status). status = -1 means the pool ran out and the
    caller must retry with a larger pool; otherwise it is the number of pool
    entries consumed. Columns with counts[j] == j take all earlier ranks;
    columns needing more than half use complement sampling; the rest use
    rejection with a linear duplicate scan (counts are O(beta) in practice).
    """
    m = counts.shape[0]
    total = 0
    for j in range(m):
        total += counts[j]
    src = np.empty(total, dtype=np.int64)
    dst = np.empty(total, dtype=np.int64)
    w = 0
    ptr = 0
    npool = upool.shape[0]
    for j in range(m):
        k = counts[j]
        if k == 0:
            continue
        if k >= j:
            for i in range(j):
                src[w] = j
                dst[w] = i
                w += 1
            continue
        if 2 * k >= j:
            mark = np.zeros(j, dtype=np.uint8)
            need = j - k
            got = 0
            while got < need:
                if ptr >= npool:
                    return src[:0], dst[:0], -1
                c = int(upool[ptr] * j)
                ptr += 1
                if c >= j:
                    c = j - 1
                if mark[c] == 0:
                    mark[c] = 1
                    got += 1
            for i in range(j):
                if mark[i] == 0:
                    src[w] = j
                    dst[w] = i
                    w += 1
        else:
            start = w
            got = 0
            while got < k:
                if ptr >= npool:
                    return src[:0], dst[:0], -1
                c = int(upool[ptr] * j)
                ptr += 1
                if c >= j:
                    c = j - 1
                dup = False
                for t in range(start, w):
                    if dst[t] == c:
                        dup = True
                        break
                if not dup:
                    src[w] = j
                    dst[w] = c
                    w += 1
                    got += 1
    return src[:w], dst[:w], ptr


@njit(cache=True)
def resample_half_edges(outdeg, upool, retry_cap):
    """Rewire each column's out-going half-edges to distinct earlier ranks.

    Per half-edge rejection sampling: resample until the endpoint is unused,
    giving a uniform distinct set. status = -1 pool exhausted (retry with a
    bigger pool), -2 a half-edge exceeded retry_cap (infeasible), else the
    number of pool entries consumed.
    """
    m = outdeg.shape[0]
    total = 0
    for j in range(m):
        total += outdeg[j]
    src = np.empty(total, dtype=np.int64)
    dst = np.empty(total, dtype=np.int64)
    w = 0
    ptr = 0
    npool = upool.shape[0]
    for j in range(m):
        k = outdeg[j]
        if k == 0:
            continue
        start = w
        got = 0
        while got < k:
            tries = 0
            while True:
                if ptr >= npool:
                    return src[:0], dst[:0], -1
                c = int(upool[ptr] * j)
                ptr += 1
                if c >= j:
                    c = j - 1
                dup = False
                for t in range(start, w):
                    if dst[t] == c:
                        dup = True
                        break
                if not dup:
                    break
                tries += 1
                if tries >= retry_cap:
                    return src[:0], dst[:0], -2
            src[w] = j
            dst[w] = c
            w += 1
            got += 1
    return src[:w], dst[:w], ptr


@njit(cache=True)
def bfs_distances(indptr, nbrs, source):
    """All-vertex BFS distances from source on a CSR graph; -1 = unreachable."""
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    dist[source] = 0
    queue[0] = source
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        d = dist[v] + 1
        for e in range(indptr[v], indptr[v + 1]):
            w = nbrs[e]
            if dist[w] < 0:
                dist[w] = d
                queue[tail] = w
                tail += 1
    return dist


@njit(cache=True)
def greedy_matching_size(src, dst, m):
    """Size of the greedy maximal matching, edges taken in the given order."""
    used = np.zeros(m, dtype=np.uint8)
    cnt = 0
    for e in range(src.shape[0]):
        a = src[e]
        b = dst[e]
        if used[a] == 0 and used[b] == 0:
            used[a] = 1
            used[b] = 1
            cnt += 1
    return cnt


@njit(cache=True)
def capped_triangle_incidences(indptr, nbrs, src, dst, cap):
    """Sum over edges of min(#triangles through the edge, cap).

    Neighbour lists must be sorted; common neighbours counted by merge.
    """
    tot = 0.0
    for e in range(src.shape[0]):
        a = src[e]
        b = dst[e]
        i = indptr[a]
        j = indptr[b]
        ia = indptr[a + 1]
        jb = indptr[b + 1]
        c = 0
        while i < ia and j < jb:
            x = nbrs[i]
            y = nbrs[j]
            if x == y:
                c += 1
                i += 1
                j += 1
            elif x < y:
                i += 1
            else:
                j += 1
        if c > cap:
            c = cap
        tot += c
    return tot
