"""Network simplex on the dense bipartite transport graph, integer costs.

Starts from a northwest-corner tree on index-perturbed masses (multiplicative
1e-9/V perturbation keyed by atom index) so every pivot is nondegenerate,
prices arcs in flat blocks, and rebuilds tree labels after each pivot. The
final tree is re-solved against the unperturbed masses by leaf elimination,
and optimality is certified by a full reduced-cost scan. All cost arithmetic
is int64; callers are responsible for scaling floats so that
scale * max_cost * (N + M) stays below 2^62.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _nw_corner(a, b):
    N = a.size
    M = b.size
    V = N + M
    E_row = np.empty(V - 1, np.int64)
    E_col = np.empty(V - 1, np.int64)
    E_flow = np.empty(V - 1, np.float64)
    ra = a.copy()
    rb = b.copy()
    i = 0
    j = 0
    for e in range(V - 1):
        E_row[e] = i
        E_col[e] = j
        if ra[i] <= rb[j] and i < N - 1:
            E_flow[e] = ra[i]
            rb[j] -= ra[i]
            ra[i] = 0.0
            i += 1
        elif j < M - 1:
            E_flow[e] = rb[j]
            ra[i] -= rb[j]
            rb[j] = 0.0
            j += 1
        else:
            E_flow[e] = ra[i]
            rb[j] -= ra[i]
            ra[i] = 0.0
            i += 1
    return E_row, E_col, E_flow


@njit(cache=True)
def _rebuild(N, M, E_row, E_col, Cint, parent, parent_edge, depth, pot, order,
             deg, adj_edge, fill):
    V = N + M
    ne = V - 1
    for v in range(V + 1):
        deg[v] = 0
    for e in range(ne):
        deg[E_row[e] + 1] += 1
        deg[N + E_col[e] + 1] += 1
    for v in range(V):
        deg[v + 1] += deg[v]
    for v in range(V):
        fill[v] = deg[v]
    for e in range(ne):
        u = E_row[e]
        w = N + E_col[e]
        adj_edge[fill[u]] = e
        fill[u] += 1
        adj_edge[fill[w]] = e
        fill[w] += 1
    for v in range(V):
        parent[v] = -2
    parent[0] = -1
    parent_edge[0] = -1
    depth[0] = 0
    pot[0] = 0
    order[0] = 0
    head = 0
    tail = 1
    while head < tail:
        v = order[head]
        head += 1
        for idx in range(deg[v], deg[v + 1]):
            e = adj_edge[idx]
            r = E_row[e]
            c = N + E_col[e]
            nxt = c if v == r else r
            if parent[nxt] == -2:
                parent[nxt] = v
                parent_edge[nxt] = e
                depth[nxt] = depth[v] + 1
                pot[nxt] = Cint[E_row[e], E_col[e]] - pot[v]
                order[tail] = nxt
                tail += 1


@njit(cache=True)
def _tree_flows(N, M, E_row, E_col, a, b, parent, parent_edge, depth, order,
                E_flow):
    # exact flows from the true masses by peeling leaves in reverse BFS order
    V = N + M
    excess = np.empty(V, np.float64)
    for i in range(N):
        excess[i] = a[i]
    for j in range(M):
        excess[N + j] = -b[j]
    for t in range(V - 1, 0, -1):
        v = order[t]
        e = parent_edge[v]
        # the natural arc direction row->col carries positive flow
        if v == E_row[e]:
            f = excess[v]
        else:
            f = -excess[v]
        E_flow[e] = f if f > 0.0 else 0.0
        excess[parent[v]] += excess[v]
        excess[v] = 0.0


@njit(cache=True)
def solve_ns(a, b, Cint, block=8192, max_iter=-1):
    """Returns (E_row, E_col, E_flow, pot, iterations, status).

    status: 0 optimal, 1 iteration cap reached, 2 pivot failure,
    3 certificate failure after convergence.
    """
    N = a.size
    M = b.size
    V = N + M
    nA = N * M
    # index-keyed multiplicative perturbation breaks degeneracy
    ap = a.copy()
    bp = b.copy()
    h = 1e-9 / V
    sa = 0.0
    sb = 0.0
    for i in range(N):
        ap[i] = a[i] * (1.0 + h * (i + 1))
        sa += ap[i]
    for j in range(M):
        bp[j] = b[j] * (1.0 + h * (j + 1))
        sb += bp[j]
    for j in range(M):
        bp[j] *= sa / sb
    E_row, E_col, E_flow = _nw_corner(ap, bp)
    parent = np.empty(V, np.int64)
    parent_edge = np.empty(V, np.int64)
    depth = np.empty(V, np.int64)
    pot = np.empty(V, np.int64)
    order = np.empty(V, np.int64)
    deg = np.empty(V + 1, np.int64)
    adj_edge = np.empty(2 * (V - 1), np.int64)
    fill = np.empty(V, np.int64)
    _rebuild(N, M, E_row, E_col, Cint, parent, parent_edge, depth, pot, order,
             deg, adj_edge, fill)
    if max_iter < 0:
        max_iter = 200 * V + 20000
    if block > nA:
        block = nA
    it = 0
    pos = 0
    cyc_edges = np.empty(2 * V, np.int64)
    cyc_sign = np.empty(2 * V, np.int64)
    status = 1
    while it < max_iter:
        it += 1
        best = 0
        barc = -1
        scanned = 0
        while scanned < nA:
            hi = pos + block
            if hi > nA:
                hi = nA
            for idx in range(pos, hi):
                i = idx // M
                j = idx - i * M
                rc = Cint[i, j] - pot[i] - pot[N + j]
                if rc < best:
                    best = rc
                    barc = idx
            scanned += hi - pos
            pos = hi
            if pos >= nA:
                pos = 0
            if barc >= 0:
                break
        if barc < 0:
            status = 0
            break
        bi = barc // M
        bj = barc - bi * M
        u = bi
        w = N + bj
        nc = 0
        uu = u
        ww = w
        du = depth[u]
        dw = depth[w]
        while depth[uu] > dw:
            e = parent_edge[uu]
            cyc_sign[nc] = -1 if uu == E_row[e] else 1
            cyc_edges[nc] = e
            nc += 1
            uu = parent[uu]
        while depth[ww] > du:
            e = parent_edge[ww]
            cyc_sign[nc] = 1 if ww == E_row[e] else -1
            cyc_edges[nc] = e
            nc += 1
            ww = parent[ww]
        while uu != ww:
            e = parent_edge[uu]
            cyc_sign[nc] = -1 if uu == E_row[e] else 1
            cyc_edges[nc] = e
            nc += 1
            uu = parent[uu]
            e = parent_edge[ww]
            cyc_sign[nc] = 1 if ww == E_row[e] else -1
            cyc_edges[nc] = e
            nc += 1
            ww = parent[ww]
        delta = np.inf
        leave = -1
        for t in range(nc):
            if cyc_sign[t] < 0:
                fl = E_flow[cyc_edges[t]]
                if fl < delta:
                    delta = fl
                    leave = cyc_edges[t]
        if leave < 0:
            status = 2
            break
        for t in range(nc):
            e = cyc_edges[t]
            if cyc_sign[t] < 0:
                f = E_flow[e] - delta
                E_flow[e] = f if f > 0.0 else 0.0
            else:
                E_flow[e] += delta
        E_row[leave] = bi
        E_col[leave] = bj
        E_flow[leave] = delta
        _rebuild(N, M, E_row, E_col, Cint, parent, parent_edge, depth, pot,
                 order, deg, adj_edge, fill)
    # final exact flows for the true masses on the final tree
    _tree_flows(N, M, E_row, E_col, a, b, parent, parent_edge, depth, order,
                E_flow)
    # certify optimality: minimum reduced cost over all arcs
    mn = 0
    for i in range(N):
        pr = pot[i]
        for j in range(M):
            rc = Cint[i, j] - pr - pot[N + j]
            if rc < mn:
                mn = rc
    if status == 0 and mn < 0:
        status = 3
    return E_row, E_col, E_flow, pot, it, status
