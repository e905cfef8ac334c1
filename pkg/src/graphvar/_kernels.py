"""Compiled inner loops for DAG enumeration and the MCMC sampler.

Kept free of any Python object types so numba can run them in nopython
mode with the GIL released; all state is passed in as numpy arrays.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _reaches(adj, src, dst, stack, visited):
    """Depth-first reachability src -> dst over the arc matrix adj."""
    n = adj.shape[0]
    for v in range(n):
        visited[v] = False
    top = 0
    stack[top] = src
    top += 1
    visited[src] = True
    while top > 0:
        top -= 1
        v = stack[top]
        if v == dst:
            return True
        for w in range(n):
            if adj[v, w] != 0 and not visited[w]:
                visited[w] = True
                stack[top] = w
                top += 1
    return False


@njit(cache=True, nogil=True)
def census_dags_range(n, pair_i, pair_j, prefix, depth0, marg, joint):
    """Enumerate every DAG completion of a fixed pair-slot prefix.

    Pair slots are visited in index order; per slot the branch order is
    absent, forward (i -> j), reversed (j -> i). Arc branches are pruned
    when the arc would close a directed cycle. Counts are accumulated
    into marg (k, 3) and the upper triangle of joint (k, k, 3, 3) with
    states shifted by +1. Returns the number of DAGs visited.
    """
    k = pair_i.shape[0]
    adj = np.zeros((n, n), np.uint8)
    state = np.zeros(k, np.int8)
    for e in range(depth0):
        s = prefix[e]
        state[e] = s
        if s == 1:
            adj[pair_i[e], pair_j[e]] = 1
        elif s == -1:
            adj[pair_j[e], pair_i[e]] = 1
    if depth0 >= k:
        for e in range(k):
            marg[e, state[e] + 1] += 1
        for a in range(k):
            for b in range(a + 1, k):
                joint[a, b, state[a] + 1, state[b] + 1] += 1
        return 1
    stack = np.zeros(n, np.int64)
    visited = np.zeros(n, np.bool_)
    choice = np.zeros(k, np.int8)
    count = 0
    depth = depth0
    choice[depth] = 0
    while depth >= depth0:
        c = choice[depth]
        if c == 3:
            depth -= 1
            if depth < depth0:
                break
            s = state[depth]
            if s == 1:
                adj[pair_i[depth], pair_j[depth]] = 0
            elif s == -1:
                adj[pair_j[depth], pair_i[depth]] = 0
            continue
        choice[depth] = c + 1
        i = pair_i[depth]
        j = pair_j[depth]
        if c == 0:
            s = np.int8(0)
            ok = True
        elif c == 1:
            s = np.int8(1)
            ok = not _reaches(adj, j, i, stack, visited)
        else:
            s = np.int8(-1)
            ok = not _reaches(adj, i, j, stack, visited)
        if not ok:
            continue
        state[depth] = s
        if s == 1:
            adj[i, j] = 1
        elif s == -1:
            adj[j, i] = 1
        if depth == k - 1:
            count += 1
            for e in range(k):
                marg[e, state[e] + 1] += 1
            for a in range(k):
                sa = state[a] + 1
                for b in range(a + 1, k):
                    joint[a, b, sa, state[b] + 1] += 1
            if s == 1:
                adj[i, j] = 0
            elif s == -1:
                adj[j, i] = 0
        else:
            depth += 1
            choice[depth] = 0
    return count


@njit(cache=True, nogil=True)
def mcmc_chunk(adj, codes, op_i, op_j, step_offset, burn_in, thin,
               out, out_pos, pair_i, pair_j, stack, visited):
    """Advance the add/delete chain by one block of proposals.

    codes index the ordered-pair tables op_i/op_j. A proposed arc is
    deleted if present, added if the addition keeps the graph acyclic,
    and ignored otherwise. After burn_in steps every thin-th state is
    written to out as a pair-state vector. Returns the new out position.
    """
    k = pair_i.shape[0]
    pos = out_pos
    cap = out.shape[0]
    for t in range(codes.shape[0]):
        code = codes[t]
        i = op_i[code]
        j = op_j[code]
        if adj[i, j] != 0:
            adj[i, j] = 0
        elif adj[j, i] == 0 and not _reaches(adj, j, i, stack, visited):
            adj[i, j] = 1
        step = step_offset + t + 1
        if step > burn_in and (step - burn_in) % thin == 0 and pos < cap:
            for e in range(k):
                a = pair_i[e]
                b = pair_j[e]
                if adj[a, b] != 0:
                    out[pos, e] = 1
                elif adj[b, a] != 0:
                    out[pos, e] = -1
                else:
                    out[pos, e] = 0
            pos += 1
    return pos
