"""Compiled inner loops for the distance searches.

All arrays are int64.  Kernels are not disk-cached: numba cannot reload
cached recursive functions safely.  ``nxt``/``par`` are the constituent trellis tables,
``gp[s, k]``/``gs[s, k]`` give the parity weight and state after k zero
inputs from state s, and ``sig[i]`` is the end state (from state 0) caused by
a single 1 at position i of the enumerated side as seen by the other encoder.
``tb[b]`` maps a zero-start end state b to the circular start state, or -1
in dual mode (where b must be zero).

The result vector ``res`` holds
    0: current weight cap (tightened to the best weight found)
    1: number of stored witnesses
    2: nodes expanded
    3: budget-exhausted flag
    4: witness overflow flag
and ``cnt[w]`` counts (codeword, forced position) hits at the best weight by
input weight w.
"""

import numpy as np
from numba import njit


@njit
def _other_side_parity(lp, w, start, gp, gs, nxt, par):
    N = gp.shape[1] - 1
    s = start
    t = 0
    q = 0
    for k in range(w):
        g = lp[k] - t
        q += gp[s, g]
        s = gs[s, g]
        q += par[s, 1]
        s = nxt[s, 1]
        t = lp[k] + 1
    q += gp[s, N - t]
    s = gs[s, N - t]
    if s != start:
        return -1
    return q


@njit
def _record(upos, w, tot, res, cnt, wit):
    if tot < res[0]:
        res[0] = tot
        res[1] = 0
        res[4] = 0
        cnt[:] = 0
    if tot == res[0]:
        cnt[w] += 1
        k = res[1]
        if k < wit.shape[0]:
            wit[k, 0] = w
            for j in range(w):
                wit[k, 1 + j] = upos[j]
            res[1] = k + 1
        else:
            res[4] = 1


@njit
def _leaf(ins, w, pw, sg, lmap, to_upper, tb, gp, gs, nxt, par, res, cnt, wit, strict):
    lp = np.empty(w, np.int64)
    for k in range(w):
        lp[k] = lmap[ins[k]]
    lp.sort()
    if tb[0] < 0:
        if sg != 0:
            return
        start = 0
    else:
        start = tb[sg]
    q = _other_side_parity(lp, w, start, gp, gs, nxt, par)
    if q < 0:
        return
    if strict:
        if pw >= q:
            return
    elif pw > q:
        return
    tot = w + pw + q
    if tot > res[0]:
        return
    up = np.empty(w, np.int64)
    for k in range(w):
        up[k] = to_upper[ins[k]]
    up.sort()
    _record(up, w, tot, res, cnt, wit)


@njit
def _dfs(t, s, s0, cost, pw, w, sg, ins, force, N, mc, lmap, to_upper, sig, tb,
         gp, gs, nxt, par, res, cnt, wit, strict, budget):
    res[2] += 1
    if res[2] > budget:
        res[3] = 1
        return
    if res[3]:
        return
    if s == 0:
        # all remaining inputs zero: stays in state 0
        if s0 == 0 and w > 0 and force < t:
            _leaf(ins, w, pw, sg, lmap, to_upper, tb, gp, gs, nxt, par, res, cnt, wit, strict)
        ns = nxt[0, 1]
        c1 = 1 + 2 * par[0, 1]
        last = N - 1
        if force >= t:
            last = force
        for tp in range(t, last + 1):
            if cost + c1 + mc[N - tp - 1, ns, s0] > res[0]:
                # the cost to reach state 0 only grows as the horizon shrinks;
                # other targets are not monotone in the horizon
                if s0 == 0:
                    break
                continue
            ins[w] = tp
            _dfs(tp + 1, ns, s0, cost + c1, pw + par[0, 1], w + 1, sg ^ sig[tp], ins, force, N, mc,
                 lmap, to_upper, sig, tb, gp, gs, nxt, par, res, cnt, wit, strict, budget)
        return
    if t >= N:
        if s == s0 and w > 0 and force < t:
            _leaf(ins, w, pw, sg, lmap, to_upper, tb, gp, gs, nxt, par, res, cnt, wit, strict)
        return
    for b in range(2):
        if b == 0 and t == force:
            continue
        ns = nxt[s, b]
        c = cost + b + 2 * par[s, b]
        if c + mc[N - t - 1, ns, s0] > res[0]:
            continue
        if b == 1:
            ins[w] = t
            _dfs(t + 1, ns, s0, c, pw + par[s, b], w + 1, sg ^ sig[t], ins, force, N, mc, lmap,
                 to_upper, sig, tb, gp, gs, nxt, par, res, cnt, wit, strict, budget)
        else:
            _dfs(t + 1, ns, s0, c, pw + par[s, b], w, sg, ins, force, N, mc, lmap,
                 to_upper, sig, tb, gp, gs, nxt, par, res, cnt, wit, strict, budget)


@njit(nogil=True)
def side_search(starts, force, N, mc, lmap, to_upper, sig, tb, gp, gs, nxt, par,
                res, cnt, wit, strict, budget):
    """Enumerate one side's inputs of cost (input + 2 parity) within res[0].

    ``starts`` lists the start states to try (just 0 in dual mode).
    """
    ins = np.zeros(N + 1, np.int64)
    for s0 in starts:
        if s0 == 0:
            _dfs(0, 0, 0, 0, 0, 0, 0, ins, force, N, mc, lmap, to_upper, sig, tb,
                 gp, gs, nxt, par, res, cnt, wit, strict, budget)
        else:
            # leave state s0 at time 0 without the zero-state shortcut
            _dfs(0, s0, s0, 0, 0, 0, 0, ins, force, N, mc, lmap, to_upper, sig, tb,
                 gp, gs, nxt, par, res, cnt, wit, strict, budget)


# --- event-cover estimator -------------------------------------------------


@njit
def _weight_of(pos, n, start_tb, gp, gs, nxt, par, sg):
    if start_tb[0] < 0:
        if sg != 0:
            return -1
        start = 0
    else:
        start = start_tb[sg]
    return _other_side_parity(pos, n, start, gp, gs, nxt, par)


@njit
def _complete(pos, n, f, finv, N, P, sigU, sigL, tb, gp, gs, nxt, par, res, cnt, wit, seen_key):
    lt = np.empty(n, np.int64)
    up = np.empty(n, np.int64)
    for k in range(N // P):
        su = 0
        sl = 0
        for j in range(n):
            x = (finv[pos[j]] + k * P) % N
            lt[j] = x
            up[j] = f[x]
            su ^= sigU[f[x]]
            sl ^= sigL[x]
        lt.sort()
        up.sort()
        a = _weight_of(up, n, tb, gp, gs, nxt, par, su)
        if a < 0:
            continue
        b = _weight_of(lt, n, tb, gp, gs, nxt, par, sl)
        if b < 0:
            continue
        tot = n + a + b
        if tot <= res[0]:
            _record(up, n, tot, res, cnt, wit)


@njit
def _cover(n, pw, pos, cov, f, finv, N, P, r0, W, rel, nrel, apar, lbc, sigU, sigL, tb,
           gp, gs, nxt, par, res, cnt, wit, budget, idxs):
    res[2] += 1
    if res[2] > budget:
        res[3] = 1
        return
    if res[3]:
        return
    ri = -1
    rs = -1
    nou = 0
    nol = 0
    for i in range(n):
        if cov[i, 1] == 0:
            nol += 1
            if ri < 0:
                ri = i
                rs = 1
        if cov[i, 0] == 0:
            nou += 1
            if ri < 0:
                ri = i
                rs = 0
    if ri < 0:
        _complete(pos, n, f, finv, N, P, sigU, sigL, tb, gp, gs, nxt, par, res, cnt, wit, 0)
        return
    if n + pw + lbc[nou] + lbc[nol] > res[0]:
        return
    rest = lbc[nol] if rs == 0 else lbc[nou]
    q = pos[ri] if rs == 0 else finv[pos[ri]]
    idx = idxs[n]
    for a in range(rel.shape[0]):
        if n + pw + apar[a] + rest > res[0]:
            break
        nn = n
        ok = True
        for j in range(nrel[a]):
            m = (q + rel[a, j]) % N
            uu = m if rs == 0 else f[m]
            found = -1
            for i in range(nn):
                if pos[i] == uu:
                    found = i
                    break
            if found >= 0:
                if cov[found, rs] == 1 or found == ri:
                    ok = False
                    break
                idx[j] = found
            else:
                if nn >= W or finv[uu] % P < r0:
                    ok = False
                    break
                pos[nn] = uu
                cov[nn, 0] = 0
                cov[nn, 1] = 0
                idx[j] = nn
                nn += 1
        if ok:
            cov[ri, rs] = 1
            for j in range(nrel[a]):
                cov[idx[j], rs] = 1
            _cover(nn, pw + apar[a], pos, cov, f, finv, N, P, r0, W, rel, nrel, apar, lbc,
                   sigU, sigL, tb, gp, gs, nxt, par, res, cnt, wit, budget, idxs)
            cov[ri, rs] = 0
            for j in range(nrel[a]):
                if idx[j] < n:
                    cov[idx[j], rs] = 0


@njit(nogil=True)
def cover_search(roots, f, finv, N, P, W, rel, nrel, apar, lbc, sigU, sigL, tb,
                 gp, gs, nxt, par, res, cnt, wit, budget):
    """Grow event covers from each root lower time until both sides close.

    Every closed structure is evaluated at all N / P quasi-cyclic shifts.
    A root r only admits positions whose lower time is >= r modulo P, so
    each shift class is reached from its smallest residue.
    """
    pos = np.zeros(W + 1, np.int64)
    cov = np.zeros((W + 1, 2), np.int64)
    idxs = np.zeros((W + 2, max(rel.shape[1], 1)), np.int64)
    for r0 in roots:
        pos[0] = f[r0]
        cov[0, 0] = 0
        cov[0, 1] = 0
        _cover(1, 0, pos, cov, f, finv, N, P, r0, W, rel, nrel, apar, lbc, sigU, sigL, tb,
               gp, gs, nxt, par, res, cnt, wit, budget, idxs)
