"""Pure numpy/Python kernels; reference semantics for ``_kernels.pyx``.

Both modules expose the same functions with the same results:

``greedy_scan(x, sqnorms, order, tau, budget) -> (pivots, status)``
    Walk tokens in ``order``. A token is eliminated by the first already
    chosen pivot (in selection order) whose cosine with it exceeds ``tau``;
    otherwise it becomes the next pivot while fewer than ``budget`` exist.
    Cosines are ``dot / sqrt(sqnorm_a * sqnorm_b)`` clamped to [-1, 1].
    ``status[i]`` is the eliminating step index, ``PIVOT`` or ``LEFTOVER``.

``bnb_search(w, order, conflict, budget, tol) -> (mask, value, nodes)``
    Depth-first include/exclude branch-and-bound over ``order``; ``conflict[i]``
    is the bitmask of tokens that may not be selected together with ``i``.

``fnv1a64(data) -> int``
    64-bit FNV-1a hash of a bytes-like object.
"""
import math

import numpy as np

PIVOT = -1
LEFTOVER = -2
MAX_BNB_N = None  # unbounded: masks are Python ints

_BLOCK = 64


def greedy_scan(x, sqnorms, order, tau, budget):
    n = order.shape[0]
    status = np.full(x.shape[0], LEFTOVER, dtype=np.intp)
    cap = min(budget, n)
    pivots = np.empty(cap, dtype=np.intp)
    pbuf = np.empty((cap, x.shape[1]))
    pnorm = np.empty(cap)
    k = 0
    for start in range(0, n, _BLOCK):
        cand = order[start : start + _BLOCK]
        xb = x[cand]
        nb = sqnorms[cand]
        live = np.arange(len(cand))
        if k:
            cos = (xb @ pbuf[:k].T) / np.sqrt(nb[:, None] * pnorm[None, :k])
            np.clip(cos, -1.0, 1.0, out=cos)
            hit = cos > tau
            has = hit.any(axis=1)
            status[cand[has]] = hit[has].argmax(axis=1)
            live = np.flatnonzero(~has)
        if not live.size or k >= budget:
            continue
        # survivors can still be removed by pivots picked earlier in this block
        xs = xb[live]
        ns = nb[live]
        g = (xs @ xs.T) / np.sqrt(ns[:, None] * ns[None, :])
        np.clip(g, -1.0, 1.0, out=g)
        first = k
        new = []
        for a in range(len(live)):
            c = cand[live[a]]
            if new:
                over = np.flatnonzero(g[a, new] > tau)
                if over.size:
                    status[c] = first + over[0]
                    continue
            if k < budget:
                pivots[k] = c
                pbuf[k] = xs[a]
                pnorm[k] = ns[a]
                status[c] = PIVOT
                new.append(a)
                k += 1
    return pivots[:k].copy(), status


def _lex_less(a, b):
    x = a ^ b
    if not x:
        return False
    low = x & -x
    above = ~((low << 1) - 1)
    if a & low:
        return (b & above) != 0
    return (a & above) == 0


def bnb_search(w, order, conflict, budget, tol):
    n = len(order)
    wl = [float(w[i]) for i in order]
    bits = [1 << int(i) for i in order]
    conf = [int(conflict[i]) for i in order]
    best = [0, 0.0]
    chosen = []
    nodes = 0

    def dfs(k, mask, val, count, forbidden):
        nonlocal nodes
        nodes += 1
        # the running sum only screens; ties and improvements use the exact total
        if val >= best[1] - tol:
            ex = math.fsum(chosen)
            if ex > best[1] or (ex == best[1] and _lex_less(mask, best[0])):
                best[0] = mask
                best[1] = ex
        if count == budget or k == n or wl[k] < 0.0:
            return
        bound = val
        taken = 0
        t = k
        room = budget - count
        while t < n and taken < room:
            wt = wl[t]
            if wt <= 0.0:
                break
            if not forbidden & bits[t]:
                bound += wt
                taken += 1
            t += 1
        if bound < best[1] - tol:
            return
        if not forbidden & bits[k]:
            chosen.append(wl[k])
            dfs(k + 1, mask | bits[k], val + wl[k], count + 1, forbidden | conf[k])
            chosen.pop()
        dfs(k + 1, mask, val, count, forbidden)

    dfs(0, 0, 0.0, 0, 0)
    return best[0], best[1], nodes


FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_M64 = (1 << 64) - 1


def fnv1a64(data, h=FNV_OFFSET):
    prime = FNV_PRIME
    mask = _M64
    for b in bytes(data):
        h = ((h ^ b) * prime) & mask
    return h
