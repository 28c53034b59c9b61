# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; see ``_pykernels`` for the contract."""
import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt
from libc.stdint cimport uint64_t
from scipy.linalg.cython_blas cimport ddot, dgemm

cnp.import_array()

cdef enum:
    C_PIVOT = -1
    C_LEFTOVER = -2

PIVOT = C_PIVOT
LEFTOVER = C_LEFTOVER
MAX_BNB_N = 64


cdef enum:
    DEF_BLOCK = 64


cdef inline double clamp(double c) noexcept nogil:
    if c > 1.0:
        return 1.0
    if c < -1.0:
        return -1.0
    return c


def greedy_scan(const double[:, ::1] x, const double[::1] sqnorms,
                const Py_ssize_t[::1] order, double tau, Py_ssize_t budget):
    cdef Py_ssize_t n = order.shape[0]
    cdef Py_ssize_t cap = min(budget, n)
    cdef int d = <int>x.shape[1]
    cdef int one = 1
    cdef int block = DEF_BLOCK
    status_arr = np.full(x.shape[0], LEFTOVER, dtype=np.intp)
    pivots_arr = np.empty(cap, dtype=np.intp)
    pbuf_arr = np.empty((max(cap, 1), d))
    xbuf_arr = np.empty((block, d))
    gram_arr = np.empty((block, max(cap, 1)))
    cdef Py_ssize_t[::1] status = status_arr
    cdef Py_ssize_t[::1] piv = pivots_arr
    cdef double[:, ::1] pbuf = pbuf_arr
    cdef double[:, ::1] xbuf = xbuf_arr
    cdef double[:, ::1] gram = gram_arr
    cdef Py_ssize_t start, r, s, c, elim, rows
    cdef Py_ssize_t k = 0, k0
    cdef int m_, n_
    cdef double alpha = 1.0, beta = 0.0
    cdef char ta = b'T', tb = b'N'
    cdef double dot, cos
    with nogil:
        start = 0
        while start < n:
            rows = min(block, n - start)
            k0 = k
            for r in range(rows):
                c = order[start + r]
                xbuf[r, :] = x[c, :]
            if k0:
                # gram[r, s] = <candidate r, pivot s>, via column-major G^T = P X^T
                m_ = <int>k0
                n_ = <int>rows
                dgemm(&ta, &tb, &m_, &n_, &d, &alpha, &pbuf[0, 0], &d,
                      &xbuf[0, 0], &d, &beta, &gram[0, 0], &m_)
            for r in range(rows):
                c = order[start + r]
                elim = -1
                for s in range(k0):
                    cos = clamp(gram_arr_at(&gram[0, 0], k0, r, s) / sqrt(sqnorms[c] * sqnorms[piv[s]]))
                    if cos > tau:
                        elim = s
                        break
                if elim < 0:
                    for s in range(k0, k):
                        dot = ddot(&d, &xbuf[r, 0], &one, &pbuf[s, 0], &one)
                        cos = clamp(dot / sqrt(sqnorms[c] * sqnorms[piv[s]]))
                        if cos > tau:
                            elim = s
                            break
                if elim >= 0:
                    status[c] = elim
                elif k < budget:
                    piv[k] = c
                    pbuf[k, :] = xbuf[r, :]
                    status[c] = C_PIVOT
                    k += 1
            start += rows
    return pivots_arr[:k].copy(), status_arr


cdef inline double gram_arr_at(double* g, Py_ssize_t ld, Py_ssize_t r, Py_ssize_t s) noexcept nogil:
    return g[r * ld + s]


cdef struct BnB:
    const double* w
    const uint64_t* bits
    const uint64_t* conf
    int n
    int budget
    double tol
    uint64_t best_mask
    double best_val
    long long nodes
    double chosen[64]


cdef inline bint lex_less(uint64_t a, uint64_t b) noexcept nogil:
    cdef uint64_t x = a ^ b
    if x == 0:
        return False
    cdef uint64_t low = x & (~x + 1)
    cdef uint64_t above = ~((low << 1) - 1)
    if a & low:
        return (b & above) != 0
    return (a & above) == 0


cdef double exact_sum(const double* x, int k) noexcept nogil:
    """Correctly rounded sum of ``x[:k]`` (the partials algorithm behind math.fsum)."""
    cdef double partials[65]
    cdef int m = 0, i, j, jj
    cdef double v, y, t, hi, lo = 0.0, yr
    for j in range(k):
        v = x[j]
        i = 0
        for jj in range(m):
            y = partials[jj]
            if fabs(v) < fabs(y):
                t = v
                v = y
                y = t
            hi = v + y
            lo = y - (hi - v)
            if lo != 0.0:
                partials[i] = lo
                i += 1
            v = hi
        m = i
        partials[m] = v
        m += 1
    hi = 0.0
    if m > 0:
        m -= 1
        hi = partials[m]
        lo = 0.0
        while m > 0:
            v = hi
            m -= 1
            y = partials[m]
            hi = v + y
            yr = hi - v
            lo = y - yr
            if lo != 0.0:
                break
        # round half-way cases the way a single exact rounding would
        if m > 0 and ((lo < 0.0 and partials[m - 1] < 0.0) or (lo > 0.0 and partials[m - 1] > 0.0)):
            y = lo * 2.0
            v = hi + y
            yr = v - hi
            if y == yr:
                hi = v
    return hi


cdef void dfs(BnB* s, int k, uint64_t mask, double val, int count,
              uint64_t forbidden) noexcept nogil:
    cdef double ex
    s.nodes += 1
    # the running sum only screens; ties and improvements use the exact total
    if val >= s.best_val - s.tol:
        ex = exact_sum(s.chosen, count)
        if ex > s.best_val or (ex == s.best_val and lex_less(mask, s.best_mask)):
            s.best_mask = mask
            s.best_val = ex
    if count == s.budget or k == s.n or s.w[k] < 0.0:
        return
    cdef double bound = val
    cdef int taken = 0
    cdef int t = k
    cdef int room = s.budget - count
    cdef double wt
    while t < s.n and taken < room:
        wt = s.w[t]
        if wt <= 0.0:
            break
        if not (forbidden & s.bits[t]):
            bound += wt
            taken += 1
        t += 1
    if bound < s.best_val - s.tol:
        return
    if not (forbidden & s.bits[k]):
        s.chosen[count] = s.w[k]
        dfs(s, k + 1, mask | s.bits[k], val + s.w[k], count + 1, forbidden | s.conf[k])
    dfs(s, k + 1, mask, val, count, forbidden)


def bnb_search(w, order, conflict, int budget, double tol):
    cdef Py_ssize_t n = len(order)
    if n > MAX_BNB_N:
        raise ValueError(f"compiled branch-and-bound supports at most {MAX_BNB_N} tokens")
    wl = np.ascontiguousarray([float(w[i]) for i in order], dtype=np.float64)
    bits = np.ascontiguousarray([1 << int(i) for i in order], dtype=np.uint64)
    conf = np.ascontiguousarray([int(conflict[i]) for i in order], dtype=np.uint64)
    cdef double[::1] wv = wl
    cdef uint64_t[::1] bv = bits
    cdef uint64_t[::1] cv = conf
    cdef BnB s
    s.n = <int>n
    s.budget = budget
    s.tol = tol
    s.best_mask = 0
    s.best_val = 0.0
    s.nodes = 0
    if n:
        s.w = &wv[0]
        s.bits = &bv[0]
        s.conf = &cv[0]
        with nogil:
            dfs(&s, 0, 0, 0.0, 0, 0)
    else:
        s.nodes = 1
    return int(s.best_mask), s.best_val, int(s.nodes)


FNV_OFFSET = 0xCBF29CE484222325


def fnv1a64(const unsigned char[::1] data, uint64_t h=FNV_OFFSET):
    cdef Py_ssize_t i
    cdef uint64_t prime = 0x100000001B3ULL
    with nogil:
        for i in range(data.shape[0]):
            h = (h ^ data[i]) * prime
    return int(h)
