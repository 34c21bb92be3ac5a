# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels. Mirrors ``_pykernels`` call for call."""

from libc.stdlib cimport malloc, calloc, free

IMPLEMENTATION = "cython"

STATUS_NONE = 0
STATUS_FOUND = 1
STATUS_BUDGET = 2


cdef inline long ipow(long b, int e) nogil:
    cdef long r = 1
    while e > 0:
        r *= b
        e -= 1
    return r


cdef inline bint any_in(const unsigned char* row, long lo, long n) nogil:
    cdef long i
    for i in range(lo, lo + n):
        if row[i]:
            return True
    return False


cdef bint ok_chain(unsigned char** rows, int b, int* chain, int k,
                   unsigned char** scratch) nogil:
    """Fill scratch[j] (j < k - 1) with the ok tables; return whether level chain[0] has an ok node.

    rows[n] is the membership row of ambient level n; scratch[j] has room for b**chain[j] bytes.
    """
    cdef int j, p
    cdef long x, size, block, base
    cdef const unsigned char* below
    cdef const unsigned char* m
    cdef unsigned char* out
    cdef bint good, anyok = False
    if k == 1:
        return any_in(rows[chain[0]], 0, ipow(b, chain[0]))
    for j in range(k - 2, -1, -1):
        block = ipow(b, chain[j + 1] - chain[j] - 1)
        if j == k - 2:
            below = rows[chain[k - 1]]
        else:
            below = scratch[j + 1]
        m = rows[chain[j]]
        out = scratch[j]
        size = ipow(b, chain[j])
        anyok = False
        for x in range(size):
            out[x] = 0
            if not m[x]:
                continue
            base = x * b * block
            good = True
            for p in range(b):
                if not any_in(below, base + p * block, block):
                    good = False
                    break
            if good:
                out[x] = 1
                anyok = True
        if not anyok:
            return False
    return anyok


def d1_least(mem, int b, level_set, long root=-1):
    cdef int k = len(level_set)
    cdef int top = max(level_set)
    cdef int j, p, n
    cdef long x, y, lo, block
    cdef unsigned char* t0
    cdef int* chain = <int*>malloc(k * sizeof(int))
    cdef unsigned char** rows = <unsigned char**>calloc(top + 1, sizeof(unsigned char*))
    cdef unsigned char** scratch = <unsigned char**>calloc(k, sizeof(unsigned char*))
    keep = []
    try:
        for j in range(k):
            chain[j] = level_set[j]
            n = chain[j]
            buf = bytearray(mem[n])
            keep.append(buf)
            rows[n] = <unsigned char*>(<char*>buf)
            if j < k - 1:
                scratch[j] = <unsigned char*>malloc(ipow(b, n) + 1)
        if not ok_chain(rows, b, chain, k, scratch):
            return None
        t0 = scratch[0] if k > 1 else rows[chain[0]]
        out = []
        if root >= 0:
            if not t0[root]:
                return None
            out.append([root])
        else:
            x = 0
            while not t0[x]:
                x += 1
            out.append([x])
        for j in range(k - 1):
            block = ipow(b, chain[j + 1] - chain[j] - 1)
            nxt = []
            for x in out[j]:
                for p in range(b):
                    lo = (x * b + p) * block
                    y = lo
                    if j + 1 == k - 1:
                        while not rows[chain[k - 1]][y]:
                            y += 1
                    else:
                        while not scratch[j + 1][y]:
                            y += 1
                    nxt.append(y)
            out.append(nxt)
        return out
    finally:
        for j in range(k - 1):
            free(scratch[j])
        free(scratch)
        free(rows)
        free(chain)


cdef struct Adv:
    int b
    int k
    int nlev
    int* levels
    int* need
    long* sizes
    unsigned char** rows
    unsigned char** scratch
    int* combo        # flat, offsets in combo_off
    int* combo_off
    int* chain
    int* sub          # indices of the k-1 lower levels in the current check
    long units
    long max_units


cdef bint exists_top(Adv* a, int i_top) nogil:
    cdef int r, t, kk = a.k - 1
    if a.k == 1:
        return any_in(a.rows[a.levels[i_top]], 0, a.sizes[i_top])
    if i_top < kk:
        return False
    for r in range(kk):
        a.sub[r] = r
    while True:
        for r in range(kk):
            a.chain[r] = a.levels[a.sub[r]]
        a.chain[kk] = a.levels[i_top]
        if ok_chain(a.rows, a.b, a.chain, a.k, a.scratch):
            return True
        # next combination of kk indices out of range(i_top)
        r = kk - 1
        while r >= 0 and a.sub[r] == i_top - kk + r:
            r -= 1
        if r < 0:
            return False
        a.sub[r] += 1
        for t in range(r + 1, kk):
            a.sub[t] = a.sub[t - 1] + 1


cdef int adv_rec(Adv* a, int i) nogil:
    cdef int r, t, status
    cdef int need, *c
    cdef long size
    cdef unsigned char* row
    if i == a.nlev:
        return 1
    need = a.need[i]
    size = a.sizes[i]
    row = a.rows[a.levels[i]]
    c = a.combo + a.combo_off[i]
    if need > size:
        return 0
    for r in range(need):
        c[r] = r
    while True:
        a.units += 1
        if a.units > a.max_units:
            return 2
        for r in range(need):
            row[c[r]] = 1
        if not exists_top(a, i):
            status = adv_rec(a, i + 1)
            if status != 0:
                return status
        for r in range(need):
            row[c[r]] = 0
        r = need - 1
        while r >= 0 and c[r] == size - need + r:
            r -= 1
        if r < 0:
            return 0
        c[r] += 1
        for t in range(r + 1, need):
            c[t] = c[t - 1] + 1


def adversary_d1(int b, int k, levels, need, long max_units):
    cdef Adv a
    cdef int i, total, top, status
    cdef int nlev = len(levels)
    levels = list(levels)
    top = levels[nlev - 1] if nlev else 0
    a.b = b
    a.k = k
    a.nlev = nlev
    a.units = 0
    a.max_units = max_units
    a.levels = <int*>malloc((nlev + 1) * sizeof(int))
    a.need = <int*>malloc((nlev + 1) * sizeof(int))
    a.sizes = <long*>malloc((nlev + 1) * sizeof(long))
    a.combo_off = <int*>malloc((nlev + 1) * sizeof(int))
    a.rows = <unsigned char**>calloc(top + 1, sizeof(unsigned char*))
    a.scratch = <unsigned char**>calloc(k + 1, sizeof(unsigned char*))
    a.chain = <int*>malloc((k + 1) * sizeof(int))
    a.sub = <int*>malloc((k + 1) * sizeof(int))
    total = 0
    for i in range(nlev):
        a.levels[i] = levels[i]
        a.need[i] = need[i]
        a.sizes[i] = ipow(b, levels[i])
        a.combo_off[i] = total
        total += need[i]
        a.rows[levels[i]] = <unsigned char*>calloc(a.sizes[i] + 1, 1)
    a.combo = <int*>malloc((total + 1) * sizeof(int))
    for i in range(k):
        a.scratch[i] = <unsigned char*>malloc(ipow(b, top) + 1)
    try:
        with nogil:
            status = adv_rec(&a, 0)
        if status == 1:
            ce = []
            for i in range(nlev):
                ce.append(tuple(a.combo[a.combo_off[i] + r] for r in range(a.need[i])))
            return status, ce, a.units
        return status, None, a.units
    finally:
        for i in range(nlev):
            free(a.rows[levels[i]])
        for i in range(k):
            free(a.scratch[i])
        free(a.combo)
        free(a.sub)
        free(a.chain)
        free(a.scratch)
        free(a.rows)
        free(a.combo_off)
        free(a.sizes)
        free(a.need)
        free(a.levels)
