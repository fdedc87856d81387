# cython: language_level=3
"""Compiled condition-check kernels.

Mirror of byztrim._kernels.pure: same enumeration orders, same witnesses,
same examined counts.  Masks are 64-bit, so callers must keep n <= 62
(the selector in byztrim._kernels enforces this).
"""

from libc.stdlib cimport malloc, free

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil

BACKEND = "native"

PASS = 0
FAIL = 1
BUDGET_EXCEEDED = 2

ctypedef unsigned long long u64


cdef inline int _popcount(u64 x) nogil:
    return __builtin_popcountll(x)


cdef int _first_combination(int* idx, int k) nogil:
    cdef int i
    for i in range(k):
        idx[i] = i
    return 0


cdef int _next_combination(int* idx, int k, int n) nogil:
    # Lexicographic successor of the index combination; returns 0 when done.
    cdef int i = k - 1
    while i >= 0 and idx[i] == n - k + i:
        i -= 1
    if i < 0:
        return 0
    idx[i] += 1
    cdef int j
    for j in range(i + 1, k):
        idx[j] = idx[j - 1] + 1
    return 1


def violating_partition(int n, in_masks, int f, int r):
    """First violating (F, L, C, R) as bitmasks, or None (see pure twin)."""
    cdef u64 masks[64]
    cdef int rest[64]
    cdef int digits[64]
    cdef int fidx[64]
    cdef int i, v, k, m, d, pos, ok
    cdef u64 f_mask, l_mask, c_mask, r_mask, cr, lc, bit
    cdef int kmax = f if f < n else n

    for i in range(n):
        masks[i] = in_masks[i]

    for k in range(kmax + 1):
        _first_combination(fidx, k)
        while True:
            f_mask = 0
            for i in range(k):
                f_mask |= (<u64>1) << fidx[i]
            m = 0
            for v in range(n):
                if not (f_mask >> v) & 1:
                    rest[m] = v
                    m += 1
            if m >= 2:
                for i in range(m):
                    digits[i] = 0
                l_mask = 0
                c_mask = 0
                r_mask = 0
                for i in range(m):
                    l_mask |= (<u64>1) << rest[i]
                while True:
                    if l_mask != 0 and r_mask != 0:
                        cr = c_mask | r_mask
                        lc = l_mask | c_mask
                        ok = 1
                        for v in range(n):
                            bit = (<u64>1) << v
                            if l_mask & bit:
                                if _popcount(masks[v] & cr) >= r:
                                    ok = 0
                                    break
                            elif r_mask & bit:
                                if _popcount(masks[v] & lc) >= r:
                                    ok = 0
                                    break
                        if ok:
                            return (int(f_mask), int(l_mask), int(c_mask), int(r_mask))
                    # Increment the base-3 odometer (last digit fastest).
                    pos = m - 1
                    while pos >= 0:
                        bit = (<u64>1) << rest[pos]
                        d = digits[pos]
                        if d == 0:
                            l_mask &= ~bit
                        elif d == 1:
                            c_mask &= ~bit
                        else:
                            r_mask &= ~bit
                        if d == 2:
                            digits[pos] = 0
                            l_mask |= bit
                            pos -= 1
                        else:
                            digits[pos] = d + 1
                            if d == 0:
                                c_mask |= bit
                            else:
                                r_mask |= bit
                            break
                    if pos < 0:
                        break
            if k == 0 or not _next_combination(fidx, k, n):
                break
    return None


cdef int _root_count_ge(int m, int* survivors, u64* kept_in, int at_least) nogil:
    # Count survivors whose reachable set covers everyone, early-exit at
    # `at_least`.  kept_in is indexed by survivor position, masks by node id.
    cdef u64 out_masks[64]
    cdef u64 full, seen, frontier, nxt, mm, low
    cdef int i, v, u, count
    full = 0
    for i in range(m):
        out_masks[survivors[i]] = 0
    for i in range(m):
        full |= (<u64>1) << survivors[i]
    for i in range(m):
        v = survivors[i]
        mm = kept_in[i]
        while mm:
            low = mm & (~mm + 1)
            u = _popcount(low - 1)
            out_masks[u] |= (<u64>1) << v
            mm ^= low
    count = 0
    for i in range(m):
        v = survivors[i]
        seen = (<u64>1) << v
        frontier = out_masks[v] & ~seen
        while frontier:
            seen |= frontier
            nxt = 0
            mm = frontier
            while mm:
                low = mm & (~mm + 1)
                u = _popcount(low - 1)
                nxt |= out_masks[u]
                mm ^= low
            frontier = nxt & ~seen
        if seen == full:
            count += 1
            if count >= at_least:
                return count
    return count


def failing_reduction(int n, in_masks, int f, int min_source_size, long long budget):
    """Search minimal reductions for a source-component violation
    (see the pure twin for the full contract)."""
    cdef u64 masks[64]
    cdef int fidx[64]
    cdef int survivors[64]
    cdef int nbrs[64]
    cdef u64 kept_in[64]
    cdef int opt_pos[64]
    cdef int i, j, v, k, m, w, deg, pos, kmax
    cdef u64 f_mask, base, drop, mm, low
    cdef long long examined = 0
    cdef int cidx[64]
    # Per-survivor option tables: opts[off[i] + t] is the t-th kept-mask.
    cdef u64* opts = NULL
    cdef int off[65]
    cdef int cnt[64]
    cdef int total_opts, failed

    for i in range(n):
        masks[i] = in_masks[i]
    kmax = f
    if kmax > n - 1:
        kmax = n - 1

    for k in range(kmax + 1):
        _first_combination(fidx, k)
        while True:
            f_mask = 0
            for i in range(k):
                f_mask |= (<u64>1) << fidx[i]
            m = 0
            for v in range(n):
                if not (f_mask >> v) & 1:
                    survivors[m] = v
                    m += 1
            # Build per-node kept-mask options (removal subsets of size
            # min(f, deg), lexicographic).
            total_opts = 0
            off[0] = 0
            for i in range(m):
                base = masks[survivors[i]] & ~f_mask
                deg = _popcount(base)
                w = f if f < deg else deg
                cnt[i] = _comb(deg, w)
                total_opts += cnt[i]
                off[i + 1] = total_opts
            opts = <u64*> malloc(total_opts * sizeof(u64))
            if opts == NULL:
                raise MemoryError()
            try:
                for i in range(m):
                    base = masks[survivors[i]] & ~f_mask
                    deg = 0
                    mm = base
                    while mm:
                        low = mm & (~mm + 1)
                        nbrs[deg] = _popcount(low - 1)
                        deg += 1
                        mm ^= low
                    w = f if f < deg else deg
                    _first_combination(cidx, w)
                    j = 0
                    while True:
                        drop = 0
                        for pos in range(w):
                            drop |= (<u64>1) << nbrs[cidx[pos]]
                        opts[off[i] + j] = base & ~drop
                        j += 1
                        if w == 0 or not _next_combination(cidx, w, deg):
                            break
                # Odometer over option indices, last survivor fastest.
                for i in range(m):
                    opt_pos[i] = 0
                    kept_in[i] = opts[off[i]]
                while True:
                    examined += 1
                    if examined > budget:
                        return (BUDGET_EXCEEDED, int(examined), None)
                    failed = _root_count_ge(m, survivors, kept_in, min_source_size) < min_source_size
                    if failed:
                        witness = {}
                        for i in range(m):
                            witness[survivors[i]] = int(kept_in[i])
                        return (FAIL, int(examined), (int(f_mask), witness))
                    pos = m - 1
                    while pos >= 0 and opt_pos[pos] == cnt[pos] - 1:
                        opt_pos[pos] = 0
                        kept_in[pos] = opts[off[pos]]
                        pos -= 1
                    if pos < 0:
                        break
                    opt_pos[pos] += 1
                    kept_in[pos] = opts[off[pos] + opt_pos[pos]]
            finally:
                free(opts)
                opts = NULL
            if k == 0 or not _next_combination(fidx, k, n):
                break
    return (PASS, int(examined), None)


cdef int _comb(int d, int w):
    cdef long long num = 1
    cdef int i
    for i in range(w):
        num = num * (d - i) // (i + 1)
    return <int>num
