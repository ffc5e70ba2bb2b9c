# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled residue kernels; same contract as ``_pykernels``."""

from libc.stdlib cimport malloc, free

ctypedef unsigned long long u64
ctypedef long long i64


cdef struct Term:
    int nfac
    int fac_start
    u64 coeff


cdef struct Program:
    int nforms
    int *form_start      # nforms + 1 offsets into terms
    Term *terms
    int *fac_var
    int *fac_pow
    int dmax


cdef int _build(list forms, u64 M, Program *prog) except -1:
    cdef int nterms = 0, nfac = 0, f, t, i
    for exps, coeffs in forms:
        nterms += len(exps)
        for e in exps:
            for x in e:
                if x:
                    nfac += 1
    prog.nforms = len(forms)
    prog.form_start = <int *> malloc((prog.nforms + 1) * sizeof(int))
    prog.terms = <Term *> malloc((nterms + 1) * sizeof(Term))
    prog.fac_var = <int *> malloc((nfac + 1) * sizeof(int))
    prog.fac_pow = <int *> malloc((nfac + 1) * sizeof(int))
    if not prog.form_start or not prog.terms or not prog.fac_var or not prog.fac_pow:
        raise MemoryError()
    prog.dmax = 0
    t = 0
    cdef int k = 0
    cdef int deg
    for f, (exps, coeffs) in enumerate(forms):
        prog.form_start[f] = t
        for e, c in zip(exps, coeffs):
            prog.terms[t].fac_start = k
            prog.terms[t].coeff = (c % M)
            deg = 0
            for i, x in enumerate(e):
                if x:
                    prog.fac_var[k] = i
                    prog.fac_pow[k] = x
                    k += 1
                    deg += x
            prog.terms[t].nfac = k - prog.terms[t].fac_start
            if deg > prog.dmax:
                prog.dmax = deg
            t += 1
    prog.form_start[prog.nforms] = t
    return 0


cdef void _release(Program *prog):
    free(prog.form_start)
    free(prog.terms)
    free(prog.fac_var)
    free(prog.fac_pow)


cdef inline void _fill_powers(u64 *row, u64 x, int dmax, u64 M) nogil:
    cdef int e
    row[0] = 1 % M
    for e in range(1, dmax + 1):
        row[e] = (row[e - 1] * x) % M


cdef inline u64 _eval_form(Program *prog, int f, u64 *pw, int stride, u64 M) nogil:
    cdef u64 acc = 0, v
    cdef int t, j, k
    for t in range(prog.form_start[f], prog.form_start[f + 1]):
        v = prog.terms[t].coeff
        k = prog.terms[t].fac_start
        for j in range(prog.terms[t].nfac):
            v = (v * pw[prog.fac_var[k + j] * stride + prog.fac_pow[k + j]]) % M
        acc += v
        if acc >= M:
            acc -= M
    return acc


cdef i64 _scan(Program *prog, int n, u64 p, u64 M, i64 start, i64 stop,
               i64 *hits, i64 max_hits, i64 *nhits) nogil:
    cdef u64 *digits = <u64 *> malloc(n * sizeof(u64))
    cdef int stride = prog.dmax + 1
    cdef u64 *pw = <u64 *> malloc(n * stride * sizeof(u64))
    cdef i64 index = start, rem
    cdef int i, f, units = 0, ok
    nhits[0] = 0
    rem = start
    for i in range(n - 1, -1, -1):
        digits[i] = rem % M
        rem = rem // M
    for i in range(n):
        _fill_powers(pw + i * stride, digits[i], prog.dmax, M)
        if digits[i] % p:
            units += 1
    while index < stop:
        if units:
            ok = 1
            for f in range(prog.nforms):
                if _eval_form(prog, f, pw, stride, M) != 0:
                    ok = 0
                    break
            if ok:
                hits[nhits[0]] = index
                nhits[0] += 1
                if nhits[0] >= max_hits:
                    index += 1
                    break
        index += 1
        i = n - 1
        while i >= 0:
            if digits[i] % p:
                units -= 1
            digits[i] += 1
            if digits[i] < M:
                if digits[i] % p:
                    units += 1
                _fill_powers(pw + i * stride, digits[i], prog.dmax, M)
                break
            digits[i] = 0
            _fill_powers(pw + i * stride, 0, prog.dmax, M)
            i -= 1
    free(digits)
    free(pw)
    return index


def scan_zeros(forms, int n, int p, int k, i64 start, i64 stop, i64 max_hits):
    cdef u64 M = (<u64> p) ** k
    if M >= (<u64> 1) << 32:
        raise OverflowError("modulus too large for the compiled kernel")
    if start >= stop:
        return [], stop
    cdef Program prog
    _build(list(forms), M, &prog)
    cdef i64 *hits = <i64 *> malloc((max_hits + 1) * sizeof(i64))
    cdef i64 nhits = 0, nxt
    try:
        with nogil:
            nxt = _scan(&prog, n, p, M, start, stop, hits, max_hits, &nhits)
        out = [hits[i] for i in range(nhits)]
    finally:
        free(hits)
        _release(&prog)
    if nhits < max_hits:
        nxt = stop
    return out, nxt


def residue_tables(exps, coeffs, int n, int p, int k):
    cdef u64 M = (<u64> p) ** k
    if M >= (<u64> 1) << 32:
        raise OverflowError("modulus too large for the compiled kernel")
    cdef Program prog
    _build([(list(exps), list(coeffs))], M, &prog)
    cdef int stride = prog.dmax + 1
    cdef u64 *digits = <u64 *> malloc(n * sizeof(u64))
    cdef u64 *pw = <u64 *> malloc(n * stride * sizeof(u64))
    cdef i64 *fp = <i64 *> malloc(M * sizeof(i64))
    cdef i64 *fn = <i64 *> malloc(M * sizeof(i64))
    cdef i64 index, total = 1
    cdef int i, units = 0
    cdef u64 r
    for i in range(n):
        total *= M
    try:
        with nogil:
            for r in range(M):
                fp[r] = -1
                fn[r] = -1
            for i in range(n):
                digits[i] = 0
                _fill_powers(pw + i * stride, 0, prog.dmax, M)
            for index in range(total):
                r = _eval_form(&prog, 0, pw, stride, M)
                if units:
                    if fp[r] < 0:
                        fp[r] = index
                elif fn[r] < 0:
                    fn[r] = index
                i = n - 1
                while i >= 0:
                    if digits[i] % p:
                        units -= 1
                    digits[i] += 1
                    if digits[i] < M:
                        if digits[i] % p:
                            units += 1
                        _fill_powers(pw + i * stride, digits[i], prog.dmax, M)
                        break
                    digits[i] = 0
                    _fill_powers(pw + i * stride, 0, prog.dmax, M)
                    i -= 1
        first_prim = [fp[r] for r in range(M)]
        first_nonprim = [fn[r] for r in range(M)]
    finally:
        free(digits)
        free(pw)
        free(fp)
        free(fn)
        _release(&prog)
    return first_prim, first_nonprim


def poly_roots_mod(coeffs, int p, int k, int residue=-1):
    cdef u64 M = (<u64> p) ** k
    if M >= (<u64> 1) << 32:
        raise OverflowError("modulus too large for the compiled kernel")
    cdef int m = len(coeffs)
    cdef u64 *cs = <u64 *> malloc((m + 1) * sizeof(u64))
    cdef u64 t, acc, step = 1, t0 = 0
    cdef int j
    for j in range(m):
        cs[j] = coeffs[j] % M
    if residue >= 0:
        step = p
        t0 = residue % p
    roots = []
    try:
        t = t0
        while t < M:
            acc = 0
            for j in range(m - 1, -1, -1):
                acc = (acc * t + cs[j]) % M
            if acc == 0:
                roots.append(t)
            t += step
    finally:
        free(cs)
    return roots
