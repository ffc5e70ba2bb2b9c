"""Pure-Python residue kernels.

These mirror the compiled kernels in ``_ckernels.pyx`` call for call and are
used whenever the extension is unavailable.  Vectors of ``(Z/M)^n`` are
indexed lexicographically with the first coordinate most significant.
"""

from __future__ import annotations


def _decode(index: int, n: int, M: int) -> list[int]:
    digits = [0] * n
    for i in range(n - 1, -1, -1):
        index, digits[i] = divmod(index, M)
    return digits


def _compile(exps, coeffs, M):
    return [([(i, x) for i, x in enumerate(e) if x], c % M) for e, c in zip(exps, coeffs)]


def _eval(terms, pw, M):
    acc = 0
    for pairs, c in terms:
        t = c
        for i, x in pairs:
            t = t * pw[i][x] % M
        acc += t
    return acc % M


def scan_zeros(forms, n, p, k, start, stop, max_hits):
    """Indices in [start, stop) of primitive vectors where every form vanishes mod p**k.

    Returns ``(hits, next_index)``; scanning stops early once ``max_hits``
    hits are collected and ``next_index`` says where to resume.
    """
    M = p**k
    compiled = [_compile(e, c, M) for e, c in forms]
    dmax = max((sum(e[0]) for e, _ in forms if e), default=0)
    hits = []
    if start >= stop:
        return hits, stop
    digits = _decode(start, n, M)
    pw = [[pow(x, e, M) for e in range(dmax + 1)] for x in digits]
    index = start
    while index < stop:
        if any(x % p for x in digits):
            if all(_eval(t, pw, M) == 0 for t in compiled):
                hits.append(index)
                if len(hits) >= max_hits:
                    return hits, index + 1
        index += 1
        i = n - 1
        while i >= 0:
            digits[i] += 1
            if digits[i] < M:
                pw[i] = [pow(digits[i], e, M) for e in range(dmax + 1)]
                break
            digits[i] = 0
            pw[i] = [1] + [0] * dmax
            i -= 1
    return hits, stop


def residue_tables(exps, coeffs, n, p, k):
    """For each residue r mod p**k, the least index of a primitive vector
    (resp. a vector divisible by p) at which the form takes the value r;
    -1 when no such vector exists."""
    M = p**k
    terms = _compile(exps, coeffs, M)
    dmax = max((sum(e) for e in exps), default=0)
    first_prim = [-1] * M
    first_nonprim = [-1] * M
    digits = [0] * n
    pw = [[1] + [0] * dmax for _ in range(n)]
    total = M**n
    for index in range(total):
        r = _eval(terms, pw, M)
        table = first_prim if any(x % p for x in digits) else first_nonprim
        if table[r] < 0:
            table[r] = index
        i = n - 1
        while i >= 0:
            digits[i] += 1
            if digits[i] < M:
                pw[i] = [pow(digits[i], e, M) for e in range(dmax + 1)]
                break
            digits[i] = 0
            pw[i] = [1] + [0] * dmax
            i -= 1
    return first_prim, first_nonprim


def poly_roots_mod(coeffs, p, k, residue=-1):
    """All t in [0, p**k) with sum(c_j t**j) = 0 mod p**k, optionally t = residue mod p."""
    M = p**k
    cs = [c % M for c in coeffs]
    if residue >= 0:
        candidates = range(residue % p, M, p)
    else:
        candidates = range(M)
    roots = []
    for t in candidates:
        acc = 0
        for c in reversed(cs):
            acc = (acc * t + c) % M
        if acc == 0:
            roots.append(t)
    return roots
