# cython: language_level=3
"""Compiled twin of _rowred_py: exact sparse integer row reduction.

Same algorithm, same pivot rule, bit-identical output; entries are Python
ints (arbitrary precision), so the speedup comes from loop and dict overhead.
"""

from math import gcd

BACKEND = "cython"


cdef dict _normalize(dict row):
    cdef object g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        for c in row:
            row[c] //= g
    return row


cdef dict _eliminate(dict row, dict prow, Py_ssize_t col, object p):
    cdef dict out = {}
    cdef object f = row[col]
    cdef object nv
    for c, v in row.items():
        if c != col:
            out[c] = p * v
    for c, v in prow.items():
        if c == col:
            continue
        nv = out.get(c, 0) - f * v
        if nv:
            out[c] = nv
        elif c in out:
            del out[c]
    return _normalize(out)


def rref_sparse(rows, Py_ssize_t ncols):
    """See _rowred_py.rref_sparse; identical contract."""
    cdef list work = []
    cdef dict nr, prow, row
    cdef Py_ssize_t col, i, best, n
    cdef Py_ssize_t best_len
    for r in rows:
        nr = _normalize({c: v for c, v in (<dict>r).items() if v != 0})
        if nr:
            work.append(nr)
    cdef list reduced = []
    cdef list pivots = []
    cdef list others
    cdef object p
    for col in range(ncols):
        best = -1
        best_len = -1
        for i in range(len(work)):
            row = <dict>work[i]
            if col in row:
                n = len(row)
                if best < 0 or n < best_len:
                    best = i
                    best_len = n
        if best < 0:
            continue
        prow = <dict>work.pop(best)
        p = prow[col]
        if p < 0:
            prow = {c: -v for c, v in prow.items()}
            p = -p
        others = []
        for r in work:
            row = <dict>r
            if col in row:
                others.append(_eliminate(row, prow, col, p))
            else:
                others.append(row)
        work = [r for r in others if r]
        for i in range(len(reduced)):
            row = <dict>reduced[i]
            if col in row:
                reduced[i] = _eliminate(row, prow, col, p)
        reduced.append(prow)
        pivots.append(col)
    return pivots, reduced
