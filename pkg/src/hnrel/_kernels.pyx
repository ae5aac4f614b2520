# distutils: language = c++
# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled multiplication kernel for packed graded monomials.

Same contract as ``_kernels_py.mul_terms``.  Keys below 2**63 and integer
coefficients whose products cannot overflow a 128-bit accumulator take the
C path; anything else is handed to the pure-Python kernel.
"""

from libc.stdint cimport uint64_t, int64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector
from libcpp.algorithm cimport sort
from libcpp.pair cimport pair

from . import _kernels_py

cdef extern from *:
    """
    typedef __int128 i128;
    static inline int popc(unsigned long long v) { return __builtin_popcountll(v); }
    static inline int ctz(unsigned long long v) { return __builtin_ctzll(v); }
    static inline long long i128_lo(i128 v) { return (long long)v; }
    static inline int i128_fits64(i128 v) { return v >= (i128)INT64_MIN && v <= (i128)INT64_MAX; }
    static inline unsigned long long i128_low_bits(i128 v) { return (unsigned long long)v; }
    static inline long long i128_high_bits(i128 v) { return (long long)(v >> 64); }
    """
    ctypedef long long i128
    int popc(unsigned long long v) nogil
    int ctz(unsigned long long v) nogil
    long long i128_lo(i128 v) nogil
    int i128_fits64(i128 v) nogil
    unsigned long long i128_low_bits(i128 v) nogil
    long long i128_high_bits(i128 v) nogil


cdef inline int koszul(uint64_t xo, uint64_t yo) nogil:
    cdef int s = 0
    cdef int j
    while yo:
        j = ctz(yo)
        s += popc(xo >> (j + 1)) if j < 63 else 0
        yo &= yo - 1
    return s & 1


def koszul_parity(xo, yo):
    return koszul(xo, yo)


cdef object _from_i128(i128 v):
    if i128_fits64(v):
        return i128_lo(v)
    return (int(i128_high_bits(v)) << 64) + int(i128_low_bits(v))


def _fits(dict d):
    cdef object mk = max(d)
    if mk.bit_length() > 63:
        return -1
    cdef object mc = max(map(abs, d.values()))
    cdef int b = mc.bit_length()
    if b > 62:
        return -1
    return b


cdef bint _pack(dict d, vector[pair[uint64_t, int64_t]]& out):
    out.reserve(len(d))
    for k, c in d.items():
        out.push_back(pair[uint64_t, int64_t](<uint64_t>k, <int64_t>c))
    return True


cdef void _run(vector[pair[uint64_t, int64_t]]& xs, vector[pair[uint64_t, int64_t]]& ys,
               int64_t factor, uint64_t oddm, int dshift, int cap,
               unordered_map[uint64_t, i128]& acc) nogil:
    cdef Py_ssize_t nx = xs.size(), ny = ys.size()
    sort(ys.begin(), ys.end())
    # start[d] = first index of y with degree >= d
    cdef vector[Py_ssize_t] start
    start.resize(cap + 2, ny)
    cdef Py_ssize_t i, j, jend
    cdef int dy, room
    for j in range(ny - 1, -1, -1):
        dy = <int>(ys[j].first >> dshift)
        if dy <= cap:
            start[dy] = j
    j = ny
    while j > 0 and <int>(ys[j - 1].first >> dshift) > cap:
        j -= 1
    start[cap + 1] = j
    for i in range(cap, -1, -1):
        if start[i] > start[i + 1]:
            start[i] = start[i + 1]
    cdef uint64_t kx, ky, xo, yo
    cdef i128 cx, v
    for i in range(nx):
        kx = xs[i].first
        room = cap - <int>(kx >> dshift)
        if room < 0:
            continue
        cx = <i128>xs[i].second * <i128>factor
        xo = kx & oddm
        jend = start[room + 1]
        for j in range(jend):
            ky = ys[j].first
            yo = ky & oddm
            if xo & yo:
                continue
            v = cx * <i128>ys[j].second
            if xo and yo and koszul(xo, yo):
                v = -v
            acc[kx + ky] += v


def mul_sum(list triples, int nodd, int dshift, int cap):
    """sum of factor * x * y over (x, y, factor) triples of term dicts."""
    triples = [(x, y, f) for x, y, f in triples if x and y and f]
    if not triples:
        return {}
    cdef int worst = 0
    cdef object count = 0
    cdef int bx, by, bf
    for x, y, f in triples:
        bx = _fits(x)
        by = _fits(y)
        bf = abs(f).bit_length()
        if bx < 0 or by < 0 or bf > 62:
            return _kernels_py.mul_sum(triples, nodd, dshift, cap)
        worst = max(worst, bx + by + bf)
        count += min(len(x), len(y))
    if worst + count.bit_length() > 125:
        return _kernels_py.mul_sum(triples, nodd, dshift, cap)

    cdef uint64_t oddm = (<uint64_t>1 << nodd) - 1 if nodd < 64 else <uint64_t>0xFFFFFFFFFFFFFFFF
    cdef unordered_map[uint64_t, i128] acc
    cdef vector[pair[uint64_t, int64_t]] xs, ys
    cdef int64_t fc
    for x, y, f in triples:
        xs.clear()
        ys.clear()
        # loop over the smaller operand on the outside
        _pack(x, xs)
        _pack(y, ys)
        fc = f
        with nogil:
            _run(xs, ys, fc, oddm, dshift, cap, acc)

    out = {}
    for kv in acc:
        if kv.second != 0:
            out[kv.first] = _from_i128(kv.second)
    return out


def mul_terms(dict x, dict y, int nodd, int dshift, int cap):
    if not x or not y:
        return {}
    return mul_sum([(x, y, 1)], nodd, dshift, cap)
