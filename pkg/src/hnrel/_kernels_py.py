"""Pure-Python multiplication kernel for packed graded monomials.

A monomial key is a nonnegative int laid out as

    [ degree | even exponent fields | odd bits ]

with the odd generators in the lowest ``nodd`` bits.  Multiplying two
monomials whose odd parts are disjoint is integer addition of keys, up to
the Koszul sign obtained by sorting the odd letters back into canonical
order.  Coefficients are Python ints.
"""


def koszul_parity(xo, yo):
    # transpositions needed to move each odd letter of y left past the
    # letters of x with a larger index
    s = 0
    while yo:
        low = yo & -yo
        s += (xo >> low.bit_length()).bit_count()
        yo ^= low
    return s & 1


def _accumulate(out, x, y, factor, nodd, dshift, cap):
    oddm = (1 << nodd) - 1
    yb = {}
    for k, c in y.items():
        yb.setdefault(k >> dshift, []).append((k, c))
    yb = sorted(yb.items())
    get = out.get
    signs = {}
    for kx, cx in x.items():
        room = cap - (kx >> dshift)
        if room < 0:
            continue
        xo = kx & oddm
        cx *= factor
        mcx = -cx
        for dy, lst in yb:
            if dy > room:
                break
            for ky, cy in lst:
                yo = ky & oddm
                if xo & yo:
                    continue
                if xo and yo:
                    pair = (xo, yo)
                    par = signs.get(pair)
                    if par is None:
                        par = koszul_parity(xo, yo)
                        signs[pair] = par
                    v = (mcx if par else cx) * cy
                else:
                    v = cx * cy
                k = kx + ky
                out[k] = get(k, 0) + v


def mul_terms(x, y, nodd, dshift, cap):
    """Product of two term dicts, dropping monomials of degree > cap."""
    out = {}
    if x and y:
        _accumulate(out, x, y, 1, nodd, dshift, cap)
    return {k: v for k, v in out.items() if v}


def mul_sum(triples, nodd, dshift, cap):
    """sum of factor * x * y over (x, y, factor) triples of term dicts."""
    out = {}
    for x, y, f in triples:
        if x and y and f:
            _accumulate(out, x, y, f, nodd, dshift, cap)
    return {k: v for k, v in out.items() if v}
