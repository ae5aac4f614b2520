"""Harder-Narasimhan types: enumeration, orders, codimensions, polygons.

Types are stored as integer pairs (n_i, d_i); slopes are never stored as
rationals, comparisons use cross-multiplication.
"""

from fractions import Fraction
from typing import NamedTuple


class HNType(NamedTuple):
    blocks: tuple  # ((n_1, d_1), ..., (n_s, d_s))
    n: int
    d: int

    @classmethod
    def make(cls, blocks, n=None, d=None):
        blocks = tuple((int(a), int(b)) for a, b in blocks)
        if not blocks:
            raise ValueError("a type needs at least one block")
        sn = sum(a for a, _ in blocks)
        sd = sum(b for _, b in blocks)
        n = sn if n is None else n
        d = sd if d is None else d
        if sn != n or sd != d:
            raise ValueError("blocks do not add up to (n, d)")
        for a, _ in blocks:
            if a <= 0:
                raise ValueError("block ranks must be positive")
        for (n1, d1), (n2, d2) in zip(blocks, blocks[1:]):
            if d1 * n2 <= d2 * n1:
                raise ValueError("slopes must be strictly decreasing")
        return cls(blocks, n, d)

    @classmethod
    def semistable(cls, n, d):
        return cls(((n, d),), n, d)

    def is_semistable(self):
        return len(self.blocks) == 1

    def slope_vector(self):
        """Length-n vector of slopes, block slope repeated n_i times."""
        out = []
        for a, b in self.blocks:
            out += [Fraction(b, a)] * a
        return out


class CoarseType(NamedTuple):
    n1: int
    d1: int
    n: int
    d: int


def codim_mu(mu, g):
    """d_mu = sum_{i>j} (n_i d_j - n_j d_i + n_i n_j (g-1))."""
    b = mu.blocks
    total = 0
    for i in range(len(b)):
        for j in range(i):
            ni, di = b[i]
            nj, dj = b[j]
            total += ni * dj - nj * di + ni * nj * (g - 1)
    return total


def coarse_codim(ct, g):
    """delta_{n1,d1} = n d1 - n1 d + n1 (n - n1)(g-1)."""
    n1, d1, n, d = ct
    if not 0 < n1 < n:
        raise ValueError("coarse type needs 0 < n1 < n")
    return n * d1 - n1 * d + n1 * (n - n1) * (g - 1)


def telescoped_codim(mu, g):
    """Sum of successive coarse codimensions along the filtration."""
    n, d = mu.n, mu.d
    total = 0
    for n1, d1 in mu.blocks[:-1]:
        total += coarse_codim(CoarseType(n1, d1, n, d), g)
        n, d = n - n1, d - d1
    return total


def _d1_range(n1, n, d, g, cap, upper_slope):
    """Degrees d1 with d1/n1 > d/n, d1/n1 < upper slope and delta <= cap."""
    # delta = n d1 - n1 d + n1(n-n1)(g-1) <= cap
    hi = (cap + n1 * d - n1 * (n - n1) * (g - 1)) // n
    lo = (n1 * d) // n + 1 if (n1 * d) % n == 0 else -((-n1 * d) // n)
    # strict: d1 * n > n1 * d
    while lo * n <= n1 * d:
        lo += 1
    while (lo - 1) * n > n1 * d:
        lo -= 1
    out = []
    for d1 in range(lo, hi + 1):
        if upper_slope is not None:
            un, ud = upper_slope
            if d1 * un >= ud * n1:
                continue
        out.append(d1)
    return out


def enumerate_hn_types(n, d, g, codim_cap):
    """All HN types of (n, d) with d_mu <= codim_cap, semistable type first.

    The first block (n1, d1) is bounded through delta_{n1,d1} <= cap (each
    later coarse step only adds a nonnegative amount), then the tail is
    enumerated recursively with the remaining budget.
    """
    if codim_cap < 0:
        raise ValueError("codim_cap must be nonnegative")
    if g < 2:
        raise ValueError("genus must be at least 2")
    out = []

    def rec(prefix, rn, rd, budget, upper):
        # close with a single semistable block
        if upper is None or rd * upper[0] < upper[1] * rn:
            out.append(prefix + ((rn, rd),))
        for n1 in range(1, rn):
            for d1 in _d1_range(n1, rn, rd, g, budget, upper):
                step = coarse_codim(CoarseType(n1, d1, rn, rd), g)
                if step <= budget:
                    rec(prefix + ((n1, d1),), rn - n1, rd - d1, budget - step, (n1, d1))

    rec((), n, d, codim_cap, None)
    types = [HNType.make(b, n, d) for b in out]
    types = [mu for mu in types if codim_mu(mu, g) <= codim_cap]
    types.sort(key=lambda mu: (codim_mu(mu, g), mu.blocks))
    return types


def _partial_sums(mu):
    out = []
    s = Fraction(0)
    for x in mu.slope_vector():
        s += x
        out.append(s)
    return out


def type_orders(mu, nu):
    """Compare two types of the same (n, d).

    Returns {"leq_partial": True | False | "incomparable", "prec_total": bool}.
    leq_partial says mu <= nu (partial sums of mu's slope vector bounded by nu's);
    prec_total is the lexicographic order on slope vectors, which extends it.
    """
    if (mu.n, mu.d) != (nu.n, nu.d):
        raise ValueError("types have different (n, d)")
    pm, pn = _partial_sums(mu), _partial_sums(nu)
    le = all(a <= b for a, b in zip(pm, pn))
    ge = all(a >= b for a, b in zip(pm, pn))
    if le:
        leq = True
    elif ge:
        leq = False
    else:
        leq = "incomparable"
    prec = mu.slope_vector() <= nu.slope_vector()
    return {"leq_partial": leq, "prec_total": prec}


def polygon(mu):
    """Vertices of the HN polygon: cumulative (rank, degree)."""
    pts = [(0, 0)]
    a = b = 0
    for ni, di in mu.blocks:
        a += ni
        b += di
        pts.append((a, b))
    return pts


def polygon_value(mu, x):
    """Height of the HN polygon at abscissa x (piecewise linear)."""
    pts = polygon(mu)
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if x0 <= x <= x1:
            return Fraction(y0) + Fraction(y1 - y0, x1 - x0) * (x - x0)
    raise ValueError("abscissa outside [0, n]")


def type_to_json(mu, g):
    return {
        "blocks": [list(b) for b in mu.blocks],
        "codim": codim_mu(mu, g),
        "polygon": [list(p) for p in polygon(mu)],
    }
