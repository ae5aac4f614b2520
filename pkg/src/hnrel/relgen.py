"""Chern classes of -pi_!(Vhat^* (x) V) by Grothendieck-Riemann-Roch.

The universal bundle of rank n and degree d has
c_r = a_r (x) 1 + sum_j b_r^j (x) alpha_j + f_r (x) omega with f_1 = d.
Generator names carry a prefix p: a{p}_r, b{p}_r_j, f{p}_r.
"""

from functools import lru_cache
from math import factorial
from typing import NamedTuple

from .exactalg import Ring, TSeries, sum_of_products
from .kunneth import (
    SigmaClass,
    assemble_universal_chern,
    character_to_chern,
    chern_to_character,
    dual_character,
)


class BundleData(NamedTuple):
    n: int
    d: int
    g: int
    prefix: str = ""
    trivial: bool = False

    def check(self):
        if self.n < 1:
            raise ValueError("rank must be positive")
        if self.g < 2:
            raise ValueError("genus must be at least 2")
        if self.trivial and (self.n != 1 or self.d != 0):
            raise ValueError("the trivial bundle has rank 1 and degree 0")
        return self


def trivial_line(g, prefix="h"):
    return BundleData(1, 0, g, prefix, True)


def gen_names(b):
    """[(name, degree)] for the generators of one bundle, in ring order."""
    if b.trivial:
        return []
    p = b.prefix
    out = []
    for r in range(1, b.n + 1):
        out.append((f"a{p}_{r}", 2 * r))
        for j in range(1, 2 * b.g + 1):
            out.append((f"b{p}_{r}_{j}", 2 * r - 1))
        if r >= 2:
            out.append((f"f{p}_{r}", 2 * r - 2))
    return out


@lru_cache(maxsize=64)
def _ring(gens, cap):
    return Ring(list(gens), cap)


def build_ring(bundles, degree_cap, extra=()):
    """One ring holding the generators of every bundle, in the order given."""
    gens = []
    for b in bundles:
        gens += gen_names(b.check())
    gens += list(extra)
    return _ring(tuple(gens), degree_cap)


def universal_chern(ring, b):
    """[c_1, .., c_n] as SigmaClass values."""
    g, p = b.g, b.prefix
    if b.trivial:
        return []
    a = [ring.gen(f"a{p}_{r}") for r in range(1, b.n + 1)]
    bb = [[ring.gen(f"b{p}_{r}_{j}") for j in range(1, 2 * g + 1)] for r in range(1, b.n + 1)]
    f = [ring.scalar(b.d)] + [ring.gen(f"f{p}_{r}") for r in range(2, b.n + 1)]
    return assemble_universal_chern(a, bb, f, b.n, g)


def full_character(chern, rank, g, ring, k_max):
    """[ch_0, ch_1, .., ch_kmax] as SigmaClass values, ch_0 = rank."""
    one = SigmaClass.scalar(ring, g, 1)
    if not chern:
        return [one.scale(rank)] + [SigmaClass(g, ring.zero())] * k_max
    return [one.scale(rank)] + chern_to_character(chern, k_max)


def twist_character(ch, delta):
    """Character of E (x) L with c_1(L) = delta * omega: ch_k + delta omega ch_{k-1}."""
    if not delta:
        return ch
    out = [ch[0]]
    for prev, x in zip(ch, ch[1:]):
        out.append(SigmaClass(x.g, x.unit, x.alpha, x.omega + prev.unit.scale(delta)))
    return out


def grr_characters(ch_hat_dual, ch_main, g, t_cap):
    """ch_1..ch_tcap of -pi_!(E) for E with character ch_hat_dual * ch_main.

    ch(-pi_! E)_k = (g-1) sum_{i+j=k} unit parts - sum_{i+j=k+1} omega(ch_i ch_j),
    using Td = 1 - (g-1) omega.  Both lists run from ch_0 to ch_{t_cap+1}.
    """
    ring = ch_main[0].ring
    out = []
    for k in range(1, t_cap + 1):
        triples = []
        for i in range(0, k + 1):
            triples.append((ch_hat_dual[i].unit, ch_main[k - i].unit, g - 1))
        for i in range(0, k + 2):
            x, y = ch_hat_dual[i], ch_main[k + 1 - i]
            triples.append((x.unit, y.omega, -1))
            triples.append((x.omega, y.unit, -1))
            for s in range(g):
                triples.append((x.alpha[s], y.alpha[s + g].parity_twist(), -1))
                triples.append((x.alpha[s + g], y.alpha[s].parity_twist(), 1))
        out.append(sum_of_products(triples, ring))
    return out


def virtual_rank(n, d, nh, dh, g):
    """n nh (g-1) - d nh + dh n, for dh/nh > d/n."""
    if dh * n <= d * nh:
        raise ValueError("need dhat/nhat > d/n")
    return n * nh * (g - 1) - d * nh + dh * n


def relation_window(n, d, nh, dh, g):
    """Open window of Chern degrees r carrying relations: a range."""
    if not 0 < nh < n:
        raise ValueError("need 0 < nhat < n")
    if not (dh * n > d * nh and dh * n < (d + n) * nh):
        raise ValueError("need d/n < dhat/nhat < d/n + 1")
    lo = n * nh * (g - 1) - d * nh + dh * n
    hi = n * nh * (g + 1) - d * nh + dh * n
    return range(lo + 1, hi)


def _check_caps(ring, t_cap):
    if ring.degree_cap < 2 * t_cap:
        raise ValueError(f"degree cap {ring.degree_cap} cannot determine c_r up to r={t_cap}; need {2 * t_cap}")


def _rank_of(main, hat, delta=0):
    return main.n * hat.n * (main.g - 1) - main.d * hat.n + (hat.d + hat.n * delta) * main.n


def _characters(main, hat, t_cap, ring, delta=0):
    g = main.g
    if hat.g != g:
        raise ValueError("genus mismatch")
    chm = full_character(universal_chern(ring, main), main.n, g, ring, t_cap + 1)
    chh = full_character(universal_chern(ring, hat), hat.n, g, ring, t_cap + 1)
    chh = [chh[0]] + dual_character(chh[1:])
    # dual of Vhat (x) L is Vhat^* (x) L^{-1}
    chh = twist_character(chh, -delta)
    return grr_characters(chh, chm, g, t_cap)


def grr_minus_pi(main, hat, t_cap, ring=None, delta=0):
    """c(-pi_!(Vhat^* (x) V))(t) up to t^t_cap.

    With delta != 0 the hat bundle is replaced by Vhat (x) L, deg L = delta.
    """
    if ring is None:
        ring = build_ring([main, hat], 2 * t_cap)
    _check_caps(ring, t_cap)
    chs = _characters(main, hat, t_cap, ring, delta)
    return character_to_chern(chs, _rank_of(main, hat, delta), t_cap) if chs else TSeries.one(ring, t_cap)


def omega_poly(main, hat, ring=None):
    """Chern polynomial of Vhat^* (x) V restricted to a point of the surface."""
    m = main.n * hat.n
    if ring is None:
        ring = build_ring([main, hat], 2 * m)
    g = main.g
    chm = full_character(universal_chern(ring, main), main.n, g, ring, m)
    chh = full_character(universal_chern(ring, hat), hat.n, g, ring, m)
    chh = [chh[0]] + dual_character(chh[1:])
    chs = []
    for k in range(1, m + 1):
        chs.append(sum_of_products([(chh[i].unit, chm[k - i].unit, 1) for i in range(k + 1)], ring))
    return character_to_chern(chs, m, m)


def log_derivative(main, hat, t_cap, ring=None):
    """(log c)'(t) up to t^t_cap straight from the characters.

    log c(t) = sum_k (-1)^{k-1} (k-1)! ch_k t^k, so the t^{k-1} coefficient
    of the derivative is (-1)^{k-1} k! ch_k.
    """
    if ring is None:
        ring = build_ring([main, hat], 2 * (t_cap + 1))
    chs = _characters(main, hat, t_cap + 1, ring)
    coeffs = [x.scale((-1) ** (k - 1) * factorial(k)) for k, x in enumerate(chs, 1)]
    return TSeries(ring, coeffs, t_cap)


def recurrence_residual(main, hat, t_cap, route="log"):
    """Coefficients of t^r, 2 n nhat <= r <= t_cap, of Omega^2 c'/c.

    route="log" takes c'/c from the characters; route="direct" forms
    c' * c^{-1} from the Chern series.  Returns {r: element}, all of which
    vanish when the recurrence holds.
    """
    ring = build_ring([main, hat], 2 * (t_cap + 1))
    om = omega_poly(main, hat, ring).with_t_cap(t_cap)
    if route == "log":
        lc = log_derivative(main, hat, t_cap, ring)
    elif route == "direct":
        c = grr_minus_pi(main, hat, t_cap + 1, ring)
        lc = (c.ddt() * c.reciprocal()).with_t_cap(t_cap)
    else:
        raise ValueError(f"unknown route {route!r}")
    r_series = om * om * lc
    start = 2 * main.n * hat.n
    return {r: r_series.coeff(r) for r in range(start, t_cap + 1)}


def recurrence_q(main, hat, t_cap=None):
    """The polynomial Q(t) = Omega^2 c'/c truncated below degree 2 n nhat."""
    m = 2 * main.n * hat.n - 1
    cap = m if t_cap is None else t_cap
    ring = build_ring([main, hat], 2 * (cap + 1))
    om = omega_poly(main, hat, ring).with_t_cap(cap)
    lc = log_derivative(main, hat, cap, ring)
    return (om * om * lc).truncate(m)


def shift_identity_check(main, hat, delta, t_cap):
    """c(-pi_!((Vhat (x) L)^* (x) V)) == c(-pi_!(Vhat^* (x) V)) * Omega^delta."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    ring = build_ring([main, hat], 2 * t_cap)
    left = grr_minus_pi(main, hat, t_cap, ring, delta)
    right = grr_minus_pi(main, hat, t_cap, ring) * omega_poly(main, hat, ring).with_t_cap(t_cap) ** delta
    return left == right


def kunneth_components(c, r, main):
    """Split c_r into {hat exponent tuple: main-ring element}.

    The ring lists the main generators first, so each canonical monomial
    is (main part)(hat part).  Keys are exponent tuples over the non-main
    generators, in ring order.
    """
    if r > c.t_cap:
        raise ValueError(f"r={r} beyond t_cap={c.t_cap}")
    ring = c.ring
    names = [nm for nm, _ in gen_names(main)]
    if ring.names[: len(names)] != names:
        raise ValueError("ring does not start with the main generators")
    m = len(names)
    mring = _ring(tuple(gen_names(main)), ring.degree_cap)
    x = c.coeff(r)
    table = {}
    for exps, coeff in x.items():
        table.setdefault(exps[m:], {})[exps[:m]] = coeff
    return {h: mring.from_exponents(t) for h, t in sorted(table.items())}


def hat_monomial(ring, hexps, main):
    """The hat monomial with exponents ``hexps`` as an element of ``ring``."""
    m = len(gen_names(main))
    return ring.from_exponents({(0,) * m + tuple(hexps): 1})


def normalization_coeffs(n, d, g):
    """(u, v) with u n + v (d - n(g-1)) = 1, |u| minimal.

    Ties go to the smaller |u| then positive v.  For n = 1 the pair is (1, 0).
    """
    chi = d - n * (g - 1)
    if n == 1:
        return 1, 0
    from math import gcd

    if gcd(n, chi) != 1:
        raise ValueError("n and d - n(g-1) must be coprime")
    if chi == 0:
        raise ValueError("n and d - n(g-1) must be coprime")
    # u n = 1 mod |chi|
    m = abs(chi)
    u0 = pow(n, -1, m) if m > 1 else 0
    best = None
    for u in (u0, u0 - m):
        if (1 - u * n) % chi:
            continue
        v = (1 - u * n) // chi
        cand = (abs(u), 0 if v > 0 else 1, u, v)
        if best is None or cand < best:
            best = cand
    return best[2], best[3]


def normalization_relation(main):
    """u a_1 + v c_1(pi_! V), which vanishes after normalization."""
    n, d, g = main.n, main.d, main.g
    u, v = normalization_coeffs(n, d, g)
    ring = build_ring([main], 2)
    g_ = main.g
    chm = full_character(universal_chern(ring, main), n, g_, ring, 2)
    # ch_1(pi_! V) = pi_*(ch(V) (1 - (g-1) omega)) in degree 2
    c1 = chm[2].omega + chm[1].unit.scale(-(g - 1))
    return ring.gen(f"a{main.prefix}_1").scale(u) + c1.scale(v)


def euler_class(nh, dh, n2, d2, g, t_cap=None):
    """Top Chern class of -pi_!(V1^* (x) V2) between two bundle families.

    The first family has rank nh, degree dh (prefix h1), the second rank n2,
    degree d2 (prefix h2).  The class sits in degree 2N with
    N = nh n2 (g-1) - d2 nh + dh n2.
    """
    if dh * n2 <= d2 * nh:
        raise ValueError("need dh/nh > d2/n2")
    b1 = BundleData(nh, dh, g, "h1")
    b2 = BundleData(n2, d2, g, "h2")
    top = virtual_rank(n2, d2, nh, dh, g)
    cap = top if t_cap is None else t_cap
    ring = build_ring([b2, b1], 2 * cap)
    c = grr_minus_pi(b2, b1, top, ring)
    return c.coeff(top)


def relation_records(n, d, nh, dh, g, rs=None):
    """[(r, {hat exponent tuple: main element})] for r in the window (or rs)."""
    main = BundleData(n, d, g)
    hat = BundleData(nh, dh, g, "h")
    rs = list(relation_window(n, d, nh, dh, g)) if rs is None else list(rs)
    top = max(rs)
    ring = build_ring([main, hat], 2 * top)
    c = grr_minus_pi(main, hat, top, ring)
    return ring, [(r, kunneth_components(c, r, main)) for r in rs]

