"""Torus restriction, split Chern polynomials and residue pairings.

The hat bundle is split into line bundles with first Chern classes
X_l + sum_s z_{s,l} alpha_s + dhat_l omega (generators x_l, z_s_l).  In the
pairing formulas X is restricted to the Lie algebra of the maximal torus of
SU(nhat), written in the simple-root coordinates Y_a = X_a - X_{a+1}
(generators y_a).
"""

import itertools
from fractions import Fraction
from math import comb, factorial
from typing import NamedTuple

from .exactalg import GradedElement, Ring, TSeries
from .kunneth import SigmaClass, character_to_chern
from .relgen import (
    BundleData,
    build_ring,
    full_character,
    gen_names,
    grr_characters,
    universal_chern,
)
from .kunneth import dual_character


# -- split ring -------------------------------------------------------------


def split_gen_names(nh, g, with_x=True, order=None):
    """[(name, degree)]: x_1..x_nh then the odd blocks z_s_l, block by block."""
    order = list(range(1, nh + 1)) if order is None else [l + 1 for l in order]
    out = [(f"x_{l}", 2) for l in range(1, nh + 1)] if with_x else []
    for l in order:
        for s in range(1, 2 * g + 1):
            out.append((f"z_{s}_{l}", 1))
    return out


class SplitHatRing(NamedTuple):
    nh: int
    g: int
    dhats: tuple
    ring: Ring

    @classmethod
    def make(cls, main, nh, dhats, degree_cap):
        dhats = tuple(int(x) for x in dhats)
        if len(dhats) != nh:
            raise ValueError("need one degree per block")
        ring = build_ring([main], degree_cap, split_gen_names(nh, main.g))
        return cls(nh, main.g, dhats, ring)

    def xs(self):
        return [self.ring.gen(f"x_{l}") for l in range(1, self.nh + 1)]

    def z(self, s, l):
        return self.ring.gen(f"z_{s}_{l}")


def elementary(xs, k, ring):
    """sigma_k of a list of ring elements."""
    if k < 0 or k > len(xs):
        return ring.zero()
    e = [ring.one()] + [ring.zero()] * k
    for x in xs:
        for j in range(k, 0, -1):
            e[j] = e[j] + e[j - 1] * x
    return e[k]


def _sigma_without(xs, skip, k, ring):
    return elementary([x for i, x in enumerate(xs) if i not in skip], k, ring)


def torus_restrict_hat(x, split, prefix="h", xs=None, zs=None):
    """Image of a hat-ring element under restriction to the split torus.

    a_r -> sigma_r(X), b_r^s -> sum_l z_{s,l} sigma_{r-1}(X_i : i != l), and
    f_r -> sum_l dhat_l sigma_{r-1}(i != l)
           - sum_{l<k} sum_{s<=g} (z_{s,l} z_{s+g,k} + z_{s,k} z_{s+g,l}) sigma_{r-2}(i != k,l).
    The overall minus sign on the odd pairs comes from alpha_s alpha_{s+g} = omega
    with coefficients written on the left.  Generators of ``x.ring`` without a
    hat prefix pass through unchanged.
    """
    src = x.ring
    tgt = split.ring
    nh, g = split.nh, split.g
    xs = split.xs() if xs is None else xs
    if zs is None:
        zs = {(s, l): split.z(s, l) for s in range(1, 2 * g + 1) for l in range(1, nh + 1)}
    images = {}
    for spec in src.gens:
        name = spec.name
        if name.startswith(f"a{prefix}_"):
            r = int(name.split("_")[1])
            images[name] = elementary(xs, r, tgt)
        elif name.startswith(f"b{prefix}_"):
            _, r, s = name.split("_")
            r, s = int(r), int(s)
            acc = tgt.zero()
            for l in range(1, nh + 1):
                acc = acc + zs[(s, l)] * _sigma_without(xs, {l - 1}, r - 1, tgt)
            images[name] = acc
        elif name.startswith(f"f{prefix}_"):
            r = int(name.split("_")[1])
            images[name] = restricted_f(r, split, xs, zs)
        elif name not in tgt.index:
            raise ValueError(f"unknown generator {name}")
    return _hom(src, images, tgt)(x)


def _hom(src, images, tgt):
    from .exactalg import Hom

    return Hom(src, images, tgt)


def restricted_f(r, split, xs=None, zs=None):
    tgt = split.ring
    nh, g = split.nh, split.g
    xs = split.xs() if xs is None else xs
    if zs is None:
        zs = {(s, l): split.z(s, l) for s in range(1, 2 * g + 1) for l in range(1, nh + 1)}
    acc = tgt.zero()
    for l in range(1, nh + 1):
        acc = acc + _sigma_without(xs, {l - 1}, r - 1, tgt).scale(split.dhats[l - 1])
    for l in range(1, nh + 1):
        for k in range(l + 1, nh + 1):
            pair = tgt.zero()
            for s in range(1, g + 1):
                pair = pair + zs[(s, l)] * zs[(s + g, k)] + zs[(s, k)] * zs[(s + g, l)]
            acc = acc - pair * _sigma_without(xs, {l - 1, k - 1}, r - 2, tgt)
    return acc


def split_hat_chern(split, l, xs=None, zs=None):
    """c_1 of the l-th line bundle as a SigmaClass."""
    ring, g = split.ring, split.g
    x = split.xs()[l - 1] if xs is None else xs[l - 1]
    alpha = [split.z(s, l) if zs is None else zs[(s, l)] for s in range(1, 2 * g + 1)]
    return SigmaClass(g, x, alpha, ring.scalar(split.dhats[l - 1]))


def rank1_grr(main, c1, dhat, t_cap, ring):
    """c(-pi_!(L^* (x) V)) for a line bundle with c_1 = c1, no cap check."""
    g = main.g
    chm = full_character(universal_chern(ring, main), main.n, g, ring, t_cap + 1)
    chl = full_character([c1], 1, g, ring, t_cap + 1)
    chl = [chl[0]] + dual_character(chl[1:])
    chs = grr_characters(chl, chm, g, t_cap)
    rank = main.n * (g - 1) - main.d + dhat * main.n
    return character_to_chern(chs, rank, t_cap)


def split_chern_poly(main, split, t_cap, xs=None, zs=None):
    """prod_l c(-pi_!(Vhat_l^* (x) V))(t), one rank-1 computation per block."""
    out = TSeries.one(split.ring, t_cap)
    for l in range(1, split.nh + 1):
        c1 = split_hat_chern(split, l, xs, zs)
        out = out * rank1_grr(main, c1, split.dhats[l - 1], t_cap, split.ring)
    return out


# -- closed form in split main coordinates (diagnostic) ----------------------


def _root_derivatives(deltas):
    """First and second derivatives of the roots delta_k of
    z^n - a_1 z^{n-1} + a_2 z^{n-2} - ... with respect to a_1..a_n.

    Exact rationals at a point with distinct roots.  Returns (d1, d2) with
    d1[k][i] = d delta_k / d a_{i+1}, d2[k][i][j] the second derivative.
    """
    n = len(deltas)
    if len(set(deltas)) != n:
        raise ValueError("roots must be distinct")
    d1, d2 = [], []
    for k, z in enumerate(deltas):
        fz = Fraction(1)
        for j, w in enumerate(deltas):
            if j != k:
                fz *= z - w
        # F(z,a) = sum_i (-1)^i a_i z^{n-i}; G_i(z) = -dF/da_i = (-1)^{i-1} z^{n-i}
        first = [Fraction((-1) ** (i - 1)) * z ** (n - i) / fz for i in range(1, n + 1)]
        # F_z and F_zz as polynomials in z with a = elementary(deltas)
        a = [Fraction(1)] + [Fraction(0)] * n
        for w in deltas:
            for j in range(n, 0, -1):
                a[j] += a[j - 1] * w
        fzz = sum((-1) ** i * a[i] * (n - i) * (n - i - 1) * z ** (n - i - 2) for i in range(n - 1))
        sec = []
        for i in range(1, n + 1):
            row = []
            gi = Fraction((-1) ** (i - 1)) * z ** (n - i)
            gi_p = Fraction((-1) ** (i - 1)) * (n - i) * z ** (n - i - 1) if n - i >= 1 else Fraction(0)
            for j in range(1, n + 1):
                dj = first[j - 1]
                fza = Fraction((-1) ** j) * (n - j) * z ** (n - j - 1) if n - j >= 1 else Fraction(0)
                row.append((gi_p * dj * fz - gi * (fzz * dj + fza)) / (fz * fz))
            sec.append(row)
        d1.append(first)
        d2.append(sec)
    return d1, d2


def split_chern_closed(main, split, t_cap, deltas, printed_signs=False):
    """Closed-form split Chern polynomial at numeric split main coordinates.

    Evaluates prod_{k,l} (1+(delta_k - X_l)t)^{g-1+dhat_l-W_k} exp(s_Xi Xi^{(k,l)} t/(1+(delta_k-X_l)t))
    with the a-classes replaced by the elementary symmetric functions of the
    rational numbers ``deltas``.  With printed_signs=True the odd-pair terms
    of W_k and Xi enter with the signs as printed (coefficients on the left
    and alpha_s alpha_{s+g} = -omega); the default uses this package's
    convention.
    """
    ring, g, n = split.ring, split.g, main.n
    deltas = [Fraction(x) for x in deltas]
    if len(deltas) != n:
        raise ValueError("need n split coordinates")
    d1, d2 = _root_derivatives(deltas)
    p = main.prefix
    b = [[ring.gen(f"b{p}_{i}_{s}") for s in range(1, 2 * g + 1)] for i in range(1, n + 1)]
    f = [ring.scalar(main.d)] + [ring.gen(f"f{p}_{i}") for i in range(2, n + 1)]
    pair_sign = 1 if printed_signs else -1
    out = TSeries.one(ring, t_cap)
    xs = split.xs()
    for k in range(n):
        w = ring.zero()
        for i in range(n):
            w = w + f[i].scale(d1[k][i])
        for s in range(g):
            for i in range(n):
                for j in range(n):
                    if d2[k][i][j]:
                        w = w + (b[i][s] * b[j][s + g]).scale(pair_sign * d2[k][i][j])
        lin = [None] + [
            sum((b[i][s - 1].scale(d1[k][i]) for i in range(n)), ring.zero()) for s in range(1, 2 * g + 1)
        ]
        for l in range(1, split.nh + 1):
            u = TSeries(ring, [ring.zero(), ring.scalar(deltas[k]) - xs[l - 1]], t_cap)
            xi = ring.zero()
            for s in range(1, g + 1):
                xi = xi + (lin[s] - split.z(s, l)) * (lin[s + g] - split.z(s + g, l))
            m = g - 1 + split.dhats[l - 1]
            one_plus = u + 1
            log1p = one_plus.log()
            expo = log1p.scale(ring.scalar(m) - w)
            frac = TSeries(ring, [ring.zero(), ring.one()], t_cap) * one_plus.reciprocal()
            expo = expo + frac.scale(xi.scale(-pair_sign))
            out = out * expo.exp()
    return out


def specialize_a(series, main, deltas):
    """Replace a_r by sigma_r(deltas) termwise (a-classes become numbers)."""
    ring = series.ring
    n = main.n
    a = [Fraction(1)] + [Fraction(0)] * n
    for w in deltas:
        for j in range(n, 0, -1):
            a[j] += a[j - 1] * Fraction(w)
    idx = [ring.index[f"a{main.prefix}_{r}"] for r in range(1, n + 1)]
    out = []
    for c in series.coeffs:
        table = {}
        for exps, coeff in c.items():
            val = coeff
            e = list(exps)
            for r, i in enumerate(idx, 1):
                if e[i]:
                    val *= a[r] ** e[i]
                    e[i] = 0
            e = tuple(e)
            table[e] = table.get(e, 0) + val
        out.append(ring.from_exponents(table))
    return TSeries(ring, out, series.t_cap)


def closed_form_diagnostic(main, split, t_cap, deltas, printed_signs=False):
    """Compare the closed form with the rank-1 product at numeric split coordinates."""
    ref = specialize_a(split_chern_poly(main, split, t_cap), main, deltas)
    got = split_chern_closed(main, split, t_cap, deltas, printed_signs)
    return ref == got


# -- fundamental domain ----------------------------------------------------


def fundamental_domain(gamma):
    """[[gamma]] for gamma with sum 0: coroot coordinates reduced into [0, 1).

    The coroot coordinates of gamma are its partial sums lambda_a; the
    integer lattice translates each lambda_a by integers.
    """
    gamma = [Fraction(x) for x in gamma]
    if sum(gamma) != 0:
        raise ValueError("weight vector must have coordinate sum 0")
    lam = list(itertools.accumulate(gamma))[:-1]
    lam = [x - (x.numerator // x.denominator) for x in lam]
    full = [Fraction(0)] + lam + [Fraction(0)]
    return tuple(full[i + 1] - full[i] for i in range(len(gamma)))


def simple_root_coords(gamma):
    return tuple(gamma[i] - gamma[i + 1] for i in range(len(gamma) - 1))


def hat_c(nh, dh):
    q = Fraction(dh, nh)
    return fundamental_domain([q] * (nh - 1) + [q - dh])


def weyl_degree_vectors(nh, dh):
    """{(dhat_1..dhat_nh): multiplicity} over w in W_{nh-1}.

    W_{nh-1} permutes the first nh - 1 coordinates; dhat_l = dh/nh - [[w c]]_l.
    """
    c = hat_c(nh, dh)
    q = Fraction(dh, nh)
    out = {}
    for w in itertools.permutations(range(nh - 1)):
        wc = [c[w[i]] for i in range(nh - 1)] + [c[nh - 1]]
        red = fundamental_domain(wc)
        dv = []
        for x in red:
            e = q - x
            if e.denominator != 1:
                raise ArithmeticError("non-integral shifted degree")
            dv.append(int(e))
        out[tuple(dv)] = out.get(tuple(dv), 0) + 1
    return out


# -- Berezin integral --------------------------------------------------------


def _z_names(ring):
    return [s.name for s in ring.gens if s.name.startswith("z_")]


def berezin_integral(x, nh, g, sign=1, target=None):
    """Integral over (S^1)^{2 g nh} of x: the left coefficient of the top
    monomial in the z generators, normalised so that exp(omega) integrates
    to nh^g with omega = sum_l sum_{s<=g} z_{s,l} z_{s+g,l}.

    The z generators must be the last generators of the ring.
    """
    ring = x.ring
    names = _z_names(ring)
    if len(names) != 2 * g * nh:
        raise ValueError("ring does not carry 2 g nh odd torus generators")
    m = len(ring.gens) - len(names)
    if ring.names[m:] != names:
        raise ValueError("torus generators must come last")
    if target is None:
        target = Ring(ring.gens[:m], max(0, ring.degree_cap - 2 * g * nh))
    kappa = Fraction(sign * nh**g) / _omega_top(names, g)
    zmask = 0
    for nm in names:
        zmask |= 1 << ring._oddbit[ring.index[nm]]
    table = {}
    for k, c in x.terms.items():
        if k & zmask != zmask:
            continue
        exps = ring.exponents(k)[:m]
        table[exps] = table.get(exps, 0) + Fraction(c, x.den) * kappa
    return target.from_exponents(table)


def _omega_top(names, g):
    r = Ring([(nm, 1) for nm in names], len(names))
    om = r.zero()
    blocks = sorted({nm.split("_")[2] for nm in names}, key=int)
    for l in blocks:
        for s in range(1, g + 1):
            om = om + r.gen(f"z_{s}_{l}") * r.gen(f"z_{s + g}_{l}")
    top = om.exp().homogeneous(len(names))
    if len(top.terms) != 1:
        raise ArithmeticError("unexpected top part")
    (_, c), = top.items()
    return c


def berezin_series(s, nh, g, sign=1, target=None):
    if target is None:
        names = _z_names(s.ring)
        m = len(s.ring.gens) - len(names)
        target = Ring(s.ring.gens[:m], max(0, s.ring.degree_cap - 2 * g * nh))
    return TSeries(target, [berezin_integral(c, nh, g, sign, target) for c in s.coeffs], s.t_cap)


# -- iterated residues -------------------------------------------------------


def _norm_form(form):
    """(scale, normalised form) with the first nonzero entry equal to 1."""
    for c in form:
        if c:
            c = Fraction(c)
            return c, tuple(Fraction(x) / c for x in form)
    raise ValueError("zero linear form in a denominator")


class ResidueExpr:
    """sum of coeff * Y^exps / prod_f f^{m_f}, f linear forms in Y_1..Y_k.

    ``terms`` is a list of (coeff, exps, den) with den a dict form -> multiplicity.
    Coefficients may be Fractions or ring elements (anything with + and scale).
    """

    def __init__(self, nvars, terms=()):
        self.nvars = nvars
        self.terms = []
        for coeff, exps, den in terms:
            self.add(coeff, exps, den)

    def add(self, coeff, exps, den):
        if len(exps) != self.nvars:
            raise ValueError("exponent vector has wrong length")
        scale = Fraction(1)
        nd = {}
        for f, m in den.items():
            if len(f) != self.nvars:
                raise ValueError("linear form has wrong length")
            if m < 0:
                raise ValueError("negative pole order")
            if m == 0:
                continue
            lam, fn = _norm_form(f)
            scale /= lam**m
            nd[fn] = nd.get(fn, 0) + m
        self.terms.append((coeff, tuple(exps), nd, scale))

    def scale(self, c):
        out = ResidueExpr(self.nvars)
        out.terms = [(co, e, d, s * Fraction(c)) for co, e, d, s in self.terms]
        return out

    def __add__(self, other):
        if other.nvars != self.nvars:
            raise ValueError("variable count mismatch")
        out = ResidueExpr(self.nvars)
        out.terms = self.terms + other.terms
        return out


def _residue_step(items, j):
    """Res_{Y_j = 0} of [(scalar, exps, den)] with exps nonnegative."""
    out = []
    for scal, exps, den in items:
        pole = 0
        mixed = []
        rest = {}
        for f, m in den.items():
            others = any(f[i] for i in range(len(f)) if i != j)
            if f[j] and not others:
                pole += m  # normalised, so the form is exactly Y_j
            elif f[j]:
                mixed.append((f, m))
            else:
                rest[f] = m
        need = pole - 1 - exps[j]
        if need < 0:
            continue
        nexps = exps[:j] + (0,) + exps[j + 1 :]
        for ks in _compositions(need, len(mixed)):
            coef = scal
            nden = dict(rest)
            for (f, m), k in zip(mixed, ks):
                c = f[j]
                coef *= comb(m + k - 1, k) * (-c) ** k
                lp = f[:j] + (Fraction(0),) + f[j + 1 :]
                lam, fn = _norm_form(lp)
                coef /= lam ** (m + k)
                nden[fn] = nden.get(fn, 0) + m + k
            if coef:
                out.append((coef, nexps, nden))
    return out


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def residue_scalar(exps, den):
    """Res_{Y_1} .. Res_{Y_k} of Y^exps / prod f^m, innermost variable first."""
    e = ResidueExpr(len(exps), [(1, exps, den)])
    _, ex, nd, sc = e.terms[0]
    items = [(sc, ex, nd)]
    for j in range(len(exps) - 1, -1, -1):
        items = _residue_step(items, j)
    total = Fraction(0)
    for scal, _, den_left in items:
        if den_left:
            raise ArithmeticError("denominator left after all residues")
        total += scal
    return total


def iterated_residue(expr):
    """Apply Res_{Y_k}, then outward to Res_{Y_1}, to a ResidueExpr."""
    acc = None
    for coeff, exps, den, scale in expr.terms:
        r = residue_scalar(exps, den) * scale
        if not r:
            continue
        term = coeff * r if isinstance(coeff, (int, Fraction)) else coeff.scale(r)
        acc = term if acc is None else acc + term
    return Fraction(0) if acc is None else acc


# -- the denominator ---------------------------------------------------------


def denominator_expand(ring, x_l, x_next, a_classes, n, t_cap):
    """S with (prod_k (1+(delta_k-X_{l+1})t)/(1+(delta_k-X_l)t) - 1)^{-1} = S / (n t Y_l).

    a_classes = [a_1..a_n] (ring elements).  Writing
    prod_k (1+(delta_k-X)t) = sum_j a_j t^j (1-Xt)^{n-j}, the difference of the
    two products is t Y_l (n + b_l), so S = prod_k (1+(delta_k-X_l)t) * sum_m (-b_l/n)^m.
    """
    a = [ring.one()] + list(a_classes)
    if len(a) != n + 1:
        raise ValueError("need n a-classes")
    one = TSeries.one(ring, t_cap)
    u_l = TSeries(ring, [ring.one(), -x_l], t_cap)
    u_n = TSeries(ring, [ring.one(), -x_next], t_cap)
    tpow = [TSeries(ring, [ring.zero()] * j + [ring.one()], t_cap) for j in range(n + 1)]
    b_prod = TSeries(ring, [], t_cap)
    for j in range(n + 1):
        b_prod = b_prod + (tpow[j] * u_l ** (n - j)).scale(a[j])
    total = TSeries(ring, [], t_cap)
    for j in range(n):
        inner = TSeries(ring, [], t_cap)
        for i in range(n - j):
            inner = inner + u_n**i * u_l ** (n - j - 1 - i)
        total = total + (tpow[j] * inner).scale(a[j])
    # total = n + b_l, so sum_m (-b_l/n)^m = n / total
    geo = total.scale(Fraction(1, n)).reciprocal()
    return b_prod * geo


def bundle_product(ring, a_classes, x, n, t_cap):
    """prod_k (1 + (delta_k - X) t) = sum_j a_j t^j (1 - X t)^{n-j}."""
    a = [ring.one()] + list(a_classes)
    u = TSeries(ring, [ring.one(), -x], t_cap)
    out = TSeries(ring, [], t_cap)
    for j in range(n + 1):
        out = out + (TSeries(ring, [ring.zero()] * j + [ring.one()], t_cap) * u ** (n - j)).scale(a[j])
    return out


# -- pairings ----------------------------------------------------------------


def x_in_y(ring, nh):
    """X_l = sum_{a>=l} Y_a - (1/nh) sum_a a Y_a, so that sum X = 0."""
    ys = [ring.gen(f"y_{a}") for a in range(1, nh)]
    out = []
    for l in range(1, nh + 1):
        x = ring.zero()
        for a in range(1, nh):
            c = (1 if a >= l else 0) - Fraction(a, nh)
            x = x + ys[a - 1].scale(c)
        out.append(x)
    return out


def positive_root_forms(nh):
    """X_i - X_j (i<j) as linear forms in Y_1..Y_{nh-1}."""
    out = []
    for i in range(nh):
        for j in range(i + 1, nh):
            out.append(tuple(1 if i <= a < j else 0 for a in range(nh - 1)))
    return out


def _hat_degree(eta):
    ds = eta.degrees()
    return max(ds) if ds else 0


def _check_eta(eta, prefix="h"):
    for exps, _ in eta.items():
        for i, e in enumerate(exps):
            if e and eta.ring.gens[i].name.startswith(f"f{prefix}_"):
                raise ValueError("eta must not involve the f-generators")


class _PairingSetup(NamedTuple):
    ring: Ring
    split: SplitHatRing
    xs: list
    zs: dict
    t_num: int
    nvars: int
    ny: int


def _pairing_setup(main, nh, eta_degree, t_cap, extra_t=0, block_order=None):
    g = main.g
    dim = 2 * (nh * nh * (g - 1) + 1)
    ny = (2 * g - 2) * nh * (nh - 1) // 2
    t_num = t_cap + (nh - 1) + extra_t
    dm = max(0, eta_degree + 2 * (t_num - (nh - 1)) - dim)
    cap = dm + 2 * ny + 2 * g * nh
    extra = [(f"y_{a}", 2) for a in range(1, nh)] + split_gen_names(nh, g, with_x=False, order=block_order)
    ring = build_ring([main], cap, extra)
    xs = x_in_y(ring, nh) if nh > 1 else [ring.zero()]
    zs = {(s, l): ring.gen(f"z_{s}_{l}") for s in range(1, 2 * g + 1) for l in range(1, nh + 1)}
    split = SplitHatRing(nh, g, (0,) * nh, ring)
    return _PairingSetup(ring, split, xs, zs, t_num, nh - 1, ny)


def _residue_series(num, main, setup, t_out_shift, t_cap):
    """Residues of num / (D^{2g-2} prod_l Y_l), coefficients mapped to the main ring.

    Returns a list indexed by numerator t-power.
    """
    nh = setup.nvars + 1
    g = main.g
    mring = build_ring([main], max(0, num.ring.degree_cap - 2 * setup.ny))
    m = len(gen_names(main))
    den = {}
    for f in positive_root_forms(nh):
        den[f] = den.get(f, 0) + (2 * g - 2)
    for a in range(nh - 1):
        f = tuple(1 if b == a else 0 for b in range(nh - 1))
        den[f] = den.get(f, 0) + 1
    cache = {}
    out = []
    for r in range(num.t_cap + 1):
        c = num.coeff(r)
        table = {}
        for exps, coeff in c.items():
            yexp = exps[m:]
            if sum(yexp) != setup.ny:
                continue
            res = cache.get(yexp)
            if res is None:
                res = residue_scalar(yexp, den) if nh > 1 else Fraction(1)
                cache[yexp] = res
            if res:
                key = exps[:m]
                table[key] = table.get(key, 0) + coeff * res
        out.append(mring.from_exponents(table))
    return mring, out


def _weyl_sign(nh, g):
    return -1 if (nh * (nh - 1) * (g - 1) // 2) % 2 else 1


def pairing_thm_10_2(eta, main, nh, dh, t_cap, sign=1, block_order=None, prefix="h"):
    """Integral over the moduli space M(nh, dh) of eta * c(-pi_!(Vhat^* (x) V))(t).

    eta is a polynomial in the hat generators a{prefix}_r, b{prefix}_r_j.
    Returns a TSeries up to t^t_cap over the main ring.
    """
    from math import gcd

    if gcd(nh, dh) != 1:
        raise ValueError("nhat and dhat must be coprime")
    if nh > 3:
        raise ValueError("nhat <= 3 supported")
    _check_eta(eta, prefix)
    g = main.g
    setup = _pairing_setup(main, nh, _hat_degree(eta), t_cap, block_order=block_order)
    ring, xs, zs, T = setup.ring, setup.xs, setup.zs, setup.t_num
    a_cls = [ring.gen(f"a{main.prefix}_{r}") for r in range(1, main.n + 1)]
    eta_r = torus_restrict_hat(eta, setup.split, prefix, xs, zs)
    dens = TSeries.one(ring, T)
    for l in range(1, nh):
        dens = dens * denominator_expand(ring, xs[l - 1], xs[l], a_cls, main.n, T)
    total = TSeries(ring, [], T)
    for dv, mult in sorted(weyl_degree_vectors(nh, dh).items()):
        split = SplitHatRing(nh, g, dv, ring)
        chern = split_chern_poly(main, split, T, xs, zs)
        total = total + (chern * dens).scale(mult)
    total = total.scale(eta_r)
    num = berezin_series(total, nh, g, sign)
    mring, coeffs = _residue_series(num, main, setup, nh - 1, t_cap)
    pref = Fraction(_weyl_sign(nh, g), factorial(nh) * main.n ** (nh - 1))
    for r in range(nh - 1):
        if coeffs[r]:
            raise ArithmeticError(f"negative power t^{r - nh + 1} survived the residues")
    out = [c.scale(pref) for c in coeffs[nh - 1 :]]
    return TSeries(mring, out, t_cap)


# -- formal epsilon ----------------------------------------------------------


class EpsSeries:
    """Truncated power series in formal e_2..e_nh with TSeries coefficients.

    The formal parameters e_r stand for eps_r / t^{r-1}, which keeps every
    coefficient a power series in t.
    """

    def __init__(self, nvars, order, data, ring, t_cap):
        self.nvars = nvars
        self.order = order
        self.ring = ring
        self.t_cap = t_cap
        self.data = {a: s for a, s in data.items() if sum(a) <= order and not s.is_zero()}

    @classmethod
    def const(cls, s, nvars, order):
        return cls(nvars, order, {(0,) * nvars: s}, s.ring, s.t_cap)

    def get(self, a):
        return self.data.get(a, TSeries(self.ring, [], self.t_cap))

    def __add__(self, o):
        d = dict(self.data)
        for a, s in o.data.items():
            d[a] = d[a] + s if a in d else s
        return EpsSeries(self.nvars, self.order, d, self.ring, self.t_cap)

    def __sub__(self, o):
        return self + o.scale(-1)

    def scale(self, c):
        return EpsSeries(self.nvars, self.order, {a: s.scale(c) for a, s in self.data.items()}, self.ring, self.t_cap)

    def __mul__(self, o):
        if isinstance(o, TSeries):
            return EpsSeries(self.nvars, self.order, {a: s * o for a, s in self.data.items()}, self.ring, self.t_cap)
        d = {}
        for a, s in self.data.items():
            for b, u in o.data.items():
                c = tuple(x + y for x, y in zip(a, b))
                if sum(c) > self.order:
                    continue
                p = s * u
                d[c] = d[c] + p if c in d else p
        return EpsSeries(self.nvars, self.order, d, self.ring, self.t_cap)

    def exp(self):
        zero = (0,) * self.nvars
        if zero in self.data:
            raise ValueError("exp needs a vanishing epsilon^0 part")
        out = EpsSeries.const(TSeries.one(self.ring, self.t_cap), self.nvars, self.order)
        term = out
        for k in range(1, self.order + 1):
            term = (term * self).scale(Fraction(1, k))
            out = out + term
        return out

    def reciprocal(self):
        zero = (0,) * self.nvars
        base = self.get(zero)
        c0 = base.coeff(0)
        if c0.degrees() != [0] or len(c0.terms) != 1:
            raise ValueError("reciprocal needs a nonzero scalar constant term")
        (_, lead), = c0.items()
        r0 = base.scale(1 / Fraction(lead)).reciprocal().scale(1 / Fraction(lead))
        out = {zero: r0}
        keys = sorted(
            (a for a in itertools.product(range(self.order + 1), repeat=self.nvars) if 0 < sum(a) <= self.order),
            key=sum,
        )
        for a in keys:
            acc = TSeries(self.ring, [], self.t_cap)
            for b, s in self.data.items():
                if b == zero:
                    continue
                c = tuple(x - y for x, y in zip(a, b))
                if min(c) < 0 or c not in out:
                    continue
                acc = acc + s * out[c]
            out[a] = -(r0 * acc)
        return EpsSeries(self.nvars, self.order, out, self.ring, self.t_cap)


def _tmono(ring, x, k, t_cap):
    return TSeries(ring, [ring.zero()] * k + [x], t_cap)


def _divide_by_y(s, name, target):
    """Exact division of every coefficient by an even generator."""
    src = s.ring
    i = src.index[name]
    out = []
    for c in s.coeffs:
        table = {}
        for exps, coeff in c.items():
            if exps[i] == 0:
                raise ArithmeticError(f"not divisible by {name}")
            e = list(exps)
            e[i] -= 1
            table[tuple(e)] = coeff
        out.append(target.from_exponents(table))
    return TSeries(target, out, s.t_cap)


def _eps_unit(nvars, r):
    return tuple(1 if i == r - 2 else 0 for i in range(nvars))


def pairing_thm_10_3(m, p, main, nh, dh, t_cap, eps_order=0, eps=None, sign=1, block_order=None):
    """Pairing with exp(sum eps_r fhat_r) prod ahat_r^{m_r} prod (bhat_r^k)^{p_{r,k}}.

    m: {r: m_r} for 2 <= r <= nh; p: {(r, k): 0 or 1}.  The result is a
    formal power series in eps_2..eps_nh truncated at total order eps_order,
    returned as {exponent tuple: TSeries in t}.  If ``eps`` gives numbers
    (eps_2 must be nonzero) the truncated series is evaluated there instead.
    """
    from math import gcd

    if gcd(nh, dh) != 1:
        raise ValueError("nhat and dhat must be coprime")
    if nh < 2 or nh > 3:
        raise ValueError("nhat in {2, 3} supported")
    if eps is not None:
        eps = [Fraction(x) for x in eps]
        if len(eps) != nh - 1:
            raise ValueError("need eps_2..eps_nh")
        if eps[0] == 0:
            raise ValueError("eps_2 must be nonzero")
    m = {r: e for r, e in (m or {}).items() if e}
    p = {rk: v for rk, v in (p or {}).items() if v}
    for r in m:
        if not 2 <= r <= nh:
            raise ValueError("m_r needs 2 <= r <= nhat")
    for (r, k), v in p.items():
        if not (2 <= r <= nh and 1 <= k <= 2 * main.g) or v not in (0, 1):
            raise ValueError("bad p flag")
    g = main.g
    nv = nh - 1
    K = eps_order
    deg_eta = sum(2 * r * e for r, e in m.items()) + sum(2 * r - 1 for (r, _k) in p)
    setup = _pairing_setup(main, nh, deg_eta, t_cap, extra_t=K * (nh - 1), block_order=block_order)
    ring, xs, zs, T = setup.ring, setup.xs, setup.zs, setup.t_num
    a_cls = [ring.gen(f"a{main.prefix}_{r}") for r in range(1, main.n + 1)]

    def lin(parts):
        return EpsSeries(nv, K, parts, ring, T)

    # simple-root directions and torus odd coordinates zeta_a^s
    ehat = [tuple(1 if i == a else (-1 if i == a + 1 else 0) for i in range(nh)) for a in range(nv)]
    zeta = {}
    for a in range(1, nh):
        for s in range(1, 2 * g + 1):
            tot = sum((zs[(s, l)] for l in range(1, nh + 1)), ring.zero())
            part = sum((zs[(s, l)] for l in range(1, a + 1)), ring.zero())
            zeta[(a, s)] = part - tot.scale(Fraction(a, nh))

    def d_sigma(r, vec):
        acc = ring.zero()
        for i, v in enumerate(vec):
            if v:
                acc = acc + _sigma_without(xs, {i}, r - 1, ring).scale(v)
        return acc

    def dd_sigma(r, u, v):
        acc = ring.zero()
        for i, ui in enumerate(u):
            for j, vj in enumerate(v):
                if i != j and ui and vj:
                    acc = acc + _sigma_without(xs, {i, j}, r - 2, ring).scale(ui * vj)
        return acc

    # insertions and prefactors common to all w
    front = ring.one()
    for r, e in sorted(m.items()):
        front = front * elementary(xs, r, ring) ** e
    for (r, k) in sorted(p):
        ins = ring.zero()
        for a in range(1, nh):
            ins = ins + d_sigma(r, ehat[a - 1]) * zeta[(a, k)]
        front = front * ins
    # exp(- sum_{a,b} sum_{s<=g} zeta_a^s zeta_b^{s+g} d^2 q(e_a, e_b))
    parts = {}
    for r in range(2, nh + 1):
        acc = ring.zero()
        for a in range(1, nh):
            for b in range(1, nh):
                h = dd_sigma(r, ehat[a - 1], ehat[b - 1])
                if not h:
                    continue
                for s in range(1, g + 1):
                    acc = acc - zeta[(a, s)] * zeta[(b, s + g)] * h
        if acc:
            parts[_eps_unit(nv, r)] = _tmono(ring, acc, r - 1, T)
    odd_exp = lin(parts).exp() if parts else EpsSeries.const(TSeries.one(ring, T), nv, K)
    # denominators: B_l * [(E_l A_l - B_l) / (t Y_l)]^{-1}
    big = ring.with_cap(ring.degree_cap + 2)
    xs_big = x_in_y(big, nh)
    a_big = [big.gen(f"a{main.prefix}_{r}") for r in range(1, main.n + 1)]
    dens = EpsSeries.const(TSeries.one(ring, T), nv, K)
    for l in range(1, nh):
        A = bundle_product(big, a_big, xs_big[l], main.n, T + 1)
        B = bundle_product(big, a_big, xs_big[l - 1], main.n, T + 1)
        ys = big.gen(f"y_{l}")
        # -(dq)_X(e_l) = Y_l * sum_r eps_r sigma_{r-2}(X_i : i != l, l+1)
        up = {}
        for r in range(2, nh + 1):
            sig = _sigma_without(xs_big, {l - 1, l}, r - 2, big)
            up[_eps_unit(nv, r)] = _tmono(big, ys * sig, r - 1, T + 1)
        E = EpsSeries(nv, K, up, big, T + 1).exp() if K else EpsSeries.const(TSeries.one(big, T + 1), nv, K)
        diff = E * A - EpsSeries.const(B, nv, K)
        q = {}
        for a, s in diff.data.items():
            if s.coeff(0):
                raise ArithmeticError("t does not divide the denominator")
            shifted = TSeries(big, list(s.coeffs[1:]), T)
            q[a] = _divide_by_y(shifted, f"y_{l}", ring)
        inv = EpsSeries(nv, K, q, ring, T).reciprocal()
        B_small = bundle_product(ring, a_cls, xs[l - 1], main.n, T)
        dens = dens * (inv * B_small)
    total = EpsSeries(nv, K, {}, ring, T)
    for dv, mult in sorted(weyl_degree_vectors(nh, dh).items()):
        split = SplitHatRing(nh, g, dv, ring)
        chern = split_chern_poly(main, split, T, xs, zs)
        # e^{-dq_X([[w c]])} with [[w c]] = dh/nh - dhat_l
        cvec = [Fraction(dh, nh) - x for x in dv]
        dq = {}
        for r in range(2, nh + 1):
            val = d_sigma(r, cvec)
            if val:
                dq[_eps_unit(nv, r)] = _tmono(ring, -val, r - 1, T)
        ew = lin(dq).exp() if (dq and K) else EpsSeries.const(TSeries.one(ring, T), nv, K)
        total = total + (ew * chern).scale(mult)
    total = (total * odd_exp * dens)
    pref = Fraction(_weyl_sign(nh, g), factorial(nh))
    result = {}
    for a, s in sorted(total.data.items()):
        s = s.scale(front)
        num = berezin_series(s, nh, g, sign)
        mring, coeffs = _residue_series(num, main, setup, nh - 1, t_cap)
        shift = (nh - 1) + sum(e * (r - 1) for r, e in zip(range(2, nh + 1), a))
        for r in range(min(shift, len(coeffs))):
            if coeffs[r]:
                raise ArithmeticError("negative power of t survived the residues")
        out = [c.scale(pref) for c in coeffs[shift:]]
        result[a] = TSeries(mring, out, t_cap)
    mring = build_ring([main], max(0, ring.degree_cap - 2 * setup.ny - 2 * g * nh))
    for a in itertools.product(range(K + 1), repeat=nv):
        if sum(a) <= K and a not in result:
            result[a] = TSeries(mring, [], t_cap)
    if eps is None:
        return result
    acc = None
    for a, s in result.items():
        w = Fraction(1)
        for e, x in zip(a, eps):
            w *= x**e
        s = TSeries(mring, [mring.embed(c) if c.ring != mring else c for c in s.coeffs], t_cap)
        acc = s.scale(w) if acc is None else acc + s.scale(w)
    return acc


def direct_berezin_pairing(eta, main, dh, t_cap, sign=1, prefix="h"):
    """nhat = 1 pairing computed straight from the unsplit GRR series.

    The hat Chern series comes from relgen with generators a{prefix}_1,
    b{prefix}_1_s; a{prefix}_1 is set to 0 (the torus of SU(1) is trivial)
    and b{prefix}_1_s becomes z_s_1 before integrating over the Jacobian torus.
    """
    from .relgen import grr_minus_pi

    g = main.g
    hat = BundleData(1, dh, g, prefix)
    dim = 2 * g
    deg_eta = _hat_degree(eta)
    cap = max(0, deg_eta + 2 * t_cap - dim) + 2 * g
    big = build_ring([main, hat], max(cap, 2 * t_cap))
    c = grr_minus_pi(main, hat, t_cap, big)
    prod = c.scale(big.embed(eta) if eta.ring != big else eta)
    tgt = build_ring([main], cap, split_gen_names(1, g, with_x=False))
    images = {f"a{prefix}_1": tgt.zero()}
    for s in range(1, 2 * g + 1):
        images[f"b{prefix}_1_{s}"] = tgt.gen(f"z_{s}_1")
    h = _hom(big, images, tgt)
    moved = TSeries(tgt, [h(x) for x in prod.coeffs], t_cap)
    mring = build_ring([main], max(0, cap - 2 * g))
    return berezin_series(moved, 1, g, sign, mring)


def eta_ring(nh, g, degree_cap, prefix="h"):
    return build_ring([BundleData(nh, 1, g, prefix)], degree_cap)


def eta_degree_ok(eta):
    return isinstance(eta, GradedElement)
