"""Coefficient ring tensored with H*(Sigma), Chern classes and characters.

The surface factor has basis 1, alpha_1..alpha_{2g}, omega with
alpha_s alpha_{s+g} = omega = -alpha_{s+g} alpha_s for s <= g.  A class is
stored as  unit (x) 1 + sum_j alpha[j] (x) alpha_j + omega (x) omega, the
coefficient always written on the left.
"""

from fractions import Fraction
from math import factorial

from .exactalg import TSeries, sum_of_products


def parity_twist(x):
    """x -> (-1)^{|x|} x, termwise."""
    return x.parity_twist()


class SigmaClass:
    __slots__ = ("g", "unit", "alpha", "omega")

    def __init__(self, g, unit, alpha=None, omega=None):
        if g < 1:
            raise ValueError("genus must be positive")
        r = unit.ring
        self.g = g
        self.unit = unit
        if alpha is None:
            alpha = [r.zero()] * (2 * g)
        if len(alpha) != 2 * g:
            raise ValueError("need 2g alpha components")
        self.alpha = tuple(alpha)
        self.omega = omega if omega is not None else r.zero()

    @property
    def ring(self):
        return self.unit.ring

    @classmethod
    def scalar(cls, ring, g, c):
        return cls(g, ring.scalar(c))

    @classmethod
    def basis(cls, ring, g, which, coeff=None):
        """coeff (x) basis element; which is 'unit', 'omega' or an alpha index 1..2g."""
        x = coeff if coeff is not None else ring.one()
        z = ring.zero()
        if which == "unit":
            return cls(g, x)
        if which == "omega":
            return cls(g, z, None, x)
        alpha = [z] * (2 * g)
        alpha[which - 1] = x
        return cls(g, z, alpha)

    def components(self):
        out = {"unit": self.unit, "omega": self.omega}
        for j, a in enumerate(self.alpha, 1):
            out[f"alpha_{j}"] = a
        return out

    def _check(self, y):
        if not isinstance(y, SigmaClass):
            raise TypeError("expected a SigmaClass")
        if y.g != self.g:
            raise ValueError("genus mismatch")
        if y.ring != self.ring:
            raise ValueError("ring mismatch")

    def __add__(self, y):
        if isinstance(y, (int, Fraction)):
            return SigmaClass(self.g, self.unit + y, self.alpha, self.omega)
        self._check(y)
        return SigmaClass(
            self.g,
            self.unit + y.unit,
            [p + q for p, q in zip(self.alpha, y.alpha)],
            self.omega + y.omega,
        )

    __radd__ = __add__

    def __neg__(self):
        return SigmaClass(self.g, -self.unit, [-p for p in self.alpha], -self.omega)

    def __sub__(self, y):
        return self + (-y)

    def scale(self, c):
        return SigmaClass(self.g, self.unit.scale(c), [p.scale(c) for p in self.alpha], self.omega.scale(c))

    def __mul__(self, y):
        if isinstance(y, (int, Fraction)):
            return self.scale(y)
        self._check(y)
        return sigma_mul(self, y)

    def __rmul__(self, y):
        if isinstance(y, (int, Fraction)):
            return self.scale(y)
        return NotImplemented

    def __eq__(self, y):
        if not isinstance(y, SigmaClass):
            return NotImplemented
        return (self.g, self.unit, self.alpha, self.omega) == (y.g, y.unit, y.alpha, y.omega)

    def __hash__(self):
        return hash((self.g, self.unit, self.alpha, self.omega))

    def is_zero(self):
        return self.unit.is_zero() and self.omega.is_zero() and all(p.is_zero() for p in self.alpha)

    def map(self, f):
        return SigmaClass(self.g, f(self.unit), [f(p) for p in self.alpha], f(self.omega))

    def __repr__(self):
        parts = [f"({self.unit})"]
        parts += [f"({p})*alpha_{j}" for j, p in enumerate(self.alpha, 1) if p]
        if self.omega:
            parts.append(f"({self.omega})*omega")
        return " + ".join(parts)


def sigma_mul(x, y):
    if x.g != y.g:
        raise ValueError("genus mismatch")
    if x.ring != y.ring:
        raise ValueError("ring mismatch")
    return sigma_sum_of_products([(x, y, 1)], SigmaClass(x.g, x.ring.zero()))


def sigma_sum_of_products(triples, zero):
    """sum of c * x * y over SigmaClass triples, each component fused."""
    g = zero.g
    ring = zero.ring
    unit, omega = [], []
    alpha = [[] for _ in range(2 * g)]
    for x, y, c in triples:
        unit.append((x.unit, y.unit, c))
        omega.append((x.unit, y.omega, c))
        omega.append((x.omega, y.unit, c))
        tw = y.unit.parity_twist()
        for j in range(2 * g):
            alpha[j].append((x.unit, y.alpha[j], c))
            alpha[j].append((x.alpha[j], tw, c))
        for s in range(g):
            omega.append((x.alpha[s], y.alpha[s + g].parity_twist(), c))
            omega.append((x.alpha[s + g], y.alpha[s].parity_twist(), -c))
    return SigmaClass(
        g,
        sum_of_products(unit, ring),
        [sum_of_products(a, ring) for a in alpha],
        sum_of_products(omega, ring),
    )


def pushforward_pi(x):
    """Integration over Sigma: the omega component."""
    return x.omega


# -- Newton identities ----------------------------------------------------


def _zero_like(x):
    if isinstance(x, SigmaClass):
        return SigmaClass(x.g, x.ring.zero())
    return x.ring.zero()


def _dot(triples, zero):
    """sum of c * x * y for GradedElement or SigmaClass factors."""
    if isinstance(zero, SigmaClass):
        return sigma_sum_of_products(triples, zero)
    return sum_of_products(triples, zero.ring)


def chern_to_character(c, cap):
    """ch_1..ch_cap of a bundle with Chern classes c = [c_1, .., c_n].

    Works for GradedElement or SigmaClass entries (of even total degree).
    """
    n = len(c)
    if n == 0:
        raise ValueError("need at least c_1")
    zero = _zero_like(c[0])
    e = [None] + list(c)
    p = [None]
    for k in range(1, cap + 1):
        terms = []
        for i in range(1, min(k - 1, n) + 1):
            terms.append((e[i], p[k - i], 1 if i % 2 else -1))
        acc = _dot(terms, zero)
        if k <= n:
            ek = e[k].scale(k)
            acc = acc + ek if k % 2 == 1 else acc - ek
        p.append(acc)
    return [p[k].scale(Fraction(1, factorial(k))) for k in range(1, cap + 1)]


def chern_from_power_sums(p, cap):
    """Elementary classes e_1..e_cap from power sums p = [p_1, p_2, ..].

    k e_k = sum_{i=1}^{k} (-1)^{i-1} p_i e_{k-i}, valid for virtual ranks.
    """
    zero = _zero_like(p[0])
    e = [zero + 1]
    for k in range(1, cap + 1):
        terms = []
        for i in range(1, min(k, len(p)) + 1):
            terms.append((p[i - 1], e[k - i], Fraction(1 if i % 2 else -1, k)))
        e.append(_dot(terms, zero))
    return e[1:]


def character_to_chern(ch, rank, cap):
    """Chern polynomial c(t) from ch = [ch_1, ch_2, ..] and the (virtual) rank.

    For GradedElement input this returns a TSeries with t_cap = cap; for
    SigmaClass input it returns the list [c_1..c_cap].  The rank does not
    enter the formula; it is only range-checked.
    """
    if not isinstance(rank, int):
        raise TypeError("rank must be an integer")
    p = [x.scale(factorial(k)) for k, x in enumerate(ch, 1)]
    es = chern_from_power_sums(p, cap) if p else []
    if isinstance(ch[0], SigmaClass):
        return es
    r = ch[0].ring
    return TSeries(r, [r.one()] + list(es), cap)


def dual_chern(c):
    """Chern classes of the dual bundle: (-1)^r c_r."""
    return [x if r % 2 == 0 else -x for r, x in enumerate(c, 1)]


def dual_character(ch):
    return [x if k % 2 == 0 else -x for k, x in enumerate(ch, 1)]


def assemble_universal_chern(a, b, f, n, g):
    """c_r = a_r (x) 1 + sum_j b_r^j (x) alpha_j + f_r (x) omega, r = 1..n."""
    if len(a) != n or len(f) != n or len(b) != n:
        raise ValueError("need n entries in a, b and f")
    out = []
    for r in range(n):
        if len(b[r]) != 2 * g:
            raise ValueError("each row of b needs 2g entries")
        out.append(SigmaClass(g, a[r], list(b[r]), f[r]))
    return out
