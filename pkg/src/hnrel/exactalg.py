"""Exact graded-commutative algebra over the rationals.

A ``Ring`` is the free graded-commutative algebra on a list of generators:
even generators are polynomial, odd generators are exterior and
anticommute.  Everything above the ring's degree cap is dropped, which is
what makes exp/log of positive-degree elements finite and exact.

Elements store integer numerators over one positive common denominator,
reduced so that the gcd of the denominator and all numerators is 1.  The
representation is unique, so equality is dict equality.

``TSeries`` adds a bookkeeping variable t, truncated at ``t_cap``.
"""

import itertools
import json
import os
from fractions import Fraction
from math import gcd, lcm
from typing import NamedTuple

from . import _kernels_py

KERNEL = "python"
_mul_terms = _kernels_py.mul_terms
_mul_sum = _kernels_py.mul_sum
if not os.environ.get("HNREL_PURE_PYTHON"):
    try:
        from . import _kernels

        _mul_terms = _kernels.mul_terms
        _mul_sum = _kernels.mul_sum
        KERNEL = "cython"
    except ImportError:
        pass


def use_kernel(name):
    """Select the multiplication kernel ('python' or 'cython').

    Returns the previously active name.
    """
    global _mul_terms, _mul_sum, KERNEL
    old = KERNEL
    if name == "python":
        _mul_terms = _kernels_py.mul_terms
        _mul_sum = _kernels_py.mul_sum
    elif name == "cython":
        from . import _kernels

        _mul_terms = _kernels.mul_terms
        _mul_sum = _kernels.mul_sum
    else:
        raise ValueError(f"unknown kernel {name!r}")
    KERNEL = name
    return old


def kernel_available(name):
    if name == "python":
        return True
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True


def fmt_rational(q):
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(s):
    return Fraction(s)


class GeneratorSpec(NamedTuple):
    name: str
    degree: int
    parity: str

    @classmethod
    def make(cls, name, degree):
        return cls(name, degree, "odd" if degree % 2 else "even")


def _perm_sign(seq):
    """Sign of the permutation sorting a sequence of distinct ints."""
    s = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s += 1
    return -1 if s & 1 else 1


def _normalize(terms, den):
    if not terms:
        return {}, 1
    g = gcd(den, *terms.values())
    if g != 1:
        terms = {k: c // g for k, c in terms.items()}
        den //= g
    return terms, den


def _from_fractions(ring, table):
    """Element from a {key: Fraction or int} dict."""
    table = {k: c for k, c in table.items() if c}
    if not table:
        return GradedElement(ring, {}, 1)
    den = lcm(*[Fraction(c).denominator for c in table.values()])
    terms = {k: int(Fraction(c) * den) for k, c in table.items()}
    return GradedElement(ring, *_normalize(terms, den))


class Ring:
    """Free graded-commutative Q-algebra on ``gens`` truncated above ``degree_cap``."""

    def __init__(self, gens, degree_cap):
        specs = []
        for g in gens:
            spec = g if isinstance(g, GeneratorSpec) else GeneratorSpec.make(*g)
            if spec.degree < 1:
                raise ValueError(f"generator {spec.name} must have positive degree")
            if spec.parity != ("odd" if spec.degree % 2 else "even"):
                raise ValueError(f"parity of {spec.name} does not match its degree")
            specs.append(spec)
        names = [s.name for s in specs]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        if degree_cap < 0:
            raise ValueError("degree cap must be nonnegative")
        self.gens = tuple(specs)
        self.degree_cap = int(degree_cap)
        self.index = {s.name: i for i, s in enumerate(specs)}

        # layout: odd bits lowest, then one field per even generator, then degree
        self.nodd = 0
        self._unit = [0] * len(specs)
        self._field = [None] * len(specs)
        self._oddbit = [None] * len(specs)
        for i, s in enumerate(specs):
            if s.parity == "odd":
                self._oddbit[i] = self.nodd
                self.nodd += 1
        off = self.nodd
        for i, s in enumerate(specs):
            if s.parity == "even":
                width = max(1, (self.degree_cap // s.degree).bit_length())
                self._field[i] = (off, width)
                off += width
        self.dshift = off
        for i, s in enumerate(specs):
            if s.parity == "odd":
                self._unit[i] = (s.degree << self.dshift) | (1 << self._oddbit[i])
            else:
                self._unit[i] = (s.degree << self.dshift) | (1 << self._field[i][0])

    def _ident(self):
        return (self.gens, self.degree_cap)

    def __eq__(self, other):
        return isinstance(other, Ring) and self._ident() == other._ident()

    def __hash__(self):
        return hash(self._ident())

    def __repr__(self):
        return f"Ring({len(self.gens)} gens, cap={self.degree_cap})"

    @property
    def names(self):
        return [s.name for s in self.gens]

    def with_cap(self, degree_cap):
        return Ring(self.gens, degree_cap)

    # -- monomial keys --------------------------------------------------
    def key(self, exps):
        """Key of the canonical monomial with exponent vector ``exps``.

        Returns None if the monomial is zero (odd exponent > 1) or above the cap.
        """
        if len(exps) != len(self.gens):
            raise ValueError("exponent vector has wrong length")
        k = 0
        deg = 0
        for i, e in enumerate(exps):
            if e < 0:
                raise ValueError("negative exponent")
            if not e:
                continue
            if self.gens[i].parity == "odd" and e > 1:
                return None
            deg += e * self.gens[i].degree
            if deg > self.degree_cap:
                return None
            k += e * self._unit[i]
        return k

    def exponents(self, key):
        out = [0] * len(self.gens)
        for i, s in enumerate(self.gens):
            if s.parity == "odd":
                out[i] = (key >> self._oddbit[i]) & 1
            else:
                off, width = self._field[i]
                out[i] = (key >> off) & ((1 << width) - 1)
        return tuple(out)

    def key_degree(self, key):
        return key >> self.dshift

    # -- element constructors -------------------------------------------
    def zero(self):
        return GradedElement(self, {}, 1)

    def one(self):
        return self.scalar(1)

    def scalar(self, c):
        c = Fraction(c)
        if not c:
            return self.zero()
        return GradedElement(self, {0: c.numerator}, c.denominator)

    def gen(self, name):
        i = self.index.get(name)
        if i is None:
            raise KeyError(f"unknown generator {name!r}")
        if self.gens[i].degree > self.degree_cap:
            return self.zero()
        return GradedElement(self, {self._unit[i]: 1}, 1)

    def __call__(self, name):
        return self.gen(name)

    def monomial(self, word, coeff=1):
        """Ordered product of generator names (a list, repeats allowed), times coeff."""
        x = self.scalar(coeff)
        for name in word:
            x = x * self.gen(name)
        return x

    def from_exponents(self, table):
        """Element from {exponent tuple: coefficient} in canonical order."""
        terms = {}
        for exps, c in table.items():
            k = self.key(exps)
            if k is None:
                continue
            terms[k] = terms.get(k, 0) + Fraction(c)
        return _from_fractions(self, terms)

    # -- maps between rings ---------------------------------------------
    def embed(self, x):
        """Image of ``x`` under the inclusion sending each generator to the same name."""
        src = x.ring
        if src == self:
            return x
        pos = []
        for s in src.gens:
            j = self.index.get(s.name)
            if j is None or self.gens[j].degree != s.degree:
                raise ValueError(f"cannot embed generator {s.name}")
            pos.append(j)
        terms = {}
        for k, c in x.terms.items():
            if (k >> src.dshift) > self.degree_cap:
                continue
            exps = src.exponents(k)
            new = [0] * len(self.gens)
            oddseq = []
            for i, e in enumerate(exps):
                if e:
                    new[pos[i]] = e
                    if src.gens[i].parity == "odd":
                        oddseq.append(pos[i])
            nk = self.key(new)
            if nk is None:
                continue
            terms[nk] = terms.get(nk, 0) + _perm_sign(oddseq) * c
        terms = {k: c for k, c in terms.items() if c}
        return GradedElement(self, *_normalize(terms, x.den))

    def hom(self, images):
        """Ring homomorphism defined on generators by ``images`` (name -> element).

        Generators not listed map to the generator of the same name in the
        target ring, which must then contain it.  Degrees must be preserved.
        """
        return Hom(self, images)


class Hom:
    """Graded algebra homomorphism out of a ring, given on generators.

    Generators sent to the same-named target generator pass through
    untouched; terms are grouped by their remaining part so that each
    distinct image monomial is computed once.
    """

    def __init__(self, src, images, target=None):
        self.src = src
        if target is None:
            for v in images.values():
                target = v.ring
                break
        if target is None:
            raise ValueError("need at least one image to fix the target ring")
        self.target = target
        self.img = {}
        self.passthrough = []
        for i, s in enumerate(src.gens):
            if s.name in images:
                v = images[s.name]
                if v.ring != target:
                    raise ValueError("images live in different rings")
                for k in v.terms:
                    if (k >> target.dshift) != s.degree:
                        raise ValueError(f"image of {s.name} is not of degree {s.degree}")
                self.img[i] = v
            else:
                j = target.index.get(s.name)
                if j is None or target.gens[j].degree != s.degree:
                    raise ValueError(f"generator {s.name} has no image")
                self.passthrough.append(i)
        # split masks on source keys
        self._pmask = 0
        for i in self.passthrough:
            s = src.gens[i]
            if s.parity == "odd":
                self._pmask |= 1 << src._oddbit[i]
            else:
                off, width = src._field[i]
                self._pmask |= ((1 << width) - 1) << off
        self._oddm = (1 << src.nodd) - 1
        self._pow = {}
        self._mono = {}
        self._pkey = {}

    def _power(self, i, e):
        key = (i, e)
        p = self._pow.get(key)
        if p is None:
            p = self.img[i] if e == 1 else self._power(i, e - 1) * self.img[i]
            self._pow[key] = p
        return p

    def _image_mono(self, nk):
        # image(prefix * x_i^e) = image(prefix) * image(x_i)^e with i the last
        # generator present; prefixes are shared between many monomials
        m = self._mono.get(nk)
        if m is None:
            exps = list(self.src.exponents(nk))
            last = max((i for i, e in enumerate(exps) if e), default=None)
            if last is None:
                m = self.target.one()
            else:
                e = exps[last]
                exps[last] = 0
                pre = self._image_mono(self.src.key(exps))
                m = pre * self._power(last, e) if pre.terms else pre
            self._mono[nk] = m
        return m

    def _target_key(self, pk):
        tk = self._pkey.get(pk)
        if tk is None:
            src, tgt = self.src, self.target
            exps = src.exponents(pk)
            new = [0] * len(tgt.gens)
            oddseq = []
            for i, e in enumerate(exps):
                if e:
                    j = tgt.index[src.gens[i].name]
                    new[j] = e
                    if src.gens[i].parity == "odd":
                        oddseq.append(j)
            k = tgt.key(new)
            tk = None if k is None else (k, _perm_sign(oddseq))
            self._pkey[pk] = tk if tk is not None else (None, 0)
            return tk
        return tk if tk[0] is not None else None

    def __call__(self, x):
        if x.ring != self.src:
            raise ValueError("element is not in the source ring")
        src = self.src
        pmask = self._pmask
        dmask = ((1 << src.dshift) - 1)
        oddm = self._oddm
        groups = {}
        for k, c in x.terms.items():
            body = k & dmask
            pbody = body & pmask
            nbody = body & ~pmask
            # degrees of the parts
            pk = pbody | (self._part_degree(pbody) << src.dshift)
            nk = k - pk
            # sign of writing the canonical monomial as (passthrough)(rest)
            po, no = pbody & oddm, nbody & oddm
            par = 0
            t = po
            while t:
                low = t & -t
                par += (no & (low - 1)).bit_count()
                t ^= low
            tk = self._target_key(pk)
            if tk is None:
                continue
            tkey, sg = tk
            if par & 1:
                sg = -sg
            grp = groups.setdefault(nk, {})
            grp[tkey] = grp.get(tkey, 0) + sg * c
        tgt = self.target
        triples = []
        for nk in sorted(groups):
            terms = {k: c for k, c in groups[nk].items() if c}
            if not terms:
                continue
            left = GradedElement(tgt, *_normalize(terms, x.den))
            triples.append((left, self._image_mono(nk), 1))
        return sum_of_products(triples, tgt) if triples else tgt.zero()

    def _part_degree(self, body):
        src = self.src
        deg = 0
        for i in self.passthrough:
            s = src.gens[i]
            if s.parity == "odd":
                if (body >> src._oddbit[i]) & 1:
                    deg += s.degree
            else:
                off, width = src._field[i]
                deg += s.degree * ((body >> off) & ((1 << width) - 1))
        return deg


class GradedElement:
    """Sparse element of a truncated free graded-commutative algebra.

    ``terms`` maps monomial keys to integer numerators over ``den``.
    """

    __slots__ = ("ring", "terms", "den")

    def __init__(self, ring, terms, den=1):
        self.ring = ring
        self.terms = terms
        self.den = den

    def _other(self, y):
        if isinstance(y, GradedElement):
            if y.ring is not self.ring and y.ring != self.ring:
                raise ValueError("ring mismatch")
            return y
        if isinstance(y, (int, Fraction)):
            return self.ring.scalar(y)
        return NotImplemented

    # -- arithmetic -------------------------------------------------------
    def __add__(self, y):
        y = self._other(y)
        if y is NotImplemented:
            return y
        if not y.terms:
            return self
        if not self.terms:
            return y
        return _sum_scaled(self.ring, [(self, 1), (y, 1)])

    __radd__ = __add__

    def __neg__(self):
        return GradedElement(self.ring, {k: -c for k, c in self.terms.items()}, self.den)

    def __sub__(self, y):
        y = self._other(y)
        if y is NotImplemented:
            return y
        return self + (-y)

    def __rsub__(self, y):
        return (-self) + y

    def scale(self, c):
        c = Fraction(c)
        if not c or not self.terms:
            return self.ring.zero()
        p, q = c.numerator, c.denominator
        terms = {k: v * p for k, v in self.terms.items()}
        return GradedElement(self.ring, *_normalize(terms, self.den * q))

    def __mul__(self, y):
        if isinstance(y, (int, Fraction)):
            return self.scale(y)
        y = self._other(y)
        if y is NotImplemented:
            return y
        if not self.terms or not y.terms:
            return self.ring.zero()
        r = self.ring
        terms = _mul_terms(self.terms, y.terms, r.nodd, r.dshift, r.degree_cap)
        return GradedElement(r, *_normalize(terms, self.den * y.den))

    def __rmul__(self, y):
        if isinstance(y, (int, Fraction)):
            return self.scale(y)
        return NotImplemented

    def __truediv__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(c))
        return NotImplemented

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            raise ValueError("only nonnegative integer powers")
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- comparison -------------------------------------------------------
    def __eq__(self, y):
        if isinstance(y, (int, Fraction)):
            y = self.ring.scalar(y)
        if not isinstance(y, GradedElement):
            return NotImplemented
        return self.ring == y.ring and self.den == y.den and self.terms == y.terms

    def __hash__(self):
        return hash((self.ring, self.den, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __len__(self):
        return len(self.terms)

    # -- inspection -------------------------------------------------------
    def _filtered(self, pred):
        terms = {k: c for k, c in self.terms.items() if pred(k)}
        return GradedElement(self.ring, *_normalize(terms, self.den))

    def constant_term(self):
        return Fraction(self.terms.get(0, 0), self.den)

    def homogeneous(self, deg):
        sh = self.ring.dshift
        return self._filtered(lambda k: k >> sh == deg)

    def degrees(self):
        sh = self.ring.dshift
        return sorted({k >> sh for k in self.terms})

    def is_homogeneous(self, deg=None):
        ds = self.degrees()
        if not ds:
            return True
        return len(ds) == 1 and (deg is None or ds[0] == deg)

    def items(self):
        """Sorted list of (exponent tuple, Fraction coefficient)."""
        r = self.ring
        return [(r.exponents(k), Fraction(c, self.den)) for k, c in sorted(self.terms.items())]

    def coefficient(self, exps):
        k = self.ring.key(exps)
        if k is None:
            return Fraction(0)
        return Fraction(self.terms.get(k, 0), self.den)

    def truncate(self, deg):
        sh = self.ring.dshift
        return self._filtered(lambda k: k >> sh <= deg)

    def even_part(self):
        sh = self.ring.dshift
        return self._filtered(lambda k: not (k >> sh) & 1)

    def parity_twist(self):
        """x -> (-1)^{|x|} x, termwise."""
        sh = self.ring.dshift
        return GradedElement(
            self.ring, {k: (-c if (k >> sh) & 1 else c) for k, c in self.terms.items()}, self.den
        )

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        names = self.ring.names
        for exps, c in self.items():
            mono = "*".join(
                names[i] if e == 1 else f"{names[i]}^{e}" for i, e in enumerate(exps) if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def exp(self):
        return exp_log(self, "exp")

    def log(self):
        return exp_log(self, "log")


def _sum_scaled(ring, pairs):
    """sum of c_i * x_i for (GradedElement, int|Fraction) pairs, in one pass."""
    pairs = [(x, Fraction(c)) for x, c in pairs if x.terms and c]
    if not pairs:
        return ring.zero()
    den = lcm(*[x.den * c.denominator for x, c in pairs])
    out = {}
    get = out.get
    for x, c in pairs:
        f = c.numerator * (den // (x.den * c.denominator))
        for k, v in x.terms.items():
            out[k] = get(k, 0) + f * v
    out = {k: v for k, v in out.items() if v}
    return GradedElement(ring, *_normalize(out, den))


def sum_of_products(triples, ring):
    """sum of c * x * y over (x, y, c) triples, accumulated in one pass."""
    ts = []
    for x, y, c in triples:
        if x.ring != ring or y.ring != ring:
            raise ValueError("ring mismatch")
        c = Fraction(c)
        if x.terms and y.terms and c:
            ts.append((x, y, c))
    if not ts:
        return ring.zero()
    den = lcm(*[x.den * y.den * c.denominator for x, y, c in ts])
    raw = [(x.terms, y.terms, c.numerator * (den // (x.den * y.den * c.denominator))) for x, y, c in ts]
    terms = _mul_sum(raw, ring.nodd, ring.dshift, ring.degree_cap)
    return GradedElement(ring, *_normalize(terms, den))


def linear_combination(pairs, ring=None):
    """Exact sum of coeff * element over (element, coeff) pairs."""
    pairs = list(pairs)
    if ring is None:
        if not pairs:
            raise ValueError("empty combination needs a ring")
        ring = pairs[0][0].ring
    for x, _ in pairs:
        if x.ring != ring:
            raise ValueError("ring mismatch")
    return _sum_scaled(ring, pairs)


def ring_arithmetic(x, y, op):
    """Dispatch for add/mul/neg/scale; ``y`` is the scalar for scale."""
    if op == "add":
        return x + y
    if op == "mul":
        if not isinstance(y, GradedElement):
            raise ValueError("mul expects two ring elements")
        return x * y
    if op == "neg":
        return -x
    if op == "scale":
        return x.scale(y)
    raise ValueError(f"unknown op {op!r}")


def exp_log(x, which):
    """exp of an element with zero constant term, or log of one with constant 1."""
    r = x.ring
    c0 = x.constant_term()
    if which == "exp":
        if c0:
            raise ValueError("exp needs constant term 0")
        parts = [(r.one(), 1)]
        term = r.one()
        k = 1
        while True:
            term = (term * x).scale(Fraction(1, k))
            if not term.terms:
                break
            parts.append((term, 1))
            k += 1
        return _sum_scaled(r, parts)
    if which == "log":
        if c0 != 1:
            raise ValueError("log needs constant term 1")
        y = x - 1
        parts = []
        power = r.one()
        k = 1
        while True:
            power = power * y
            if not power.terms:
                break
            parts.append((power, Fraction((-1) ** (k + 1), k)))
            k += 1
        return _sum_scaled(r, parts)
    raise ValueError(f"unknown function {which!r}")


class TSeries:
    """Truncated power series sum_{r<=t_cap} c_r t^r with coefficients in a Ring."""

    __slots__ = ("ring", "coeffs", "t_cap")

    def __init__(self, ring, coeffs, t_cap):
        if t_cap < 0:
            raise ValueError("t_cap must be nonnegative")
        cs = []
        for c in list(coeffs)[: t_cap + 1]:
            if isinstance(c, (int, Fraction)):
                c = ring.scalar(c)
            elif c.ring != ring:
                raise ValueError("coefficient ring mismatch")
            cs.append(c)
        while cs and not cs[-1].terms:
            cs.pop()
        self.ring = ring
        self.coeffs = tuple(cs)
        self.t_cap = t_cap

    @classmethod
    def constant(cls, x, t_cap):
        return cls(x.ring, [x], t_cap)

    @classmethod
    def one(cls, ring, t_cap):
        return cls(ring, [ring.one()], t_cap)

    def coeff(self, r):
        if r > self.t_cap:
            raise ValueError(f"t^{r} lies beyond t_cap={self.t_cap}")
        if r < 0 or r >= len(self.coeffs):
            return self.ring.zero()
        return self.coeffs[r]

    __getitem__ = coeff

    def __len__(self):
        return len(self.coeffs)

    def _other(self, y):
        if isinstance(y, TSeries):
            if y.ring != self.ring:
                raise ValueError("ring mismatch")
            return y
        if isinstance(y, (int, Fraction)):
            return TSeries(self.ring, [self.ring.scalar(y)], self.t_cap)
        if isinstance(y, GradedElement):
            return TSeries(self.ring, [y], self.t_cap)
        return NotImplemented

    def __add__(self, y):
        y = self._other(y)
        if y is NotImplemented:
            return y
        cap = min(self.t_cap, y.t_cap)
        n = max(len(self.coeffs), len(y.coeffs))
        z = self.ring.zero()
        out = []
        for r in range(min(n, cap + 1)):
            a = self.coeffs[r] if r < len(self.coeffs) else z
            b = y.coeffs[r] if r < len(y.coeffs) else z
            out.append(a + b)
        return TSeries(self.ring, out, cap)

    __radd__ = __add__

    def __neg__(self):
        return TSeries(self.ring, [-c for c in self.coeffs], self.t_cap)

    def __sub__(self, y):
        y = self._other(y)
        if y is NotImplemented:
            return y
        return self + (-y)

    def __rsub__(self, y):
        return (-self) + y

    def scale(self, c):
        if isinstance(c, GradedElement):
            return TSeries(self.ring, [c * x for x in self.coeffs], self.t_cap)
        return TSeries(self.ring, [x.scale(c) for x in self.coeffs], self.t_cap)

    def __mul__(self, y):
        if isinstance(y, (int, Fraction)):
            return self.scale(y)
        y = self._other(y)
        if y is NotImplemented:
            return y
        cap = min(self.t_cap, y.t_cap)
        n = min(len(self.coeffs) + len(y.coeffs) - 1, cap + 1)
        out = []
        for r in range(max(n, 0)):
            triples = []
            for i in range(max(0, r - len(y.coeffs) + 1), min(r, len(self.coeffs) - 1) + 1):
                triples.append((self.coeffs[i], y.coeffs[r - i], 1))
            out.append(sum_of_products(triples, self.ring))
        return TSeries(self.ring, out, cap)

    def __rmul__(self, y):
        if isinstance(y, (int, Fraction)):
            return self.scale(y)
        if isinstance(y, GradedElement):
            return TSeries(self.ring, [y * x for x in self.coeffs], self.t_cap)
        return NotImplemented

    def __pow__(self, e):
        if not isinstance(e, int):
            raise ValueError("integer powers only")
        if e < 0:
            return self.reciprocal() ** (-e)
        result = TSeries.one(self.ring, self.t_cap)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, y):
        if isinstance(y, (int, Fraction, GradedElement)):
            y = self._other(y)
        if not isinstance(y, TSeries):
            return NotImplemented
        return self.ring == y.ring and self.coeffs == y.coeffs

    def __hash__(self):
        return hash((self.ring, self.coeffs))

    def is_zero(self):
        return not self.coeffs

    def truncate(self, t_cap):
        return TSeries(self.ring, self.coeffs, min(t_cap, self.t_cap))

    def with_t_cap(self, t_cap):
        return TSeries(self.ring, self.coeffs, t_cap)

    def shift(self, k):
        """Multiply by t^k (k >= 0)."""
        return TSeries(self.ring, [self.ring.zero()] * k + list(self.coeffs), self.t_cap)

    def map(self, f, ring=None):
        ring = ring or self.ring
        return TSeries(ring, [f(c) for c in self.coeffs], self.t_cap)

    def ddt(self):
        return TSeries(self.ring, [c.scale(r) for r, c in enumerate(self.coeffs) if r > 0], self.t_cap)

    def _check_central(self):
        sh = self.ring.dshift
        for c in self.coeffs:
            for k in c.terms:
                if (k >> sh) & 1:
                    raise ValueError("series calculus needs even (central) coefficients")

    def reciprocal(self):
        if self.coeff(0) != 1:
            raise ValueError("reciprocal needs constant coefficient 1")
        self._check_central()
        # u_r = -sum_{j=1}^{r} c_j u_{r-j}
        us = [self.ring.one()]
        for r in range(1, self.t_cap + 1):
            triples = []
            for j in range(1, min(r, len(self.coeffs) - 1) + 1):
                triples.append((self.coeffs[j], us[r - j], -1))
            us.append(sum_of_products(triples, self.ring))
        return TSeries(self.ring, us, self.t_cap)

    def exp(self):
        """exp of a series with zero constant coefficient (E' = S'E)."""
        if self.coeff(0):
            raise ValueError("exp needs zero constant coefficient")
        self._check_central()
        es = [self.ring.one()]
        n = len(self.coeffs)
        for k in range(1, self.t_cap + 1):
            triples = []
            for j in range(1, min(k, n - 1) + 1):
                triples.append((self.coeffs[j], es[k - j], Fraction(j, k)))
            es.append(sum_of_products(triples, self.ring))
        return TSeries(self.ring, es, self.t_cap)

    def log(self):
        """log of a series with constant coefficient 1 (L' = S'/S)."""
        if self.coeff(0) != 1:
            raise ValueError("log needs constant coefficient 1")
        d = self.ddt() * self.reciprocal()
        return TSeries(
            self.ring,
            [self.ring.zero()] + [d.coeff(r - 1).scale(Fraction(1, r)) for r in range(1, self.t_cap + 1)],
            self.t_cap,
        )

    def __repr__(self):
        parts = [f"({c})*t^{r}" for r, c in enumerate(self.coeffs) if c.terms]
        return " + ".join(parts) if parts else "0"


def tseries_calculus(s, op, r=None):
    if op == "mul":
        if not isinstance(r, TSeries):
            raise ValueError("mul needs a second series")
        return s * r
    if op == "ddt":
        return s.ddt()
    if op == "coeff":
        return s.coeff(r)
    if op == "reciprocal":
        return s.reciprocal()
    raise ValueError(f"unknown op {op!r}")


def binomial_power(u, m, w=None):
    """(1+u)^(m+w) = (1+u)^m * exp(w log(1+u)) for a t-series u with u(0) = 0.

    ``w`` is an even ring element (nilpotent under the cap) or None.
    """
    if isinstance(m, Fraction):
        if m.denominator != 1:
            raise ValueError("integer exponent expected")
        m = int(m)
    if u.coeff(0):
        raise ValueError("u must have zero constant coefficient")
    one_plus = u + 1
    if m >= 0:
        base = one_plus ** m
    else:
        base = one_plus.reciprocal() ** (-m)
    if w is None or not w.terms:
        return base
    sh = w.ring.dshift
    for k in w.terms:
        if (k >> sh) & 1:
            raise ValueError("w must be even")
    return base * one_plus.log().scale(w).exp()


# -- Weyl (anti)symmetrization ------------------------------------------


def relabel(x, mapping):
    """Apply a renaming of generators (a degree-preserving bijection)."""
    r = x.ring
    for a, b in mapping.items():
        if r.gens[r.index[a]].degree != r.gens[r.index[b]].degree:
            raise ValueError(f"relabeling {a}->{b} does not preserve degree")
    if sorted(mapping) != sorted(mapping.values()):
        raise ValueError("relabeling is not a permutation")
    perm = [r.index[mapping.get(s.name, s.name)] for s in r.gens]
    terms = {}
    for k, c in x.terms.items():
        exps = r.exponents(k)
        new = [0] * len(r.gens)
        oddseq = []
        for i, e in enumerate(exps):
            if e:
                new[perm[i]] = e
                if r.gens[i].parity == "odd":
                    oddseq.append(perm[i])
        nk = r.key(new)
        terms[nk] = terms.get(nk, 0) + _perm_sign(oddseq) * c
    terms = {k: c for k, c in terms.items() if c}
    return GradedElement(r, *_normalize(terms, x.den))


def block_permutation_map(blocks, w):
    """Renaming sending block i to block w[i] (blocks are equal-length name lists)."""
    mapping = {}
    for i, blk in enumerate(blocks):
        tgt = blocks[w[i]]
        if len(tgt) != len(blk):
            raise ValueError("blocks have different shapes")
        for a, b in zip(blk, tgt):
            mapping[a] = b
    return mapping


def perm_sign(w):
    return _perm_sign(list(w))


def antisymmetrize(x, blocks, perms=None, sign=True):
    """(1/|W|) sum_w (-1)^w w(x) over permutations of ``blocks``.

    ``perms`` defaults to the full symmetric group on the blocks.
    With ``sign=False`` this symmetrizes instead.
    """
    if perms is None:
        perms = list(itertools.permutations(range(len(blocks))))
    parts = []
    for w in perms:
        y = relabel(x, block_permutation_map(blocks, w))
        parts.append((y, -1 if (sign and perm_sign(w) < 0) else 1))
    return _sum_scaled(x.ring, parts).scale(Fraction(1, len(perms)))


# -- serialization --------------------------------------------------------

SCHEMA_ELEMENT = "hnrel.graded-element/1"
SCHEMA_SERIES = "hnrel.tseries/1"


def ring_header(r):
    return {
        "generators": [{"name": s.name, "degree": s.degree, "parity": s.parity} for s in r.gens],
        "degree_cap": r.degree_cap,
    }


def terms_json(x):
    names = x.ring.names
    out = []
    for exps, c in x.items():
        out.append(
            {
                "monomial": [[names[i], e] for i, e in enumerate(exps) if e],
                "coeff": fmt_rational(c),
            }
        )
    return out


def element_to_json(x):
    d = {"schema": SCHEMA_ELEMENT}
    d.update(ring_header(x.ring))
    d["terms"] = terms_json(x)
    return d


def series_to_json(s):
    d = {"schema": SCHEMA_SERIES}
    d.update(ring_header(s.ring))
    d["t_cap"] = s.t_cap
    d["coefficients"] = [terms_json(c) for c in s.coeffs]
    return d


def _ring_from_json(d):
    return Ring([GeneratorSpec(g["name"], g["degree"], g["parity"]) for g in d["generators"]], d["degree_cap"])


def _terms_from_json(r, lst):
    table = {}
    for t in lst:
        exps = [0] * len(r.gens)
        for name, e in t["monomial"]:
            exps[r.index[name]] = e
        table[tuple(exps)] = parse_rational(t["coeff"])
    return r.from_exponents(table)


def element_from_json(d):
    r = _ring_from_json(d)
    return _terms_from_json(r, d["terms"])


def series_from_json(d):
    r = _ring_from_json(d)
    return TSeries(r, [_terms_from_json(r, c) for c in d["coefficients"]], d["t_cap"])


def dumps(obj):
    if isinstance(obj, GradedElement):
        obj = element_to_json(obj)
    elif isinstance(obj, TSeries):
        obj = series_to_json(obj)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))

