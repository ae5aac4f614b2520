"""Poincare series: gauge group, semistable stratum, moduli space, flags.

Series are plain lists of integers [c_0, .., c_cap] in the variable t.
"""

from math import gcd

from .strata import codim_mu, enumerate_hn_types


def _mul(x, y, cap):
    out = [0] * (cap + 1)
    for i, a in enumerate(x):
        if a == 0 or i > cap:
            continue
        for j, b in enumerate(y[: cap + 1 - i]):
            if b:
                out[i + j] += a * b
    return out


def _inv(x, cap):
    """1/x for an integer series with constant term 1."""
    if x[0] != 1:
        raise ValueError("constant term must be 1")
    out = [0] * (cap + 1)
    out[0] = 1
    for k in range(1, cap + 1):
        out[k] = -sum(x[i] * out[k - i] for i in range(1, min(k, len(x) - 1) + 1))
    return out


def _binom_poly(e, sign, power, cap):
    """(1 + sign t^e)^power as a series, power may be negative."""
    base = [0] * (cap + 1)
    base[0] = 1
    if e <= cap:
        base[e] = sign
    if power >= 0:
        out = [1] + [0] * cap
        for _ in range(power):
            out = _mul(out, base, cap)
        return out
    return _inv(_binom_poly(e, sign, -power, cap), cap)


def _pad(x, cap):
    x = list(x[: cap + 1])
    return x + [0] * (cap + 1 - len(x))


def p_gauge(n, g, t_cap):
    """Series of the free graded algebra on a_r, b_r^j, f_r."""
    if n < 1 or g < 2:
        raise ValueError("need n >= 1 and g >= 2")
    out = [1] + [0] * t_cap
    for k in range(1, n + 1):
        out = _mul(out, _binom_poly(2 * k - 1, 1, 2 * g, t_cap), t_cap)
        out = _mul(out, _binom_poly(2 * k, -1, -1, t_cap), t_cap)
        if k >= 2:
            out = _mul(out, _binom_poly(2 * k - 2, -1, -1, t_cap), t_cap)
    return out


_SS_MEMO = {}


def p_semistable(n, d, g, t_cap):
    """Equivariant series of the semistable stratum by the stratum recursion."""
    if g < 2:
        raise ValueError("genus must be at least 2")
    key = (n, d % n, g, t_cap)
    hit = _SS_MEMO.get(key)
    if hit is not None:
        return list(hit)
    d = d % n
    out = p_gauge(n, g, t_cap)
    for mu in enumerate_hn_types(n, d, g, t_cap // 2):
        if mu.is_semistable():
            continue
        e = 2 * codim_mu(mu, g)
        term = [0] * e + [1]
        for nj, dj in mu.blocks:
            term = _mul(term, p_semistable(nj, dj, g, t_cap - e), t_cap)
        out = [a - b for a, b in zip(out, _pad(term, t_cap))]
    _SS_MEMO[key] = tuple(out)
    return out


def stratum_contributions(n, d, g, t_cap):
    """[(mu, series)] for the unstable strata entering the recursion."""
    out = []
    for mu in enumerate_hn_types(n, d, g, t_cap // 2):
        if mu.is_semistable():
            continue
        e = 2 * codim_mu(mu, g)
        term = [0] * e + [1]
        for nj, dj in mu.blocks:
            term = _mul(term, p_semistable(nj, dj, g, t_cap - e), t_cap)
        out.append((mu, _pad(term, t_cap)))
    return out


def moduli_dimension(n, g):
    """Real dimension 2(n^2 (g-1) + 1)."""
    if n < 1 or g < 2:
        raise ValueError("need n >= 1 and g >= 2")
    return 2 * (n * n * (g - 1) + 1)


def p_moduli(n, d, g, t_cap):
    """Poincare polynomial of the moduli space, (1 - t^2) p_semistable."""
    if gcd(n, d) != 1:
        raise ValueError("n and d must be coprime: otherwise semistable and stable differ")
    top = moduli_dimension(n, g)
    if t_cap < top:
        raise ValueError(f"t_cap must be at least {top}")
    ss = p_semistable(n, d, g, t_cap)
    out = _mul(ss, [1, 0, -1], t_cap)
    if out[top] == 0 or any(out[top + 1 :]):
        raise ArithmeticError("result is not a polynomial of the expected degree")
    return out[: top + 1]


def _frac_part(p, q):
    """<p/q> = p/q - floor(p/q), returned as (numerator, q)."""
    return p % q, q


def _compositions(n):
    if n == 0:
        yield ()
        return
    for first in range(1, n + 1):
        for rest in _compositions(n - first):
            yield (first,) + rest


def p_closed(n, d, g, t_cap):
    """Closed formula under a literal reading, for comparison only.

    The t-power is taken as one overall factor with exponent
    2 sum_{i<j} n_i n_j (g-1) + sum_{i=1}^{l-1} (n_i + n_{i+1}) <-(n_1+..+n_i) d/n>,
    which is an integer because each <.> has denominator dividing n.
    """
    if gcd(n, d) != 1:
        raise ValueError("n and d must be coprime")
    out = [0] * (t_cap + 1)
    for comp in _compositions(n):
        l = len(comp)
        term = _binom_poly(1, 1, 2 * g * l, t_cap)
        term = _mul(term, _binom_poly(2, -1, -(l - 1), t_cap), t_cap)
        for nj in comp:
            for i in range(1, nj):
                term = _mul(term, _binom_poly(2 * i + 1, 1, 2 * g, t_cap), t_cap)
                term = _mul(term, _binom_poly(2 * i, -1, -1, t_cap), t_cap)
                term = _mul(term, _binom_poly(2 * i + 2, -1, -1, t_cap), t_cap)
        pairs = sum(comp[i] * comp[j] for j in range(l) for i in range(j))
        num = 2 * pairs * (g - 1) * n
        for i in range(l - 1):
            fp, q = _frac_part(-sum(comp[: i + 1]) * d, n)
            num += (comp[i] + comp[i + 1]) * fp
        if num % n:
            raise ArithmeticError("non-integral exponent")
        e = num // n
        for j in range(l - 1):
            term = _mul(term, _binom_poly(2 * (comp[j] + comp[j + 1]), -1, -1, t_cap), t_cap)
        shifted = ([0] * e + term)[: t_cap + 1] if e >= 0 else None
        if shifted is None:
            raise ArithmeticError("negative exponent")
        sign = -1 if (l - 1) % 2 else 1
        out = [a + sign * b for a, b in zip(out, _pad(shifted, t_cap))]
    return out


def closed_report(n, d, g, t_cap=None):
    """Compare p_closed with p_moduli; names the first differing coefficient."""
    top = moduli_dimension(n, g)
    cap = top + 4 if t_cap is None else max(t_cap, top)
    ref = _pad(p_moduli(n, d, g, cap), cap)
    got = p_closed(n, d, g, cap)
    first = next((k for k in range(cap + 1) if ref[k] != got[k]), None)
    return {
        "n": n,
        "d": d,
        "g": g,
        "t_cap": cap,
        "agree": first is None,
        "first_difference": None if first is None else {"power": first, "closed": got[first], "moduli": ref[first]},
        "closed": got,
        "moduli": ref,
    }


def p_flag(js, t_cap):
    """Gaussian multinomial prod_{i<=n}(1-t^{2i}) / prod_k prod_{i<=j_k}(1-t^{2i})."""
    js = list(js)
    if not js or any(j < 1 for j in js):
        raise ValueError("multiplicities must be positive")
    n = sum(js)
    out = [1] + [0] * t_cap
    for i in range(1, n + 1):
        out = _mul(out, _binom_poly(2 * i, -1, 1, t_cap), t_cap)
    for j in js:
        for i in range(1, j + 1):
            out = _mul(out, _binom_poly(2 * i, -1, -1, t_cap), t_cap)
    return out
