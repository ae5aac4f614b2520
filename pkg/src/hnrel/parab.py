"""Parabolic data at one marked point: degrees, good data, ranks and windows."""

import itertools
from fractions import Fraction
from typing import NamedTuple


class ParabolicData(NamedTuple):
    n: int
    d: int
    weights: tuple  # 0 <= alpha_1 < ... < alpha_m < 1
    mults: tuple  # j_1..j_m, positive, summing to n

    @classmethod
    def make(cls, n, d, weights, mults):
        w = tuple(Fraction(x) for x in weights)
        j = tuple(int(x) for x in mults)
        if len(w) != len(j) or not w:
            raise ValueError("need one multiplicity per weight")
        if not (0 <= w[0] and w[-1] < 1 and all(a < b for a, b in zip(w, w[1:]))):
            raise ValueError("weights must satisfy 0 <= a_1 < ... < a_m < 1")
        if any(x < 1 for x in j) or sum(j) != n:
            raise ValueError("multiplicities must be positive and sum to n")
        return cls(int(n), int(d), w, j)

    @property
    def m(self):
        return len(self.weights)


class SubParabolicData(NamedTuple):
    nh: int
    dh: int
    jh: tuple

    @classmethod
    def make(cls, pd, nh, dh, jh):
        jh = tuple(int(x) for x in jh)
        if not 0 < nh < pd.n:
            raise ValueError("need 0 < nhat < n")
        if len(jh) != pd.m or any(not 0 <= a <= b for a, b in zip(jh, pd.mults)) or sum(jh) != nh:
            raise ValueError("need 0 <= jhat_k <= j_k summing to nhat")
        return cls(int(nh), int(dh), jh)


def _pardeg(d, weights, mults):
    return d + sum((a * j for a, j in zip(weights, mults)), Fraction(0))


def par_degree_slope(pd):
    """(pardeg, parslope) with pardeg = d + sum_k alpha_k j_k."""
    p = _pardeg(pd.d, pd.weights, pd.mults)
    return p, p / pd.n


def sub_slope(pd, sub):
    return _pardeg(sub.dh, pd.weights, sub.jh) / sub.nh


def in_window(pd, sub):
    """parmu(E) < parmu(sub) < parmu(E) + 1, both strict."""
    mu = par_degree_slope(pd)[1]
    s = sub_slope(pd, sub)
    return mu < s < mu + 1


def flag_correction(mults, jh):
    """sum_{l=2}^m (j_1 + ... + j_{l-1}) jhat_l."""
    out = 0
    acc = 0
    for j, h in zip(mults, jh):
        out += acc * h
        acc += j
    return out


def par_rank_formula(pd, sub, g):
    """n nh (g-1) + dh n - d nh + sum_{l>=2} (j_1+..+j_{l-1}) jhat_l."""
    if not in_window(pd, sub):
        raise ValueError("sub data outside the slope window")
    n, d = pd.n, pd.d
    return n * sub.nh * (g - 1) + sub.dh * n - d * sub.nh + flag_correction(pd.mults, sub.jh)


def par_relation_window(pd, sub, g):
    """Open window of r: R < r < R + 2 n nh with R = par_rank_formula."""
    lo = par_rank_formula(pd, sub, g)
    return range(lo + 1, lo + 2 * pd.n * sub.nh)


# -- good data -----------------------------------------------------------------


def _sub_multiplicities(mults, total):
    ranges = [range(j + 1) for j in mults]
    for jh in itertools.product(*ranges):
        if sum(jh) == total:
            yield jh


def _equal_slope_witnesses(n, d, weights, mults):
    """Sub data (n', d', k) with 0 < n' < n and the same parabolic slope.

    Returns (witnesses, slacks) where slacks lists (distance to an integer,
    L1 norm of the alpha-coefficients) for every non-identical failed equality.
    """
    mu = _pardeg(d, weights, mults) / n
    found = []
    slacks = []
    for n1 in range(1, n):
        for k in _sub_multiplicities(mults, n1):
            need = n1 * mu - sum((a * x for a, x in zip(weights, k)), Fraction(0))
            coeffs = [Fraction(n1 * j, n) - x for j, x in zip(mults, k)]
            if need.denominator == 1:
                found.append((n1, int(need), tuple(k)))
            else:
                fl = need.numerator // need.denominator
                dist = min(need - fl, fl + 1 - need)
                norm = sum(abs(c) for c in coeffs)
                slacks.append((dist, norm))
    return found, slacks


def good_data_check(pd):
    """Is (n, d, alpha, j) a good choice of parabolic data?

    Two levels are checked.  The data itself must have semistable = stable
    (no proper sub data of equal parabolic slope).  Every sub data
    (nh, dh, jhat) in the open window parmu < parmu(sub) < parmu + 1 must
    have the same property for its own weights and multiplicities.  dh only
    matters modulo nh, and the window already contains at most nh values.

    Returns a dict with "good", "witnesses" and "margin": weight perturbations
    of sup-norm below the margin leave the verdict unchanged.
    """
    witnesses = []
    bounds = []
    top, sl = _equal_slope_witnesses(pd.n, pd.d, pd.weights, pd.mults)
    bounds += sl
    for nh, dh, k in top:
        witnesses.append({"level": "data", "nhat": nh, "dhat": dh, "jhat": list(k), "inner": None})
    _, mu = par_degree_slope(pd)
    for nh in range(1, pd.n):
        for jh in _sub_multiplicities(pd.mults, nh):
            wsum = sum((a * x for a, x in zip(pd.weights, jh)), Fraction(0))
            # mu < (dh + wsum)/nh < mu + 1
            lo, hi = nh * mu - wsum, nh * (mu + 1) - wsum
            coeffs = [Fraction(nh * j, pd.n) - x for j, x in zip(pd.mults, jh)]
            norm = sum(abs(c) for c in coeffs)
            for edge in (lo, hi):
                if edge.denominator != 1:
                    fl = edge.numerator // edge.denominator
                    bounds.append((min(edge - fl, fl + 1 - edge), norm))
            dh = lo.numerator // lo.denominator + 1
            while dh < hi:
                inner = [x for x in jh if x]
                iw = tuple(a for a, x in zip(pd.weights, jh) if x)
                found, sl = _equal_slope_witnesses(nh, dh, iw, tuple(inner))
                bounds += sl
                for n1, d1, k in found:
                    full = []
                    it = iter(k)
                    for x in jh:
                        full.append(next(it) if x else 0)
                    witnesses.append(
                        {"level": "sub", "nhat": nh, "dhat": dh, "jhat": list(jh), "inner": [n1, d1, full]}
                    )
                dh += 1
    margin = None
    for dist, norm in bounds:
        if norm:
            v = dist / norm
            margin = v if margin is None else min(margin, v)
    return {"good": not witnesses, "witnesses": witnesses, "margin": margin}


def perturb(pd, big_n):
    """Weights alpha_k + k/N, a small generic perturbation for large N."""
    if big_n <= 0:
        raise ValueError("N must be positive")
    w = [a + Fraction(k, big_n) for k, a in enumerate(pd.weights, 1)]
    return ParabolicData.make(pd.n, pd.d, w, pd.mults)


def generic_full_flag(n, d):
    """Full flag j = (1, .., 1) with weights k/(n^2 + k)."""
    return ParabolicData.make(n, d, [Fraction(k, n * n + k) for k in range(1, n + 1)], [1] * n)


# -- weight counts -------------------------------------------------------------


def derived_jhat(J, mults):
    """jhat_k = |J meet the k-th block of {1..n}|."""
    J = set(J)
    out = []
    start = 0
    for j in mults:
        out.append(sum(1 for x in range(start + 1, start + j + 1) if x in J))
        start += j
    return tuple(out)


def weight_degree_count(J, mults, jh=None):
    """sum_{l=2}^n |J meet {l..n}| - sum_{k=2}^m (j_1+..+j_{k-1}) jhat_k."""
    J = sorted(set(J))
    n = sum(mults)
    if not J or J[0] < 1 or J[-1] > n:
        raise ValueError("J must be a nonempty subset of {1..n}")
    expect = derived_jhat(J, mults)
    if jh is not None and tuple(jh) != expect:
        raise ValueError("jhat is inconsistent with J")
    s = sum(sum(1 for x in J if x >= l) for l in range(2, n + 1))
    return s - flag_correction(mults, expect)


def weight_count_direct(J, mults):
    """Number of torus weights lambda_l - lambdahat_i with
    |J meet {1..l}| < i <= jhat_1 + .. + jhat_k, l in block k."""
    J = set(J)
    jh = derived_jhat(J, mults)
    count = 0
    start = 0
    hcum = 0
    for k, j in enumerate(mults):
        hcum += jh[k]
        for l in range(start + 1, start + j + 1):
            below = sum(1 for x in J if x <= l)
            count += max(0, hcum - below)
        start += j
    return count
