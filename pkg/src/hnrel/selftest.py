"""Desk-scale invariant battery used by ``hnrel selftest``."""

import contextlib
import time
from fractions import Fraction
from math import comb

from . import _kernels_py, exactalg
from .betti import moduli_dimension, p_moduli
from .exactalg import Ring, TSeries
from .kunneth import character_to_chern, chern_to_character
from .parab import generic_full_flag, good_data_check, weight_degree_count, ParabolicData
from .relgen import BundleData, build_ring, grr_minus_pi, recurrence_residual, shift_identity_check
from .respair import SplitHatRing, residue_scalar, split_chern_poly, torus_restrict_hat
from .strata import enumerate_hn_types, codim_mu, telescoped_codim


def _koszul():
    r = Ring([("b1", 1), ("b2", 1), ("b3", 1), ("a", 2)], 6)
    b1, b2, b3, a = r.gen("b1"), r.gen("b2"), r.gen("b3"), r.gen("a")
    ok = b1 * b2 == -(b2 * b1) and (b1 * b1).is_zero()
    ok = ok and (b3 * b1) * b2 == b1 * b2 * b3 and a * b1 == b1 * a
    x = b1 + a * b2
    y = b2 * b3 + a
    return ok and x * y - (b2 * b3 + a) * x == r.zero() and (b1 + b2) * (b1 + b2) == r.zero()


def _exp_log():
    r = Ring([("a", 2), ("b1", 1), ("b2", 1), ("f", 2)], 10)
    x = r.gen("a") + r.gen("b1") * r.gen("b2") + r.gen("f").scale(Fraction(1, 3))
    return x.exp().log() == x and (x.exp() * (-x).exp()) == r.one()


def _newton():
    r = Ring([("x", 2), ("y", 2)], 12)
    x, y = r.gen("x"), r.gen("y")
    c = [x + y, x * y]
    ch = chern_to_character(c, 5)
    s = character_to_chern(ch, 2, 5)
    return s.coeffs == (r.one(), x + y, x * y)


def _betti():
    ok = p_moduli(2, 1, 2, 10) == [1, 4, 7, 12, 24, 32, 24, 12, 7, 4, 1]
    for g in (2, 3):
        p = p_moduli(1, 1, g, moduli_dimension(1, g))
        ok = ok and p == [comb(2 * g, k) for k in range(2 * g + 1)]
    return ok


def _strata():
    for n in (2, 3, 4):
        for d in range(n):
            for mu in enumerate_hn_types(n, d, 2, 12):
                if codim_mu(mu, 2) != telescoped_codim(mu, 2):
                    return False
    return True


def _relgen():
    main, hat = BundleData(2, 1, 2), BundleData(1, 1, 2, "h")
    res = recurrence_residual(main, hat, 8)
    return all(x.is_zero() for x in res.values()) and shift_identity_check(main, hat, 1, 6)


def _respair():
    main = BundleData(2, 1, 2)
    hat = BundleData(2, 3, 2, "h")
    ring = build_ring([main, hat], 10)
    c = grr_minus_pi(main, hat, 5, ring)
    split = SplitHatRing.make(main, 2, (1, 2), 10)
    left = TSeries(split.ring, [torus_restrict_hat(x, split) for x in c.coeffs], 5)
    ok = left == split_chern_poly(main, split, 5)
    ok = ok and residue_scalar((0,), {(1,): 1}) == 1
    return ok and residue_scalar((0, 0), {(1, 0): 1, (0, 1): 1, (1, 1): 1}) == 0


def _parab():
    ok = good_data_check(generic_full_flag(3, 1))["good"]
    ok = ok and not good_data_check(ParabolicData.make(2, 0, [0], [2]))["good"]
    return ok and weight_degree_count([1, 3], [1, 1, 1, 1]) == 0


SUITES = [
    ("koszul", _koszul),
    ("exp_log", _exp_log),
    ("newton", _newton),
    ("betti", _betti),
    ("strata", _strata),
    ("relgen", _relgen),
    ("respair", _respair),
    ("parab", _parab),
]


@contextlib.contextmanager
def koszul_mutation():
    """Run with the Koszul sign switched off in the pure-Python kernel."""
    old_kernel = exactalg.use_kernel("python")
    old = _kernels_py.koszul_parity
    _kernels_py.koszul_parity = lambda xo, yo: 0
    try:
        yield
    finally:
        _kernels_py.koszul_parity = old
        exactalg.use_kernel(old_kernel)


def run(mutate=None):
    """[{suite, ok, seconds, error}] for every suite."""
    ctx = koszul_mutation() if mutate == "koszul" else contextlib.nullcontext()
    out = []
    with ctx:
        for name, fn in SUITES:
            t = time.perf_counter()
            err = None
            try:
                ok = bool(fn())
            except Exception as e:  # a crash counts as a failure
                ok, err = False, f"{type(e).__name__}: {e}"
            out.append({"suite": name, "ok": ok, "seconds": round(time.perf_counter() - t, 3), "error": err})
    return out
