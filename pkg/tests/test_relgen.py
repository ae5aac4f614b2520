
import pytest
from hypothesis import given, settings, strategies as st

from hnrel.exactalg import TSeries, binomial_power
from hnrel.relgen import (
    BundleData,
    build_ring,
    euler_class,
    gen_names,
    grr_minus_pi,
    hat_monomial,
    kunneth_components,
    normalization_coeffs,
    normalization_relation,
    omega_poly,
    recurrence_q,
    recurrence_residual,
    relation_records,
    relation_window,
    shift_identity_check,
    trivial_line,
    virtual_rank,
)
from hnrel.strata import CoarseType, coarse_codim


def kill_odd_and_f(x, keep=("a",)):
    """Set every b and f generator to zero."""
    r = x.ring
    images = {s.name: r.zero() for s in r.gens if s.name[0] in "bf"}
    return r.hom(images)(x)


def test_virtual_rank_examples():
    assert virtual_rank(2, 1, 1, 1, 2) == 3
    with pytest.raises(ValueError):
        virtual_rank(2, 1, 2, 1, 2)
    for dh in range(1, 6):
        assert virtual_rank(3, 1, 2, dh + 2, 2) - virtual_rank(3, 1, 2, dh, 2) == 3 * 2


def test_relation_window_examples():
    assert list(relation_window(2, 1, 1, 1, 2)) == [4, 5, 6]
    assert list(relation_window(3, 1, 1, 1, 2)) == list(range(6, 11))
    with pytest.raises(ValueError):
        relation_window(2, 1, 1, 2, 2)
    with pytest.raises(ValueError):
        relation_window(2, 1, 2, 1, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(-6, 6), st.integers(1, 5), st.integers(-12, 12), st.integers(2, 5))
def test_window_width(n, d, nh, dh, g):
    if nh >= n or not (dh * n > d * nh and dh * n < (d + n) * nh):
        return
    w = relation_window(n, d, nh, dh, g)
    assert len(w) == 2 * n * nh - 1


@pytest.mark.parametrize("d,dh,g", [(1, 2, 2), (0, 3, 2), (2, 1, 3), (-1, 1, 3)])
def test_line_bundle_grr_oracle(d, dh, g):
    # b = f = 0: c(-pi_!) = (1 + (a_1 - ah_1) t)^{g - 1 + dh - d}
    main, hat = BundleData(1, d, g), BundleData(1, dh, g, "h")
    ring = build_ring([main, hat], 14)
    c = grr_minus_pi(main, hat, 7, ring)
    spec = c.map(kill_odd_and_f)
    x = ring.gen("a_1") - ring.gen("ah_1")
    want = binomial_power(TSeries(ring, [0, x], 7), g - 1 + dh - d)
    assert spec == want


def test_grr_homogeneous():
    main, hat = BundleData(2, 1, 2), BundleData(1, 1, 2, "h")
    c = grr_minus_pi(main, hat, 6, build_ring([main, hat], 12))
    for r in range(7):
        x = c.coeff(r)
        assert x.is_zero() or x.is_homogeneous(2 * r)


def test_grr_cap_guard():
    main, hat = BundleData(2, 1, 2), BundleData(1, 1, 2, "h")
    with pytest.raises(ValueError):
        grr_minus_pi(main, hat, 6, build_ring([main, hat], 10))


def test_mumford_specialization():
    # trivial hat, -n < d < 0: rank n(g-1) - d, classes above the rank vanish on M
    for n, d in [(2, -1), (3, -1), (3, -2)]:
        g = 2
        main = BundleData(n, d, g)
        hat = trivial_line(g)
        assert virtual_rank(n, d, 1, 0, g) == n * (g - 1) - d
        ring = build_ring([main, hat], 2 * 8)
        c = grr_minus_pi(main, hat, 8, ring)
        top = n * (g - 1) - d
        assert not c.coeff(top).is_zero()


def test_omega_poly_examples():
    main, hat = BundleData(1, 1, 2), BundleData(1, 1, 2, "h")
    ring = build_ring([main, hat], 8)
    assert omega_poly(main, hat, ring) == TSeries(ring, [1, ring.gen("a_1") - ring.gen("ah_1")], 1)
    main2 = BundleData(2, 1, 2)
    ring = build_ring([main2, hat], 8)
    a1, a2, h = ring.gen("a_1"), ring.gen("a_2"), ring.gen("ah_1")
    om = omega_poly(main2, hat, ring)
    assert om.coeff(1) == a1 - h.scale(2)
    assert om.coeff(2) == a2 - h * a1 + h * h


@pytest.mark.parametrize("n,nh,d,dh,g,cap", [(1, 1, 1, 1, 2, 10), (2, 1, 1, 1, 2, 12), (2, 2, 1, 3, 2, 10)])
def test_recurrence_tail(n, nh, d, dh, g, cap):
    res = recurrence_residual(BundleData(n, d, g), BundleData(nh, dh, g, "h"), cap)
    assert all(x.is_zero() for x in res.values())


def test_recurrence_routes_agree_and_q0():
    main, hat = BundleData(2, 1, 2), BundleData(1, 1, 2, "h")
    a = recurrence_residual(main, hat, 8, route="log")
    b = recurrence_residual(main, hat, 8, route="direct")
    assert all(x.is_zero() for x in a.values()) and all(x.is_zero() for x in b.values())
    q = recurrence_q(main, hat)
    c = grr_minus_pi(main, hat, 1, build_ring([main, hat], 2 * 4))
    assert q.coeff(0) == c.coeff(1)
    with pytest.raises(ValueError):
        recurrence_residual(main, hat, 6, route="other")


def test_shift_identity():
    main, hat = BundleData(2, 1, 2), BundleData(1, 1, 2, "h")
    for delta in (0, 1, 2):
        assert shift_identity_check(main, hat, delta, 8)
    assert shift_identity_check(BundleData(1, 0, 2), BundleData(1, 2, 2, "h"), 3, 6)
    with pytest.raises(ValueError):
        shift_identity_check(main, hat, -1, 4)


def test_kunneth_components_roundtrip():
    main, hat = BundleData(2, 1, 2), BundleData(1, 1, 2, "h")
    ring = build_ring([main, hat], 10)
    c = grr_minus_pi(main, hat, 5, ring)
    for r in range(6):
        table = kunneth_components(c, r, main)
        total = ring.zero()
        for h, x in table.items():
            mono = hat_monomial(ring, h, main)
            hdeg = mono.degrees()[0]
            assert x.is_homogeneous(2 * r - hdeg)
            total = total + ring.embed(x) * mono
        assert total == c.coeff(r)
    with pytest.raises(ValueError):
        kunneth_components(c, 6, main)


def test_kunneth_trivial_hat_single_entry():
    main, hat = BundleData(2, -1, 2), trivial_line(2)
    ring = build_ring([main, hat], 10)
    c = grr_minus_pi(main, hat, 5, ring)
    for r in range(6):
        assert set(kunneth_components(c, r, main)) <= {()}


def test_normalization():
    assert normalization_coeffs(2, 5, 2) == (-1, 1)
    assert normalization_coeffs(1, 3, 4) == (1, 0)
    for n in range(2, 6):
        for d in range(1, 3 * n):
            for g in (2, 3):
                try:
                    u, v = normalization_coeffs(n, d, g)
                except ValueError:
                    continue
                assert u * n + v * (d - n * (g - 1)) == 1
    with pytest.raises(ValueError):
        normalization_coeffs(2, 4, 2)


def test_normalization_relation_degree():
    x = normalization_relation(BundleData(2, 1, 2))
    assert x.is_homogeneous(2)


def test_euler_class_degree():
    e = euler_class(1, 1, 1, 0, 2)
    assert e.is_homogeneous(4)
    for n1, d1, n, d in [(1, 1, 2, 1), (1, 2, 3, 1), (2, 1, 3, 1)]:
        n2, d2 = n - n1, d - d1
        e = euler_class(n1, d1, n2, d2, 2)
        assert e.is_homogeneous(2 * coarse_codim(CoarseType(n1, d1, n, d), 2))
    with pytest.raises(ValueError):
        euler_class(1, 0, 1, 1, 2)


def test_relation_records_window():
    ring, recs = relation_records(2, 1, 1, 1, 2)
    assert [r for r, _ in recs] == [4, 5, 6]
    for r, table in recs:
        assert table


def test_gen_names_shape():
    names = gen_names(BundleData(2, 1, 3))
    assert len(names) == 2 + 2 * 6 + 1
    assert ("f_2", 2) in names and ("b_2_6", 3) in names
    assert gen_names(trivial_line(2)) == []
