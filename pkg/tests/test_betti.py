from math import comb, gcd

import pytest

from hnrel.betti import (
    closed_report,
    moduli_dimension,
    p_closed,
    p_flag,
    p_gauge,
    p_moduli,
    p_semistable,
    stratum_contributions,
)


def mul(x, y, cap):
    out = [0] * (cap + 1)
    for i, a in enumerate(x[: cap + 1]):
        for j, b in enumerate(y[: cap + 1 - i]):
            out[i + j] += a * b
    return out


def geometric(e, cap):
    return [1 if k % e == 0 else 0 for k in range(cap + 1)]


def binom_series(e, power, cap):
    return [comb(power, k // e) if k % e == 0 else 0 for k in range(cap + 1)]


def test_gauge_rank1():
    for g in (2, 3, 4):
        assert p_gauge(1, g, 20) == mul(binom_series(1, 2 * g, 20), geometric(2, 20), 20)


def test_gauge_rank2_from_generators():
    cap = 24
    g = 3
    want = mul(binom_series(1, 2 * g, cap), binom_series(3, 2 * g, cap), cap)
    for e in (2, 2, 4):
        want = mul(want, geometric(e, cap), cap)
    assert p_gauge(2, g, cap) == want
    assert all(c >= 0 for c in p_gauge(3, 2, 40))


def test_semistable_rank1_is_gauge():
    assert p_semistable(1, 5, 3, 20) == p_gauge(1, 3, 20)


@pytest.mark.parametrize("g", [2, 3, 4])
def test_semistable_rank2_closed_oracle(g):
    # ((1+t)^{2g}(1+t^3)^{2g} - t^{2g}(1+t)^{4g}) / ((1-t^2)^2 (1-t^4))
    cap = 40
    a = mul(binom_series(1, 2 * g, cap), binom_series(3, 2 * g, cap), cap)
    b = ([0] * (2 * g) + binom_series(1, 4 * g, cap))[: cap + 1]
    num = [x - y for x, y in zip(a, b)]
    for e in (2, 2, 4):
        num = mul(num, geometric(e, cap), cap)
    assert p_semistable(2, 1, g, cap) == num


def test_stratum_sum_identity():
    for n, d, g in [(2, 1, 2), (3, 1, 2), (3, 2, 3)]:
        cap = 30
        total = p_semistable(n, d, g, cap)
        for _, s in stratum_contributions(n, d, g, cap):
            total = [a + b for a, b in zip(total, s)]
        assert total == p_gauge(n, g, cap)


def test_semistable_nonnegative():
    for n in (1, 2, 3):
        for d in range(n):
            if gcd(n, d) == 1:
                assert all(c >= 0 for c in p_semistable(n, d, 2, 40))


def test_tensoring_invariance():
    for n, d in [(2, 1), (3, 1), (3, 2)]:
        assert p_semistable(n, d, 2, 30) == p_semistable(n, d + n, 2, 30) == p_semistable(n, d - 2 * n, 2, 30)


def test_moduli_examples():
    assert p_moduli(2, 1, 2, 10) == mul([1, 4, 6, 4, 1], [1, 0, 1, 4, 1, 0, 1], 10)
    assert moduli_dimension(1, 2) == 4
    assert moduli_dimension(2, 2) == 10
    assert p_moduli(3, 1, 2, 40)[-1] == 1


def test_moduli_dimension_hat_identity():
    # D(nh, dh) = dim M(nh, dh) = 2 nh^2 (g-1) + 2
    for n in range(1, 6):
        for g in range(2, 6):
            assert moduli_dimension(n, g) == 2 * (n * n * (g - 1) + 1)


def test_moduli_rejections():
    with pytest.raises(ValueError):
        p_moduli(2, 0, 2, 20)
    with pytest.raises(ValueError):
        p_moduli(2, 1, 2, 8)


def test_p_flag():
    assert p_flag([1, 1], 10)[:3] == [1, 0, 1]
    assert p_flag([1, 1, 1], 10)[:7] == [1, 0, 2, 0, 2, 0, 1]
    assert p_flag([3], 10)[0] == 1 and not any(p_flag([3], 10)[1:])
    with pytest.raises(ValueError):
        p_flag([0, 2], 5)


def test_p_closed_rank1():
    for g in (2, 3):
        assert p_closed(1, 0, g, 2 * g) == [comb(2 * g, k) for k in range(2 * g + 1)]


def test_closed_report_names_first_difference():
    rep = closed_report(2, 1, 2)
    assert not rep["agree"]
    fd = rep["first_difference"]
    assert fd == {"power": 3, "closed": 11, "moduli": 12}
    assert rep["closed"][:3] == rep["moduli"][:3]
