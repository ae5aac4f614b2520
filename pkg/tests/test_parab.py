import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hnrel.parab import (
    ParabolicData,
    SubParabolicData,
    derived_jhat,
    flag_correction,
    generic_full_flag,
    good_data_check,
    in_window,
    par_degree_slope,
    par_rank_formula,
    par_relation_window,
    perturb,
    weight_count_direct,
    weight_degree_count,
)
from hnrel.relgen import relation_window, virtual_rank


def compositions(n):
    if n == 0:
        yield ()
        return
    for a in range(1, n + 1):
        for rest in compositions(n - a):
            yield (a,) + rest


def subsets(n):
    for k in range(1, n + 1):
        yield from itertools.combinations(range(1, n + 1), k)


def test_pardeg_examples():
    assert par_degree_slope(ParabolicData.make(2, 1, [Fraction(1, 3)], [2])) == (Fraction(5, 3), Fraction(5, 6))
    assert par_degree_slope(ParabolicData.make(3, 4, [0], [3]))[0] == 4


def test_pardeg_tensoring_shift():
    pd = ParabolicData.make(3, 1, [0, Fraction(1, 5)], [2, 1])
    for delta in (-2, 1, 3):
        shifted = ParabolicData.make(3, 1 + 3 * delta, pd.weights, pd.mults)
        assert par_degree_slope(shifted)[1] - delta == par_degree_slope(pd)[1]


def test_validation():
    with pytest.raises(ValueError):
        ParabolicData.make(2, 0, [Fraction(1, 2), Fraction(1, 3)], [1, 1])
    with pytest.raises(ValueError):
        ParabolicData.make(2, 0, [0], [3])
    with pytest.raises(ValueError):
        ParabolicData.make(2, 0, [1], [2])
    pd = ParabolicData.make(2, 1, [0, Fraction(1, 2)], [1, 1])
    with pytest.raises(ValueError):
        SubParabolicData.make(pd, 1, 1, [2, 0])
    with pytest.raises(ValueError):
        SubParabolicData.make(pd, 2, 1, [1, 1])


def test_good_data_examples():
    assert good_data_check(ParabolicData.make(2, 1, [0], [2]))["good"]
    bad = good_data_check(ParabolicData.make(2, 0, [0], [2]))
    assert not bad["good"]
    w = bad["witnesses"][0]
    assert (w["level"], w["nhat"], w["dhat"], w["jhat"]) == ("data", 1, 0, [1])
    for n in (2, 3, 4):
        for d in range(n):
            rep = good_data_check(generic_full_flag(n, d))
            assert rep["good"] and rep["margin"] > 0


def test_good_data_sub_level_witness():
    # (4, 1) itself is fine, but the window holds sub data such as (2, 2)
    # whose own data splits off an equal-slope piece (1, 1)
    from math import gcd

    pd = ParabolicData.make(4, 1, [0], [4])
    rep = good_data_check(pd)
    subs = [w for w in rep["witnesses"] if w["level"] == "sub"]
    assert not rep["good"]
    assert subs and len(subs) == len(rep["witnesses"])
    assert {"level": "sub", "nhat": 2, "dhat": 2, "jhat": [2], "inner": [1, 1, [1]]} in subs
    for w in subs:
        assert in_window(pd, SubParabolicData.make(pd, w["nhat"], w["dhat"], w["jhat"]))
        assert gcd(w["nhat"], w["dhat"]) > 1
        n1, d1, _ = w["inner"]
        assert Fraction(d1, n1) == Fraction(w["dhat"], w["nhat"])


def test_margin_stability():
    for n, d in [(2, 1), (3, 1), (3, 2), (4, 3)]:
        pd = generic_full_flag(n, d)
        rep = good_data_check(pd)
        big_n = int(2 * n / rep["margin"]) + 1
        assert good_data_check(perturb(pd, big_n))["good"]


def test_arithmetic_progression_not_fixed_by_linear_shift():
    # adding k/N keeps evenly spaced weights evenly spaced, so an equal-slope
    # sub-data survives every N
    flat = ParabolicData.make(3, 0, [0, Fraction(1, 4), Fraction(1, 2)], [1, 1, 1])
    for big_n in (10, 1000, 10 ** 6):
        assert not good_data_check(perturb(flat, big_n))["good"]


def test_rank_formula_examples():
    pd = ParabolicData.make(2, 1, [0, Fraction(1, 2)], [1, 1])
    sub = SubParabolicData.make(pd, 1, 1, [0, 1])
    assert in_window(pd, sub)
    assert par_rank_formula(pd, sub, 2) == 4
    assert list(par_relation_window(pd, sub, 2)) == [5, 6, 7]
    outside = SubParabolicData.make(pd, 1, 0, [1, 0])
    with pytest.raises(ValueError):
        par_rank_formula(pd, outside, 2)


def test_m1_reduces_to_relgen():
    for n in range(2, 6):
        for d in range(-n, 2 * n):
            pd = ParabolicData.make(n, d, [0], [n])
            for nh in range(1, n):
                for dh in range(-3 * n, 3 * n):
                    sub = SubParabolicData.make(pd, nh, dh, [nh])
                    if in_window(pd, sub):
                        assert par_rank_formula(pd, sub, 3) == virtual_rank(n, d, nh, dh, 3)
                        assert par_relation_window(pd, sub, 3) == relation_window(n, d, nh, dh, 3)


@settings(max_examples=80, deadline=None)
@given(st.integers(2, 5), st.integers(-4, 4), st.data())
def test_rank_at_least_virtual(n, d, data):
    mults = data.draw(st.sampled_from(list(compositions(n))))
    ws = sorted(set(data.draw(st.lists(st.fractions(0, Fraction(11, 12), max_denominator=12), min_size=len(mults), max_size=len(mults), unique=True))))
    if len(ws) != len(mults):
        return
    pd = ParabolicData.make(n, d, ws, mults)
    nh = data.draw(st.integers(1, n - 1))
    opts = [jh for jh in itertools.product(*[range(j + 1) for j in mults]) if sum(jh) == nh]
    jh = data.draw(st.sampled_from(opts))
    for dh in range(-3 * n, 3 * n):
        sub = SubParabolicData.make(pd, nh, dh, jh)
        if not in_window(pd, sub):
            continue
        r = par_rank_formula(pd, sub, 2)
        v = n * nh - d * nh + dh * n
        assert r >= v
        assert (r == v) == (flag_correction(mults, jh) == 0)
        assert len(par_relation_window(pd, sub, 2)) == 2 * n * nh - 1


def test_weight_count_examples():
    for n in range(1, 7):
        for J in subsets(n):
            assert weight_degree_count(J, [1] * n) == 0
    # J = top of the flag, one block: sum_{l=2}^{nh} (nh - l + 1)
    for n in range(2, 6):
        for nh in range(1, n + 1):
            J = range(1, nh + 1)
            assert weight_degree_count(J, [n]) == sum(nh - l + 1 for l in range(2, nh + 1))
    with pytest.raises(ValueError):
        weight_degree_count([1, 2], [1, 1, 1], jh=(1, 0, 1))


def test_weight_count_matches_direct_count():
    for n in range(1, 6):
        for mults in compositions(n):
            for J in subsets(n):
                c = weight_degree_count(J, mults)
                assert c == weight_count_direct(J, mults)
                assert c >= 0
                assert sum(derived_jhat(J, mults)) == len(J)


def test_weight_count_monotone_within_block():
    for n in range(2, 6):
        for mults in compositions(n):
            starts = list(itertools.accumulate((0,) + mults))
            block = {x: k for k in range(len(mults)) for x in range(starts[k] + 1, starts[k + 1] + 1)}
            for J in subsets(n):
                for x in J:
                    y = x + 1
                    if y <= n and y not in J and block[y] == block[x]:
                        K = sorted(set(J) - {x} | {y})
                        assert weight_degree_count(K, mults) > weight_degree_count(J, mults)


def test_weight_count_not_monotone_across_blocks():
    # moving 4 -> 5 crosses from the first block into the second and lowers the count
    assert weight_degree_count([1, 2, 3, 4], [4, 1]) == 6
    assert weight_degree_count([1, 2, 3, 5], [4, 1]) == 3
