import itertools

import pytest
from hypothesis import given, settings, strategies as st

from hnrel.strata import (
    CoarseType,
    HNType,
    coarse_codim,
    codim_mu,
    enumerate_hn_types,
    polygon,
    polygon_value,
    telescoped_codim,
    type_orders,
    type_to_json,
)


def brute_types(n, d, g, cap):
    """Scan all compositions of n and all degree vectors in a generous box."""
    bound = cap + n * n * g + abs(d) + 2
    out = set()
    for k in range(1, n + 1):
        for cut in itertools.combinations(range(1, n), k - 1):
            ranks = [b - a for a, b in zip((0,) + cut, cut + (n,))]
            for ds in itertools.product(range(-bound, bound + 1), repeat=k - 1):
                degs = list(ds) + [d - sum(ds)]
                blocks = tuple(zip(ranks, degs))
                if all(a[1] * b[0] > b[1] * a[0] for a, b in zip(blocks, blocks[1:])):
                    mu = HNType.make(blocks, n, d)
                    if codim_mu(mu, g) <= cap:
                        out.add(blocks)
    return out


def test_codim_examples():
    assert codim_mu(HNType.make([(1, 1), (1, 0)]), 2) == 2
    assert codim_mu(HNType.semistable(3, 1), 2) == 0
    # n=3, d=1, ((1,1),(2,0)): 1*0... n_2 d_1 - n_1 d_2 + n_1 n_2 (g-1) = 2 - 0 + 2
    assert codim_mu(HNType.make([(1, 1), (2, 0)]), 2) == 4
    assert coarse_codim(CoarseType(1, 1, 2, 1), 2) == 2
    with pytest.raises(ValueError):
        coarse_codim(CoarseType(2, 1, 2, 1), 2)


def test_two_block_coarse_equals_codim():
    for n in range(2, 6):
        for d in range(n):
            for n1 in range(1, n):
                for d1 in range(-5, 8):
                    if d1 * n > n1 * d:
                        mu = HNType.make([(n1, d1), (n - n1, d - d1)], n, d)
                        assert coarse_codim(CoarseType(n1, d1, n, d), 3) == codim_mu(mu, 3)


def test_rank2_listing():
    types = enumerate_hn_types(2, 1, 2, 8)
    assert types[0].is_semistable()
    assert [codim_mu(mu, 2) for mu in types] == [0, 2, 4, 6, 8]
    assert [mu.blocks for mu in types[1:]] == [((1, d1), (1, 1 - d1)) for d1 in range(1, 5)]


def test_rank1_only_semistable():
    assert [mu.blocks for mu in enumerate_hn_types(1, 3, 2, 50)] == [((1, 3),)]


@pytest.mark.parametrize("n,d,g,cap", [(2, 1, 2, 12), (3, 1, 2, 10), (3, 2, 3, 12), (4, 1, 2, 8), (4, 3, 2, 9)])
def test_enumeration_matches_brute_force(n, d, g, cap):
    got = [mu.blocks for mu in enumerate_hn_types(n, d, g, cap)]
    assert len(got) == len(set(got))
    assert set(got) == brute_types(n, d, g, cap)


def test_monotone_in_cap():
    counts = [len(enumerate_hn_types(3, 1, 2, c)) for c in range(0, 20)]
    assert counts == sorted(counts)


def test_telescoping_and_positivity():
    for n in range(1, 5):
        for d in range(n):
            for mu in enumerate_hn_types(n, d, 2, 20):
                assert codim_mu(mu, 2) == telescoped_codim(mu, 2)
                if not mu.is_semistable():
                    assert codim_mu(mu, 2) > 0


def test_orders():
    types = enumerate_hn_types(2, 1, 2, 20)
    mu0 = types[0]
    for mu in types:
        o = type_orders(mu, mu)
        assert o["leq_partial"] is True and o["prec_total"]
        assert type_orders(mu0, mu)["leq_partial"] is True
    types3 = enumerate_hn_types(3, 1, 2, 20)
    for mu, nu in itertools.product(types3, repeat=2):
        if type_orders(mu, nu)["leq_partial"] is True:
            assert type_orders(mu, nu)["prec_total"]
    with pytest.raises(ValueError):
        type_orders(types[0], types3[0])


def test_polygon():
    mu = HNType.make([(1, 2), (2, 1), (1, -2)])
    assert polygon(mu) == [(0, 0), (1, 2), (3, 3), (4, 1)]
    assert polygon(HNType.semistable(3, 1)) == [(0, 0), (3, 1)]
    assert type_to_json(mu, 2)["polygon"][-1] == [4, 1]


def test_polygon_order_equivalence():
    types = enumerate_hn_types(3, 1, 2, 14) + enumerate_hn_types(3, 1, 2, 0)
    for mu, nu in itertools.product(types, repeat=2):
        below = all(polygon_value(mu, x) <= polygon_value(nu, x) for x in range(mu.n + 1))
        assert below == (type_orders(mu, nu)["leq_partial"] is True)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 3), st.integers(-6, 6)), min_size=1, max_size=4))
def test_hntype_validation(blocks):
    ok = all(a[1] * b[0] > b[1] * a[0] for a, b in zip(blocks, blocks[1:]))
    if ok:
        mu = HNType.make(blocks)
        assert polygon(mu)[-1] == (mu.n, mu.d)
        assert codim_mu(mu, 3) == telescoped_codim(mu, 3)
    else:
        with pytest.raises(ValueError):
            HNType.make(blocks)
