import json
import math

import pytest
from hypothesis import given, strategies as st

from exactorder import oracle
from exactorder.groups import ExtensionField, PrimeField, UnitsModN
from exactorder.order_finding import (ChiJ, ChiParams, InvalidMultipleError, OrderInstance, build_Uj, ceil_log2,
                                      chi_j, find_order, floor_log2, fourier_call_bound, rep, round_bound,
                                      update_divisor)
from exactorder.sim import SparseState, simulate, success_probability


def test_rep_examples():
    assert rep(20, 12) == 8
    assert rep(24, 12) == 0
    assert rep(-3, 12) == 9


def test_chi_examples():
    assert chi_j(8, 0, ChiParams(1, 16, -1)) == 1
    assert chi_j(1, 1, ChiParams(2, 16, 1)) == 1
    assert chi_j(1, 0, ChiParams(2, 16, 1)) == 0


def test_chi_params_validation():
    with pytest.raises(ValueError):
        ChiParams(3, 16, 0)
    with pytest.raises(ValueError):
        ChiParams(1, 16, 5)
    with pytest.raises(ValueError):
        ChiParams(1, 16, -2)


@given(st.integers(2, 64).flatmap(lambda m: st.tuples(
    st.just(m), st.sampled_from([d for d in range(1, m + 1) if m % d == 0]), st.integers(-1, floor_log2(m)))))
def test_chi_implementations_agree(case):
    m, d, j = case
    params = ChiParams(d, m, j)
    inst = OrderInstance(PrimeField(2), 1, m)
    lay = inst.layout()
    for k in range(m):
        for b in (0, 1):
            expect = oracle._marked(k, b, d, m, j)
            assert bool(chi_j(k, b, params)) == expect
            s = SparseState.basis(lay, (k, 0, b, 0))
            assert bool(ChiJ("k", "b", d, m, j).mask(s.digits, 1)[0]) == expect


def test_build_Uj_examples():
    inst = OrderInstance(UnitsModN(15), 4, 4)
    prep, chi = build_Uj(inst, ChiParams(1, 4, -1))
    assert abs(success_probability(simulate(prep), chi) - 0.5) < 1e-12
    for j in range(-1, 3):
        prep, chi = build_Uj(inst, ChiParams(2, 4, j))
        assert success_probability(simulate(prep), chi) < 1e-12
    inst = OrderInstance(PrimeField(7), 2, 6)
    prep, chi = build_Uj(inst, ChiParams(1, 6, 1))
    assert abs(success_probability(simulate(prep), chi) - 0.5) < 1e-12
    assert prep.fourier_count() == 2


def test_update_divisor_examples():
    assert update_divisor(1, 6, 24) == 4
    assert update_divisor(2, 8, 24) == 6
    for k in range(24):
        if rep(4 * k, 24) == 12:
            d = update_divisor(4, k, 24)
            assert 24 % d == 0 and d >= 8
    with pytest.raises(ValueError):
        update_divisor(4, 6, 24)


@given(st.integers(2, 200).flatmap(lambda m: st.tuples(
    st.just(m), st.sampled_from([r for r in range(1, m + 1) if m % r == 0]))), st.data())
def test_update_divisor_climbs_within_r(mr, data):
    m, r = mr
    d = data.draw(st.sampled_from([d for d in range(1, r + 1) if r % d == 0]))
    step = m // r
    ks = [k for k in range(0, m, step) if d * k % m]
    if not ks:
        assert d == r
        return
    k = data.draw(st.sampled_from(ks))
    new = update_divisor(d, k, m)
    assert r % new == 0 and new % d == 0 and new >= 2 * d


def test_find_order_examples():
    assert find_order(OrderInstance(UnitsModN(15), 2, 8), 0)[0] == 4
    assert find_order(OrderInstance(PrimeField(7), 3, 6), 0)[0] == 6
    r, trace = find_order(OrderInstance(UnitsModN(15), 1, 8), 0)
    assert r == 1 and trace.rounds == 1 and all(rec.d_after == 1 for rec in trace.records)
    r, trace = find_order(OrderInstance(UnitsModN(15), 1, 1), 0)
    assert r == 1 and trace.rounds == 0


def test_invalid_multiple():
    with pytest.raises(InvalidMultipleError):
        OrderInstance(UnitsModN(15), 2, 7)
    with pytest.raises(InvalidMultipleError):
        OrderInstance(UnitsModN(15), 2, 0)


def check_trace(inst, r, trace):
    m = inst.m
    ds = trace.divisors
    assert all(a <= b for a, b in zip(ds, ds[1:]))
    assert all(r % d == 0 for d in ds)
    assert trace.rounds <= round_bound(r)
    assert trace.fourier_calls <= fourier_call_bound(m, r)
    # within a round the boost at the guaranteed index must succeed
    for rec in trace.records:
        assert rec.k % (m // r) == 0
        if rec.d_before < r and rec.j == oracle.guaranteed_index(rec.d_before, r, m):
            assert abs(rec.pre_success - 0.5) < 1e-12
            assert rec.d_before * rec.k % m != 0


CASES = [(UnitsModN(35), 2, 36), (UnitsModN(21), 5, 12), (PrimeField(97), 5, 96), (PrimeField(101), 4, 100),
         (ExtensionField(3, 3), (0, 1, 0), 26), (ExtensionField(2, 4), (0, 1, 0, 0), 15), (UnitsModN(1000), 3, 100),
         (PrimeField(2), 1, 1), (PrimeField(13), 12, 36)]


@pytest.mark.parametrize("group,x,m", CASES, ids=lambda v: getattr(v, "spec", str(v)))
def test_find_order_invariants(group, x, m):
    inst = OrderInstance(group, x, m)
    expect = oracle.brute_order(group, x)
    for seed in range(10):
        r, trace = find_order(inst, seed)
        assert r == expect
        check_trace(inst, r, trace)


@given(st.sampled_from([n for n in range(3, 80)]), st.data(), st.integers(0, 10 ** 6))
def test_find_order_property(n, data, seed):
    g = UnitsModN(n)
    x = data.draw(st.sampled_from(g.elements()))
    c = data.draw(st.integers(1, 3))
    inst = OrderInstance(g, x, oracle.carmichael(g) * c)
    r, trace = find_order(inst, seed)
    assert r == oracle.brute_order(g, x)
    check_trace(inst, r, trace)


def test_trace_is_deterministic_and_serializable():
    inst = OrderInstance(UnitsModN(35), 2, 36)
    a = json.dumps(find_order(inst, 5)[1].to_dict())
    b = json.dumps(find_order(inst, 5)[1].to_dict())
    assert a == b
    d = json.loads(a)
    assert d["rng"] == "PCG64" and d["seed"] == 5
    assert d["fourier_calls"]["standard_qft_units"] == 3 * d["fourier_calls"]["exact"]


def test_literal_path_gives_same_trace():
    inst = OrderInstance(UnitsModN(21), 2, 12)
    r1, t1 = find_order(inst, 2)
    r2, t2 = find_order(inst, 2, shortcut=False)
    assert r1 == r2 and [rec.k for rec in t1.records] == [rec.k for rec in t2.records]


def test_log_helpers():
    assert [floor_log2(n) for n in (1, 2, 3, 4, 7, 8)] == [0, 1, 1, 2, 2, 3]
    assert [ceil_log2(n) for n in (1, 2, 3, 4, 5, 8, 9)] == [0, 1, 2, 2, 3, 3, 4]
    assert all(ceil_log2(n) == math.ceil(math.log2(n)) for n in range(1, 300))
