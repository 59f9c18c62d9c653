import numpy as np
import pytest
from hypothesis import given, strategies as st

from exactorder import oracle
from exactorder.amplification import exact_boost_half
from exactorder.groups import PrimeField, UnitsModN
from exactorder.order_finding import ChiParams, OrderInstance, build_Uj, fourier_sampling_ops
from exactorder.sim import (STATE_CACHE, Constant, FourierTransform, LayoutError, NumericalInvariantError, Register,
                            RegisterEquals, RegisterLayout, ReversibleProgram, SparseState, marginal, measure,
                            run_program, simulate, success_probability)
from exactorder.sim.predicates import Predicate
from exactorder.verify import random_program, random_state


def uniform(dim):
    lay = RegisterLayout((Register("k", dim, "fourier-index"),))
    return simulate(ReversibleProgram(lay, (FourierTransform("k"),)))


class KAtLeast(Predicate):
    registers = ("k",)

    def __init__(self, t):
        self.t = t

    def mask(self, digits, n):
        return digits("k") >= self.t


def test_layout_invariants():
    with pytest.raises(LayoutError):
        RegisterLayout((Register("a", 2, "coin"), Register("a", 3, "flag")))
    with pytest.raises(ValueError):
        Register("a", 0, "coin")
    with pytest.raises(ValueError):
        Register("a", 2, "qubit")
    lay = RegisterLayout((Register("a", 3, "fourier-index"), Register("b", 5, "group-element")))
    assert lay.total_dim == 15
    assert lay.values_of(lay.index_of((2, 4))) == (2, 4)
    with pytest.raises(LayoutError):
        lay.check((3, 0))


def test_success_probability_examples():
    s = uniform(8)
    assert success_probability(s, Constant(False)) == 0.0
    assert abs(success_probability(s, Constant(True)) - 1) < 1e-12
    assert abs(success_probability(s, KAtLeast(4)) - 0.5) < 1e-12


def test_measure_deterministic_state():
    lay = RegisterLayout((Register("k", 8, "fourier-index"),))
    for seed in range(20):
        (v,), collapsed = measure(SparseState.basis(lay, (5,)), "k", np.random.default_rng(seed))
        assert v == 5 and abs(collapsed.amplitude((5,)) - 1) < 1e-15


def test_measure_uniform_frequencies():
    s = uniform(4)
    counts = np.zeros(4)
    for seed in range(1000):
        (v,), _ = measure(s, "k", np.random.Generator(np.random.PCG64(seed)))
        counts[v] += 1
    assert np.all(np.abs(counts / 1000 - 0.25) <= 0.06)


def test_measure_same_seed_same_outcome():
    s = uniform(16)
    a = [measure(s, "k", np.random.default_rng(7))[0] for _ in range(3)]
    assert a[0] == a[1] == a[2]


def test_measure_zero_state_is_internal_error():
    lay = RegisterLayout((Register("k", 4, "fourier-index"),))
    empty = SparseState(lay, np.zeros(0, np.int64), np.zeros(0, complex))
    with pytest.raises(NumericalInvariantError):
        measure(empty, "k", np.random.default_rng(0))


def test_measure_collapse_renormalizes():
    rng = np.random.default_rng(1)
    lay = RegisterLayout((Register("a", 3, "fourier-index"), Register("b", 4, "coin")))
    state = random_state(lay, rng)
    (a,), collapsed = measure(state, "a", rng)
    assert abs(collapsed.norm_squared() - 1) < 1e-12
    assert set(collapsed.digits("a").tolist()) == {a}


def test_fourier_sampling_x4_mod15():
    g = UnitsModN(15)
    inst = OrderInstance(g, 4, 2)
    lay = inst.layout()
    state = simulate(ReversibleProgram(lay, fourier_sampling_ops(inst)))
    assert np.allclose(marginal(state, "k"), [0.5, 0.5], atol=1e-12)


@pytest.mark.parametrize("n,x,m", [(15, 2, 8), (15, 4, 8), (13, 3, 12), (21, 2, 12), (35, 4, 12)])
def test_fourier_sampling_matches_gamma(n, x, m):
    g = UnitsModN(n)
    inst = OrderInstance(g, x, m)
    r = oracle.brute_order(g, x)
    state = simulate(ReversibleProgram(inst.layout(), fourier_sampling_ops(inst)))
    expect = np.array([float(p) for p in oracle.gamma_distribution(m, r)])
    assert np.max(np.abs(marginal(state, "k") - expect)) < 1e-12


@given(st.integers(0, 2 ** 32 - 1))
def test_shortcut_matches_literal(seed):
    rng = np.random.default_rng(seed)
    prep = random_program(rng, max_ops=5)
    chi = RegisterEquals("f", 1)
    from exactorder.amplification import AmplificationConfig, amplify
    phase = complex(np.exp(2j * np.pi * rng.random()))
    prog = amplify(prep, chi, AmplificationConfig(phase, phase, int(rng.integers(1, 4))))
    fast = simulate(prog, use_cache=False)
    slow = simulate(prog, shortcut=False, use_cache=False)
    assert np.max(np.abs(fast.to_dense() - slow.to_dense())) < 1e-12


def test_shortcut_matches_literal_on_order_finding():
    inst = OrderInstance(PrimeField(13), 5, 12)
    for d, j in [(1, -1), (2, 1), (4, 2), (1, 3)]:
        prep, chi = build_Uj(inst, ChiParams(d, 12, j))
        prog = exact_boost_half(prep, chi, check=False)
        fast = simulate(prog, use_cache=False)
        slow = simulate(prog, shortcut=False, use_cache=False)
        assert np.max(np.abs(fast.to_dense(1 << 14) - slow.to_dense(1 << 14))) < 1e-12


def test_cache_matches_uncached():
    inst = OrderInstance(UnitsModN(21), 2, 12)
    prep, chi = build_Uj(inst, ChiParams(2, 12, 1))
    prog = exact_boost_half(prep, chi, check=False)
    STATE_CACHE.clear()
    a = simulate(prog)
    b = simulate(prog)
    c = simulate(prog, use_cache=False)
    assert a is b
    assert np.array_equal(a.idx, c.idx) and np.allclose(a.amps, c.amps, atol=1e-15)


def test_pruning_does_not_move_success_probabilities():
    for n, x, m in [(15, 2, 8), (13, 2, 24), (35, 2, 36), (17, 3, 16)]:
        inst = OrderInstance(UnitsModN(n), x, m)
        for d in (1, 2):
            if oracle.brute_order(UnitsModN(n), x) % d:
                continue
            for j in (-1, 0, 2):
                prep, chi = build_Uj(inst, ChiParams(d, m, j))
                prog = exact_boost_half(prep, chi, check=False)
                pruned = simulate(prog, use_cache=False)
                raw = simulate(prog, prune_tol=0.0, use_cache=False)
                for pred in (chi, RegisterEquals("k", 0), RegisterEquals("b", 1)):
                    assert abs(success_probability(pruned, pred) - success_probability(raw, pred)) < 1e-10
                assert np.all(np.abs(pruned.amps) >= 1e-14)


def test_run_program_layout_mismatch():
    a = RegisterLayout((Register("k", 2, "coin"),))
    b = RegisterLayout((Register("k", 3, "coin"),))
    with pytest.raises(LayoutError):
        run_program(SparseState.zero(a), ReversibleProgram(b, ()))
