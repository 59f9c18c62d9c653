import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from exactorder.amplification import (HALF_BOOST, QUARTER_BOOST, AmplificationConfig, BoostPreconditionError,
                                      amplify, build_Q, exact_boost_half, exact_boost_quarter, iterate_amplitudes,
                                      rotation_matrix, synthetic_prep)
from exactorder.applications import build_P
from exactorder.groups import PrimeField
from exactorder.sim import (Constant, FourierTransform, GlobalPhase, PhasePredicate, PhaseZero, Register,
                            RegisterEquals, RegisterLayout, ReversibleProgram, SparseState, marginal, run_program,
                            simulate, success_probability)


def fourier_prep():
    lay = RegisterLayout((Register("v", 2, "fourier-index"),))
    return ReversibleProgram(lay, (FourierTransform("v"),)), RegisterEquals("v", 1)


def test_config_validates_phases():
    with pytest.raises(ValueError):
        AmplificationConfig(1.1, 1)
    with pytest.raises(ValueError):
        AmplificationConfig(1, 1, -1)
    assert HALF_BOOST.phi == 1j and QUARTER_BOOST.psi == -1


def test_build_Q_structure():
    A, chi = fourier_prep()
    q = build_Q(A, chi, HALF_BOOST)
    assert isinstance(q.ops[0], PhasePredicate) and q.ops[0].phase == 1j
    assert q.ops[1] == A.inverse() and isinstance(q.ops[2], PhaseZero) and q.ops[3] == A
    assert q.ops[4] == GlobalPhase(-1)


def test_Q_with_minus_one_on_fourier_prep():
    A, chi = fourier_prep()
    out = simulate(amplify(A, chi, AmplificationConfig(-1, -1, 1)))
    assert abs(success_probability(out, chi) - math.sin(3 * math.pi / 4) ** 2) < 1e-12


def test_Q_with_trivial_phases_keeps_probability():
    for a in (0.1, 0.3, 0.7):
        A, chi = synthetic_prep(a, (3,))
        out = simulate(amplify(A, chi, AmplificationConfig(1, 1, 2)))
        assert abs(success_probability(out, chi) - a) < 1e-12


def test_Q_then_inverse_is_identity():
    A, chi = synthetic_prep(0.37, (3, 2))
    q = build_Q(A, chi, AmplificationConfig(np.exp(0.3j), np.exp(1.1j)))
    rng = np.random.default_rng(0)
    v = rng.normal(size=A.layout.total_dim) + 1j * rng.normal(size=A.layout.total_dim)
    state = SparseState.from_dense(A.layout, v / np.linalg.norm(v))
    for shortcut in (True, False):
        back = run_program(run_program(state, q, shortcut=shortcut), q.inverse(), shortcut=shortcut)
        assert np.max(np.abs(back.to_dense() - state.to_dense())) < 1e-10


@pytest.mark.parametrize("extra", [(), (2,), (3, 4)])
def test_half_boost_exact(extra):
    A, chi = synthetic_prep(0.5, extra)
    assert success_probability(simulate(exact_boost_half(A, chi)), chi) >= 1 - 1e-12


@pytest.mark.parametrize("extra", [(), (3,), (2, 3, 2)])
def test_quarter_boost_exact(extra):
    A, chi = synthetic_prep(0.25, extra)
    assert success_probability(simulate(exact_boost_quarter(A, chi)), chi) >= 1 - 1e-12


def test_half_boost_on_procedure_P():
    A, chi = build_P(PrimeField(7), 2, 3)
    assert success_probability(simulate(exact_boost_half(A, chi)), chi) >= 1 - 1e-12


def test_boost_with_zero_weight_stays_zero():
    lay = RegisterLayout((Register("v", 4, "fourier-index"),))
    A = ReversibleProgram(lay, (FourierTransform("v"),))
    out = simulate(exact_boost_half(A, Constant(False), check=False))
    assert success_probability(out, Constant(False)) == 0.0


def test_precondition_errors():
    A, chi = synthetic_prep(0.5)
    with pytest.raises(BoostPreconditionError) as err:
        exact_boost_quarter(A, chi)
    assert abs(err.value.probability - 0.5) < 1e-12
    out = simulate(exact_boost_quarter(A, chi, check=False))
    assert abs(success_probability(out, chi) - 0.5) < 1e-12
    with pytest.raises(BoostPreconditionError):
        exact_boost_half(*synthetic_prep(0.3))


def test_iterate_examples():
    assert abs(iterate_amplitudes(0.25, 1).success - 1) < 1e-12
    it = iterate_amplitudes(0.4, 0)
    assert abs(it.k_j - 1) < 1e-15 and abs(it.l_j - 1) < 1e-15 and abs(it.success - 0.4) < 1e-15
    assert abs(iterate_amplitudes(0.5, 2).success - 0.5) < 1e-12
    for bad in (0, 1, -0.1):
        with pytest.raises(ValueError):
            iterate_amplitudes(bad, 1)


@given(st.floats(0.01, 0.99), st.integers(0, 30))
def test_iterate_normalization(a, j):
    it = iterate_amplitudes(a, j)
    assert abs(a * it.k_j ** 2 + (1 - a) * it.l_j ** 2 - 1) < 1e-12
    assert abs(math.sin(it.theta) ** 2 - a) < 1e-12


@given(st.floats(0.05, 0.95), st.integers(0, 10), st.lists(st.integers(2, 4), max_size=2))
def test_closed_form_matches_simulation(a, j, extra):
    A, chi = synthetic_prep(a, tuple(extra))
    s0 = simulate(A)
    good = np.zeros(A.layout.total_dim, bool)
    good[s0.idx] = chi.mask(s0.digits, len(s0))
    out = simulate(amplify(A, chi, AmplificationConfig(-1, -1, j)))
    it = iterate_amplitudes(a, j)
    # a vanishing component (e.g. l_1 = 0 at a = 1/4) is pruned, so compare densely
    expect = np.where(good, it.k_j, it.l_j) * s0.to_dense()
    assert np.max(np.abs(out.to_dense() - expect)) < 1e-10


@given(st.floats(0.05, 0.95), st.integers(1, 4))
def test_global_phase_does_not_change_distribution(a, j):
    A, chi = synthetic_prep(a, (3,))
    prog = amplify(A, chi, AmplificationConfig(1j, -1j, j))
    s1 = simulate(prog)
    s2 = simulate(prog.then(GlobalPhase(np.exp(0.7j))))
    for name in A.layout.names:
        assert np.allclose(marginal(s1, name), marginal(s2, name), atol=1e-14)


def test_rotation_matrix():
    m = np.array(rotation_matrix(0.75))
    assert np.allclose(m[:, 0] ** 2, [0.25, 0.75])
    assert np.allclose(m.T @ m, np.eye(2))
    with pytest.raises(ValueError):
        rotation_matrix(1.5)
