"""Amplitude amplification Q(A, chi, phi, psi) = -A S_0(phi) A^-1 S_chi(psi)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .sim import (Constant, FourierTransform, GlobalPhase, LocalUnitary, PhasePredicate, PhaseZero, Predicate,
                  Register, RegisterEquals, RegisterLayout, ReversibleProgram, simulate, success_probability)
from .sim.ops import UNIT_TOL

PRECONDITION_TOL = 1e-9


class BoostPreconditionError(ValueError):
    """The prepared success probability is not the value the boost is exact for."""

    def __init__(self, probability: float, target: float):
        super().__init__(f"success probability {probability:.12g} is not {target:g}")
        self.probability = probability
        self.target = target


@dataclass(frozen=True)
class AmplificationConfig:
    """``phi`` is the phase of S_0, ``psi`` the phase of S_chi."""

    phi: complex
    psi: complex
    iterations: int = 1

    def __post_init__(self):
        for name in ("phi", "psi"):
            z = complex(getattr(self, name))
            if abs(abs(z) - 1) > UNIT_TOL:
                raise ValueError(f"{name}={z} is not of unit modulus")
            object.__setattr__(self, name, z)
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")


# sqrt(-1) is fixed to +i
HALF_BOOST = AmplificationConfig(1j, 1j, 1)
QUARTER_BOOST = AmplificationConfig(-1, -1, 1)


def build_Q(A: ReversibleProgram, chi: Predicate, config: AmplificationConfig) -> ReversibleProgram:
    """One Q step: S_chi(psi) first, then A^-1, S_0(phi), A and the sign."""
    for name in chi.registers:
        A.layout.position(name)
    return ReversibleProgram(A.layout, (
        PhasePredicate(chi, config.psi),
        A.inverse(),
        PhaseZero(config.phi),
        A,
        GlobalPhase(-1),
    ))


def amplify(A: ReversibleProgram, chi: Predicate, config: AmplificationConfig) -> ReversibleProgram:
    """A followed by ``config.iterations`` applications of Q."""
    q = build_Q(A, chi, config)
    return ReversibleProgram(A.layout, (A,) + (q,) * config.iterations)


def _boost(A, chi, config, target, check):
    if check:
        a = success_probability(simulate(A), chi)
        if abs(a - target) > PRECONDITION_TOL:
            raise BoostPreconditionError(a, target)
    return amplify(A, chi, config)


def exact_boost_half(A: ReversibleProgram, chi: Predicate, check: bool = True) -> ReversibleProgram:
    """Q(phi = psi = i) . A, exact when A|0> has success probability 1/2."""
    return _boost(A, chi, HALF_BOOST, 0.5, check)


def exact_boost_quarter(A: ReversibleProgram, chi: Predicate, check: bool = True) -> ReversibleProgram:
    """Q(phi = psi = -1) . A, exact when A|0> has success probability 1/4."""
    return _boost(A, chi, QUARTER_BOOST, 0.25, check)


@dataclass(frozen=True)
class IterateAmplitudes:
    a: float
    theta: float
    j: int
    k_j: float
    l_j: float

    @property
    def success(self) -> float:
        return self.a * self.k_j ** 2


def iterate_amplitudes(a: float, j: int) -> IterateAmplitudes:
    """Closed form of Q^j A|0> = k_j |good> + l_j |bad> for phi = psi = -1."""
    if not 0 < a < 1:
        raise ValueError(f"a must lie in (0, 1), got {a}")
    if j < 0:
        raise ValueError("j must be >= 0")
    theta = math.asin(math.sqrt(a))
    angle = (2 * j + 1) * theta
    return IterateAmplitudes(a, theta, j, math.sin(angle) / math.sqrt(a), math.cos(angle) / math.sqrt(1 - a))


def rotation_matrix(p1: float) -> tuple:
    """Real rotation with |0> -> sqrt(1 - p1)|0> + sqrt(p1)|1>."""
    if not 0 <= p1 <= 1:
        raise ValueError(f"probability {p1} outside [0, 1]")
    s, c = math.sqrt(p1), math.sqrt(1 - p1)
    return ((c, -s), (s, c))


def synthetic_prep(a: float, extra_dims: tuple = ()) -> tuple[ReversibleProgram, Predicate]:
    """A preparation with success probability ``a`` on a coin register.

    ``extra_dims`` adds uniformly prepared registers so the good and bad
    components are nontrivial superpositions.
    """
    regs = [Register(f"x{i}", d, "fourier-index") for i, d in enumerate(extra_dims)]
    regs.append(Register("coin", 2, "coin"))
    layout = RegisterLayout(tuple(regs))
    ops = [FourierTransform(r.name) for r in regs[:-1]]
    ops.append(LocalUnitary("coin", rotation_matrix(a), label="prep"))
    chi = RegisterEquals("coin", 1) if a > 0 else Constant(False)
    return ReversibleProgram(layout, tuple(ops)), chi
