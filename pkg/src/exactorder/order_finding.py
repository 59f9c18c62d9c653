"""Exact order finding when a multiple m of the order is known.

The driver keeps a divisor d of the unknown order r. Each round sweeps
j = -1 .. floor(log2 m); every j builds the marked Fourier-sampling
preparation U_j, boosts it once with phases i, measures the Fourier index k,
and replaces d by lcm(d, m / gcd(m, k)) whenever d*k is nonzero mod m. A
round without any update proves d = r.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import kernels
from .amplification import exact_boost_half
from .groups import CyclicGroupHandle
from .sim import (FourierTransform, GroupExponentiation, PermutationMark, Predicate, Register, RegisterEquals,
                  RegisterLayout, ReversibleProgram, measure, simulate, success_probability)

RNG_NAME = "PCG64"


class InvalidMultipleError(ValueError):
    """x^m is not the identity."""


def floor_log2(n: int) -> int:
    return n.bit_length() - 1


def ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


def make_rng(seed) -> tuple[np.random.Generator, int | None]:
    if isinstance(seed, np.random.Generator):
        return seed, None
    seed = 0 if seed is None else int(seed)
    return np.random.Generator(np.random.PCG64(seed)), seed


@dataclass(frozen=True)
class OrderInstance:
    group: CyclicGroupHandle
    x: object
    m: int

    def __post_init__(self):
        self.group.check(self.x)
        if self.m < 1:
            raise InvalidMultipleError(f"multiple must be >= 1, got {self.m}")
        if self.group.pow(self.x, self.m) != self.group.identity:
            raise InvalidMultipleError(f"{self.x}^{self.m} is not the identity in {self.group.spec}")

    def layout(self) -> RegisterLayout:
        return RegisterLayout((
            Register("k", self.m, "fourier-index"),
            Register("g", self.group.register_dim, "group-element"),
            Register("b", 2, "coin"),
            Register("f", 2, "flag"),
        ))


def rep(v: int, m: int) -> int:
    """Representative of v mod m in [0, m); the zero class maps to 0."""
    return v % m


@dataclass(frozen=True)
class ChiParams:
    d: int
    m: int
    j: int

    def __post_init__(self):
        if self.d < 1 or self.m % self.d:
            raise ValueError(f"d={self.d} must be a positive divisor of m={self.m}")
        if not -1 <= self.j <= floor_log2(self.m):
            raise ValueError(f"j={self.j} outside -1..{floor_log2(self.m)}")


def chi_j(k: int, b: int, params: ChiParams) -> int:
    """(rep(dk) >= m/2) or (b = 1 and 0 < rep(dk) <= 2^j)."""
    v = rep(params.d * k, params.m)
    if 2 * v >= params.m:
        return 1
    return int(b == 1 and params.j >= 0 and 0 < v <= 1 << params.j)


@dataclass(frozen=True)
class ChiJ(Predicate):
    k_register: str
    b_register: str
    d: int
    m: int
    j: int

    @property
    def registers(self):
        return (self.k_register, self.b_register)

    def mask(self, digits, n):
        return kernels.chi_j_mask(digits(self.k_register), digits(self.b_register),
                                  np.int64(self.d), np.int64(self.m), np.int64(self.j))


def fourier_sampling_ops(inst: OrderInstance) -> tuple:
    """sum_a |a>|x^a> followed by the Fourier transform of the exponent register."""
    return (
        FourierTransform("k"),
        GroupExponentiation("k", "g", inst.group, inst.x),
        FourierTransform("k"),
    )


def build_Uj(inst: OrderInstance, params: ChiParams) -> tuple[ReversibleProgram, Predicate]:
    if params.m != inst.m:
        raise ValueError("ChiParams modulus differs from the instance multiple")
    ops = fourier_sampling_ops(inst) + (
        FourierTransform("b"),
        PermutationMark("f", ChiJ("k", "b", params.d, params.m, params.j)),
    )
    return ReversibleProgram(inst.layout(), ops), RegisterEquals("f", 1)


def update_divisor(d: int, k: int, m: int) -> int:
    if d * k % m == 0:
        raise ValueError(f"d*k = {d}*{k} is 0 mod {m}: no new information")
    return math.lcm(d, m // math.gcd(m, k))


@dataclass
class SweepRecord:
    round: int
    j: int
    k: int
    rep_dk: int
    d_before: int
    d_after: int
    pre_success: float


@dataclass
class OrderTrace:
    group: str
    x: object
    m: int
    seed: int | None
    rng: str = RNG_NAME
    records: list = field(default_factory=list)
    rounds: int = 0
    fourier_calls: int = 0

    @property
    def standard_qft_calls(self) -> int:
        return 3 * self.fourier_calls

    @property
    def divisors(self) -> list[int]:
        return [1] + [rec.d_after for rec in self.records]

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "x": list(self.x) if isinstance(self.x, tuple) else self.x,
            "m": self.m,
            "seed": self.seed,
            "rng": self.rng,
            "rounds": self.rounds,
            "fourier_calls": {"exact": self.fourier_calls, "standard_qft_units": self.standard_qft_calls},
            "records": [asdict(rec) for rec in self.records],
        }


def round_bound(r: int) -> int:
    return ceil_log2(r) + 1


def fourier_call_bound(m: int, r: int) -> int:
    return 8 * (floor_log2(m) + 2) * (ceil_log2(r) + 2)


def find_order(inst: OrderInstance, rng=None, *, shortcut: bool = True) -> tuple[int, OrderTrace]:
    """Return the exact order of ``inst.x`` and the execution trace.

    ``rng`` is a seed or a ``numpy.random.Generator``.
    """
    rng, seed = make_rng(rng)
    x_repr = inst.x
    trace = OrderTrace(inst.group.spec, x_repr, inst.m, seed)
    m = inst.m
    if m == 1:
        return 1, trace
    d = 1
    while True:
        trace.rounds += 1
        updated = False
        for j in range(-1, floor_log2(m) + 1):
            prep, chi = build_Uj(inst, ChiParams(d, m, j))
            boosted = exact_boost_half(prep, chi, check=False)
            pre = success_probability(simulate(prep, shortcut=shortcut), chi)
            state = simulate(boosted, shortcut=shortcut)
            trace.fourier_calls += boosted.fourier_count()
            (k,), _ = measure(state, "k", rng)
            d_before = d
            if d * k % m:
                d = update_divisor(d, k, m)
                updated = True
            trace.records.append(SweepRecord(trace.rounds, j, k, rep(d_before * k, m), d_before, d, pre))
        if not updated:
            return d, trace
