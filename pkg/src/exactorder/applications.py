"""Primality testing and primitive-element finding on top of exact order finding."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np

from .amplification import exact_boost_half
from .groups import CyclicGroupHandle, GroupError, UnitsModN
from .order_finding import OrderInstance, find_order, make_rng
from .sim import (FourierTransform, LocalUnitary, PermutationMark, Predicate, Register, RegisterEquals,
                  RegisterLayout, ReversibleProgram, measure, simulate, success_probability)

DEFAULT_MAX_CANDIDATES = 64


class UnsupportedBackendError(GroupError):
    pass


def _element_json(a):
    return list(a) if isinstance(a, tuple) else a


# -- primality ---------------------------------------------------------------

@dataclass
class PrimalityVerdict:
    """``kind`` is "prime", "composite" or "inconclusive".

    Prime verdicts carry an x of order n - 1; composite verdicts carry the
    gcd or Euler-criterion witness.
    """

    kind: str
    n: int
    witness: int | None = None
    reason: str = ""
    order: int | None = None
    candidates: list = field(default_factory=list)
    order_traces: list = field(default_factory=list)

    @property
    def is_prime(self) -> bool:
        return self.kind == "prime"

    @property
    def fourier_calls(self) -> int:
        return sum(t.fourier_calls for t in self.order_traces)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind, "n": self.n, "witness": self.witness, "reason": self.reason,
            "order": self.order, "candidates": self.candidates,
            "order_traces": [t.to_dict() for t in self.order_traces],
        }


def _small_primes(bound: int, count: int) -> list[int]:
    out, c = [], 2
    while c < bound and len(out) < count:
        if all(c % p for p in out if p * p <= c):
            out.append(c)
        c += 1
    return out


def default_candidates(n: int, max_candidates: int = DEFAULT_MAX_CANDIDATES, rng=None) -> list[int]:
    """x = 2, 3, 5, 7, ... below n, or a seeded random sample of [2, n - 1)."""
    if rng is None:
        return _small_primes(n, max_candidates)
    pool = np.arange(2, max(n - 1, 2))
    take = min(max_candidates, pool.shape[0])
    return [int(v) for v in rng.choice(pool, size=take, replace=False)] if take else []


def primality_test(n: int, candidates=None, rng=None, max_candidates: int = DEFAULT_MAX_CANDIDATES,
                   random_order: bool = False) -> PrimalityVerdict:
    """Decide primality of n using order finding with the known multiple n - 1."""
    if n < 2:
        raise ValueError(f"primality test needs n >= 2, got {n}")
    rng, _ = make_rng(rng)
    if n == 2:
        return PrimalityVerdict("prime", 2, reason="n = 2")
    if n % 2 == 0:
        return PrimalityVerdict("composite", n, witness=2, reason="even")
    if candidates is None:
        candidates = default_candidates(n, max_candidates, rng if random_order else None)
    verdict = PrimalityVerdict("inconclusive", n, reason="candidate sweep exhausted")
    group = UnitsModN(n)
    half = (n - 1) // 2
    for x in candidates:
        x = int(x)
        if not 1 < x < n:
            continue
        verdict.candidates.append(x)
        if math.gcd(x, n) > 1:
            return PrimalityVerdict("composite", n, x, f"gcd({x}, {n}) = {math.gcd(x, n)}",
                                    candidates=verdict.candidates, order_traces=verdict.order_traces)
        e = pow(x, half, n)
        if e == n - 1:
            r, trace = find_order(OrderInstance(group, x, n - 1), rng)
            verdict.order_traces.append(trace)
            if r == n - 1:
                return PrimalityVerdict("prime", n, x, f"order of {x} is n - 1", order=r,
                                        candidates=verdict.candidates, order_traces=verdict.order_traces)
        elif e != 1:
            return PrimalityVerdict("composite", n, x, f"{x}^((n-1)/2) = {e} is not +-1 mod {n}",
                                    candidates=verdict.candidates, order_traces=verdict.order_traces)
    return verdict


# -- procedure P: an exact sampler outside <x> ---------------------------------

def build_Br(r: int, m: int) -> LocalUnitary:
    """Coin rotation |0> -> sqrt(1 - c)|0> + sqrt(c)|1> with c = m / (2 (m - r))."""
    if not 1 <= r < m:
        raise ValueError(f"B_r needs 1 <= r < m, got r={r}, m={m}")
    c = m / (2 * (m - r))
    if c > 1:
        raise ValueError(f"B_r undefined: m/(2(m-r)) = {c} > 1 (r={r}, m={m})")
    s, t = math.sqrt(c), math.sqrt(1 - c)
    return LocalUnitary("b", ((t, -s), (s, t)), label=f"B_{r}")


@dataclass(frozen=True)
class OutsideSubgroup(Predicate):
    """chi(y, b) = 1 iff y is not in the subgroup (given by element indices) and b = 1."""

    y_register: str
    b_register: str
    members: frozenset
    size: int

    @property
    def registers(self):
        return (self.y_register, self.b_register)

    @cached_property
    def _inside(self) -> np.ndarray:
        table = np.zeros(self.size, dtype=bool)
        table[np.fromiter(self.members, dtype=np.int64, count=len(self.members))] = True
        return table

    def mask(self, digits, n):
        return ~self._inside[digits(self.y_register)] & (digits(self.b_register) == 1)

    def describe(self):
        return {"kind": "OutsideSubgroup", "y_register": self.y_register, "b_register": self.b_register,
                "subgroup_size": len(self.members), "size": self.size}


def build_P(group: CyclicGroupHandle, x, r: int) -> tuple[ReversibleProgram, Predicate]:
    """Uniform superposition over G (as element indices), B_r on the coin, mark chi(y, b)."""
    m = group.order()
    if r >= m:
        raise ValueError(f"x already generates G (r = {r} = |G|); nothing to sample")
    members = frozenset(group.index_in_elements(a) for a in group.subgroup(x))
    if len(members) != r:
        raise ValueError(f"stated order {r} disagrees with |<x>| = {len(members)}")
    layout = RegisterLayout((Register("y", m, "group-element"), Register("b", 2, "coin"), Register("f", 2, "flag")))
    prog = ReversibleProgram(layout, (
        FourierTransform("y"),
        build_Br(r, m),
        PermutationMark("f", OutsideSubgroup("y", "b", members, m)),
    ))
    return prog, RegisterEquals("f", 1)


def sample_outside(group: CyclicGroupHandle, x, r: int, rng) -> tuple[object, dict]:
    """Run the boosted P once; the measured element lies outside <x>."""
    prep, chi = build_P(group, x, r)
    pre = success_probability(simulate(prep), chi)
    boosted = exact_boost_half(prep, chi)
    state = simulate(boosted)
    post = success_probability(state, chi)
    (label, b, f), _ = measure(state, ["y", "b", "f"], rng)
    info = {"pre_boost_weight": pre, "post_boost_weight": post, "flag": f, "coin": b,
            "coin_probability": group.order() / (2 * (group.order() - r)),
            "fourier_calls": boosted.fourier_count()}
    return group.element_at(label), info


# -- combining two elements into one of lcm order --------------------------------

def coprime_split(rx: int, ry: int) -> tuple[int, int]:
    """(u, v) with u | rx, v | ry, gcd(u, v) = 1 and u * v = lcm(rx, ry), by gcd peeling."""
    u, v = rx, ry // math.gcd(rx, ry)
    g = math.gcd(u, v)
    while g > 1:
        u //= g
        v *= g
        g = math.gcd(u, v)
    return u, v


def combine_elements(group: CyclicGroupHandle, x, rx: int, y, ry: int):
    """An element of order lcm(rx, ry), built as x^(rx/u) * y^(ry/v)."""
    u, v = coprime_split(rx, ry)
    z = group.mul(group.pow(x, rx // u), group.pow(y, ry // v))
    return z, u * v


# -- primitive elements ------------------------------------------------------------

@dataclass
class PrimitiveRound:
    x: object
    r_x: int
    y: object
    r_y: int
    z: object
    r_z: int
    pre_boost_weight: float
    post_boost_weight: float
    coin_probability: float


@dataclass
class PrimitiveTrace:
    group: str
    start: object
    seed: int | None
    rounds: list = field(default_factory=list)
    order_traces: list = field(default_factory=list)
    p_fourier_calls: int = 0

    @property
    def fourier_calls(self) -> int:
        return self.p_fourier_calls + sum(t.fourier_calls for t in self.order_traces)

    def to_dict(self) -> dict:
        rounds = []
        for rec in self.rounds:
            d = asdict(rec)
            for key in ("x", "y", "z"):
                d[key] = _element_json(d[key])
            rounds.append(d)
        return {
            "group": self.group, "start": _element_json(self.start), "seed": self.seed,
            "rounds": rounds,
            "fourier_calls": {"exact": self.fourier_calls, "standard_qft_units": 3 * self.fourier_calls},
            "order_traces": [t.to_dict() for t in self.order_traces],
        }


def find_primitive(group: CyclicGroupHandle, start=None, rng=None) -> tuple[object, PrimitiveTrace]:
    """Climb from ``start`` (random if None) to a generator of the cyclic group."""
    if not group.is_cyclic:
        raise UnsupportedBackendError(f"{group.spec} is not cyclic; primitive elements do not exist")
    rng, seed = make_rng(rng)
    m = group.order()
    x = group.check(start) if start is not None else group.element_at(int(rng.integers(m)))
    trace = PrimitiveTrace(group.spec, x, seed)
    r, otrace = find_order(OrderInstance(group, x, m), rng)
    trace.order_traces.append(otrace)
    while r < m:
        y, info = sample_outside(group, x, r, rng)
        trace.p_fourier_calls += info["fourier_calls"]
        ry, ytrace = find_order(OrderInstance(group, y, m), rng)
        trace.order_traces.append(ytrace)
        z, rz = combine_elements(group, x, r, y, ry)
        trace.rounds.append(PrimitiveRound(x, r, y, ry, z, rz, info["pre_boost_weight"],
                                           info["post_boost_weight"], info["coin_probability"]))
        x, r = z, rz
    return x, trace
