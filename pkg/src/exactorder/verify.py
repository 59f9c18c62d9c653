"""Acceptance checks, shared by ``exactorder verify`` and the test suite.

Each ``check_*`` function returns a :class:`CriterionResult`; expected values
always come from :mod:`exactorder.oracle`, never from the simulator.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import oracle
from .amplification import AmplificationConfig, amplify, exact_boost_half, exact_boost_quarter, iterate_amplitudes
from .amplification import synthetic_prep
from .applications import find_primitive, primality_test
from .groups import ExtensionField, PrimeField, UnitsModN, is_prime
from .order_finding import (ChiParams, OrderInstance, build_Uj, ceil_log2, find_order, fourier_call_bound,
                            round_bound)
from .sim import (NORM_MONITOR, FourierTransform, GlobalPhase, GroupExponentiation, LocalUnitary, PermutationMark,
                  PhasePredicate, PhaseZero, Register, RegisterEquals, RegisterIn, RegisterLayout, ReversibleProgram,
                  SparseState, run_program, simulate, success_probability)

ORDER_CORPUS = (9, 13, 15, 17, 21, 35)
FIELD_EXTRAS = ((3, 2), (5, 2), (3, 3))


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0
    stats: dict = field(default_factory=dict)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] criterion {self.number}: {self.title} ({self.detail}; {self.seconds:.1f}s)"


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# -- criteria 1 and 5: order finding over Z_n^* ---------------------------------

def order_corpus(moduli=ORDER_CORPUS, factors=(1, 2, 3)):
    """(group, x, m, brute-force order) for every unit x and multiple lambda(n)*c."""
    for n in moduli:
        g = UnitsModN(n)
        lam = oracle.carmichael(g)
        for x in g.elements():
            r = oracle.brute_order(g, x)
            for c in factors:
                yield g, x, lam * c, r


def run_order_corpus(seeds: int = 50, moduli=ORDER_CORPUS) -> dict:
    stats = {"runs": 0, "wrong": [], "round_violations": [], "call_violations": [], "max_rounds_slack": None,
             "max_calls": 0}
    t0 = time.perf_counter()
    for g, x, m, r in order_corpus(moduli):
        inst = OrderInstance(g, x, m)
        for seed in range(seeds):
            got, trace = find_order(inst, seed)
            stats["runs"] += 1
            if got != r:
                stats["wrong"].append((g.spec, x, m, seed, got, r))
            if trace.rounds > round_bound(r):
                stats["round_violations"].append((g.spec, x, m, seed, trace.rounds))
            if trace.fourier_calls > fourier_call_bound(m, r):
                stats["call_violations"].append((g.spec, x, m, seed, trace.fourier_calls))
            stats["max_calls"] = max(stats["max_calls"], trace.fourier_calls)
    stats["seconds"] = time.perf_counter() - t0
    return stats


@_timed
def check_order_exactness(stats: dict | None = None, seeds: int = 50, time_limit: float = 120.0) -> CriterionResult:
    stats = stats or run_order_corpus(seeds)
    ok = not stats["wrong"] and stats["seconds"] <= time_limit
    detail = f"{stats['runs']} runs, {len(stats['wrong'])} wrong, corpus time {stats['seconds']:.1f}s <= {time_limit:.0f}s"
    return CriterionResult(1, "order finding exact on the Z_n^* corpus", ok, detail, stats={"runs": stats["runs"]})


@_timed
def check_round_and_call_bounds(stats: dict | None = None, seeds: int = 50) -> CriterionResult:
    stats = stats or run_order_corpus(seeds)
    ok = not stats["round_violations"] and not stats["call_violations"]
    detail = (f"{len(stats['round_violations'])} round and {len(stats['call_violations'])} Fourier-call violations"
              f" over {stats['runs']} runs, max calls {stats['max_calls']}")
    return CriterionResult(5, "round and Fourier-call bounds", ok, detail)


# -- criterion 2: exact 1/2 at the guaranteed sweep index ------------------------

def _element_of_order(r: int):
    """(group, x) with x of order exactly r, inside F_p^* for the least prime p = 1 mod r."""
    p = r + 1
    while not is_prime(p):
        p += r
    g = PrimeField(p)
    gen = min(oracle.primitive_roots(g))
    return g, g.pow(gen, (p - 1) // r)


def divisor_triples(max_m: int = 128):
    for m in range(2, max_m + 1):
        for r in range(2, m + 1):
            if m % r:
                continue
            for d in range(1, r):
                if r % d == 0:
                    yield d, r, m


@_timed
def check_guaranteed_half(max_m: int = 128, tol: float = 1e-12) -> CriterionResult:
    exact_fail, sim_fail, worst, count = [], [], 0.0, 0
    elements = {}
    for d, r, m in divisor_triples(max_m):
        j = oracle.guaranteed_index(d, r, m)
        if oracle.exact_success_probability(d, r, m, j) != Fraction(1, 2):
            exact_fail.append((d, r, m, j))
        if r not in elements:
            elements[r] = _element_of_order(r)
        g, x = elements[r]
        prep, chi = build_Uj(OrderInstance(g, x, m), ChiParams(d, m, j))
        err = abs(success_probability(simulate(prep), chi) - 0.5)
        worst = max(worst, err)
        if err > tol:
            sim_fail.append((d, r, m, j, err))
        count += 1
    ok = not exact_fail and not sim_fail
    detail = f"{count} triples, {len(exact_fail)} inexact, {len(sim_fail)} simulated off, max |w - 1/2| = {worst:.1e}"
    return CriterionResult(2, "exact 1/2 at the guaranteed index", ok, detail)


# -- criteria 3 and 4: amplification ---------------------------------------------

@_timed
def check_boost_exactness(tol: float = 1e-12) -> CriterionResult:
    worst = 0.0
    cases = 0
    for extra in ((), (2,), (3,), (5, 2), (7,)):
        for a, boost in ((0.5, exact_boost_half), (0.25, exact_boost_quarter)):
            prep, chi = synthetic_prep(a, extra)
            post = success_probability(simulate(boost(prep, chi)), chi)
            worst = max(worst, 1 - post)
            cases += 1
    ok = worst <= tol
    return CriterionResult(3, "single-step boosts from 1/2 and 1/4", ok, f"{cases} preps, max 1 - post = {worst:.1e}")


def _components(state, chi):
    """Dense good and bad components; dense so that pruned zeros line up."""
    hit = np.zeros(state.layout.total_dim, dtype=bool)
    hit[state.idx] = chi.mask(state.digits, len(state))
    v = state.to_dense()
    return np.where(hit, v, 0), np.where(hit, 0, v)


@_timed
def check_closed_form_iterates(samples: int = 50, seed: int = 0, tol: float = 1e-10) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        a = float(rng.uniform(0.05, 0.95))
        j = int(rng.integers(0, 11))
        extra = tuple(int(v) for v in rng.integers(2, 5, size=int(rng.integers(0, 3))))
        prep, chi = synthetic_prep(a, extra)
        good0, bad0 = _components(simulate(prep), chi)
        state = simulate(amplify(prep, chi, AmplificationConfig(-1, -1, j)))
        good, bad = _components(state, chi)
        expect = iterate_amplitudes(a, j)
        # Q^j A|0> = k_j |good> + l_j |bad>, componentwise against A|0>
        err = max(np.max(np.abs(good - expect.k_j * good0)), np.max(np.abs(bad - expect.l_j * bad0)))
        worst = max(worst, float(err))
    ok = worst <= tol
    return CriterionResult(4, "closed-form iterate amplitudes", ok, f"{samples} (a, j) samples, max error {worst:.1e}")


# -- criterion 6: primality ------------------------------------------------------

@_timed
def check_primality(lo: int = 5, hi: int = 1000, max_inconclusive: float = 0.05) -> CriterionResult:
    contradictions, bad_cert, inconclusive, primes = [], [], [], 0
    for n in range(lo | 1, hi + 1, 2):
        truth = oracle.trial_division(n)
        primes += truth
        v = primality_test(n)
        if v.kind == "inconclusive":
            if truth:
                inconclusive.append(n)
            continue
        if v.is_prime != truth:
            contradictions.append((n, v.kind))
        elif v.is_prime and oracle.brute_order(UnitsModN(n), v.witness) != n - 1:
            bad_cert.append(n)
    rate = len(inconclusive) / max(primes, 1)
    ok = not contradictions and not bad_cert and rate <= max_inconclusive
    detail = (f"{len(contradictions)} contradictions, {len(bad_cert)} bad certificates,"
              f" inconclusive on {len(inconclusive)}/{primes} primes ({rate:.1%})")
    return CriterionResult(6, "primality agrees with trial division", ok, detail,
                           stats={"inconclusive": inconclusive})


# -- criterion 7: primitive elements ------------------------------------------------

def primitive_fields(max_prime: int = 257, extras=FIELD_EXTRAS):
    fields = [PrimeField(p) for p in range(2, max_prime + 1) if is_prime(p)]
    return fields + [ExtensionField(p, k) for p, k in extras]


@_timed
def check_primitive_elements(seeds: int = 25, max_prime: int = 257, tol: float = 1e-12) -> CriterionResult:
    wrong, round_fail, weight_fail, runs, p_calls = [], [], [], 0, 0
    for g in primitive_fields(max_prime):
        q = g.order() + 1
        for seed in range(seeds):
            z, trace = find_primitive(g, rng=seed)
            runs += 1
            if oracle.brute_order(g, z) != g.order():
                wrong.append((g.spec, seed))
            if len(trace.rounds) > ceil_log2(q):
                round_fail.append((g.spec, seed, len(trace.rounds)))
            for rec in trace.rounds:
                p_calls += 1
                exact = oracle.outside_subgroup_weight(g, rec.x)
                if exact != Fraction(1, 2) or abs(rec.pre_boost_weight - 0.5) > tol:
                    weight_fail.append((g.spec, seed, rec.x, str(exact), rec.pre_boost_weight))
                if g.index_in_elements(rec.y) in {g.index_in_elements(a) for a in g.subgroup(rec.x)}:
                    weight_fail.append((g.spec, seed, "y inside <x>", rec.y))
    ok = not wrong and not round_fail and not weight_fail
    detail = (f"{runs} runs, {len(wrong)} non-generators, {len(round_fail)} round violations,"
              f" {len(weight_fail)} P invocations off 1/2 (of {p_calls})")
    return CriterionResult(7, "primitive elements with exact P", ok, detail)


# -- criterion 8: numerical hygiene -------------------------------------------------

def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_program(rng: np.random.Generator, max_ops: int = 8) -> ReversibleProgram:
    """A random program over 2-3 small registers, drawing from every primitive op kind."""
    n = int(rng.choice([3, 5, 7, 8]))
    dims = [int(rng.integers(2, 6)), n, 2]
    layout = RegisterLayout((Register("a", dims[0], "fourier-index"), Register("g", n, "group-element"),
                             Register("f", 2, "flag")))
    group = UnitsModN(n)
    units = group.elements()
    ops = []
    for _ in range(int(rng.integers(1, max_ops + 1))):
        kind = int(rng.integers(0, 7))
        reg = str(rng.choice(["a", "g", "f"]))
        phase = complex(np.exp(2j * np.pi * rng.random()))
        if kind == 0:
            ops.append(FourierTransform(reg, str(rng.choice(["forward", "inverse"]))))
        elif kind == 1:
            u = random_unitary(layout.dim(reg), rng)
            ops.append(LocalUnitary(reg, tuple(map(tuple, u)), label="rand"))
        elif kind == 2:
            ops.append(GroupExponentiation("a", "g", group, units[int(rng.integers(len(units)))]))
        elif kind == 3:
            ops.append(PermutationMark("f", RegisterIn("a", frozenset(int(v) for v in
                                                                      rng.integers(0, dims[0], size=2)))))
        elif kind == 4:
            ops.append(PhasePredicate(RegisterEquals(reg, int(rng.integers(layout.dim(reg)))), phase))
        elif kind == 5:
            ops.append(PhaseZero(phase))
        else:
            ops.append(GlobalPhase(phase))
    return ReversibleProgram(layout, tuple(ops))


def random_state(layout: RegisterLayout, rng: np.random.Generator) -> SparseState:
    v = rng.normal(size=layout.total_dim) + 1j * rng.normal(size=layout.total_dim)
    return SparseState.from_dense(layout, v / np.linalg.norm(v))


def inverse_roundtrip_error(prog: ReversibleProgram, state: SparseState) -> float:
    out = run_program(run_program(state, prog), prog.inverse())
    return float(np.max(np.abs(out.to_dense() - state.to_dense())))


@_timed
def check_numerical_hygiene(programs: int = 100, seed: int = 0, tol: float = 1e-10,
                            norm_tol: float = 1e-12) -> CriterionResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(programs):
        prog = random_program(rng)
        worst = max(worst, inverse_roundtrip_error(prog, random_state(prog.layout, rng)))
    norm_err = NORM_MONITOR.max_error
    ok = worst <= tol and norm_err <= norm_tol
    detail = (f"max norm drift {norm_err:.1e} over {NORM_MONITOR.checks} checks,"
              f" max |P^-1 P psi - psi| = {worst:.1e} on {programs} programs")
    return CriterionResult(8, "numerical hygiene", ok, detail)


def run_all(selected=None) -> list[CriterionResult]:
    """Run the selected criteria (default all) in order; criterion 8 reports the norm drift of the whole run."""
    selected = set(selected or range(1, 9))
    NORM_MONITOR.reset()
    results = []
    stats = run_order_corpus() if selected & {1, 5} else None
    checks = {
        1: lambda: check_order_exactness(stats),
        2: check_guaranteed_half,
        3: check_boost_exactness,
        4: check_closed_form_iterates,
        5: lambda: check_round_and_call_bounds(stats),
        6: check_primality,
        7: check_primitive_elements,
        8: check_numerical_hygiene,
    }
    for number in sorted(selected):
        results.append(checks[number]())
    return results
