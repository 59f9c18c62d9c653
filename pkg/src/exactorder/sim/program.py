from __future__ import annotations

import os
from collections import OrderedDict
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterator, Sequence

import numpy as np

from .. import kernels
from .layout import LayoutError, RegisterLayout
from .ops import FourierTransform, PhaseZero, PrimitiveOp
from .predicates import Predicate
from .state import NORM_TOL, PRUNE_TOL, NumericalInvariantError, SparseState, rebuild


@dataclass(frozen=True)
class ReversibleProgram:
    """An invertible sequence of primitive ops and nested programs.

    Nesting is kept so that ``P.inverse()`` blocks stay recognizable, which is
    what lets the executor shortcut ``P S_0 P^-1`` segments.
    """

    layout: RegisterLayout
    ops: tuple = ()

    def __post_init__(self):
        ops = tuple(self.ops)
        for op in ops:
            if isinstance(op, ReversibleProgram):
                if op.layout != self.layout:
                    raise LayoutError("nested program has a different layout")
            elif not isinstance(op, PrimitiveOp):
                raise TypeError(f"not an op: {op!r}")
            else:
                for name in op.registers():
                    self.layout.position(name)
        object.__setattr__(self, "ops", ops)

    def __len__(self) -> int:
        return len(self.ops)

    def then(self, *items) -> "ReversibleProgram":
        return ReversibleProgram(self.layout, self.ops + tuple(items))

    @cached_property
    def _inverse(self) -> "ReversibleProgram":
        return ReversibleProgram(self.layout, tuple(op.inverse() for op in reversed(self.ops)))

    def inverse(self) -> "ReversibleProgram":
        return self._inverse

    def flatten(self) -> Iterator[PrimitiveOp]:
        for op in self.ops:
            if isinstance(op, ReversibleProgram):
                yield from op.flatten()
            else:
                yield op

    def fourier_count(self) -> int:
        """Exact-Fourier applications, excluding the dimension-2 coin transforms."""
        return sum(1 for op in self.flatten()
                   if isinstance(op, FourierTransform) and self.layout.register(op.register).role != "coin")

    def describe(self) -> list:
        return [op.describe() for op in self.flatten()]

    def __hash__(self):
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.layout, self.ops))


# -- execution -----------------------------------------------------------------

def apply_op(state: SparseState, op: PrimitiveOp, prune_tol: float = PRUNE_TOL) -> SparseState:
    for name in op.registers():
        state.layout.position(name)
    return op.apply(state, prune_tol)


def _is_reflection(items: Sequence, i: int) -> bool:
    if i + 2 >= len(items):
        return False
    a, s, b = items[i], items[i + 1], items[i + 2]
    return (isinstance(a, ReversibleProgram) and isinstance(s, PhaseZero)
            and isinstance(b, ReversibleProgram) and a == b.inverse())


def _reflect(state: SparseState, prep: ReversibleProgram, phase: complex, prune_tol: float) -> SparseState:
    # prep S_0(phase) prep^-1 = I + (phase - 1) |prep 0><prep 0|
    p0 = simulate(prep, prune_tol=prune_tol)
    overlap = kernels.sparse_inner(p0.idx, p0.amps, state.idx, state.amps)
    idx, amps = kernels.sparse_axpy(state.idx, state.amps, p0.idx, p0.amps, (phase - 1) * overlap)
    if idx is state.idx:
        return rebuild(state.layout, idx, amps, prune_tol, assume_sorted=True, digits=state._digits)
    return rebuild(state.layout, idx, amps, prune_tol, assume_sorted=True)


def _run_items(state, items, prune_tol, shortcut, on_step):
    i = 0
    while i < len(items):
        if shortcut and _is_reflection(items, i):
            state = _reflect(state, items[i + 2], items[i + 1].phase, prune_tol)
            if on_step is not None:
                on_step(items[i + 1], state)
            i += 3
            continue
        item = items[i]
        if isinstance(item, ReversibleProgram):
            state = _run_items(state, item.ops, prune_tol, shortcut, on_step)
        else:
            state = item.apply(state, prune_tol)
            if on_step is not None:
                on_step(item, state)
        i += 1
    return state


def run_program(state: SparseState, prog: ReversibleProgram, *, prune_tol: float = PRUNE_TOL,
                shortcut: bool = True, on_step: Callable | None = None) -> SparseState:
    """Apply ``prog`` to ``state``.

    With ``shortcut`` (default) every ``P^-1, S_0(phi), P`` segment is evaluated
    through the identity ``P S_0 P^-1 = I + (phi - 1)|P0><P0|``; ``shortcut=False``
    runs every op literally. ``on_step(op, state)`` is called after each step.
    """
    if state.layout != prog.layout:
        raise LayoutError(f"state layout {state.layout.names} does not match program layout {prog.layout.names}")
    out = _run_items(state, prog.ops, prune_tol, shortcut, on_step)
    return out.check_norm(NORM_TOL)


class _StateCache:
    """LRU of simulated prefixes, bounded by the total number of stored amplitudes."""

    def __init__(self, budget: int, max_items: int = 4096):
        self.budget = budget
        self.max_items = max_items
        self._data: OrderedDict = OrderedDict()
        self._size = 0
        self.hits = 0
        self.misses = 0

    def get(self, key):
        state = self._data.get(key)
        if state is not None:
            self._data.move_to_end(key)
            self.hits += 1
        else:
            self.misses += 1
        return state

    def put(self, key, state: SparseState):
        if len(state) > self.budget or key in self._data:
            return
        self._data[key] = state
        self._size += len(state)
        while self._size > self.budget or len(self._data) > self.max_items:
            _, old = self._data.popitem(last=False)
            self._size -= len(old)

    def clear(self):
        self._data.clear()
        self._size = 0


STATE_CACHE = _StateCache(int(float(os.environ.get("EXACTORDER_CACHE_AMPLITUDES", "1.2e7"))))


def simulate(prog: ReversibleProgram, *, prune_tol: float = PRUNE_TOL, shortcut: bool = True,
             use_cache: bool = True) -> SparseState:
    """``prog`` applied to the all-zero basis state, memoized per program prefix.

    States are immutable, so a cached prefix can be shared by every program
    that starts with the same ops (all sweep iterations share the Fourier
    sampling prefix, all seeds share the whole run).
    """
    if not use_cache:
        return run_program(SparseState.zero(prog.layout), prog, prune_tol=prune_tol, shortcut=shortcut)
    items = prog.ops
    tag = (prog.layout, prune_tol, shortcut)
    state, start = None, 0
    for n in range(len(items), 0, -1):
        state = STATE_CACHE.get((tag, items[:n]))
        if state is not None:
            start = n
            break
    if state is None:
        if items and isinstance(items[0], ReversibleProgram):
            state, start = simulate(items[0], prune_tol=prune_tol, shortcut=shortcut), 1
        else:
            state = SparseState.zero(prog.layout)
    for n in range(start, len(items)):
        state = _run_items(state, items[n:n + 1], prune_tol, shortcut, None).check_norm(NORM_TOL)
        STATE_CACHE.put((tag, items[:n + 1]), state)
    return state.check_norm(NORM_TOL)


# -- readout -------------------------------------------------------------------

def success_probability(state: SparseState, predicate: Predicate) -> float:
    hit = predicate.mask(state.digits, len(state))
    w = np.abs(state.amps[hit]) ** 2
    return float(min(max(w.sum(), 0.0), 1.0))


def marginal(state: SparseState, register: str) -> np.ndarray:
    """Probability of each value of ``register``."""
    dim = state.layout.dim(register)
    return kernels.marginal(state.digits(register), state.amps, dim)


def measure(state: SparseState, registers, rng: np.random.Generator):
    """Sample ``registers`` (a name or a list of names); returns ``(values, collapsed)``."""
    names = [registers] if isinstance(registers, str) else list(registers)
    layout = state.layout
    for name in names:
        layout.position(name)
    if len(names) == 1:
        weights = marginal(state, names[0])
        labels = np.arange(weights.shape[0], dtype=np.int64)
        joint = state.digits(names[0])
    else:
        joint = np.zeros(len(state), dtype=np.int64)
        for name in names:
            joint = joint * layout.dim(name) + state.digits(name)
        labels, inv = np.unique(joint, return_inverse=True)
        weights = np.bincount(inv, weights=np.abs(state.amps) ** 2, minlength=labels.shape[0])
    cdf = np.cumsum(weights)
    total = cdf[-1] if cdf.shape[0] else 0.0
    if not total > 0:
        raise NumericalInvariantError("measurement on a state with zero marginal weight")
    pos = int(np.searchsorted(cdf, rng.random() * total, side="right"))
    pos = min(pos, cdf.shape[0] - 1)
    while weights[pos] <= 0:
        pos -= 1
    label = int(labels[pos])
    keep = joint == label
    amps = state.amps[keep] / np.sqrt(weights[pos])
    collapsed = SparseState(layout, state.idx[keep], amps)
    values = []
    for name in reversed(names):
        values.append(label % layout.dim(name))
        label //= layout.dim(name)
    return tuple(reversed(values)), collapsed
