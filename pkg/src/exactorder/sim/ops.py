"""Primitive reversible operations.

Each op is a frozen dataclass with ``apply(state)`` and ``inverse()``. Ops name
registers; the layout that resolves those names travels with the state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..groups import CyclicGroupHandle, GroupError
from .layout import LayoutError
from .predicates import Predicate
from .state import PRUNE_TOL, SparseState, rebuild

UNIT_TOL = 1e-12


def _unit(phase) -> complex:
    phase = complex(phase)
    if abs(abs(phase) - 1.0) > UNIT_TOL:
        raise ValueError(f"phase {phase} is not of unit modulus")
    return phase


def _digits_of(state: SparseState):
    return state.digits


def _fiber_apply(state: SparseState, register: str, transform, prune_tol: float) -> SparseState:
    """Apply a dense linear map to register ``register`` of every fiber."""
    layout = state.layout
    pos = layout.position(register)
    stride, dim = layout.strides[pos], layout.dims[pos]
    idx, amps = state.idx, state.amps
    v = (idx // stride) % dim
    rest = idx - v * stride
    uniq, inv = np.unique(rest, return_inverse=True)
    fib = np.zeros((uniq.shape[0], dim), dtype=np.complex128)
    fib[inv, v] = amps
    out = transform(fib)
    w = np.arange(dim, dtype=np.int64) * stride
    if pos == 0:
        new_idx = (w[:, None] + uniq[None, :]).ravel()
        new_amps = out.T.ravel()
        presorted = True
    else:
        new_idx = (uniq[:, None] + w[None, :]).ravel()
        new_amps = out.ravel()
        presorted = stride == 1
    return rebuild(layout, new_idx, new_amps, prune_tol, assume_sorted=presorted)


class PrimitiveOp:
    def apply(self, state: SparseState, prune_tol: float = PRUNE_TOL) -> SparseState:
        raise NotImplementedError

    def inverse(self) -> "PrimitiveOp":
        raise NotImplementedError

    def registers(self) -> tuple:
        return ()

    def describe(self) -> dict:
        return {"op": type(self).__name__}


@dataclass(frozen=True)
class FourierTransform(PrimitiveOp):
    """|v> -> D^{-1/2} sum_w exp(2 pi i v w / D) |w>; the inverse flips the sign."""

    register: str
    direction: str = "forward"

    def __post_init__(self):
        if self.direction not in ("forward", "inverse"):
            raise ValueError(f"direction must be 'forward' or 'inverse', got {self.direction!r}")

    def apply(self, state, prune_tol=PRUNE_TOL):
        if self.direction == "forward":
            fn = lambda fib: np.fft.ifft(fib, axis=1, norm="ortho")
        else:
            fn = lambda fib: np.fft.fft(fib, axis=1, norm="ortho")
        return _fiber_apply(state, self.register, fn, prune_tol)

    def inverse(self):
        return FourierTransform(self.register, "inverse" if self.direction == "forward" else "forward")

    def registers(self):
        return (self.register,)

    def describe(self):
        return {"op": "FourierTransform", "register": self.register, "direction": self.direction}


@dataclass(frozen=True)
class LocalUnitary(PrimitiveOp):
    """A fixed D x D unitary on one register; ``matrix[w][v] = <w|U|v>``."""

    register: str
    matrix: tuple
    label: str = ""

    def __post_init__(self):
        mat = tuple(tuple(complex(x) for x in row) for row in self.matrix)
        arr = np.array(mat, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("LocalUnitary needs a square matrix")
        if not np.allclose(arr.conj().T @ arr, np.eye(arr.shape[0]), atol=UNIT_TOL, rtol=0):
            raise ValueError("LocalUnitary matrix is not unitary")
        object.__setattr__(self, "matrix", mat)

    def apply(self, state, prune_tol=PRUNE_TOL):
        u = np.array(self.matrix, dtype=np.complex128)
        if state.layout.dim(self.register) != u.shape[0]:
            raise LayoutError(f"{self.label or 'LocalUnitary'}: register {self.register!r} has dimension "
                              f"{state.layout.dim(self.register)}, matrix is {u.shape[0]}x{u.shape[0]}")
        return _fiber_apply(state, self.register, lambda fib: fib @ u.T, prune_tol)

    def inverse(self):
        u = np.array(self.matrix, dtype=np.complex128).conj().T
        return LocalUnitary(self.register, tuple(map(tuple, u)), self.label + "^-1" if self.label else "")

    def registers(self):
        return (self.register,)

    def describe(self):
        return {"op": "LocalUnitary", "register": self.register, "label": self.label,
                "matrix": [[[z.real, z.imag] for z in row] for row in self.matrix]}


@dataclass(frozen=True)
class GroupExponentiation(PrimitiveOp):
    """|a>|g> -> |a>|g * base^a> with ``a`` read from ``control``."""

    control: str
    target: str
    group: CyclicGroupHandle
    base: object

    def __post_init__(self):
        if not self.group.contains(self.base):
            raise GroupError(f"base {self.base!r} is not an invertible element of {self.group.spec}")

    def apply(self, state, prune_tol=PRUNE_TOL):
        layout = state.layout
        if layout.dim(self.target) != self.group.register_dim:
            raise LayoutError(f"target register {self.target!r} has dimension {layout.dim(self.target)}, "
                              f"group {self.group.spec} needs {self.group.register_dim}")
        a = state.digits(self.control)
        g = state.digits(self.target)
        new_g = self.group.mul_by_powers(g, a, self.base, layout.dim(self.control))
        new_idx = state.idx + (new_g - g) * layout.stride(self.target)
        return rebuild(layout, new_idx, state.amps, 0.0, digits={self.control: a, self.target: new_g})

    def inverse(self):
        return GroupExponentiation(self.control, self.target, self.group, self.group.inverse(self.base))

    def registers(self):
        return (self.control, self.target)

    def describe(self):
        base = list(self.base) if isinstance(self.base, tuple) else int(self.base)
        return {"op": "GroupExponentiation", "control": self.control, "target": self.target,
                "group": self.group.spec, "base": base}


@dataclass(frozen=True)
class PermutationMark(PrimitiveOp):
    """|v>|f> -> |v>|f xor predicate(v)> on a dimension-2 flag register."""

    flag: str
    predicate: Predicate

    def apply(self, state, prune_tol=PRUNE_TOL):
        layout = state.layout
        if layout.dim(self.flag) != 2:
            raise LayoutError(f"flag register {self.flag!r} must have dimension 2")
        hit = self.predicate.mask(_digits_of(state), len(state))
        f = state.digits(self.flag)
        step = layout.stride(self.flag)
        new_f = f ^ hit
        new_idx = state.idx + (new_f - f) * step
        carried = dict(state._digits)
        carried[self.flag] = new_f
        return rebuild(layout, new_idx, state.amps, 0.0, digits=carried)

    def inverse(self):
        return self

    def registers(self):
        return (self.flag,) + tuple(self.predicate.registers)

    def describe(self):
        return {"op": "PermutationMark", "flag": self.flag, "predicate": self.predicate.describe()}


@dataclass(frozen=True)
class PhasePredicate(PrimitiveOp):
    """Multiply basis states satisfying ``predicate`` by ``phase``."""

    predicate: Predicate
    phase: complex

    def __post_init__(self):
        object.__setattr__(self, "phase", _unit(self.phase))

    def apply(self, state, prune_tol=PRUNE_TOL):
        hit = self.predicate.mask(_digits_of(state), len(state))
        amps = state.amps.copy()
        amps[hit] *= self.phase
        return state.with_amps(amps)

    def inverse(self):
        return PhasePredicate(self.predicate, self.phase.conjugate())

    def registers(self):
        return tuple(self.predicate.registers)

    def describe(self):
        return {"op": "PhasePredicate", "phase": [self.phase.real, self.phase.imag],
                "predicate": self.predicate.describe()}


@dataclass(frozen=True)
class PhaseZero(PrimitiveOp):
    """Multiply the all-zero basis state by ``phase``."""

    phase: complex

    def __post_init__(self):
        object.__setattr__(self, "phase", _unit(self.phase))

    def apply(self, state, prune_tol=PRUNE_TOL):
        if len(state) == 0 or state.idx[0] != 0:
            return state
        amps = state.amps.copy()
        amps[0] *= self.phase
        return state.with_amps(amps)

    def inverse(self):
        return PhaseZero(self.phase.conjugate())

    def describe(self):
        return {"op": "PhaseZero", "phase": [self.phase.real, self.phase.imag]}


@dataclass(frozen=True)
class GlobalPhase(PrimitiveOp):
    phase: complex

    def __post_init__(self):
        object.__setattr__(self, "phase", _unit(self.phase))

    def apply(self, state, prune_tol=PRUNE_TOL):
        return state.with_amps(state.amps * self.phase)

    def inverse(self):
        return GlobalPhase(self.phase.conjugate())

    def describe(self):
        return {"op": "GlobalPhase", "phase": [self.phase.real, self.phase.imag]}


