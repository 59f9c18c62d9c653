from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .. import kernels

ROLES = ("fourier-index", "group-element", "coin", "flag")


class LayoutError(ValueError):
    """Register missing, duplicated, mis-sized, or a basis value out of range."""


@dataclass(frozen=True)
class Register:
    name: str
    dim: int
    role: str = "fourier-index"

    def __post_init__(self):
        if int(self.dim) < 1:
            raise LayoutError(f"register {self.name!r}: dimension must be >= 1, got {self.dim}")
        if self.role not in ROLES:
            raise LayoutError(f"register {self.name!r}: unknown role {self.role!r}")


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered registers; the first register is the most significant digit
    of the linear basis index."""

    registers: tuple

    def __post_init__(self):
        regs = tuple(r if isinstance(r, Register) else Register(*r) for r in self.registers)
        object.__setattr__(self, "registers", regs)
        names = [r.name for r in regs]
        if len(set(names)) != len(names):
            raise LayoutError(f"duplicate register names in {names}")

    @classmethod
    def of(cls, *registers) -> "RegisterLayout":
        return cls(tuple(registers))

    @cached_property
    def names(self) -> tuple:
        return tuple(r.name for r in self.registers)

    @cached_property
    def dims(self) -> tuple:
        return tuple(r.dim for r in self.registers)

    @cached_property
    def strides(self) -> tuple:
        out, acc = [], 1
        for d in reversed(self.dims):
            out.append(acc)
            acc *= d
        return tuple(reversed(out))

    @cached_property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=object))

    @cached_property
    def _positions(self) -> dict:
        return {r.name: i for i, r in enumerate(self.registers)}

    def position(self, name: str) -> int:
        try:
            return self._positions[name]
        except KeyError:
            raise LayoutError(f"no register named {name!r} in layout {self.names}") from None

    def register(self, name: str) -> Register:
        return self.registers[self.position(name)]

    def dim(self, name: str) -> int:
        return self.register(name).dim

    def stride(self, name: str) -> int:
        return self.strides[self.position(name)]

    def check(self, values) -> tuple:
        values = tuple(int(v) for v in values)
        if len(values) != len(self.dims):
            raise LayoutError(f"expected {len(self.dims)} register values, got {len(values)}")
        for v, r in zip(values, self.registers):
            if not 0 <= v < r.dim:
                raise LayoutError(f"value {v} out of range for register {r.name!r} (dim {r.dim})")
        return values

    def index_of(self, values) -> int:
        values = self.check(values)
        return sum(v * s for v, s in zip(values, self.strides))

    def values_of(self, index: int) -> tuple:
        return tuple((int(index) // s) % d for s, d in zip(self.strides, self.dims))

    def digits(self, idx: np.ndarray, name: str) -> np.ndarray:
        """Values of register ``name`` for every linear index in ``idx``."""
        i = self.position(name)
        return kernels.register_digits(idx, np.int64(self.strides[i]), np.int64(self.dims[i]))
