"""Boolean predicates on basis tuples.

Predicates are frozen dataclasses (hashable, comparable, serializable) rather
than closures, so programs containing them can be cached and traced.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Callable, Mapping

import numpy as np

Digits = Callable[[str], np.ndarray]


class Predicate:
    """Base class. Subclasses implement ``registers`` and ``mask``."""

    registers: tuple = ()

    def mask(self, digits: Digits, n: int) -> np.ndarray:
        raise NotImplementedError

    def holds(self, values: Mapping[str, int]) -> bool:
        return bool(self.mask(lambda name: np.array([values[name]], dtype=np.int64), 1)[0])

    def describe(self) -> dict:
        out = {"kind": type(self).__name__}
        for key, value in asdict(self).items():
            out[key] = sorted(value) if isinstance(value, frozenset) else value
        return out


@dataclass(frozen=True)
class Constant(Predicate):
    value: bool

    def mask(self, digits, n):
        return np.full(n, bool(self.value))


@dataclass(frozen=True)
class RegisterEquals(Predicate):
    register: str
    value: int

    @property
    def registers(self):
        return (self.register,)

    def mask(self, digits, n):
        return digits(self.register) == self.value


@dataclass(frozen=True)
class RegisterIn(Predicate):
    register: str
    values: frozenset

    def __post_init__(self):
        object.__setattr__(self, "values", frozenset(int(v) for v in self.values))

    @property
    def registers(self):
        return (self.register,)

    def mask(self, digits, n):
        vals = np.fromiter(self.values, dtype=np.int64, count=len(self.values))
        return np.isin(digits(self.register), vals)
