"""Finite abelian group backends: units mod n, prime fields, extension fields.

Every handle maps its elements onto a register of dimension ``register_dim``
with the identity stored at index 0, so the all-zero basis state of a layout
holds the identity in its group register.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from . import kernels

ENUMERATION_CAP = 1 << 16


class GroupError(ValueError):
    """Invalid group parameters or elements (non-units, reducible moduli, ...)."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _totient(n: int) -> int:
    result, rest, f = n, n, 2
    while f * f <= rest:
        if rest % f == 0:
            while rest % f == 0:
                rest //= f
            result -= result // f
        f += 1
    if rest > 1:
        result -= result // rest
    return result


class CyclicGroupHandle(ABC):
    """Common interface of the group backends.

    Elements are ints (residues) or, for extension fields, coefficient tuples
    ``(c_0, ..., c_{k-1})`` with the constant term first.
    """

    @property
    @abstractmethod
    def register_dim(self) -> int: ...

    @property
    @abstractmethod
    def identity(self): ...

    @property
    @abstractmethod
    def spec(self) -> str: ...

    @property
    @abstractmethod
    def is_cyclic(self) -> bool: ...

    @abstractmethod
    def order(self) -> int:
        """Number of elements of the group."""

    @abstractmethod
    def contains(self, a) -> bool: ...

    @abstractmethod
    def mul(self, a, b): ...

    @abstractmethod
    def inverse(self, a): ...

    @abstractmethod
    def encode(self, a) -> int: ...

    @abstractmethod
    def decode(self, index: int): ...

    @abstractmethod
    def parse_element(self, text: str): ...

    @abstractmethod
    def mul_by_powers(self, g_index: np.ndarray, a: np.ndarray, base, count: int) -> np.ndarray:
        """Register indices of ``g * base**a`` for index arrays ``g_index`` and exponents ``a``."""

    def pow(self, a, e: int):
        if e < 0:
            a, e = self.inverse(a), -e
        acc, base = self.identity, a
        while e:
            if e & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            e >>= 1
        return acc

    def check(self, a):
        if not self.contains(a):
            raise GroupError(f"{a!r} is not an element of {self.spec}")
        return a

    def elements(self) -> list:
        """All elements, ordered by register index."""
        return list(self._elements)

    def element_at(self, i: int):
        return self._elements[i]

    def index_in_elements(self, a) -> int:
        return self._element_position[a]

    @cached_property
    def _elements(self) -> tuple:
        if self.order() > ENUMERATION_CAP:
            raise GroupError(f"{self.spec}: group order {self.order()} exceeds the enumeration cap {ENUMERATION_CAP}")
        out = []
        for i in range(self.register_dim):
            a = self.decode(i)
            if self.contains(a):
                out.append(a)
        return tuple(out)

    @cached_property
    def _element_position(self) -> dict:
        return {a: i for i, a in enumerate(self._elements)}

    def subgroup(self, x) -> list:
        """Enumerate <x> = [1, x, x^2, ...]."""
        if self.order() > ENUMERATION_CAP:
            raise GroupError(f"{self.spec}: subgroup enumeration refused above {ENUMERATION_CAP} elements")
        out = [self.identity]
        y = self.check(x)
        while y != self.identity:
            out.append(y)
            y = self.mul(y, x)
        return out


@lru_cache(maxsize=512)
def _residue_powers(x: int, n: int, count: int) -> np.ndarray:
    table = kernels.power_table(np.int64(x), np.int64(n), count)
    table.setflags(write=False)
    return table


class _ResidueGroup(CyclicGroupHandle):
    modulus: int

    @property
    def register_dim(self) -> int:
        return self.modulus

    @property
    def identity(self):
        return 1 % self.modulus

    def mul(self, a, b):
        return (a * b) % self.modulus

    def inverse(self, a):
        self.check(a)
        return pow(a, -1, self.modulus)

    def pow(self, a, e: int):
        return pow(a, e, self.modulus)

    def encode(self, a) -> int:
        return (a - 1) % self.modulus

    def decode(self, index: int):
        return (index + 1) % self.modulus

    def parse_element(self, text: str):
        return self.check(int(text) % self.modulus)

    def mul_by_powers(self, g_index, a, base, count):
        xpow = _residue_powers(int(base), self.modulus, int(count))
        return kernels.modmul_index(g_index, a, xpow, np.int64(self.modulus))


@dataclass(frozen=True)
class UnitsModN(_ResidueGroup):
    """The unit group of Z_n."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise GroupError(f"units-mod-n needs n >= 2, got {self.n}")

    @property
    def modulus(self) -> int:
        return self.n

    @property
    def spec(self) -> str:
        return f"zn:{self.n}"

    @property
    def is_cyclic(self) -> bool:
        n = self.n
        if n in (2, 4):
            return True
        if n % 2 == 0:
            n //= 2
        if n % 2 == 0:
            return False
        p = next(f for f in range(3, n + 1, 2) if n % f == 0)
        while n % p == 0:
            n //= p
        return n == 1

    def order(self) -> int:
        return _totient(self.n)

    def contains(self, a) -> bool:
        return isinstance(a, (int, np.integer)) and 0 <= a < self.n and math.gcd(int(a), self.n) == 1


@dataclass(frozen=True)
class PrimeField(_ResidueGroup):
    """The multiplicative group of F_p."""

    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise GroupError(f"fp:{self.p}: {self.p} is not prime")

    @property
    def modulus(self) -> int:
        return self.p

    @property
    def spec(self) -> str:
        return f"fp:{self.p}"

    @property
    def is_cyclic(self) -> bool:
        return True

    def order(self) -> int:
        return self.p - 1

    def contains(self, a) -> bool:
        return isinstance(a, (int, np.integer)) and 0 < a < self.p


# -- polynomial helpers over F_p (coefficient lists, constant term first) -------

def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, b, p):
    a = _poly_trim([c % p for c in a])
    b = _poly_trim(b)
    inv_lead = pow(b[-1], -1, p)
    while len(a) >= len(b):
        coef = (a[-1] * inv_lead) % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * c) % p
        a = _poly_trim(a)
    return a


def is_irreducible(modulus, p: int) -> bool:
    """Brute force: no monic factor of degree 1..k//2."""
    k = len(modulus) - 1
    if k < 1:
        return False
    if k == 1:
        return True
    for deg in range(1, k // 2 + 1):
        for code in range(p ** deg):
            cand = [(code // p ** i) % p for i in range(deg)] + [1]
            if not _poly_mod(modulus, cand, p):
                return False
    return True


BUILTIN_MODULI = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 0, 1),
}


@dataclass(frozen=True)
class ExtensionField(CyclicGroupHandle):
    """The multiplicative group of F_{p^k} = F_p[t] / (modulus)."""

    p: int
    k: int
    modulus: tuple = field(default=())

    def __post_init__(self):
        if not is_prime(self.p):
            raise GroupError(f"{self.p} is not prime")
        if self.k < 1:
            raise GroupError("extension degree must be >= 1")
        mod = tuple(int(c) % self.p for c in self.modulus) if self.modulus else BUILTIN_MODULI.get((self.p, self.k))
        if mod is None:
            raise GroupError(f"no built-in irreducible polynomial for F_{self.p}^{self.k}; supply one")
        if len(mod) != self.k + 1 or mod[-1] != 1:
            raise GroupError(f"modulus {mod} must be monic of degree {self.k}")
        if self.p ** self.k > ENUMERATION_CAP + 1:
            raise GroupError(f"F_{self.p}^{self.k} exceeds the desk-scale cap")
        if not is_irreducible(mod, self.p):
            raise GroupError(f"{mod} is reducible over F_{self.p}")
        object.__setattr__(self, "modulus", mod)

    @property
    def q(self) -> int:
        return self.p ** self.k

    @property
    def register_dim(self) -> int:
        return self.q

    @property
    def identity(self):
        return (1,) + (0,) * (self.k - 1)

    @property
    def spec(self) -> str:
        return f"fpk:{self.p},{self.k}," + ",".join(map(str, self.modulus))

    @property
    def is_cyclic(self) -> bool:
        return True

    def order(self) -> int:
        return self.q - 1

    def contains(self, a) -> bool:
        return (isinstance(a, tuple) and len(a) == self.k
                and all(isinstance(c, (int, np.integer)) and 0 <= c < self.p for c in a)
                and any(a))

    def mul(self, a, b):
        prod = [0] * (2 * self.k - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        red = _poly_mod(prod, self.modulus, self.p)
        return tuple(red + [0] * (self.k - len(red)))

    def inverse(self, a):
        self.check(a)
        return self.pow(a, self.q - 2)

    def code(self, a) -> int:
        return sum(int(c) * self.p ** i for i, c in enumerate(a))

    def from_code(self, code: int):
        return tuple((code // self.p ** i) % self.p for i in range(self.k))

    def encode(self, a) -> int:
        return (self.code(a) - 1) % self.q

    def decode(self, index: int):
        return self.from_code((index + 1) % self.q)

    def parse_element(self, text: str):
        parts = [s for s in text.replace(";", ",").split(",") if s.strip()]
        if len(parts) == 1:
            return self.check(self.from_code(int(parts[0])))
        coeffs = [int(s) % self.p for s in parts]
        if len(coeffs) > self.k:
            raise GroupError(f"too many coefficients for F_{self.p}^{self.k}: {text}")
        return self.check(tuple(coeffs + [0] * (self.k - len(coeffs))))

    # vectorized multiplication on code arrays
    def _digits(self, codes):
        return np.stack([(codes // self.p ** i) % self.p for i in range(self.k)], axis=1)

    def _mul_codes(self, ca, cb):
        da, db = self._digits(ca), self._digits(cb)
        k, p = self.k, self.p
        prod = np.zeros((ca.shape[0], 2 * k - 1), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                prod[:, i + j] += da[:, i] * db[:, j]
        for t in range(2 * k - 2, k - 1, -1):
            coef = prod[:, t] % p
            for i in range(k):
                prod[:, t - k + i] -= coef * self.modulus[i]
            prod[:, t] = 0
        prod %= p
        weights = self.p ** np.arange(k, dtype=np.int64)
        return prod[:, :k] @ weights

    def mul_by_powers(self, g_index, a, base, count):
        xpow = _extension_powers(self, base, int(count))
        codes = (g_index + 1) % self.q
        out = self._mul_codes(codes, xpow[a])
        return (out - 1) % self.q


@lru_cache(maxsize=256)
def _extension_powers(group: ExtensionField, base, count: int) -> np.ndarray:
    out = np.empty(count, dtype=np.int64)
    acc = group.identity
    for t in range(count):
        out[t] = group.code(acc)
        acc = group.mul(acc, base)
    out.setflags(write=False)
    return out


def parse_group(text: str) -> CyclicGroupHandle:
    """Parse ``zn:<n>``, ``fp:<p>`` or ``fpk:<p>,<k>[,c_0,...,c_k]``."""
    kind, _, rest = text.strip().partition(":")
    try:
        args = [int(s) for s in rest.split(",") if s.strip()]
    except ValueError as exc:
        raise GroupError(f"bad group spec {text!r}") from exc
    if kind == "zn" and len(args) == 1:
        return UnitsModN(args[0])
    if kind == "fp" and len(args) == 1:
        return PrimeField(args[0])
    if kind == "fpk" and len(args) >= 2:
        p, k, *poly = args
        if k == 1 and not poly:
            return PrimeField(p)
        return ExtensionField(p, k, tuple(poly))
    raise GroupError(f"bad group spec {text!r}; expected zn:<n>, fp:<p> or fpk:<p>,<k>[,<poly>]")


def parse_field_file(text: str) -> list[CyclicGroupHandle]:
    """Records ``p k c_0,c_1,...,c_k`` (one per line, ``#`` comments allowed)."""
    fields = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GroupError(f"line {lineno}: expected 'p k c_0,...,c_k'")
        p, k = int(parts[0]), int(parts[1])
        poly = tuple(int(c) for c in parts[2].split(","))
        fields.append(PrimeField(p) if k == 1 else ExtensionField(p, k, poly))
    return fields
