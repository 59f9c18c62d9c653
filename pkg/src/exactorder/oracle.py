"""Classical reference computations.

Everything here is brute force over arbitrary-precision integers and
``fractions.Fraction``; none of it touches the simulator.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .groups import ENUMERATION_CAP, CyclicGroupHandle, GroupError

ExactProbability = Fraction


def _cap(m: int):
    if m > ENUMERATION_CAP:
        raise GroupError(f"oracle enumeration refused above {ENUMERATION_CAP} (got {m})")


def brute_order(group: CyclicGroupHandle, x) -> int:
    """Least t >= 1 with x^t = 1, by repeated multiplication."""
    _cap(group.order())
    group.check(x)
    t, y = 1, x
    while y != group.identity:
        y = group.mul(y, x)
        t += 1
    return t


def carmichael(group: CyclicGroupHandle) -> int:
    """Exponent of the group: lcm of all element orders."""
    return math.lcm(*(brute_order(group, x) for x in group.elements()))


def gamma_distribution(m: int, r: int) -> list[Fraction]:
    """Weight of each Fourier index k after Fourier sampling: 1/r on multiples of m/r."""
    if r < 1 or m % r:
        raise ValueError(f"r={r} does not divide m={m}")
    _cap(m)
    step = m // r
    return [Fraction(1, r) if k % step == 0 else Fraction(0) for k in range(m)]


def _marked(k: int, b: int, d: int, m: int, j: int) -> bool:
    rep = d * k % m
    if Fraction(rep) >= Fraction(m, 2):
        return True
    return b == 1 and j >= 0 and 0 < rep <= 2 ** j


def exact_success_probability(d: int, r: int, m: int, j: int) -> Fraction:
    """Exact flag weight of the sweep state for known divisor d at index j."""
    if d < 1 or r % d or m % r:
        raise ValueError(f"need d | r | m, got d={d}, r={r}, m={m}")
    if j < -1:
        raise ValueError("j must be >= -1")
    gamma = gamma_distribution(m, r)
    total = Fraction(0)
    for k in range(0, m, m // r):
        for b in (0, 1):
            if _marked(k, b, d, m, j):
                total += gamma[k] / 2
    return total


def guaranteed_index(d: int, r: int, m: int) -> int:
    """Sweep index at which the flag weight is exactly 1/2 (needs d < r)."""
    if r % d or d >= r:
        raise ValueError("need d a proper divisor of r")
    if (r // d) % 2 == 0:
        return -1
    s = d * m // r
    return (s - 1).bit_length()  # ceil(log2 s)


def outside_subgroup_weight(group: CyclicGroupHandle, x) -> Fraction:
    """Exact chi(y, b) = 1 weight of the procedure-P state, by enumeration."""
    m = group.order()
    _cap(m)
    inside = set()
    y = group.identity
    while True:
        inside.add(y)
        y = group.mul(y, x)
        if y == group.identity:
            break
    r = len(inside)
    if r >= m:
        raise ValueError("x generates the whole group")
    outside = sum(1 for y in group.elements() if y not in inside)
    coin = Fraction(m, 2 * (m - r))
    return Fraction(outside, m) * coin


def primitive_roots(group: CyclicGroupHandle) -> set:
    m = group.order()
    return {x for x in group.elements() if brute_order(group, x) == m}


def trial_division(n: int) -> bool:
    """True iff n is prime."""
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True
