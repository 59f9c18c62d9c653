import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from exactorder.groups import (BUILTIN_MODULI, ENUMERATION_CAP, ExtensionField, GroupError, PrimeField, UnitsModN,
                               is_irreducible, parse_field_file, parse_group)

GROUPS = [UnitsModN(15), UnitsModN(9), UnitsModN(8), UnitsModN(35), PrimeField(7), PrimeField(13),
          ExtensionField(2, 2), ExtensionField(2, 3), ExtensionField(2, 4), ExtensionField(3, 2),
          ExtensionField(3, 3), ExtensionField(5, 2)]


def totient(n):
    return sum(1 for a in range(1, n + 1) if np.gcd(a, n) == 1)


def mobius(n):
    out, f = 1, 2
    while f * f <= n:
        if n % f == 0:
            n //= f
            if n % f == 0:
                return 0
            out = -out
        f += 1
    return -out if n > 1 else out


@pytest.mark.parametrize("g", GROUPS, ids=lambda g: g.spec)
def test_group_axioms(g):
    els = g.elements()
    assert len(els) == g.order() == len(set(els))
    e = g.identity
    rng = np.random.default_rng(0)
    for _ in range(50):
        a, b, c = (els[int(i)] for i in rng.integers(len(els), size=3))
        assert g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c))
        assert g.mul(a, e) == a == g.mul(e, a)
        assert g.mul(a, g.inverse(a)) == e
        assert g.mul(a, b) == g.mul(b, a)
    for a in els:
        assert g.pow(a, g.order()) == e


@pytest.mark.parametrize("g", GROUPS, ids=lambda g: g.spec)
def test_encoding_roundtrip_and_identity_at_zero(g):
    assert g.encode(g.identity) == 0
    for a in g.elements():
        assert g.decode(g.encode(a)) == a
        assert g.element_at(g.index_in_elements(a)) == a


@pytest.mark.parametrize("g", GROUPS, ids=lambda g: g.spec)
def test_vectorized_exponentiation_matches_scalar(g):
    rng = np.random.default_rng(1)
    els = g.elements()
    base = els[int(rng.integers(len(els)))]
    codes = np.array([g.encode(a) for a in els], dtype=np.int64)
    a = rng.integers(0, 20, size=codes.shape[0])
    got = g.mul_by_powers(codes, a, base, 20)
    expect = [g.encode(g.mul(x, g.pow(base, int(t)))) for x, t in zip(els, a)]
    assert got.tolist() == expect


def test_orders():
    assert UnitsModN(15).order() == 8 == totient(15)
    assert UnitsModN(35).order() == totient(35)
    assert PrimeField(7).order() == 6
    assert ExtensionField(3, 2).order() == 8


def test_cyclicity():
    cyclic = {n for n in range(2, 60) if any(len({pow(a, t, n) for t in range(n)}) == totient(n)
                                              for a in range(1, n) if np.gcd(a, n) == 1)}
    for n in range(2, 60):
        assert UnitsModN(n).is_cyclic == (n in cyclic)


def test_known_irreducibles():
    assert is_irreducible((1, 1, 1), 2)
    assert not is_irreducible((1, 0, 1), 2)
    assert is_irreducible((1, 1, 0, 0, 1), 2)
    assert not is_irreducible((1, 0, 1, 0, 1), 2)  # (t^2 + t + 1)^2, no roots
    assert is_irreducible((1, 0, 1), 3)
    assert not is_irreducible((2, 0, 1), 3)


@pytest.mark.parametrize("p,k", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 2)])
def test_irreducible_count_matches_gauss_formula(p, k):
    count = sum(is_irreducible(tuple(c) + (1,), p) for c in itertools.product(range(p), repeat=k))
    assert count == sum(mobius(d) * p ** (k // d) for d in range(1, k + 1) if k % d == 0) // k


def test_builtin_moduli_are_irreducible():
    for (p, k), mod in BUILTIN_MODULI.items():
        assert is_irreducible(mod, p)
        assert ExtensionField(p, k).modulus == mod


def test_reducible_modulus_rejected():
    with pytest.raises(GroupError):
        ExtensionField(2, 2, (1, 0, 1))
    with pytest.raises(GroupError):
        ExtensionField(2, 2, (1, 1, 2))


def test_parse_grammar():
    assert parse_group("zn:15") == UnitsModN(15)
    assert parse_group("fp:7") == PrimeField(7)
    assert parse_group("fpk:3,2") == ExtensionField(3, 2)
    assert parse_group("fpk:2,2,1,1,1") == ExtensionField(2, 2, (1, 1, 1))
    for bad in ("zn", "fp:8", "q:3", "fpk:3", "zn:a"):
        with pytest.raises(GroupError):
            parse_group(bad)


def test_parse_elements():
    f = ExtensionField(3, 2)
    assert f.parse_element("0,1") == (0, 1)
    assert f.parse_element("4") == (1, 1)
    with pytest.raises(GroupError):
        f.parse_element("0,0")
    with pytest.raises(GroupError):
        UnitsModN(15).parse_element("5")


def test_field_file():
    text = "# moduli\n2 3 1,1,0,1\n7 1 0,1\n\n7 2 1,0,1  # t^2 + 1\n"
    fields = parse_field_file(text)
    assert fields == [ExtensionField(2, 3, (1, 1, 0, 1)), PrimeField(7), ExtensionField(7, 2, (1, 0, 1))]
    with pytest.raises(GroupError):
        parse_field_file("2 3\n")


def test_enumeration_cap():
    g = PrimeField(65543)
    with pytest.raises(GroupError):
        g.elements()
    assert ENUMERATION_CAP == 1 << 16


@given(st.integers(2, 400), st.integers(0, 10 ** 6), st.integers(0, 300))
def test_residue_pow_matches_builtin(n, a, e):
    g = UnitsModN(n)
    if np.gcd(a % n, n) != 1:
        return
    x = a % n
    acc = g.identity
    for _ in range(e):
        acc = g.mul(acc, x)
    assert g.pow(x, e) == acc == pow(x, e, n)
