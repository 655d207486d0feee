from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlgf import gf2p
from nlgf.errors import DomainError, ParameterError

import oracles

ODD = st.sampled_from([1, 3, 5, 7])


def test_p1_basis_and_trace():
    F = gf2p.build_field(1)
    assert [F.kappa(e) for e in F.basis] == [1]
    for x in (0, 1):
        assert F.trace(x) == x
    one = F.elem(1)
    assert one * one == one
    assert (one + one).bits == 0


@pytest.mark.parametrize("p", [0, 2, 4, 18, 19, -1])
def test_bad_p_rejected(p):
    with pytest.raises(ParameterError):
        gf2p.build_field(p)


def test_deterministic_basis():
    a = gf2p.build_field(5)
    gf2p.build_field.cache_clear()
    b = gf2p.build_field(5)
    assert a.basis == b.basis and a.irreducible == b.irreducible


@pytest.mark.parametrize("p", [3, 5])
def test_basis_is_self_dual_normal(p):
    # brute-force oracle in the polynomial basis over every candidate generator
    F = gf2p.build_field(p)
    assert F.basis in oracles.self_dual_normal_bases(F.irreducible, p)


def test_p3_mul_matches_polynomial_oracle():
    F = gf2p.build_field(3)
    assert F.irreducible == 0b1011
    for a, b in itertools.product(range(8), repeat=2):
        want = oracles.poly_mul_mod(F.poly(a), F.poly(b), 0b1011, 3)
        assert F.poly(F.mul(a, b)) == want


def test_p3_inverses():
    F = gf2p.build_field(3)
    for a in range(1, 8):
        assert gf2p.mul(F.elem(a), gf2p.inv(F.elem(a))).bits == F.one


def test_inv_zero_and_mixed_contexts():
    F3, F5 = gf2p.build_field(3), gf2p.build_field(5)
    with pytest.raises(DomainError):
        gf2p.inv(F3.elem(0))
    with pytest.raises(ParameterError):
        gf2p.add(F3.elem(1), F5.elem(1))
    with pytest.raises(ParameterError):
        F3.elem(8)


def test_trace_examples():
    F = gf2p.build_field(3)
    assert gf2p.trace(F.elem(0)) == 0
    assert gf2p.trace(F.elem(F.one)) == 1
    root = F.kappa(0b010)                    # x, a root of x^3 + x + 1
    assert F.trace(root) == 0


@given(ODD, st.data())
def test_kappa_additive_and_frobenius_shift(p, data):
    F = gf2p.build_field(p)
    a = data.draw(st.integers(0, F.q - 1))
    b = data.draw(st.integers(0, F.q - 1))
    assert F.kappa(F.poly(a) ^ F.poly(b)) == a ^ b
    assert F.frobenius(a) == F.mul(a, a)
    assert F.kappa(F.poly(a)) == a


@given(ODD, st.data())
def test_trace_linear_and_pow(p, data):
    F = gf2p.build_field(p)
    a = data.draw(st.integers(0, F.q - 1))
    b = data.draw(st.integers(0, F.q - 1))
    e = data.draw(st.integers(0, 40))
    assert F.trace(a ^ b) == F.trace(a) ^ F.trace(b)
    want = F.one
    for _ in range(e):
        want = F.mul(want, a)
    assert F.pow(a, e) == want


@pytest.mark.parametrize("p", [1, 3, 5])
def test_trace_form_is_dot_product(p):
    F = gf2p.build_field(p)
    for a, b in itertools.product(range(F.q), repeat=2):
        tr = oracles.poly_trace(oracles.poly_mul_mod(F.poly(a), F.poly(b), F.irreducible, p), F.irreducible, p)
        assert tr == bin(a & b).count("1") % 2


def test_basis_coordinates_are_unit_vectors():
    for p in (3, 5, 7):
        F = gf2p.build_field(p)
        assert [F.kappa(e) for e in F.basis] == [1 << (p - 1 - i) for i in range(p)]


def test_hex_roundtrip_and_doc():
    F = gf2p.build_field(5)
    for k in range(F.q):
        assert gf2p.from_hex(F, F.elem(k).hex()).bits == k
    doc = F.to_dict()
    assert doc["p"] == 5 and len(doc["basis"]) == 5


@given(st.sampled_from([3, 5]), st.lists(st.integers(0, 31), min_size=1, max_size=4))
def test_pack_unpack(p, coords):
    F = gf2p.build_field(p)
    coords = [c & F.mask for c in coords]
    assert gf2p.unpack(F, gf2p.pack(F, coords), len(coords)) == coords
