from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlgf import gf2p
from nlgf import polylab as pl
from nlgf.errors import DomainError, ParameterError
from nlgf.rng import make_rng

import oracles

F8 = gf2p.build_field(3)


def test_constant_and_variable():
    c = pl.IdPoly.const(F8, 2, 5)
    assert pl.eval_poly(c, [3, 4]).bits == 5
    x0 = pl.IdPoly.var(F8, 3, 0)
    for a in range(8):
        assert pl.eval_poly(x0, [a, 1, 2]).bits == a


@given(st.integers(0, 2**20))
def test_eval_matches_dense_oracle(seed):
    rng = make_rng(seed)
    f = pl.IdPoly.random(F8, 3, 2, rng, density=0.5)
    for s in rng.integers(0, 8, size=(10, 3)):
        s = [int(x) for x in s]
        assert f(s) == oracles.dense_eval(F8, f.terms, s)
    P = rng.integers(0, 8, size=(16, 3))
    assert f.eval_many(P).tolist() == [oracles.dense_eval(F8, f.terms, list(map(int, r))) for r in P]


def test_degree_bound_enforced():
    with pytest.raises(ParameterError):
        pl.IdPoly(F8, 1, 1, {(2,): 1})
    with pytest.raises(ParameterError):
        pl.IdPoly(F8, 2, 1, {(1,): 1})


def test_restrict_line_examples():
    x1 = pl.IdPoly.var(F8, 2, 1)
    v = [0, F8.one]
    g = pl.restrict_line(x1, (v, [0, 0]))
    assert [pl.eval_univariate(F8, pl.univariate_coeffs(g), t) for t in range(8)] == list(range(8))
    c = pl.IdPoly.const(F8, 2, 6)
    assert pl.univariate_coeffs(pl.restrict_line(c, (v, [3, 3])))[0] == 6


@given(st.integers(0, 2**20))
def test_restrict_line_pointwise(seed):
    rng = make_rng(seed)
    f = pl.IdPoly.random(F8, 2, 2, rng)
    v = [int(x) for x in rng.integers(0, 8, 2)]
    u = [int(x) for x in rng.integers(0, 8, 2)]
    co = pl.univariate_coeffs(pl.restrict_line(f, (v, u)))
    for t in range(8):
        pt = [ui ^ F8.mul(t, vi) for ui, vi in zip(u, v)]
        assert pl.eval_univariate(F8, co, t) == f(pt)


def test_indicator():
    assert pl.indicator_poly(F8, 1, "1") == pl.IdPoly.var(F8, 1, 0)
    for m in (1, 2, 3):
        pts = list(itertools.product((0, 1), repeat=m))
        for a in pts:
            ind = pl.indicator_poly(F8, m, a)
            for s in pts:
                want = F8.one if s == a else 0
                assert ind([F8.one * x for x in s]) == want


def test_rm_examples():
    assert not pl.rm_encode(F8, "0000")
    assert pl.rm_encode(F8, "1000") == pl.indicator_poly(F8, 2, "00")
    f = pl.rm_encode(F8, "1011")
    vals = [f(pl.bin_point(F8, i, 2)) for i in range(4)]
    assert vals == [F8.one, 0, F8.one, F8.one]
    with pytest.raises(ParameterError):
        pl.rm_encode(F8, "101")


@given(st.integers(0, 4).flatmap(lambda m: st.text("01", min_size=1 << m, max_size=1 << m)))
def test_rm_roundtrip(b):
    assert pl.rm_decode(pl.rm_encode(F8, b)) == b


def test_rm_decode_rejects_non_boolean():
    with pytest.raises(DomainError):
        pl.rm_decode(pl.IdPoly.const(F8, 1, 2))


def test_zero_cube_examples():
    z0 = pl.zero_poly(F8, 2, 0)
    cs = pl.zero_cube_decompose(z0)
    assert cs[0] == pl.IdPoly.const(F8, 2, F8.one) and not cs[1]
    assert all(not c for c in pl.zero_cube_decompose(pl.IdPoly.zero(F8, 3)))
    f = z0 * pl.IdPoly.var(F8, 2, 1)
    g = pl.reassemble(pl.zero_cube_decompose(f))
    P = make_rng(0).integers(0, 8, size=(1000, 2))
    assert np.array_equal(f.eval_many(P), g.eval_many(P))
    with pytest.raises(DomainError):
        pl.zero_cube_decompose(pl.IdPoly.var(F8, 1, 0))


@given(st.integers(1, 3), st.integers(0, 2**20))
def test_zero_cube_reassembly(m, seed):
    rng = make_rng(seed)
    f = pl.reassemble([pl.IdPoly.random(F8, m, 2, rng, density=0.5) for _ in range(m)])
    assert pl.reassemble(pl.zero_cube_decompose(f)) == f


def test_schwartz_zippel():
    x0 = pl.IdPoly.var(F8, 1, 0)
    one = pl.IdPoly.const(F8, 1, F8.one)
    assert pl.sz_agreement(x0, x0 + one, 2000, 0)[0] == 0
    rate, sig = pl.sz_agreement(x0, pl.IdPoly.zero(F8, 1), 8000, 1)
    assert abs(rate - 1 / 8) <= 5 * sig
    rng = make_rng(2)
    f, g = pl.IdPoly.random(F8, 2, 2, rng), pl.IdPoly.random(F8, 2, 2, rng)
    rate, sig = pl.sz_agreement(f, g, 4000, rng)
    assert rate <= 2 * 2 / 8 + 5 * sig
    with pytest.raises(ParameterError):
        pl.sz_agreement(f, f, 10)


def _zero_view(m_ans=1, g=0):
    mp = pl.pcpp_dim(m_ans, g)
    s = [0] * mp
    s[0] = 3                                    # b-block stays zero
    return pl.PcppView(F8, pl.IdPoly.zero(F8, mp), m_ans, g, tuple(s), tuple([0] * (6 + mp)))


def test_pcpp_trivial_views():
    v = _zero_view()
    assert pl.validate_pcpp(v) == 1
    assert pl.validate_pcpp(v.tamper_gamma(1)) == 0


@given(st.integers(0, 2**20))
def test_pcpp_honest_views_accept(seed):
    rng = make_rng(seed)
    m_ans, g = 1, 1
    gbar = [pl.rm_encode(F8, "".join(map(str, rng.integers(0, 2, 2)))) for _ in range(5)]
    gD = pl.accepting_decider_poly(gbar, m_ans, g)
    s = [int(x) for x in rng.integers(0, 8, pl.pcpp_dim(m_ans, g))]
    view = pl.honest_view(gD, gbar, m_ans, g, s)
    assert pl.validate_pcpp(view) == 1
    assert pl.validate_pcpp(view.tamper_gamma(int(rng.integers(1, 8)))) == 0


def test_pcpp_malformed_view_rejected():
    v = _zero_view()
    bad = pl.PcppView(F8, v.g_D, v.m_ans, v.g, v.s, v.xi[:-1])
    assert pl.validate_pcpp(bad) == 0


def test_document_roundtrip():
    f = pl.IdPoly.random(F8, 3, 2, make_rng(4))
    assert pl.IdPoly.from_dict(f.to_dict()) == f
