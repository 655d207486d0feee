from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlgf import clspace as cl
from nlgf import gf2p
from nlgf.errors import DomainError, ParameterError
from nlgf.rng import make_rng
from nlgf.suite import example_cl3, example_cl3_direct, two_vertex_typed

import oracles


def _reg1(n=1):
    return [cl.Subspace.canonical(n, range(n))]


# -- CL functions ------------------------------------------------------------------------

def test_example_evaluations():
    f = example_cl3()
    assert cl.eval_cl(f, 0b110) == 0b110
    assert cl.eval_cl(f, 0b001) == 0b010
    assert f.k == 2


def test_example_exhaustive_table():
    f = example_cl3()
    # hand-computed from (x0, x0 x1 + (1 + x0) x2, 0)
    want = {0b000: 0b000, 0b001: 0b010, 0b010: 0b000, 0b011: 0b010,
            0b100: 0b100, 0b101: 0b100, 0b110: 0b110, 0b111: 0b110}
    assert {s: f(s) for s in range(8)} == want
    assert all(want[s] == example_cl3_direct(s) for s in range(8))


def test_eval_rejects_seed_outside_V():
    R = cl.Subspace.canonical(3, [0])
    f = cl.CLFunction.identity([R])
    with pytest.raises(DomainError):
        f.eval(0b001)


def test_identity_per_level():
    regs = cl.uniform_registers(5, [2, 3])
    f = cl.CLFunction.identity(regs)
    assert all(f(s) == s for s in range(32))


def test_series_identity_then_constant_family():
    M = cl.CLFunction.identity(_reg1(2))
    N = example_cl3()
    S = cl.series_compose(M, N)
    assert S.k == 3
    for s in range(32):
        assert S(s) == ((s >> 3) << 3) | example_cl3_direct(s & 7)


def test_series_levels_add():
    M = cl.CLFunction.identity(_reg1())
    N = cl.CLFunction.zero(_reg1())
    assert cl.series_compose(M, N).k == 2


def test_series_selector_agrees_with_semantics():
    sel = cl.CLFunction.identity(_reg1())
    f = example_cl3()
    ident = cl.CLFunction.identity(list(f.registers))
    S = cl.series_compose(sel, {0: f, 1: ident})
    for s in range(16):
        h, v = s >> 3, s & 7
        assert S(s) == (h << 3) | (example_cl3_direct(v) if h == 0 else v)


def test_series_family_register_mismatch():
    M = cl.CLFunction.identity(_reg1())
    A = cl.CLFunction.identity(cl.uniform_registers(2, [1, 1]))
    B = cl.CLFunction.identity(cl.uniform_registers(2, [2, 0])[:1] + [cl.Subspace(2)])
    with pytest.raises(ParameterError):
        cl.series_compose(M, {0: A, 1: B})


def test_parallel_examples():
    f = example_cl3()
    P = cl.parallel_compose(f, f)
    for s in range(64):
        assert P(s) == (example_cl3_direct(s >> 3) << 3) | example_cl3_direct(s & 7)
    Z = cl.CLFunction.zero(list(f.registers))
    PZ = cl.parallel_compose(f, Z)
    assert all(PZ(s) == example_cl3_direct(s >> 3) << 3 for s in range(64))
    I = cl.CLFunction.identity(cl.uniform_registers(3, [1, 2]))
    PI = cl.parallel_compose(I, I)
    assert all(PI(s) == s for s in range(64))


def test_parallel_needs_equal_levels():
    with pytest.raises(ParameterError):
        cl.parallel_compose(example_cl3(), cl.CLFunction.identity(_reg1()))


@given(st.integers(0, 2**20))
def test_eval_batch_matches_eval(seed):
    rng = make_rng(seed)
    regs = cl.uniform_registers(6, [2, 2, 2])
    mats = rng.integers(0, 2, size=(1 + 16 + 16, 2, 2))
    lv1 = lambda h: cl.LinMap.from_matrix(regs[1], mats[1 + ((h >> 4) & 3)])
    lv2 = lambda h: cl.LinMap.from_matrix(regs[2], mats[17 + ((h >> 2) & 15)])
    f = cl.CLFunction(regs, [cl.LinMap.from_matrix(regs[0], mats[0]), lv1, lv2])
    S = np.arange(64, dtype=np.uint64)
    assert [int(x) for x in f.eval_batch(S)] == [f(s) for s in range(64)]


def test_cl_function_document_roundtrip():
    f = example_cl3()
    g = cl.CLFunction.from_dict(f.to_dict())
    assert all(f(s) == g(s) for s in range(8))


# -- sampling and enumeration ------------------------------------------------------------

def test_sample_cl_examples():
    R = _reg1(3)
    I, Z = cl.CLFunction.identity(R), cl.CLFunction.zero(R)
    rng = make_rng(1)
    for _ in range(20):
        x, y, s = cl.sample_cl(cl.CLDist(I, I), rng)
        assert x == y == s
        x, y, _ = cl.sample_cl(cl.CLDist(Z, Z), rng)
        assert (x, y) == (0, 0)
    f = example_cl3()
    d = cl.CLDist(f, cl.CLFunction.identity(list(f.registers)))
    table = cl.enumerate_dist(d)
    want = Counter((example_cl3_direct(s), s) for s in range(8))
    assert table == {k: Fraction(v, 8) for k, v in want.items()}


def test_enumerate_identity_and_zero():
    R = _reg1()
    I, Z = cl.CLFunction.identity(R), cl.CLFunction.zero(R)
    assert cl.enumerate_dist(cl.CLDist(I, I)) == {(0, 0): Fraction(1, 2), (1, 1): Fraction(1, 2)}
    assert cl.enumerate_dist(cl.CLDist(Z, Z)) == {(0, 0): Fraction(1)}


def test_sampled_frequencies_within_five_sigma():
    f = example_cl3()
    d = cl.CLDist(f, cl.CLFunction.identity(list(f.registers)))
    law = cl.enumerate_dist(d)
    rng = make_rng(7)
    N = 100_000
    seeds = f.V.deposit_array(rng.integers(0, 8, size=N).astype(np.uint64))
    xs, ys = f.eval_batch(seeds), seeds
    cnt = Counter(zip(xs.tolist(), ys.tolist()))
    for k, p in law.items():
        p = float(p)
        assert abs(cnt[k] / N - p) <= 5 * np.sqrt(p * (1 - p) / N)
    # the one-draw sampler walks the same path
    x, y, s = cl.sample_cl(d, make_rng(3))
    assert (x, y) == (f(s), s)


def test_typed_law_matches_simulation():
    R = _reg1(2)
    fam = [cl.CLFunction.identity(R), cl.CLFunction.zero(R)]
    edges = [(0, 0), (1, 1), (0, 1)]
    T = cl.TypedCLDist.build(2, edges, fam)
    law = cl.enumerate_dist(T)
    sim = oracles.typed_law_by_simulation(2, edges, [f.eval for f in fam], range(4))
    assert law == sim


def test_typed_path_graph_hand_simulation():
    R = _reg1()
    fam = [cl.CLFunction.identity(R), cl.CLFunction.zero(R)]
    edges = [(0, 0), (1, 1), (0, 1)]
    law = cl.enumerate_dist(cl.TypedCLDist.build(2, edges, fam))
    # ordered vertex pairs each 1/4; seed bit splits the identity side
    q = Fraction(1, 8)
    want = {((0, 0), (0, 0)): q, ((0, 1), (0, 1)): q, ((1, 0), (1, 0)): 2 * q,
            ((0, 0), (1, 0)): q, ((0, 1), (1, 0)): q, ((1, 0), (0, 0)): q, ((1, 0), (0, 1)): q}
    assert law == want
    marg: dict = {}
    for ((u, _), (v, _)), p in law.items():
        marg[(u, v)] = marg.get((u, v), 0) + p
    assert marg == {(0, 0): Fraction(1, 4), (1, 1): Fraction(1, 4), (0, 1): Fraction(1, 4), (1, 0): Fraction(1, 4)}


def test_sample_typed_single_vertex():
    R = _reg1()
    T = cl.TypedCLDist.build(1, [(0, 0)], [cl.CLFunction.identity(R)])
    rng = make_rng(0)
    for _ in range(10):
        (v0, x0), (v1, x1) = cl.sample_typed(T, rng)
        assert v0 == v1 == 0 and x0 == x1


def test_typed_empty_edges_rejected():
    with pytest.raises(ParameterError):
        cl.TypedCLDist.build(1, [], [cl.CLFunction.identity(_reg1())])


# -- detyping ----------------------------------------------------------------------------

def test_detype_parameters_and_fraction():
    T = two_vertex_typed()
    D = cl.detype(T)
    assert cl.detype_params(D) == (T.family[0].k + 2, T.family[0].m + 10, 1)
    assert not cl.is_nontrivial_seed(D, 0)
    n1, n2 = D.layout["n1"], D.layout["n2"]
    hits = sum(cl.is_nontrivial_seed(D, h << n2) for h in range(1 << n1))
    assert Fraction(hits, 1 << n1) >= Fraction(1, 4 * 4 * 16 ** 2)
    assert Fraction(hits, 1 << n1) == D.nontrivial_fraction()


def test_hand_built_nontrivial_seed():
    T = two_vertex_typed()
    D = cl.detype(T)
    t = 2
    n0, n1_ = T.neigh(0), T.neigh(1)
    h = 0
    # fields of V^1 from the top: vertex, neigh, vertex, neigh, neigh, neigh
    for val, w in ((0, 1), (n0, t), (1, 1), (n1_, t), (n0, t), (n1_, t)):
        h = (h << w) | val
    s = (h << D.layout["n2"]) | 1
    assert cl.is_nontrivial_seed(D, s)
    x, y = D.LA(s), D.LB(s)
    assert D.parse(x) == (0, 1) and D.parse(y) == (1, 0)


def test_conditioned_law_equals_typed_law():
    T = two_vertex_typed()
    D = cl.detype(T)
    assert cl.total_variation(cl.conditioned_law(D), cl.enumerate_dist(T)) == 0


def test_trivial_seed_never_parses_both_sides():
    T = two_vertex_typed()
    D = cl.detype(T)
    for s in D.LA.V.elements():
        both = D.parse(D.LA(s)) is not None and D.parse(D.LB(s)) is not None
        assert both == cl.is_nontrivial_seed(D, s)


# -- linear algebra ----------------------------------------------------------------------

def test_canonical_complement_examples():
    V = cl.Subspace.full(2)
    assert cl.canonical_complement(cl.Subspace(2), V) == V
    assert cl.canonical_complement(V, V) == cl.Subspace(2)
    W = cl.Subspace(2, [0b11])
    assert cl.canonical_complement(W, V) == cl.Subspace.canonical(2, [1])
    with pytest.raises(ParameterError):
        cl.canonical_complement(cl.Subspace(2, [0b11]), cl.Subspace.canonical(2, [0]))


@given(st.lists(st.integers(0, 63), max_size=5), st.integers(0, 2**16))
def test_complement_independent_of_presentation(vecs, seed):
    V = cl.Subspace.full(6)
    W = cl.Subspace(6, vecs)
    rng = make_rng(seed)
    mixed = [v ^ (int(rng.integers(0, 2)) * w) for v in W.rows for w in W.rows[:1]] or list(W.rows)
    W2 = cl.Subspace(6, list(W.rows) + mixed)
    assert W2 == W
    C = cl.canonical_complement(W, V)
    assert cl.canonical_complement(W2, V) == C
    assert (W + C).dim == 6 and W.dim + C.dim == 6


@given(st.lists(st.integers(0, 31), max_size=4))
def test_orth_is_orthogonal(vecs):
    V = cl.Subspace.canonical(5, [0, 2, 3, 4])
    W = cl.Subspace(5, [v & V.mask for v in vecs])
    O = cl.orth(W, V)
    for u in O.elements():
        assert u in V
        assert all(bin(u & w).count("1") % 2 == 0 for w in W.elements())
    assert O.dim == V.dim - W.dim


def test_kernel_and_proj_perp_examples():
    V = cl.Subspace.full(3)
    I = cl.LinMap.identity(V)
    Z = cl.LinMap.zero(V)
    assert cl.kernel(I).dim == 0
    assert all(cl.proj_perp(I)(v) == 0 for v in range(8))
    assert cl.kernel(Z) == V
    assert all(cl.proj_perp(Z)(v) == v for v in range(8))


@given(st.integers(0, 2**16))
def test_ker_perp_identity(seed):
    V = cl.Subspace.full(3)
    L = cl.LinMap.from_matrix(V, make_rng(seed).integers(0, 2, size=(3, 3)))
    Lp = cl.proj_perp(L)
    U = cl.orth(cl.kernel(L), V)
    assert cl.kernel(Lp) == U
    for v in range(8):
        v2 = Lp(v)
        assert (v ^ v2) in U


def test_canon_line():
    F = gf2p.build_field(3)
    v = cl.Vec2pm.from_coords(F, [F.one, 0])
    u = cl.Vec2pm.from_coords(F, [5, 0])                # on span(v)
    assert cl.canon_line(u, v)[1].bits == 0
    u = cl.Vec2pm.from_coords(F, [0, 6])                # in the complement
    assert cl.canon_line(u, v)[1] == u
    with pytest.raises(ParameterError):
        cl.canon_line(u, cl.Vec2pm(F, 2, 0))


@given(st.integers(0, 63), st.integers(1, 63), st.integers(0, 7))
def test_canon_line_representative_independent(ub, vb, t):
    F = gf2p.build_field(3)
    u, v = cl.Vec2pm(F, 2, ub), cl.Vec2pm(F, 2, vb)
    shift = cl.Vec2pm(F, 2, gf2p.scale(F, t, vb, 2))
    assert cl.canon_line(u, v) == cl.canon_line(u + shift, v)


def test_zero_out_maps():
    assert cl.zero_out_string("1011", 0, ">") == "0011"
    assert cl.zero_out_string("1011", 4, ">") == "0000"
    for s in ("0110", "1111", "1001"):
        for j in range(4):
            a, b = cl.zero_out_string(s, j, ">"), cl.zero_out_string(s, j, "<=")
            assert int(a, 2) ^ int(b, 2) == int(s, 2) and int(a, 2) & int(b, 2) == 0
    with pytest.raises(ParameterError):
        cl.zero_out_string("10", 5, ">")


def test_field_and_string_zero_out_differ():
    F = gf2p.build_field(3)
    differ = 0
    for a in range(8):
        fv = cl.zero_out_field(cl.Vec2pm(F, 1, a), 0, ">").bits
        sv = int(cl.zero_out_string(format(a, "03b"), 0, ">"), 2)
        assert fv == 0
        differ += fv != sv
    assert differ > 0


def test_total_variation_basic():
    P = {"a": Fraction(1, 2), "b": Fraction(1, 2)}
    assert cl.total_variation(P, P) == 0
    assert cl.total_variation(P, {"a": Fraction(1)}) == Fraction(1, 2)
