"""Acceptance checks, grouped into suites.

Every check returns a :class:`Check` carrying the measured value, the
expected value, the tolerance and a verdict.  Checks are deterministic for a
fixed seed; wall time is recorded separately so reports stay reproducible.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from . import clspace as cl
from . import gamecore as gc
from . import gf2p
from . import polylab as pl
from . import quantlab as ql
from . import solvers
from .rng import make_rng

DEFAULT_TOL = 1e-9


@dataclass
class Check:
    id: int
    name: str
    passed: bool
    measured: Any
    expected: Any
    tol: Any
    limit_s: float
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self, timing: bool = False) -> dict:
        out = {"id": self.id, "name": self.name, "passed": self.passed, "measured": _js(self.measured),
               "expected": _js(self.expected), "tol": _js(self.tol), "limit_s": self.limit_s,
               "details": _js(self.details)}
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


def _js(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _js(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_js(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(f"{float(x):.12g}")
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


# -- oracles used by several checks -----------------------------------------------------

def example_cl3() -> cl.CLFunction:
    """L(x0, x1, x2) = (x0, x0 x1 + (1 + x0) x2, 0) over F_2^3 as a 2-level CL function."""
    n = 3
    R0 = cl.Subspace.canonical(n, [0])
    R1 = cl.Subspace.canonical(n, [1, 2])
    x1, x2 = 0b010, 0b001

    def level1(h: int) -> cl.LinMap:
        if h & 0b100:
            return cl.LinMap(n, R1, {1: x1})          # keep x1
        return cl.LinMap(n, R1, {0: x1})              # move x2 into slot 1

    return cl.CLFunction([R0, R1], [cl.LinMap.identity(R0), level1], name="example")


def example_cl3_direct(s: int) -> int:
    x0, x1, x2 = (s >> 2) & 1, (s >> 1) & 1, s & 1
    y1 = (x0 & x1) ^ ((1 ^ x0) & x2)
    return (x0 << 2) | (y1 << 1)


def magic_square_classical_oracle() -> Fraction:
    """Best deterministic magic-square value by brute force over both variable tables.

    For fixed variable answers alpha (Alice) and beta (Bob), each constraint
    contributes independently: Alice's constraint answer meets beta, Bob's
    meets alpha, and their synchronous pair needs equal valid answers.
    """
    cons, par = gc.MS_CONSTRAINTS, gc.MS_PARITY
    npairs = 6 + 9 + 2 * 18
    ab = np.arange(1 << 9)
    alpha = ((ab[:, None] >> (8 - np.arange(9))) & 1)     # alpha[i, v-1]
    total = np.zeros((1 << 9, 1 << 9), dtype=np.int64)
    # variable self-pairs
    total += (alpha[:, None, :] == alpha[None, :, :]).sum(axis=2)
    for ci, vs in enumerate(cons):
        valid = [c for c in range(8) if bin(c).count("1") % 2 == par[ci]]
        bits = np.array([[(c >> (2 - k)) & 1 for k in range(3)] for c in range(8)])
        # table[a3, b3] = max over (c, c') of agree(c, b3) + agree(c', a3) + [c == c' valid]
        tab = np.zeros((8, 8), dtype=np.int64)
        for a3, b3 in itertools.product(range(8), repeat=2):
            best = 0
            for c in range(8):
                for c2 in range(8):
                    sc = 0
                    if c in valid:
                        sc += int(np.sum(bits[c] == bits[b3]))
                    if c2 in valid:
                        sc += int(np.sum(bits[c2] == bits[a3]))
                    if c == c2 and c in valid:
                        sc += 1
                    best = max(best, sc)
            tab[a3, b3] = best
        idx = [v - 1 for v in vs]
        a3 = alpha[:, idx] @ np.array([4, 2, 1])
        total += tab[a3[:, None], a3[None, :]]
    return Fraction(int(total.max()), npairs)


def _timed(fn: Callable[..., Check]) -> Callable[..., Check]:
    def run(*a, **k) -> Check:
        t0 = time.perf_counter()
        c = fn(*a, **k)
        c.seconds = time.perf_counter() - t0
        return c
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# -- criterion 1 -----------------------------------------------------------------------------

def _axioms(ctx: gf2p.FieldCtx, a, b, c) -> int:
    """Number of violated axiom instances over arrays of triples."""
    mul = ctx.mul_arr
    bad = 0
    bad += np.count_nonzero(mul(a, b) != mul(b, a))
    bad += np.count_nonzero(mul(mul(a, b), c) != mul(a, mul(b, c)))
    bad += np.count_nonzero(mul(a, b ^ c) != (mul(a, b) ^ mul(a, c)))
    bad += np.count_nonzero(((a ^ b) ^ c) != (a ^ (b ^ c)))
    bad += np.count_nonzero(mul(a, np.full_like(a, ctx.one)) != a)
    bad += np.count_nonzero((a ^ 0) != a)
    bad += np.count_nonzero((a ^ a) != 0)
    nz = a[a != 0]
    inv = np.array([ctx.inv(int(x)) for x in np.unique(nz)], dtype=np.int64)
    bad += np.count_nonzero(mul(np.unique(nz), inv) != ctx.one)
    return int(bad)


def _frob_trace(ctx: gf2p.FieldCtx, a: int) -> int:
    """Sum of conjugates a + a^2 + ... + a^{2^{p-1}}, returned as a bit."""
    acc, x = 0, a
    for _ in range(ctx.p):
        acc ^= x
        x = ctx.mul(x, x)
    if acc not in (0, ctx.one):
        raise AssertionError("trace left the prime field")
    return int(acc == ctx.one)


@_timed
def check_field(seed: int = 0, tol: float = DEFAULT_TOL) -> Check:
    rng = make_rng(seed)
    details = {}
    total_bad = 0
    per_p = {}
    for p in (1, 3, 5):
        ctx = gf2p.build_field(p)
        q = ctx.q
        if p <= 3:
            g = np.array(list(itertools.product(range(q), repeat=3)), dtype=np.int64)
            a, b, c = g[:, 0], g[:, 1], g[:, 2]
        else:
            a, b, c = rng.integers(0, q, size=(3, 10_000), dtype=np.int64)
        ax = _axioms(ctx, a, b, c)
        # Tr(e_i e_j) = delta_ij on the basis, with Tr as a sum of conjugates
        dual = 0
        for i, ei in enumerate(ctx.basis):
            for j, ej in enumerate(ctx.basis):
                ki, kj = ctx.kappa(ei), ctx.kappa(ej)
                dual += _frob_trace(ctx, ctx.mul(ki, kj)) != int(i == j)
        # Tr(ab) = kappa(a).kappa(b) for every pair (cheap enough for p = 5 too)
        form = 0
        for x in range(q):
            for y in range(q):
                form += _frob_trace(ctx, ctx.mul(x, y)) != bin(x & y).count("1") % 2
        details[f"p={p}"] = {"axiom_violations": ax, "dual_violations": int(dual), "form_violations": form,
                             "triples": int(a.size)}
        per_p[f"p={p}"] = ax + int(dual) + form
        total_bad += per_p[f"p={p}"]
    return Check(1, "field", total_bad == 0, per_p, {k: 0 for k in per_p}, 0, 5.0, details)


# -- criterion 2 -----------------------------------------------------------------------------

@_timed
def check_cl(seed: int = 0, tol: float = DEFAULT_TOL) -> Check:
    f = example_cl3()
    table = {s: f.eval(s) for s in range(8)}
    mism_example = sum(table[s] != example_cl3_direct(s) for s in range(8))

    # series: a 1-bit identity selector, then the example (selector 0) or identity (selector 1)
    R = cl.Subspace.canonical(1, [0])
    sel = cl.CLFunction.identity([R])
    ident3 = cl.CLFunction.identity(list(f.registers))
    S = cl.series_compose(sel, {0: f, 1: ident3})
    mism_series = 0
    for s in range(16):
        h, v2 = s >> 3, s & 7
        want = (h << 3) | (example_cl3_direct(v2) if h == 0 else v2)
        mism_series += S.eval(s) != want

    # parallel: two copies of the example on 6 bits
    P = cl.parallel_compose(f, f)
    mism_par = sum(P.eval(s) != ((example_cl3_direct(s >> 3) << 3) | example_cl3_direct(s & 7)) for s in range(64))

    # random 2-level maps on 6 bits composed in parallel (12-bit ambient)
    rng = make_rng(seed)
    regs = cl.uniform_registers(6, [3, 3])
    mats = rng.integers(0, 2, size=(1 + 8, 3, 3))

    def rnd_level(h: int, base=mats) -> cl.LinMap:
        return cl.LinMap.from_matrix(regs[1], base[1 + ((h >> 3) & 7)])

    g = cl.CLFunction(regs, [cl.LinMap.from_matrix(regs[0], mats[0]), rnd_level], name="rand")

    def g_direct(s: int) -> int:
        x = cl.LinMap.from_matrix(regs[0], mats[0]).apply(s & 0b111000)
        return x | cl.LinMap.from_matrix(regs[1], mats[1 + (x >> 3)]).apply(s & 0b111)

    PG = cl.parallel_compose(g, g)
    seeds = np.arange(1 << 12, dtype=np.uint64)
    got = PG.eval_batch(seeds)
    want = np.array([(g_direct(s >> 6) << 6) | g_direct(s & 63) for s in range(1 << 12)], dtype=np.int64)
    mism_rand = int(np.count_nonzero(np.asarray(got, dtype=np.int64) != want))
    bad = mism_example + mism_series + mism_par + mism_rand
    details = {"example_table": {format(s, "03b"): format(v, "03b") for s, v in table.items()},
               "example_mismatches": mism_example, "series_mismatches": mism_series,
               "parallel_mismatches": mism_par, "random_parallel_mismatches": mism_rand}
    return Check(2, "cl", bad == 0, bad, 0, 0, 5.0, details)


# -- criterion 3 -----------------------------------------------------------------------------

def two_vertex_typed() -> cl.TypedCLDist:
    """Complete graph with self-loops on 2 vertices over F_2: identity and zero on one bit."""
    R = cl.Subspace.canonical(1, [0])
    fam = [cl.CLFunction.identity([R]), cl.CLFunction.zero([R])]
    return cl.TypedCLDist.build(2, [(0, 0), (1, 1), (0, 1)], fam, ["id", "zero"])


@_timed
def check_detype(seed: int = 0, tol: float = DEFAULT_TOL) -> Check:
    T = two_vertex_typed()
    D = cl.detype(T)
    t = D.typed.t
    n1, n2 = D.layout["n1"], D.layout["n2"]
    hits = sum(cl.is_nontrivial_seed(D, h << n2) for h in range(1 << n1))
    frac = Fraction(hits, 1 << n1)
    bound = Fraction(1, 4 * t * t * 16 ** t)
    # brute-force conditioned law over every seed of the detyped space
    cnt: dict = {}
    nt = 0
    for s in D.LA.V.elements():
        if not cl.is_nontrivial_seed(D, s):
            continue
        nt += 1
        key = (D.parse(D.LA.eval(s)), D.parse(D.LB.eval(s)))
        cnt[key] = cnt.get(key, 0) + 1
    cond = {k: Fraction(v, nt) for k, v in cnt.items()}
    typed = cl.enumerate_dist(T)
    tv = cl.total_variation(cond, typed)
    params = cl.detype_params(D)
    want_params = (T.family[0].k + 2, T.family[0].m + 10, 1)
    ok = frac >= bound and tv == 0 and params == want_params and frac == D.nontrivial_fraction()
    return Check(3, "detype", ok, {"fraction": frac, "tv": tv}, {"fraction_at_least": bound, "tv": 0}, 0, 10.0,
                 {"params": params, "expected_params": want_params, "seeds_scanned": 1 << (n1 + n2)})


# -- criterion 4 -----------------------------------------------------------------------------

@_timed
def check_values(seed: int = 0, tol: float = DEFAULT_TOL) -> Check:
    cv = lambda G: solvers.classical_value_exact(G).value
    got = {"accept": cv(gc.accept_game()), "reject": cv(gc.reject_game()),
           "reject^2": cv(gc.repeat(gc.reject_game(), 2))}
    want = {"accept": Fraction(1), "reject": Fraction(1, 3), "reject^2": Fraction(1, 9)}
    anchors = {}
    ok = got == want
    for k in range(5):
        G = gc.random_tiny_game(seed + k)
        v, va = cv(G), cv(gc.anchor(G))
        anchors[f"seed {seed + k}"] = {"value": v, "anchored": va, "identity": va == Fraction(3, 4) + v / 4}
        ok = ok and va == Fraction(3, 4) + v / 4
    return Check(4, "exact values", ok, got, want, 0, 30.0, {"anchor": anchors})


# -- criterion 5 -----------------------------------------------------------------------------

@_timed
def check_magic_square(seed: int = 0, tol: float = DEFAULT_TOL) -> Check:
    G = gc.magic_square_game()
    S = ql.magic_square_strategy()
    v = ql.eval_value(G, S)
    comm = ql.max_commutator(S, G)
    oracle = magic_square_classical_oracle()
    cval = solvers.classical_value_exact(G).value
    ok = abs(v - 1) <= tol and comm <= tol and cval == oracle and cval < 1
    return Check(5, "magic square", ok, {"value": v, "commutator": comm, "classical": cval},
                 {"value": 1, "commutator": 0, "classical": oracle}, tol, 30.0)


# -- criterion 6 -----------------------------------------------------------------------------

def pauli_identities(p: int = 3) -> dict:
    """Largest deviations in the twisted commutation, addition and intertwining identities."""
    ctx = gf2p.build_field(p)
    q = ctx.q
    X = [ql.gen_pauli_obs("X", ctx, a) for a in range(q)]
    Z = [ql.gen_pauli_obs("Z", ctx, a) for a in range(q)]
    twist = add = inter = 0.0
    for a in range(q):
        for b in range(q):
            sign = -1.0 if ctx.trace(ctx.mul(a, b)) else 1.0
            twist = max(twist, np.abs(X[a] @ Z[b] - sign * Z[b] @ X[a]).max())
            add = max(add, np.abs(X[a] @ X[b] - X[a ^ b]).max(), np.abs(Z[a] @ Z[b] - Z[a ^ b]).max())
    U = ql.u2top(ctx)
    for a in range(q):
        for W, R in (("X", X), ("Z", Z)):
            inter = max(inter, np.abs(U @ ql.qubit_pauli(W, a, p) @ U.T - R[a]).max())
    return {"twisted_commutation": float(twist), "addition": float(add), "intertwining": float(inter)}


@_timed
def check_pauli(seed: int = 0, tol: float = DEFAULT_TOL) -> Check:
    vals = {}
    for n in (1, 2, 3):
        vals[f"n={n}"] = ql.eval_value(gc.pauli_basis_game(n), ql.pauli_basis_strategy(n))
    ids = pauli_identities(3)
    ok = all(abs(v - 1) <= tol for v in vals.values()) and all(e <= 1e-12 for e in ids.values())
    return Check(6, "pauli basis", ok, {**vals, **ids},
                 {"values": 1, "identities": 0}, {"values": tol, "identities": 1e-12}, 60.0)


# -- criterion 7 -----------------------------------------------------------------------------

def intro_marginal(IG: gc.Game, IS: ql.Strategy) -> dict:
    """Law of the sampled questions (x, y) reported at (Intro.A, Intro.B)."""
    names = IG.meta["names"]
    qa = (names.index("Intro.A"), 0)
    qb = (names.index("Intro.B"), 0)
    ka, kb, P = ql.joint(IS, qa, qb)
    out: dict = {}
    for i, (x, _) in enumerate(ka):
        for j, (y, _) in enumerate(kb):
            out[(x, y)] = out.get((x, y), 0.0) + float(P[i, j])
    return out


@_timed
def check_introspection(seed: int = 0, tol: float = DEFAULT_TOL) -> Check:
    G = gc.intro_test_game()
    IG = gc.introspection_game(G, 2)
    T = ql.trivial_strategy(lambda x: x >> 1)
    IS = ql.introspection_honest_strategy(IG, T)
    vals = ql.pair_values(IG, IS)
    worst = min(w for *_, w in vals)
    total = sum(float(p) * w for *_, p, w in vals)
    mu = {k: float(v) for k, v in cl.enumerate_dist(G.dist).items()}
    marg = intro_marginal(IG, IS)
    tv = 0.5 * sum(abs(marg.get(k, 0.0) - mu.get(k, 0.0)) for k in set(marg) | set(mu))
    ok = worst >= 1 - tol and tv < tol
    return Check(7, "introspection", ok, {"min_clause": worst, "value": total, "tv": tv},
                 {"min_clause": 1, "tv": 0}, tol, 120.0, {"dim": IS.dA, "question_pairs": len(vals)})


# -- criterion 8 -----------------------------------------------------------------------------

@_timed
def check_chain(seed: int = 0, tol: float = DEFAULT_TOL) -> Check:
    rep = solvers.verify_completeness_chain(gc.magic_square_game(), ql.magic_square_strategy(),
                                            ["oracularize", "anchor", "repeat(2)"], tol)
    pb = solvers.verify_completeness_chain(gc.pauli_basis_game(1), ql.pauli_basis_strategy(1), ["detype"], tol)
    stages = {f"magic-square/{s['op']}": s["value"] for s in rep["stages"]}
    stages.update({f"pauli-basis/{s['op']}": s["value"] for s in pb["stages"]})
    ok = rep["passed"] and pb["passed"] and len(stages) == 4
    return Check(8, "completeness chain", ok, stages, 1, tol, 120.0)


# -- criterion 9 -----------------------------------------------------------------------------

@_timed
def check_poly(seed: int = 0, tol: float = DEFAULT_TOL) -> Check:
    rng = make_rng(seed)
    f8 = gf2p.build_field(3)
    bad: dict = {}
    # RM round trip on every string for m <= 3, 64 random strings at m = 4
    rm = 0
    for m in range(0, 5):
        n = 1 << m
        strs = (["".join(b) for b in itertools.product("01", repeat=n)] if m <= 3
                else ["".join(map(str, rng.integers(0, 2, n))) for _ in range(64)])
        rm += sum(pl.rm_decode(pl.rm_encode(f8, b)) != b for b in strs)
    bad["rm_roundtrip"] = rm
    # cube coordinates of an encoding are exactly the string bits
    cube = 0
    for m in (1, 2, 3):
        b = "".join(map(str, rng.integers(0, 2, 1 << m)))
        f = pl.rm_encode(f8, b)
        cube += sum(f(pl.bin_point(f8, i, m)) != (f8.one if b[i] == "1" else 0) for i in range(1 << m))
    bad["cube_coordinates"] = cube
    # zero-on-cube decomposition
    zc = 0
    for m in (1, 2, 3):
        for _ in range(4):
            cs = [pl.IdPoly.random(f8, m, 2, rng, density=0.5) for _ in range(m)]
            f = pl.reassemble(cs)
            zc += pl.reassemble(pl.zero_cube_decompose(f)) != f
    cs = [pl.IdPoly.random(f8, 5, 1, rng, density=0.3) for _ in range(5)]
    f = pl.reassemble(cs)
    g = pl.reassemble(pl.zero_cube_decompose(f))
    P = rng.integers(0, f8.q, size=(1000, 5), dtype=np.int64)
    zc += int(np.count_nonzero(f.eval_many(P) != g.eval_many(P)))
    bad["zero_cube"] = zc
    # Schwartz-Zippel over F_8^2 with d = 2
    sz = []
    m, d = 2, 2
    for k in range(10):
        r = make_rng(seed * 1000 + k)
        f = pl.IdPoly.random(f8, m, d, r)
        g = pl.IdPoly.random(f8, m, d, r)
        if f == g:
            g = g + pl.IdPoly.const(f8, m, f8.one)
        rate, sigma = pl.sz_agreement(f, g, 4000, r)
        sz.append(rate <= m * d / f8.q + 5 * max(sigma, 1e-12))
    bad["schwartz_zippel"] = sz.count(False)
    # PCPP views
    acc = rej = 0
    m_ans, gg = 1, 0
    for k in range(10):
        r = make_rng(seed * 7919 + k)
        # answer polynomials must be Boolean on the cube: encode random bit tables
        gbar = [pl.rm_encode(f8, "".join(map(str, r.integers(0, 2, 1 << m_ans)))) for _ in range(5)]
        gD = pl.accepting_decider_poly(gbar, m_ans, gg)
        s = tuple(int(x) for x in r.integers(0, f8.q, pl.pcpp_dim(m_ans, gg)))
        view = pl.honest_view(gD, gbar, m_ans, gg, s)
        acc += pl.validate_pcpp(view)
        rej += 1 - pl.validate_pcpp(view.tamper_gamma(1 + int(r.integers(0, f8.q - 1))))
    bad["pcpp_accept_missing"] = 10 - acc
    bad["pcpp_reject_missing"] = 10 - rej
    total = sum(bad.values())
    return Check(9, "polynomials", total == 0, bad, {k: 0 for k in bad}, 0, 30.0)


# -- criterion 10 ----------------------------------------------------------------------------

@_timed
def check_ldt(seed: int = 0, tol: float = DEFAULT_TOL) -> Check:
    p, m, d, k = 3, 2, 2, 2
    ctx = gf2p.build_field(p)
    rng = make_rng(seed)
    f = pl.IdPoly.random(ctx, m, d, rng)
    fs = [pl.IdPoly.random(ctx, m, d, rng) for _ in range(k)]
    v_ldt = ql.eval_value(gc.qlowdeg_game(p, m, d), ql.ldt_classical_strategy(f))
    v_sldt = ql.eval_value(gc.sim_lowdeg_game(p, m, d, k), ql.sldt_classical_strategy(fs))
    T = gc.ldt_typed(p, m)
    tv = cl.total_variation(cl.conditioned_law(cl.detype(T)), cl.enumerate_dist(T))
    ok = abs(v_ldt - 1) <= tol and abs(v_sldt - 1) <= tol and tv == 0
    return Check(10, "ldt/sldt", ok, {"ldt": v_ldt, "sldt": v_sldt, "tv": tv}, {"ldt": 1, "sldt": 1, "tv": 0},
                 tol, 60.0)


# -- criterion 11 ----------------------------------------------------------------------------

@_timed
def check_solvers(seed: int = 0, tol: float = DEFAULT_TOL) -> Check:
    G = gc.reject_game()
    worst = 0.0
    for r in range(100):
        rep = solvers.quantum_lower_bound(G, 2, iters=3, seed=seed + r)
        worst = max(worst, rep.value)
    a = solvers.quantum_lower_bound(G, 2, iters=3, seed=seed, restarts=2)
    b = solvers.quantum_lower_bound(G, 2, iters=3, seed=seed, restarts=2)
    same = (a.value == b.value and a.extra == b.extra
            and a.witness.to_dict(G.questions("A"), G.questions("B"))
            == b.witness.to_dict(G.questions("A"), G.questions("B")))
    ok = worst <= 1 / 3 + 1e-6 and same
    return Check(11, "solvers", ok, {"max_value": worst, "reproducible": same},
                 {"max_value_at_most": 1 / 3, "reproducible": True}, 1e-6, 60.0)


CHECKS: dict[int, Callable[..., Check]] = {
    1: check_field, 2: check_cl, 3: check_detype, 4: check_values, 5: check_magic_square,
    6: check_pauli, 7: check_introspection, 8: check_chain, 9: check_poly, 10: check_ldt,
    11: check_solvers,
}

SUITES: dict[str, tuple[int, ...]] = {
    "field": (1,),
    "cl": (2, 3),
    "poly": (9, 10),
    "games": (4, 5, 8),
    "quant": (6, 7, 11),
    "all": tuple(range(1, 12)),
}


def run_suite(name: str, seed: int = 0, tol: float = DEFAULT_TOL) -> list[Check]:
    if name not in SUITES:
        raise KeyError(name)
    return [CHECKS[i](seed=seed, tol=tol) for i in SUITES[name]]


__all__ = [
    "Check", "CHECKS", "SUITES", "run_suite", "example_cl3", "example_cl3_direct",
    "magic_square_classical_oracle", "two_vertex_typed", "pauli_identities", "intro_marginal",
    "check_field", "check_cl", "check_detype", "check_values", "check_magic_square", "check_pauli",
    "check_introspection", "check_chain", "check_poly", "check_ldt", "check_solvers",
]
