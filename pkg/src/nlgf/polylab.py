"""Low-individual-degree polynomials over F_{2^p} and PCPP view validation.

Field values are kappa-coordinate ints throughout; ``FieldElem`` inputs are
accepted wherever a value is read.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import gf2p
from .errors import DomainError, ParameterError
from .rng import make_rng

Exps = tuple[int, ...]


def _val(x) -> int:
    return x.bits if isinstance(x, gf2p.FieldElem) else int(x)


class IdPoly:
    """Sparse polynomial in m variables with individual degree at most d."""

    __slots__ = ("ctx", "m", "d", "terms")

    def __init__(self, ctx: gf2p.FieldCtx, m: int, d: int, terms: Mapping[Exps, int] | None = None):
        if m < 0 or d < 0:
            raise ParameterError("m and d must be non-negative")
        self.ctx, self.m, self.d = ctx, m, d
        clean: dict[Exps, int] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            c = _val(c)
            if len(e) != m:
                raise ParameterError("exponent tuple has the wrong arity")
            if any(x < 0 or x > d for x in e):
                raise ParameterError(f"exponent {e} exceeds individual degree {d}")
            if not 0 <= c < ctx.q:
                raise ParameterError("coefficient outside the field")
            if c:
                clean[e] = clean.get(e, 0) ^ c
                if not clean[e]:
                    del clean[e]
        self.terms = clean

    # constructors
    @classmethod
    def zero(cls, ctx, m: int, d: int = 0) -> "IdPoly":
        return cls(ctx, m, d)

    @classmethod
    def const(cls, ctx, m: int, c, d: int = 0) -> "IdPoly":
        return cls(ctx, m, d, {(0,) * m: _val(c)})

    @classmethod
    def var(cls, ctx, m: int, i: int, d: int = 1) -> "IdPoly":
        e = [0] * m
        e[i] = 1
        return cls(ctx, m, max(d, 1), {tuple(e): ctx.one})

    @classmethod
    def random(cls, ctx, m: int, d: int, rng: np.random.Generator, density: float = 1.0) -> "IdPoly":
        terms = {}
        for e in itertools.product(range(d + 1), repeat=m):
            if density >= 1.0 or rng.random() < density:
                terms[e] = int(rng.integers(0, ctx.q))
        return cls(ctx, m, d, terms)

    # algebra
    def _same(self, o: "IdPoly") -> None:
        if not isinstance(o, IdPoly) or o.m != self.m or not o.ctx.same(self.ctx):
            raise ParameterError("polynomials live in different rings")

    def with_degree(self, d: int) -> "IdPoly":
        return IdPoly(self.ctx, self.m, d, self.terms)

    @property
    def degree(self) -> int:
        """Largest individual degree actually present."""
        return max((max(e) for e in self.terms if e), default=0)

    def __add__(self, o: "IdPoly") -> "IdPoly":
        self._same(o)
        t = dict(self.terms)
        for e, c in o.terms.items():
            t[e] = t.get(e, 0) ^ c
        return IdPoly(self.ctx, self.m, max(self.d, o.d), t)

    __sub__ = __add__

    def __neg__(self) -> "IdPoly":
        return self

    def scale(self, c) -> "IdPoly":
        c = _val(c)
        mul = self.ctx.mul
        return IdPoly(self.ctx, self.m, self.d, {e: mul(c, v) for e, v in self.terms.items()})

    def __mul__(self, o) -> "IdPoly":
        if not isinstance(o, IdPoly):
            return self.scale(o)
        self._same(o)
        mul = self.ctx.mul
        t: dict[Exps, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) ^ mul(c1, c2)
        return IdPoly(self.ctx, self.m, self.d + o.d, t)

    def __eq__(self, o) -> bool:
        return isinstance(o, IdPoly) and o.m == self.m and o.ctx.same(self.ctx) and o.terms == self.terms

    def __hash__(self):
        return hash((self.m, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self):
        return f"IdPoly(p={self.ctx.p}, m={self.m}, d={self.d}, terms={len(self.terms)})"

    def embed(self, m_total: int, offset: int) -> "IdPoly":
        """Same polynomial on variables offset..offset+m-1 of a larger ring."""
        pad = (0,) * offset, (0,) * (m_total - offset - self.m)
        return IdPoly(self.ctx, m_total, self.d, {pad[0] + e + pad[1]: c for e, c in self.terms.items()})

    # evaluation
    def __call__(self, s) -> int:
        return eval_poly(self, s).bits

    def eval_many(self, P: np.ndarray) -> np.ndarray:
        """Evaluate at each row of an (N, m) array of kappa values."""
        ctx = self.ctx
        P = np.asarray(P, dtype=np.int64)
        P = P.reshape(-1, self.m) if self.m else P.reshape(max(P.shape[0] if P.ndim else 1, 1), 0)
        N = P.shape[0]
        out = np.zeros(N, dtype=np.int64)
        if not self.terms:
            return out
        dmax = max((max(e) for e in self.terms if e), default=0)
        powers = []
        for i in range(self.m):
            col = [np.full(N, ctx.one, dtype=np.int64)]
            for _ in range(dmax):
                col.append(ctx.mul_arr(col[-1], P[:, i]))
            powers.append(col)
        for e, c in self.terms.items():
            acc = np.full(N, c, dtype=np.int64)
            for i, k in enumerate(e):
                if k:
                    acc = ctx.mul_arr(acc, powers[i][k])
            out ^= acc
        return out

    def to_dict(self) -> dict:
        return {
            "p": self.ctx.p,
            "m": self.m,
            "d": self.d,
            "terms": [[list(e), self.ctx.hex(c)] for e, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "IdPoly":
        ctx = gf2p.build_field(doc["p"])
        return cls(ctx, doc["m"], doc["d"], {tuple(e): int(h, 16) for e, h in doc["terms"]})


def eval_poly(f: IdPoly, s: Sequence) -> gf2p.FieldElem:
    s = [_val(x) for x in s]
    if len(s) != f.m:
        raise ParameterError(f"expected {f.m} coordinates, got {len(s)}")
    ctx = f.ctx
    acc = 0
    for e, c in f.terms.items():
        term = c
        for x, k in zip(s, e):
            if k:
                term = ctx.mul(term, ctx.pow(x, k))
        acc ^= term
    return ctx.elem(acc)


# -- univariate helpers -------------------------------------------------------

def _umul(ctx, a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] ^= ctx.mul(x, y)
    return out


def restrict_line(f: IdPoly, line) -> IdPoly:
    """Univariate f(u + t v) for line = (v, u); degree bound d*m."""
    v, u = line
    v = [_val(x) for x in (v.coords if isinstance(v, gf2p.FieldElem) else v)]
    u = [_val(x) for x in u]
    if len(v) != f.m or len(u) != f.m:
        raise ParameterError("line lives in the wrong space")
    ctx = f.ctx
    one = ctx.one
    pw = []  # pw[i][k] = (u_i + t v_i)^k as a coefficient list (low -> high)
    for i in range(f.m):
        lin = [u[i], v[i]]
        col = [[one]]
        for _ in range(f.d):
            col.append(_umul(ctx, col[-1], lin))
        pw.append(col)
    acc = [0] * (f.d * f.m + 1)
    for e, c in f.terms.items():
        term = [c]
        for i, k in enumerate(e):
            if k:
                term = _umul(ctx, term, pw[i][k])
        for j, x in enumerate(term):
            acc[j] ^= x
    return IdPoly(ctx, 1, f.d * f.m, {(j,): x for j, x in enumerate(acc) if x})


def univariate_coeffs(f: IdPoly) -> list[int]:
    """Coefficient list (low -> high, length d+1) of a one-variable IdPoly."""
    if f.m != 1:
        raise ParameterError("not univariate")
    out = [0] * (f.d + 1)
    for (k,), c in f.terms.items():
        out[k] = c
    return out


def eval_univariate(ctx, coeffs: Sequence[int], t: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = ctx.mul(acc, t) ^ c
    return acc


# -- indicator and Reed-Muller --------------------------------------------------

def _bits(a, m: int | None = None) -> tuple[int, ...]:
    if isinstance(a, str):
        out = tuple(int(ch) for ch in a)
    else:
        out = tuple(int(x) for x in a)
    if any(x not in (0, 1) for x in out):
        raise ParameterError("not a bitstring")
    if m is not None and len(out) != m:
        raise ParameterError(f"expected {m} bits")
    return out


def indicator_poly(ctx: gf2p.FieldCtx, m: int, a) -> IdPoly:
    """prod_{a_i=1} x_i * prod_{a_i=0} (1 + x_i); equals delta_{a,s} on the cube."""
    a = _bits(a, m)
    free = [i for i in range(m) if a[i] == 0]
    terms = {}
    for sub in itertools.product((0, 1), repeat=len(free)):
        e = list(a)
        for i, bit in zip(free, sub):
            e[i] = bit
        terms[tuple(e)] = ctx.one
    return IdPoly(ctx, m, 1, terms)


def bin_point(ctx: gf2p.FieldCtx, i: int, m: int) -> tuple[int, ...]:
    """bin(i) as a field point, most significant bit first."""
    return tuple(ctx.one if (i >> (m - 1 - j)) & 1 else 0 for j in range(m))


def rm_encode(ctx: gf2p.FieldCtx, b) -> IdPoly:
    """Multilinear f with f(bin(i)) = b_i, via the Moebius transform."""
    b = _bits(b)
    n = len(b)
    if n == 0 or n & (n - 1):
        raise ParameterError("length must be a power of two")
    m = n.bit_length() - 1
    coef = np.array(b, dtype=np.uint8)
    for j in range(m):
        step = 1 << j
        idx = np.arange(n)
        sel = (idx & step) != 0
        coef[sel] ^= coef[idx[sel] ^ step]
    terms = {}
    for i in np.nonzero(coef)[0]:
        terms[tuple((int(i) >> (m - 1 - j)) & 1 for j in range(m))] = ctx.one
    return IdPoly(ctx, m, 1, terms)


def rm_decode(f: IdPoly) -> str:
    """Cube evaluations f(bin(0)), ..., f(bin(2^m - 1)) as a bitstring."""
    ctx = f.ctx
    pts = np.array([bin_point(ctx, i, f.m) for i in range(1 << f.m)], dtype=np.int64).reshape(1 << f.m, f.m)
    vals = f.eval_many(pts)
    if np.any((vals != 0) & (vals != ctx.one)):
        raise DomainError("polynomial is not Boolean on the cube")
    return "".join("1" if v else "0" for v in vals)


# -- zero on the cube -------------------------------------------------------------

def zero_poly(ctx: gf2p.FieldCtx, m: int, i: int) -> IdPoly:
    """zero(x_i) = x_i + x_i^2."""
    e1 = [0] * m
    e2 = [0] * m
    e1[i], e2[i] = 1, 2
    return IdPoly(ctx, m, 2, {tuple(e1): ctx.one, tuple(e2): ctx.one})


def zero_cube_decompose(f: IdPoly) -> list[IdPoly]:
    """c_0..c_{m-1} with f = sum_i c_i * zero(x_i).

    Divides by x_i^2 + x_i one variable at a time using
    x^e = (x^2 + x) * (1 + x + ... + x^{e-2}) + x for e >= 2.
    The multilinear remainder must vanish, else f is nonzero on the cube.
    """
    ctx, m = f.ctx, f.m
    rem = dict(f.terms)
    quots = []
    for i in range(m):
        q: dict[Exps, int] = {}
        nxt: dict[Exps, int] = {}
        for e, c in rem.items():
            if e[i] < 2:
                nxt[e] = nxt.get(e, 0) ^ c
                continue
            for k in range(e[i] - 1):
                qe = e[:i] + (k,) + e[i + 1:]
                q[qe] = q.get(qe, 0) ^ c
            re = e[:i] + (1,) + e[i + 1:]
            nxt[re] = nxt.get(re, 0) ^ c
        rem = {e: c for e, c in nxt.items() if c}
        quots.append(IdPoly(ctx, m, f.d, q))
    if rem:
        raise DomainError("polynomial does not vanish on the Boolean cube")
    return quots


def reassemble(cs: Sequence[IdPoly]) -> IdPoly:
    ctx, m = cs[0].ctx, cs[0].m
    out = IdPoly.zero(ctx, m)
    for i, c in enumerate(cs):
        out = out + c * zero_poly(ctx, m, i)
    return out


# -- Schwartz-Zippel --------------------------------------------------------------

def sz_agreement(f: IdPoly, g: IdPoly, trials: int, rng: np.random.Generator | int = 0) -> tuple[float, float]:
    """Empirical Pr_s[f(s) = g(s)] with its binomial standard error."""
    f._same(g)
    if f == g:
        raise ParameterError("polynomials must differ")
    if isinstance(rng, (int, np.integer)):
        rng = make_rng(int(rng))
    P = rng.integers(0, f.ctx.q, size=(trials, f.m), dtype=np.int64)
    hits = int(np.count_nonzero(f.eval_many(P) == g.eval_many(P)))
    rate = hits / trials
    return rate, math.sqrt(max(rate * (1 - rate), 0.0) / trials)


# -- PCPP views -------------------------------------------------------------------

def pcpp_dim(m_ans: int, g: int) -> int:
    return 5 * m_ans + 5 + g


@dataclass(frozen=True)
class PcppView:
    """A sampled point s and the claimed evaluations xi = (u_0..u_4, gamma, beta_0..)."""

    ctx: gf2p.FieldCtx
    g_D: IdPoly
    m_ans: int
    g: int
    s: tuple
    xi: tuple

    @property
    def m_pcpp(self) -> int:
        return pcpp_dim(self.m_ans, self.g)

    def tamper_gamma(self, delta: int = 1) -> "PcppView":
        xi = list(self.xi)
        xi[5] = _val(xi[5]) ^ delta
        return PcppView(self.ctx, self.g_D, self.m_ans, self.g, self.s, tuple(xi))


def split_point(s: Sequence[int], m_ans: int, g: int):
    """s = (s_0..s_4 blocks, b_0..b_4, z)."""
    blocks = [tuple(s[i * m_ans:(i + 1) * m_ans]) for i in range(5)]
    bs = tuple(s[5 * m_ans:5 * m_ans + 5])
    z = tuple(s[5 * m_ans + 5:])
    return blocks, bs, z


def validate_pcpp(view: PcppView) -> int:
    ctx = view.ctx
    mp = view.m_pcpp
    try:
        xi = [_val(x) for x in view.xi]
        s = [_val(x) for x in view.s]
    except (TypeError, ValueError):
        return 0
    if len(xi) != 6 + mp or len(s) != mp or view.g_D.m != mp or not view.g_D.ctx.same(ctx):
        return 0
    if any(not 0 <= x < ctx.q for x in xi + s):
        return 0
    u, gamma, beta = xi[:5], xi[5], xi[6:]
    _, bs, _ = split_point(s, view.m_ans, view.g)
    rhs = view.g_D(s)
    for ui, bi in zip(u, bs):
        rhs = ctx.mul(rhs, ui ^ bi)
    if gamma != rhs:
        return 0
    acc = 0
    for bi, si in zip(beta, s):
        acc ^= ctx.mul(bi, si ^ ctx.mul(si, si))
    return int(gamma == acc)


def full_polynomial(g_D: IdPoly, gbar: Sequence[IdPoly], m_ans: int, g: int) -> IdPoly:
    """g_D(x) * prod_i (gbar_i(x block i) - x_{b_i}) over m_pcpp variables."""
    ctx = g_D.ctx
    mp = pcpp_dim(m_ans, g)
    if g_D.m != mp or len(gbar) != 5 or any(q.m != m_ans for q in gbar):
        raise ParameterError("PCPP polynomial shapes do not match (m_ans, g)")
    out = g_D
    for i, q in enumerate(gbar):
        out = out * (q.embed(mp, i * m_ans) + IdPoly.var(ctx, mp, 5 * m_ans + i))
    return out


def honest_view(g_D: IdPoly, gbar: Sequence[IdPoly], m_ans: int, g: int, s: Sequence) -> PcppView:
    """Evaluations an honest prover would return at s."""
    ctx = g_D.ctx
    s = tuple(_val(x) for x in s)
    blocks, _, _ = split_point(s, m_ans, g)
    full = full_polynomial(g_D, gbar, m_ans, g)
    cs = zero_cube_decompose(full)
    u = [q(blk) for q, blk in zip(gbar, blocks)]
    xi = tuple(u) + (full(s),) + tuple(c(s) for c in cs)
    return PcppView(ctx, g_D, m_ans, g, s, xi)


def accepting_decider_poly(gbar: Sequence[IdPoly], m_ans: int, g: int) -> IdPoly:
    """g_D = prod_i (1 + gbar_i(block_i) + b_i): the full polynomial then vanishes on the cube
    whenever every gbar_i is Boolean there."""
    ctx = gbar[0].ctx
    mp = pcpp_dim(m_ans, g)
    out = IdPoly.const(ctx, mp, ctx.one)
    for i, q in enumerate(gbar):
        out = out * (IdPoly.const(ctx, mp, ctx.one) + q.embed(mp, i * m_ans) + IdPoly.var(ctx, mp, 5 * m_ans + i))
    return out


__all__ = [
    "IdPoly", "eval_poly", "restrict_line", "univariate_coeffs", "eval_univariate", "indicator_poly",
    "bin_point", "rm_encode", "rm_decode", "zero_poly", "zero_cube_decompose", "reassemble",
    "sz_agreement", "PcppView", "pcpp_dim", "split_point", "validate_pcpp", "full_polynomial",
    "honest_view", "accepting_decider_poly",
]
