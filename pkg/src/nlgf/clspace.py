"""F_2 linear algebra on kappa-coordinates and conditionally linear (CL) maps.

Vectors of F_{2^p}^m are packed into n = p*m bit integers.  String index i
lives at integer bit n-1-i, so index 0 is the most significant bit and
concatenation is ``(a << len(b)) | b``.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from . import gf2p
from .config import ENUM_CAP, TABLE_LIMIT, capacity
from .errors import CapacityError, DomainError, ParameterError
from .rng import randbits


def _bit(n: int, i: int) -> int:
    """Integer mask of string index i in an n-bit word."""
    return 1 << (n - 1 - i)


def bits_to_str(v: int, n: int) -> str:
    return format(v, "b").zfill(n) if n else ""


def str_to_bits(s: str) -> tuple[int, int]:
    if any(c not in "01" for c in s):
        raise ParameterError(f"not a bitstring: {s!r}")
    return (int(s, 2) if s else 0), len(s)


# -- vectors ---------------------------------------------------------------

@dataclass(frozen=True)
class Vec2pm:
    """An element of F_{2^p}^m in kappa form."""

    ctx: gf2p.FieldCtx
    m: int
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> (self.ctx.p * self.m):
            raise ParameterError("vector wider than p*m bits")

    @classmethod
    def from_coords(cls, ctx, coords: Sequence[int]) -> "Vec2pm":
        return cls(ctx, len(coords), gf2p.pack(ctx, coords))

    @property
    def n(self) -> int:
        return self.ctx.p * self.m

    def coords(self) -> list[int]:
        return gf2p.unpack(self.ctx, self.bits, self.m)

    def __add__(self, o: "Vec2pm") -> "Vec2pm":
        return Vec2pm(self.ctx, self.m, self.bits ^ o.bits)

    def __str__(self):
        return bits_to_str(self.bits, self.n)


def _raw(x) -> int:
    return x.bits if isinstance(x, Vec2pm) else int(x)


# -- subspaces ---------------------------------------------------------------

def _rref(vectors: Iterable[int]) -> tuple[int, ...]:
    rows: list[int] = []
    for v in vectors:
        v = int(v)
        for r in rows:
            if v & (1 << (r.bit_length() - 1)):
                v ^= r
        if v:
            top = 1 << (v.bit_length() - 1)
            rows = [r ^ v if r & top else r for r in rows]
            rows.append(v)
    rows.sort(reverse=True)
    return tuple(rows)


class Subspace:
    """An F_2 subspace of {0,1}^n held in reduced row echelon form."""

    __slots__ = ("n", "rows", "_canon")

    def __init__(self, n: int, rows: Iterable[int] = ()):
        self.n = n
        self.rows = _rref(rows)
        if any(r >> n for r in self.rows):
            raise ParameterError("vector outside ambient space")
        self._canon = all(r & (r - 1) == 0 for r in self.rows)

    @classmethod
    def canonical(cls, n: int, indices: Iterable[int]) -> "Subspace":
        idx = set(indices)
        if any(not 0 <= i < n for i in idx):
            raise ParameterError("index out of range")
        return cls(n, (_bit(n, i) for i in idx))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls.canonical(n, range(n))

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def canonical_flag(self) -> bool:
        return self._canon

    @property
    def pivots(self) -> tuple[int, ...]:
        """String indices of the pivot columns, ascending."""
        return tuple(self.n - r.bit_length() for r in self.rows)

    @property
    def indices(self) -> tuple[int, ...]:
        if not self._canon:
            raise ParameterError("not a canonical-basis subspace")
        return self.pivots

    @property
    def mask(self) -> int:
        if not self._canon:
            raise ParameterError("not a canonical-basis subspace")
        m = 0
        for r in self.rows:
            m |= r
        return m

    def reduce(self, v: int) -> int:
        """Remainder of v after clearing pivot columns; 0 iff v in self."""
        for r in self.rows:
            if v & (1 << (r.bit_length() - 1)):
                v ^= r
        return v

    def contains(self, v) -> bool:
        return self.reduce(_raw(v)) == 0

    __contains__ = contains

    def issubspace(self, other: "Subspace") -> bool:
        return all(other.contains(r) for r in self.rows)

    def __eq__(self, other):
        return isinstance(other, Subspace) and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.rows))

    def __repr__(self):
        return f"Subspace(n={self.n}, dim={self.dim})"

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace(self.n, self.rows + other.rows)

    def perp(self) -> "Subspace":
        """{u : u.w = 0 for all w in self} inside {0,1}^n."""
        piv = {r.bit_length() - 1: r for r in self.rows}
        out = []
        for f in range(self.n):
            if f in piv:
                continue
            u = 1 << f
            for pb, r in piv.items():
                if r >> f & 1:
                    u |= 1 << pb
            out.append(u)
        return Subspace(self.n, out)

    def elements(self) -> Iterator[int]:
        rows = self.rows
        for k in range(1 << len(rows)):
            v = 0
            for i, r in enumerate(rows):
                if k >> i & 1:
                    v ^= r
            yield v

    def deposit(self, k: int) -> int:
        """The element picking rows by the bits of k (row 0 = lowest bit)."""
        v = 0
        i = 0
        while k:
            if k & 1:
                v ^= self.rows[i]
            k >>= 1
            i += 1
        return v

    def deposit_array(self, ks: np.ndarray) -> np.ndarray:
        ks = ks.astype(np.uint64)
        out = np.zeros_like(ks)
        for i, r in enumerate(self.rows):
            sel = ((ks >> np.uint64(i)) & np.uint64(1)).astype(bool)
            out[sel] ^= np.uint64(r)
        return out

    def to_dict(self) -> dict:
        if self._canon:
            return {"n": self.n, "indices": list(self.indices)}
        return {"n": self.n, "basis": [bits_to_str(r, self.n) for r in self.rows]}


def orth(W: Subspace, V: Subspace) -> Subspace:
    """{u in V : u.w = 0 for all w in W}."""
    if W.n != V.n:
        raise ParameterError("ambient mismatch")
    return (V.perp() + W).perp()


def canonical_complement(W: Subspace, V: Subspace) -> Subspace:
    """Span of the canonical vectors of V that carry no pivot of W."""
    if not V.canonical_flag:
        raise ParameterError("V must be a canonical-basis subspace")
    if W.n != V.n or not W.issubspace(V):
        raise ParameterError("W is not contained in V")
    piv = set(W.pivots)
    return Subspace.canonical(V.n, [i for i in V.indices if i not in piv])


# -- linear maps ---------------------------------------------------------------

class LinMap:
    """F_2-linear map on a canonical domain; ``cols[b]`` is the image of bit b."""

    __slots__ = ("n", "domain", "cols", "_rows", "_kind")

    def __init__(self, n: int, domain: Subspace, cols: Sequence[int] | Mapping[int, int]):
        if not domain.canonical_flag or domain.n != n:
            raise ParameterError("domain must be canonical in the same ambient")
        dmask = domain.mask
        full = [0] * n
        items = cols.items() if isinstance(cols, Mapping) else enumerate(cols)
        for b, c in items:
            if c and (dmask >> b & 1):
                full[b] = int(c)
        self.n = n
        self.domain = domain
        self.cols = tuple(full)
        self._rows = None
        self._kind = None

    @classmethod
    def from_func(cls, domain: Subspace, f: Callable[[int], int]) -> "LinMap":
        n = domain.n
        return cls(n, domain, {r.bit_length() - 1: f(r) for r in domain.rows})

    @classmethod
    def identity(cls, domain: Subspace) -> "LinMap":
        return cls(domain.n, domain, {r.bit_length() - 1: r for r in domain.rows})

    @classmethod
    def zero(cls, domain: Subspace) -> "LinMap":
        return cls(domain.n, domain, {})

    @classmethod
    def from_matrix(cls, domain: Subspace, M) -> "LinMap":
        """M[r][c]: coordinate r of the image of canonical vector c (domain order)."""
        idx = domain.indices
        M = np.asarray(M, dtype=np.uint8) % 2
        if M.shape != (len(idx), len(idx)):
            raise ParameterError("matrix shape does not match the domain")
        n = domain.n
        cols = {}
        for c, ic in enumerate(idx):
            v = 0
            for r, ir in enumerate(idx):
                if M[r, c]:
                    v |= _bit(n, ir)
            cols[n - 1 - ic] = v
        return cls(n, domain, cols)

    def matrix(self) -> np.ndarray:
        idx = self.domain.indices
        n = self.n
        M = np.zeros((len(idx), len(idx)), dtype=np.uint8)
        for c, ic in enumerate(idx):
            img = self.cols[n - 1 - ic]
            for r, ir in enumerate(idx):
                M[r, c] = img >> (n - 1 - ir) & 1
        return M

    def apply(self, x) -> int:
        x = _raw(x)
        if x & ~self.domain.mask:
            raise DomainError("input outside the domain")
        out = 0
        cols = self.cols
        while x:
            low = x & -x
            out ^= cols[low.bit_length() - 1]
            x ^= low
        return out

    __call__ = apply

    def kind(self) -> str:
        if self._kind is None:
            if all(c == 0 for c in self.cols):
                self._kind = "zero"
            elif all(self.cols[r.bit_length() - 1] == r for r in self.domain.rows):
                self._kind = "identity"
            else:
                self._kind = "general"
        return self._kind

    def row_masks(self) -> list[tuple[int, int]]:
        """(output bit, input mask) pairs with nonzero mask."""
        if self._rows is None:
            rows: dict[int, int] = {}
            for b, c in enumerate(self.cols):
                while c:
                    low = c & -c
                    o = low.bit_length() - 1
                    rows[o] = rows.get(o, 0) | (1 << b)
                    c ^= low
            self._rows = sorted(rows.items())
        return self._rows

    def apply_batch(self, X: np.ndarray) -> np.ndarray:
        """Vectorized apply over uint64 words (n <= 64)."""
        kind = self.kind()
        if kind == "zero":
            return np.zeros_like(X)
        if kind == "identity":
            return X & np.uint64(self.domain.mask)
        out = np.zeros_like(X)
        for o, msk in self.row_masks():
            par = (np.bitwise_count(X & np.uint64(msk)) & np.uint8(1)).astype(np.uint64)
            out |= par << np.uint64(o)
        return out

    def image(self) -> Subspace:
        return Subspace(self.n, self.cols)

    def compose(self, inner: "LinMap") -> "LinMap":
        """self o inner."""
        return LinMap(self.n, inner.domain, [self.apply(c & self.domain.mask) if c else 0 for c in inner.cols])

    def shift(self, k: int, n_total: int) -> "LinMap":
        """Re-home into an n_total-bit ambient, moved up by k bit positions."""
        dom = Subspace(n_total, (r << k for r in self.domain.rows))
        return LinMap(n_total, dom, {b + k: c << k for b, c in enumerate(self.cols) if c})

    def direct_sum(self, other: "LinMap") -> "LinMap":
        if self.n != other.n or self.domain.mask & other.domain.mask:
            raise ParameterError("direct sum needs disjoint domains in one ambient")
        dom = self.domain + other.domain
        return LinMap(self.n, dom, [a | b for a, b in zip(self.cols, other.cols)])

    def __eq__(self, other):
        return (isinstance(other, LinMap) and self.n == other.n
                and self.domain == other.domain and self.cols == other.cols)

    def __hash__(self):
        return hash((self.n, self.cols))

    def __repr__(self):
        return f"LinMap(n={self.n}, dom={self.domain.indices}, kind={self.kind()})"

    def to_rows(self) -> list[str]:
        return ["".join(str(int(b)) for b in row) for row in self.matrix()]


def kernel(L: LinMap) -> Subspace:
    """{v in dom(L) : L v = 0}."""
    piv: dict[int, tuple[int, int]] = {}
    ker = []
    for r in L.domain.rows:
        img, vec = L.cols[r.bit_length() - 1], r
        while img:
            top = img.bit_length() - 1
            if top not in piv:
                piv[top] = (img, vec)
                break
            pi, pv = piv[top]
            img ^= pi
            vec ^= pv
        if not img:
            ker.append(vec)
    return Subspace(L.n, ker)


def proj_perp(L: LinMap) -> LinMap:
    """L^perp: v = v1 + v2 with v1 in ker(L)^perp, v2 in its canonical complement; returns v2."""
    U = orth(kernel(L), L.domain)
    return LinMap.from_func(L.domain, U.reduce)


# -- zero-out maps -----------------------------------------------------------

def _check_j(j: int, n: int) -> None:
    if not 0 <= j <= n:
        raise ParameterError(f"j={j} out of range 0..{n}")


def pi_mask(n: int, j: int, side: str, width: int = 1) -> int:
    """Mask kept by pi_{>j} (side '>') or pi_{<=j} (side '<=') on n blocks of ``width`` bits."""
    _check_j(j, n)
    keep_low = n - min(j + 1, n)       # blocks with index > j
    low = (1 << (keep_low * width)) - 1
    if side == ">":
        return low
    if side == "<=":
        return ((1 << (n * width)) - 1) ^ low
    raise ParameterError(f"side must be '>' or '<=', got {side!r}")


def zero_out_string(s: str, j: int, side: str) -> str:
    """pi_{>j} keeps indices > j, pi_{<=j} keeps indices 0..j; others become 0."""
    v, n = str_to_bits(s)
    return bits_to_str(v & pi_mask(n, j, side), n)


def zero_out_field(s: Vec2pm, j: int, side: str) -> Vec2pm:
    """The same on F_{2^p}-coordinates of s."""
    return Vec2pm(s.ctx, s.m, s.bits & pi_mask(s.m, j, side, s.ctx.p))


# -- affine lines --------------------------------------------------------------

def fspan(ctx: gf2p.FieldCtx, v: int, m: int) -> Subspace:
    """{t v : t in F_{2^p}} as an F_2 subspace of the p*m-bit ambient."""
    p = ctx.p
    return Subspace(p * m, (gf2p.scale(ctx, 1 << (p - 1 - i), v, m) for i in range(p)))


def null_component(ctx: gf2p.FieldCtx, u: int, v: int, m: int) -> int:
    """Component of u in the canonical complement of span(v)."""
    return fspan(ctx, v, m).reduce(u)


def canon_line(u: Vec2pm, v: Vec2pm) -> tuple[Vec2pm, Vec2pm]:
    """Canonical representation (v, Null_v(u)) of the line u + F v."""
    if u.m != v.m or not u.ctx.same(v.ctx):
        raise ParameterError("u and v live in different spaces")
    if v.bits == 0:
        raise ParameterError("direction v must be nonzero")
    return v, Vec2pm(u.ctx, u.m, null_component(u.ctx, u.bits, v.bits, u.m))


# -- CL functions --------------------------------------------------------------

LevelSource = Union[LinMap, Mapping[int, LinMap], Callable[[int], LinMap]]


class LevelRule:
    """Prefix -> LinMap for one level j >= 1.

    Tabulated (memoised for every prefix) when the prefix space has at most
    TABLE_LIMIT elements; otherwise a callable with a bounded cache.
    """

    def __init__(self, domain: Subspace, prefix_space: Subspace, source: LevelSource, rule_id: str = "rule"):
        self.domain = domain
        self.prefix_space = prefix_space
        self.prefix_mask = prefix_space.mask
        self.rule_id = rule_id
        self.const = source if isinstance(source, LinMap) else None
        self.fn = None if self.const is not None else (source.__getitem__ if isinstance(source, Mapping) else source)
        self.tabulated = (1 << prefix_space.dim) <= TABLE_LIMIT
        self._memo: dict[int, LinMap] = {}
        if self.const is not None:
            self._check(self.const)

    def _check(self, M: LinMap) -> LinMap:
        if M.domain != self.domain:
            raise ParameterError("level map has the wrong domain")
        dm = self.domain.mask
        if any(c & ~dm for c in M.cols):
            raise ParameterError("level map leaves its register")
        return M

    def __call__(self, h: int) -> LinMap:
        if self.const is not None:
            return self.const
        h &= self.prefix_mask
        M = self._memo.get(h)
        if M is None:
            M = self._check(self.fn(h))
            if self.tabulated or len(self._memo) < (1 << 16):
                self._memo[h] = M
        return M

    def table(self) -> dict[int, LinMap]:
        if not self.tabulated:
            raise CapacityError("prefix space too large to tabulate")
        return {h: self(h) for h in self.prefix_space.elements()}


class CLFunction:
    """A k-level conditionally linear function on V = V_0 + ... + V_{k-1}."""

    def __init__(self, registers: Sequence[Subspace], maps: Sequence[LevelSource], *,
                 p: int = 1, name: str = "cl", rule_ids: Sequence[str] | None = None):
        if not registers:
            raise ParameterError("need at least one register")
        if len(maps) != len(registers):
            raise ParameterError("one level map per register")
        n = registers[0].n
        seen = 0
        for R in registers:
            if R.n != n or not R.canonical_flag:
                raise ParameterError("registers must be canonical subspaces of one ambient")
            if R.mask & seen:
                raise ParameterError("registers overlap")
            seen |= R.mask
        if n % p:
            raise ParameterError("ambient width is not a multiple of p")
        self.n = n
        self.p = p
        self.m = n // p
        self.name = name
        self.registers = tuple(registers)
        self.V = Subspace(n, (r for R in registers for r in R.rows))
        self.vmask = seen
        lvl0 = maps[0]
        if not isinstance(lvl0, LinMap):
            raise ParameterError("level 0 must be a fixed LinMap")
        self.level0 = LevelRule(registers[0], Subspace(n), lvl0, "fixed").const
        self.rules: list[LevelRule] = []
        prefix = Subspace(n)
        for j in range(1, len(registers)):
            prefix = prefix + registers[j - 1]
            rid = rule_ids[j] if rule_ids else f"{name}.L{j}"
            self.rules.append(LevelRule(registers[j], prefix, maps[j], rid))

    @property
    def k(self) -> int:
        return len(self.registers)

    def same_registers(self, other: "CLFunction") -> bool:
        return self.n == other.n and self.registers == other.registers

    def level_map(self, j: int, prefix: int = 0) -> LinMap:
        return self.level0 if j == 0 else self.rules[j - 1](prefix)

    def eval(self, s) -> int:
        s = _raw(s)
        if s & ~self.vmask or s < 0:
            raise DomainError("seed outside V")
        x = 0
        for j, R in enumerate(self.registers):
            M = self.level0 if j == 0 else self.rules[j - 1](x)
            x |= M.apply(s & R.mask)
        return x

    __call__ = eval

    def prefixes(self, s) -> list[int]:
        """Outputs restricted to V_{<j} for j = 0..k."""
        s = _raw(s)
        out = [0]
        x = 0
        for j, R in enumerate(self.registers):
            x |= self.level_map(j, x).apply(s & R.mask)
            out.append(x)
        return out

    def eval_batch(self, S: np.ndarray) -> np.ndarray:
        if self.n > 64:
            return np.array([self.eval(int(s)) for s in S], dtype=object)
        S = np.asarray(S, dtype=np.uint64)
        X = np.zeros_like(S)
        for j, R in enumerate(self.registers):
            Sj = S & np.uint64(R.mask)
            if j == 0:
                X |= self.level0.apply_batch(Sj)
                continue
            rule = self.rules[j - 1]
            if rule.const is not None:
                X |= rule.const.apply_batch(Sj)
                continue
            uniq, inv = np.unique(X, return_inverse=True)
            if len(uniq) == 1:
                X |= rule(int(uniq[0])).apply_batch(Sj)
                continue
            order = np.argsort(inv, kind="stable")
            splits = np.cumsum(np.bincount(inv))[:-1]
            out = np.zeros_like(S)
            for u, idx in zip(uniq, np.split(order, splits)):
                out[idx] = rule(int(u)).apply_batch(Sj[idx])
            X |= out
        return X

    def seeds(self) -> np.ndarray | list[int]:
        d = self.V.dim
        if (1 << d) > capacity(ENUM_CAP):
            raise CapacityError(f"seed space 2^{d} exceeds the enumeration cap")
        if self.n <= 64:
            return self.V.deposit_array(np.arange(1 << d, dtype=np.uint64))
        return [self.V.deposit(k) for k in range(1 << d)]

    def to_dict(self) -> dict:
        levels = []
        for j in range(1, self.k):
            rule = self.rules[j - 1]
            if rule.const is not None:
                levels.append({"const": rule.const.to_rows()})
            elif rule.tabulated:
                levels.append({"table": {bits_to_str(h, self.n): M.to_rows() for h, M in rule.table().items()}})
            else:
                levels.append({"rule": rule.rule_id})
        return {
            "name": self.name,
            "n": self.n,
            "p": self.p,
            "registers": [list(R.indices) for R in self.registers],
            "level0": self.level0.to_rows(),
            "levels": levels,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CLFunction":
        n = doc["n"]
        regs = [Subspace.canonical(n, ix) for ix in doc["registers"]]
        maps: list[LevelSource] = [LinMap.from_matrix(regs[0], _rows_to_mat(doc["level0"]))]
        for j, lv in enumerate(doc["levels"], start=1):
            if "const" in lv:
                maps.append(LinMap.from_matrix(regs[j], _rows_to_mat(lv["const"])))
            elif "table" in lv:
                maps.append({int(h, 2) if h else 0: LinMap.from_matrix(regs[j], _rows_to_mat(r))
                             for h, r in lv["table"].items()})
            else:
                raise ParameterError(f"named rule {lv['rule']!r} cannot be rebuilt from a document")
        return cls(regs, maps, p=doc.get("p", 1), name=doc.get("name", "cl"))

    @classmethod
    def identity(cls, registers: Sequence[Subspace], p: int = 1, name: str = "id") -> "CLFunction":
        return cls(registers, [LinMap.identity(R) for R in registers], p=p, name=name)

    @classmethod
    def zero(cls, registers: Sequence[Subspace], p: int = 1, name: str = "zero") -> "CLFunction":
        return cls(registers, [LinMap.zero(R) for R in registers], p=p, name=name)


def _rows_to_mat(rows: Sequence[str]) -> np.ndarray:
    if not rows:
        return np.zeros((0, 0), dtype=np.uint8)
    return np.array([[int(c) for c in r] for r in rows], dtype=np.uint8)


def eval_cl(f: CLFunction, s) -> int:
    return f.eval(s)


def uniform_registers(n: int, sizes: Sequence[int]) -> list[Subspace]:
    """Consecutive canonical registers of the given widths (bits)."""
    regs, start = [], 0
    for w in sizes:
        regs.append(Subspace.canonical(n, range(start, start + w)))
        start += w
    if start > n:
        raise ParameterError("registers exceed the ambient")
    return regs


Family = Union[CLFunction, Mapping[int, CLFunction], Callable[[int], CLFunction]]


def series_compose(M: CLFunction, family: Family, name: str = "series") -> CLFunction:
    """Apply M on V^1, then N^{M(v1)} on V^2.  V^1 occupies the high bits."""
    if isinstance(family, CLFunction):
        get = lambda h, N=family: N
        N0 = family
    elif isinstance(family, Mapping):
        fam = dict(family)
        if not fam:
            raise ParameterError("empty family")
        N0 = next(iter(fam.values()))
        if any(not N.same_registers(N0) for N in fam.values()):
            raise ParameterError("family members do not share registers")
        get = fam.__getitem__
    else:
        get = lru_cache(maxsize=1 << 12)(family)
        N0 = get(0)
    n1, n2 = M.n, N0.n
    if M.p != N0.p:
        raise ParameterError("field mismatch")
    n = n1 + n2
    mask2 = (1 << n2) - 1

    def member(h1: int) -> CLFunction:
        N = get(h1)
        if not N.same_registers(N0):
            raise ParameterError("family members do not share registers")
        return N

    regs = [Subspace(n, (r << n2 for r in R.rows)) for R in M.registers]
    regs += [Subspace(n, R.rows) for R in N0.registers]
    maps: list[LevelSource] = [M.level0.shift(n2, n)]
    for j in range(1, M.k):
        rule = M.rules[j - 1]
        if rule.const is not None:
            maps.append(rule.const.shift(n2, n))
        else:
            maps.append(lambda h, j=j: M.level_map(j, h >> n2).shift(n2, n))
    for j in range(N0.k):
        maps.append(lambda h, j=j: member(h >> n2).level_map(j, h & mask2).shift(0, n))
    return CLFunction(regs, maps, p=M.p, name=name)


def parallel_compose(M: CLFunction, N: CLFunction, name: str = "parallel") -> CLFunction:
    """Level-wise direct sum; M on the high bits."""
    if M.k != N.k:
        raise ParameterError("parallel composition needs equal level counts")
    if M.p != N.p:
        raise ParameterError("field mismatch")
    n1, n2 = M.n, N.n
    n = n1 + n2
    mask2 = (1 << n2) - 1
    regs = [Subspace(n, [r << n2 for r in A.rows] + list(B.rows)) for A, B in zip(M.registers, N.registers)]

    def level(j: int, h: int) -> LinMap:
        return M.level_map(j, h >> n2).shift(n2, n).direct_sum(N.level_map(j, h & mask2).shift(0, n))

    maps: list[LevelSource] = [level(0, 0)]
    for j in range(1, M.k):
        maps.append(lambda h, j=j: level(j, h))
    return CLFunction(regs, maps, p=M.p, name=name)


# -- CL distributions --------------------------------------------------------

@dataclass(frozen=True)
class CLDist:
    """Seed s uniform in V; Alice gets L_A(s), Bob gets L_B(s)."""

    LA: CLFunction
    LB: CLFunction

    def __post_init__(self):
        if not self.LA.same_registers(self.LB):
            raise ParameterError("L_A and L_B must share registers")

    @property
    def params(self) -> tuple[int, int, int]:
        return self.LA.k, self.LA.m, self.LA.p

    def to_dict(self) -> dict:
        return {"type": "cl", "LA": self.LA.to_dict(), "LB": self.LB.to_dict()}


def sample_cl(d: CLDist, rng: np.random.Generator) -> tuple[int, int, int]:
    s = d.LA.V.deposit(randbits(rng, d.LA.V.dim))
    return d.LA.eval(s), d.LB.eval(s), s


def _seed_table(d: CLDist) -> Counter:
    S = d.LA.seeds()
    if isinstance(S, np.ndarray):
        XA, XB = d.LA.eval_batch(S), d.LB.eval_batch(S)
        pairs = np.stack([XA, XB], axis=1)
        uniq, counts = np.unique(pairs, axis=0, return_counts=True)
        return Counter({(int(a), int(b)): int(c) for (a, b), c in zip(uniq, counts)})
    return Counter((d.LA.eval(s), d.LB.eval(s)) for s in S)


@dataclass(frozen=True)
class TypedCLDist:
    """Vertices 0..t-1, undirected edges (self-loops allowed), one CL function per vertex."""

    t: int
    edges: frozenset
    family: tuple
    names: tuple = ()

    def __post_init__(self):
        if not self.edges:
            raise ParameterError("edge set must be non-empty")
        if len(self.family) != self.t:
            raise ParameterError("one CL function per vertex")
        f0 = self.family[0]
        if any(not f.same_registers(f0) for f in self.family):
            raise ParameterError("typed family must share registers")
        for e in self.edges:
            if any(not 0 <= v < self.t for v in e):
                raise ParameterError("edge endpoint out of range")
        if not self.names:
            object.__setattr__(self, "names", tuple(str(v) for v in range(self.t)))

    @classmethod
    def build(cls, t: int, edges: Iterable[tuple[int, int]], family: Sequence[CLFunction],
              names: Sequence[str] = ()) -> "TypedCLDist":
        E = frozenset(frozenset((u, v)) for u, v in edges)
        return cls(t, E, tuple(family), tuple(names))

    def has_edge(self, u: int, v: int) -> bool:
        return frozenset((u, v)) in self.edges

    def ordered_edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.t) for v in range(self.t) if self.has_edge(u, v)]

    def neigh(self, v: int) -> int:
        """neigh_E(v) as a t-bit string (index u set iff {v,u} in E)."""
        out = 0
        for u in range(self.t):
            if self.has_edge(v, u):
                out |= _bit(self.t, u)
        return out

    @property
    def registers(self):
        return self.family[0].registers

    @property
    def V(self) -> Subspace:
        return self.family[0].V

    def to_dict(self) -> dict:
        return {
            "type": "typed",
            "t": self.t,
            "names": list(self.names),
            "edges": sorted(sorted(e) if len(e) == 2 else [min(e), min(e)] for e in self.edges),
            "family": [f.to_dict() for f in self.family],
        }


def sample_typed(d: TypedCLDist, rng: np.random.Generator, max_tries: int = 10**6):
    for _ in range(max_tries):
        v0, v1 = (int(x) for x in rng.integers(0, d.t, size=2))
        if d.has_edge(v0, v1):
            break
    else:
        raise CapacityError("rejection sampling did not hit an edge")
    s = d.V.deposit(randbits(rng, d.V.dim))
    b = int(rng.integers(0, 2))
    q = [(v0, d.family[v0].eval(s)), (v1, d.family[v1].eval(s))]
    return q[b], q[1 - b]


def _typed_table(d: TypedCLDist) -> tuple[Counter, int]:
    S = d.family[0].seeds()
    ev = {}
    for v in {u for e in d.edges for u in e}:
        f = d.family[v]
        ev[v] = f.eval_batch(S) if isinstance(S, np.ndarray) else [f.eval(s) for s in S]
    cnt: Counter = Counter()
    for u, v in d.ordered_edges():
        if isinstance(S, np.ndarray):
            pairs = np.stack([ev[u], ev[v]], axis=1)
            uniq, counts = np.unique(pairs, axis=0, return_counts=True)
            for (a, b), c in zip(uniq, counts):
                cnt[((u, int(a)), (v, int(b)))] += int(c)
        else:
            for a, b in zip(ev[u], ev[v]):
                cnt[((u, a), (v, b))] += 1
    return cnt, len(S)


def enumerate_dist(d) -> dict:
    """Exact law of the question pair as {(x, y): Fraction}."""
    if isinstance(d, TypedCLDist):
        cnt, ns = _typed_table(d)
        tot = len(d.ordered_edges()) * ns
    elif isinstance(d, CLDist):
        cnt = _seed_table(d)
        tot = 1 << d.LA.V.dim
    else:
        raise ParameterError("not a CL or typed CL distribution")
    return {k: Fraction(c, tot) for k, c in sorted(cnt.items())}


def total_variation(P: Mapping, Q: Mapping) -> Fraction:
    keys = set(P) | set(Q)
    return sum((abs(Fraction(P.get(k, 0)) - Fraction(Q.get(k, 0))) for k in keys), Fraction(0)) / 2


# -- detyping ---------------------------------------------------------------------

def _pad_typed(d: TypedCLDist, p: int) -> TypedCLDist:
    t2 = -(-d.t // p) * p
    if t2 == d.t:
        return d
    zero = CLFunction.zero(d.registers, p=p)
    extra = [(v, v) for v in range(d.t, t2)]
    edges = [tuple(e) * (2 if len(e) == 1 else 1) for e in d.edges]
    return TypedCLDist.build(t2, [tuple(e) for e in edges] + extra, list(d.family) + [zero] * (t2 - d.t),
                             list(d.names) + [f"pad{v}" for v in range(d.t, t2)])


class DetypedCLDist(CLDist):
    """CL distribution simulating a typed one; V^1 bits sit above the typed seed."""

    typed: TypedCLDist
    layout: dict

    def parse(self, x: int):
        """(v, z) if x has the non-trivial output form, else None."""
        L = self.layout
        n2, t, c, w0 = L["n2"], L["t"], L["c"], L["w0"]
        z = x & ((1 << n2) - 1)
        h = x >> n2
        f5 = h & ((1 << t) - 1); h >>= t
        f4 = h & ((1 << t) - 1); h >>= t
        f3 = h & ((1 << t) - 1); h >>= t
        f2 = h & ((1 << w0) - 1); h >>= w0
        f1 = h & ((1 << t) - 1); h >>= t
        f0 = h
        v = f0 >> (w0 - c)
        if f0 & ((1 << (w0 - c)) - 1) or v >= t or f2 or f3:
            return None
        nv = self.typed.neigh(v)
        if f1 != nv or f4 != nv or f5 != _bit(t, v):
            return None
        return v, z

    def view(self, v: int, z: int) -> int:
        """Question shape produced by a non-trivial seed for vertex v."""
        L = self.layout
        t, c, w0, n2 = L["t"], L["c"], L["w0"], L["n2"]
        nv = self.typed.neigh(v)
        h = ((v << (w0 - c)) if c else 0)
        for fld, w in ((nv, t), (0, w0), (0, t), (nv, t), (_bit(t, v), t)):
            h = (h << w) | fld
        return (h << n2) | z

    def split_seed(self, s: int) -> list[int]:
        L = self.layout
        n2, t, w0 = L["n2"], L["t"], L["w0"]
        h = s >> n2
        out = []
        for w in (t, t, t, w0, t):
            out.append(h & ((1 << w) - 1))
            h >>= w
        out.append(h)
        return out[::-1] + [s & ((1 << n2) - 1)]

    def vertex_of(self, f: int) -> int:
        L = self.layout
        return f >> (L["w0"] - L["c"])

    def nontrivial_seeds(self) -> Iterator[int]:
        """All non-trivial seeds, built directly from the ordered edges."""
        L = self.layout
        t, c, w0, n2 = L["t"], L["c"], L["w0"], L["n2"]
        junk = w0 - c
        V2 = self.typed.V
        for v0, v1 in self.typed.ordered_edges():
            n0, n1_ = self.typed.neigh(v0), self.typed.neigh(v1)
            for j0 in range(1 << junk):
                for j1 in range(1 << junk):
                    h = 0
                    for fld, w in (((v0 << junk) | j0, w0), (n0, t), ((v1 << junk) | j1, w0), (n1_, t), (n0, t), (n1_, t)):
                        h = (h << w) | fld
                    for z in V2.elements():
                        yield (h << n2) | z

    def nontrivial_fraction(self) -> Fraction:
        L = self.layout
        return Fraction(len(self.typed.ordered_edges()), 1 << (2 * L["c"] + 4 * L["t"]))


def is_nontrivial_seed(d: DetypedCLDist, s) -> bool:
    s = _raw(s)
    s0, s1, s2, s3, s4, s5, _ = d.split_seed(s)
    t = d.layout["t"]
    v0, v1 = d.vertex_of(s0), d.vertex_of(s2)
    if v0 >= t or v1 >= t or not d.typed.has_edge(v0, v1):
        return False
    n0, n1 = d.typed.neigh(v0), d.typed.neigh(v1)
    return s1 == s4 == n0 and s3 == s5 == n1


def detype(d: TypedCLDist) -> DetypedCLDist:
    """The (k+2, m + 4b + 2l, p) CL distribution simulating d."""
    p = d.family[0].p
    d = _pad_typed(d, p)
    t = d.t
    b = t // p
    lt = math.ceil(math.log2(t) / p) if t > 1 else 0
    c = math.ceil(math.log2(t)) if t > 1 else 0
    w0 = p * lt
    n1 = 2 * w0 + 4 * t
    n2 = d.family[0].n
    # field offsets inside V^1, as string indices
    o0, o1, o2, o3, o4, o5 = 0, w0, w0 + t, 2 * w0 + t, 2 * w0 + 2 * t, 2 * w0 + 3 * t
    R0 = Subspace.canonical(n1, range(0, o4))
    R1 = Subspace.canonical(n1, range(o4, n1))
    neigh = [d.neigh(v) for v in range(t)]

    def fld(x: int, off: int, w: int) -> int:
        return (x >> (n1 - off - w)) & ((1 << w) - 1)

    def put(val: int, off: int, w: int) -> int:
        return val << (n1 - off - w)

    def idx_vertex(f0: int) -> int:
        return f0 >> (w0 - c)

    def lvl0(src: int, dst: int) -> LinMap:
        # (x0', x1, 0, 0) with the junk bits of x0 dropped; B reads (x2, x3)
        cols = {}
        for i in range(c):
            cols[n1 - 1 - (src + i)] = _bit(n1, o0 + i)
        for i in range(t):
            cols[n1 - 1 - (dst + i)] = _bit(n1, o1 + i)
        return LinMap(n1, R0, cols)

    def lvl1(side: str):
        def rule(h: int) -> LinMap:
            v = idx_vertex(fld(h, o0, w0))
            if v >= t or fld(h, o1, t) != neigh[v]:
                return LinMap.zero(R1)
            cols = {}
            a, bsrc = (o4, o5) if side == "A" else (o5, o4)
            for i in range(t):
                cols[n1 - 1 - (a + i)] = _bit(n1, o4 + i)
            cols[n1 - 1 - (bsrc + v)] = _bit(n1, o5 + v)
            return LinMap(n1, R1, cols)
        return rule

    zero2 = CLFunction.zero(d.registers, p=p)

    def fam(h: int) -> CLFunction:
        v = idx_vertex(fld(h, o0, w0))
        if v >= t:
            return zero2
        nv = neigh[v]
        if fld(h, o1, t) == nv and fld(h, o4, t) == nv and fld(h, o5, t) >> (t - 1 - v) & 1:
            return d.family[v]
        return zero2

    LA1 = CLFunction([R0, R1], [lvl0(o0, o1), lvl1("A")], p=p, name="detype.A1")
    LB1 = CLFunction([R0, R1], [lvl0(o2, o3), lvl1("B")], p=p, name="detype.B1")
    LA = series_compose(LA1, fam, name="detype.A")
    LB = series_compose(LB1, fam, name="detype.B")
    out = DetypedCLDist(LA, LB)
    object.__setattr__(out, "typed", d)
    object.__setattr__(out, "layout", {"t": t, "b": b, "lt": lt, "c": c, "w0": w0, "n1": n1, "n2": n2, "p": p})
    return out


def detype_params(d: DetypedCLDist) -> tuple[int, int, int]:
    L = d.layout
    k = d.typed.family[0].k
    m = d.typed.family[0].m
    return k + 2, m + 4 * L["b"] + 2 * L["lt"], L["p"]


def conditioned_law(d: DetypedCLDist) -> dict:
    """Law of the parsed question pair given a non-trivial seed (exact)."""
    seeds = list(d.nontrivial_seeds())
    if d.LA.n <= 64:
        S = np.array(seeds, dtype=np.uint64)
        xs, ys = d.LA.eval_batch(S), d.LB.eval_batch(S)
        pairs = np.stack([xs, ys], axis=1)
        uniq, counts = np.unique(pairs, axis=0, return_counts=True)
        items = [((int(a), int(b)), int(k)) for (a, b), k in zip(uniq, counts)]
    else:
        items = list(Counter((d.LA.eval(s), d.LB.eval(s)) for s in seeds).items())
    tot = len(seeds)
    out: dict = {}
    for (x, y), k in items:
        px, py = d.parse(x), d.parse(y)
        if px is None or py is None:
            raise AssertionError("non-trivial seed produced an unparseable question")
        out[(px, py)] = out.get((px, py), Fraction(0)) + Fraction(k, tot)
    return dict(sorted(out.items()))


__all__ = [
    "Vec2pm", "Subspace", "LinMap", "LevelRule", "CLFunction", "CLDist", "TypedCLDist", "DetypedCLDist",
    "orth", "canonical_complement", "kernel", "proj_perp", "pi_mask", "zero_out_string", "zero_out_field",
    "fspan", "null_component", "canon_line", "eval_cl", "uniform_registers", "series_compose",
    "parallel_compose", "sample_cl", "sample_typed", "enumerate_dist", "total_variation", "detype",
    "detype_params", "is_nontrivial_seed", "conditioned_law", "bits_to_str", "str_to_bits",
]
