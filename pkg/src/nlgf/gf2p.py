"""Arithmetic in F_{2^p}, p odd, under a self-dual normal basis.

Public values are kappa-coordinates: an element x is the p-bit integer whose
bit (p-1-i) is Tr(x * e_i), where e_0..e_{p-1} is the self-dual normal basis.
Coordinate 0 is therefore the most significant bit.  The polynomial basis
used for multiplication is private to this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ParameterError

MAX_P = 17


# -- polynomial-basis helpers (private) -----------------------------------

def _clmul(a: int, b: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def _reduce(a: int, mod: int, p: int) -> int:
    while a.bit_length() > p:
        a ^= mod << (a.bit_length() - 1 - p)
    return a


def _polymod(a: int, b: int) -> int:
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def _is_irreducible(f: int) -> bool:
    deg = f.bit_length() - 1
    for g in range(2, 1 << (deg // 2 + 1)):
        if _polymod(f, g) == 0:
            return False
    return True


def first_irreducible(p: int) -> int:
    """Smallest (as an integer) irreducible polynomial of degree p."""
    for low in range(1 << p):
        f = (1 << p) | low
        if _is_irreducible(f):
            return f
    raise AssertionError("no irreducible polynomial")  # unreachable


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """F_{2^p} with its canonical self-dual normal basis.

    Built by :func:`build_field`; treat as immutable.
    """

    p: int
    irreducible: int
    basis: tuple[int, ...]              # e_i as polynomial words
    mult_tables: tuple[np.ndarray, ...] # M_{e_i}, kappa-coordinates
    _to_kappa: np.ndarray = field(repr=False)
    _from_kappa: np.ndarray = field(repr=False)
    _exp: np.ndarray = field(repr=False)
    _log: np.ndarray = field(repr=False)
    one: int = 0

    @property
    def q(self) -> int:
        return 1 << self.p

    @property
    def mask(self) -> int:
        return (1 << self.p) - 1

    # fast int-level operations, all in kappa-coordinates
    def add(self, a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        lg = self._log
        return int(self._exp[(int(lg[a]) + int(lg[b])) % (self.q - 1)])

    def inv(self, a: int) -> int:
        if a == 0:
            raise DomainError("inverse of zero")
        return int(self._exp[(-int(self._log[a])) % (self.q - 1)])

    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return self.one
        if a == 0:
            if e < 0:
                raise DomainError("zero to a negative power")
            return 0
        return int(self._exp[(int(self._log[a]) * e) % (self.q - 1)])

    def trace(self, a: int) -> int:
        # Tr(a) = Tr(a*1) = kappa(a).kappa(1) by self-duality
        return _parity(a & self.one)

    def frobenius(self, a: int) -> int:
        """a^2: a cyclic shift of kappa-coordinates."""
        p = self.p
        return ((a >> 1) | ((a & 1) << (p - 1))) if p > 1 else a

    def mul_arr(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Vectorized product of kappa-coordinate arrays."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        la = self._log[a].astype(np.int64)
        lb = self._log[b].astype(np.int64)
        out = self._exp[(la + lb) % (self.q - 1)].astype(np.int64)
        return np.where((a == 0) | (b == 0), 0, out)

    def trace_arr(self, a: np.ndarray) -> np.ndarray:
        return (np.bitwise_count(np.asarray(a, dtype=np.uint64) & np.uint64(self.one)) & 1).astype(np.int64)

    def kappa(self, poly_word: int) -> int:
        """kappa-coordinates of an element given as a private polynomial word."""
        return int(self._to_kappa[poly_word])

    def poly(self, k: int) -> int:
        """Private polynomial word of the element with kappa-coordinates k."""
        return int(self._from_kappa[k])

    def elem(self, k: int) -> "FieldElem":
        if not 0 <= k < self.q:
            raise ParameterError(f"{k} is not a {self.p}-bit kappa vector")
        return FieldElem(self, k)

    def elements(self) -> list["FieldElem"]:
        return [FieldElem(self, k) for k in range(self.q)]

    def hex(self, k: int) -> str:
        return format(k, "x").zfill((self.p + 3) // 4)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "irreducible": format(self.irreducible, "b"),
            "basis": [format(self.kappa(e), "b").zfill(self.p) for e in self.basis],
            "basis_poly": [format(e, "b").zfill(self.p) for e in self.basis],
        }

    def same(self, other: "FieldCtx") -> bool:
        return self is other or (self.p == other.p and self.basis == other.basis)


def _poly_mul(a: int, b: int, mod: int, p: int) -> int:
    return _reduce(_clmul(a, b), mod, p)


def _poly_pow(a: int, e: int, mod: int, p: int) -> int:
    r = 1
    while e:
        if e & 1:
            r = _poly_mul(r, a, mod, p)
        a = _poly_mul(a, a, mod, p)
        e >>= 1
    return r


def _trace_mask(mod: int, p: int) -> int:
    """Bit k set iff Tr(x^k) = 1 in the polynomial basis."""
    mask = 0
    for k in range(p):
        xk = 1 << k
        t, y = 0, xk
        for _ in range(p):
            t ^= y
            y = _poly_mul(y, y, mod, p)
        if t not in (0, 1):
            raise AssertionError("trace not in F_2")
        mask |= t << k
    return mask


def _self_dual_normal(mod: int, p: int, tmask: int) -> tuple[int, ...]:
    """First a (by word order) whose conjugates form a self-dual basis."""
    tr = lambda w: _parity(w & tmask)
    for a in range(1, 1 << p):
        conj = [a]
        for _ in range(p - 1):
            conj.append(_poly_mul(conj[-1], conj[-1], mod, p))
        # Tr(a^{2^i} a^{2^j}) depends only on i-j, so row 0 suffices
        if all(tr(_poly_mul(a, c, mod, p)) == (1 if i == 0 else 0) for i, c in enumerate(conj)):
            if len(set(conj)) == p:
                return tuple(conj)
    raise AssertionError("no self-dual normal basis")  # odd p always has one


@lru_cache(maxsize=None)
def build_field(p: int) -> FieldCtx:
    """The field F_{2^p} (p odd, 1 <= p <= 17).  Deterministic."""
    if not isinstance(p, (int, np.integer)) or p < 1 or p > MAX_P or p % 2 == 0:
        raise ParameterError(f"p must be odd with 1 <= p <= {MAX_P}, got {p!r}")
    p = int(p)
    q = 1 << p
    mod = first_irreducible(p)
    tmask = _trace_mask(mod, p)
    basis = _self_dual_normal(mod, p, tmask)

    # kappa of each polynomial monomial x^k, then extend linearly
    mono = []
    for k in range(p):
        v = 0
        for i, e in enumerate(basis):
            v |= _parity(_poly_mul(1 << k, e, mod, p) & tmask) << (p - 1 - i)
        mono.append(v)
    idx = np.arange(q, dtype=np.int64)
    to_k = np.zeros(q, dtype=np.int64)
    for k in range(p):
        to_k[((idx >> k) & 1) == 1] ^= mono[k]
    from_k = np.empty(q, dtype=np.int64)
    from_k[to_k] = idx
    if len(set(to_k.tolist())) != q:
        raise AssertionError("kappa is not a bijection")

    # exp/log tables in kappa-coordinates from a primitive element
    exp = np.zeros(q - 1, dtype=np.int64)
    for g in range(2, q) if q > 2 else [1]:
        w, ok = 1, True
        for i in range(q - 1):
            exp[i] = w
            w = _poly_mul(w, g, mod, p)
            if w == 1 and i < q - 2:
                ok = False
                break
        if ok:
            break
    exp_k = to_k[exp]
    log_k = np.zeros(q, dtype=np.int64)
    log_k[exp_k] = np.arange(q - 1)

    # M_{e_i}: column c is kappa(e_i * e_c)
    tables = []
    for e in basis:
        M = np.zeros((p, p), dtype=np.uint8)
        for c in range(p):
            prod = int(to_k[_poly_mul(e, int(from_k[1 << (p - 1 - c)]), mod, p)])
            for r in range(p):
                M[r, c] = (prod >> (p - 1 - r)) & 1
        M.setflags(write=False)
        tables.append(M)
    for arr in (to_k, from_k, exp_k, log_k):
        arr.setflags(write=False)
    return FieldCtx(p, mod, basis, tuple(tables), to_k, from_k, exp_k, log_k, int(to_k[1]))


@dataclass(frozen=True)
class FieldElem:
    """An element of F_{2^p}; ``bits`` is its kappa vector."""

    ctx: FieldCtx
    bits: int

    def _other(self, o) -> int:
        if isinstance(o, FieldElem):
            if not self.ctx.same(o.ctx):
                raise ParameterError("operands from different fields")
            return o.bits
        if isinstance(o, (int, np.integer)) and int(o) in (0, 1):
            return self.ctx.one if int(o) else 0
        return NotImplemented

    def __add__(self, o):
        b = self._other(o)
        return NotImplemented if b is NotImplemented else FieldElem(self.ctx, self.bits ^ b)

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, o):
        b = self._other(o)
        return NotImplemented if b is NotImplemented else FieldElem(self.ctx, self.ctx.mul(self.bits, b))

    __rmul__ = __mul__

    def __truediv__(self, o):
        b = self._other(o)
        return NotImplemented if b is NotImplemented else FieldElem(self.ctx, self.ctx.mul(self.bits, self.ctx.inv(b)))

    def __pow__(self, e: int):
        return FieldElem(self.ctx, self.ctx.pow(self.bits, e))

    def __eq__(self, o):
        if isinstance(o, FieldElem):
            return self.ctx.same(o.ctx) and self.bits == o.bits
        return NotImplemented

    def __hash__(self):
        return hash((self.ctx.p, self.bits))

    def __bool__(self):
        return self.bits != 0

    def __repr__(self):
        return f"F{self.ctx.q}({self.hex()})"

    def hex(self) -> str:
        return self.ctx.hex(self.bits)

    def coords(self) -> list[int]:
        p = self.ctx.p
        return [(self.bits >> (p - 1 - i)) & 1 for i in range(p)]


def _check(a: FieldElem, b: FieldElem) -> None:
    if not a.ctx.same(b.ctx):
        raise ParameterError("operands from different fields")


def add(a: FieldElem, b: FieldElem) -> FieldElem:
    _check(a, b)
    return FieldElem(a.ctx, a.bits ^ b.bits)


def mul(a: FieldElem, b: FieldElem) -> FieldElem:
    _check(a, b)
    return FieldElem(a.ctx, a.ctx.mul(a.bits, b.bits))


def inv(a: FieldElem) -> FieldElem:
    return FieldElem(a.ctx, a.ctx.inv(a.bits))


def pow(a: FieldElem, e: int) -> FieldElem:  # noqa: A001
    return FieldElem(a.ctx, a.ctx.pow(a.bits, e))


def trace(a: FieldElem) -> int:
    return a.ctx.trace(a.bits)


def from_hex(ctx: FieldCtx, s: str) -> FieldElem:
    return ctx.elem(int(s, 16))


def mat_apply(M: np.ndarray, k: int, p: int) -> int:
    """Apply a binary p x p matrix to a kappa vector."""
    out = 0
    for r in range(p):
        bit = 0
        for c in range(p):
            if M[r, c]:
                bit ^= (k >> (p - 1 - c)) & 1
        out |= bit << (p - 1 - r)
    return out


# -- vectors in F_{2^p}^m as packed p*m-bit integers ------------------------

def pack(ctx: FieldCtx, coords: Sequence[int]) -> int:
    """Concatenate kappa vectors; coordinate 0 is most significant."""
    v = 0
    for c in coords:
        v = (v << ctx.p) | (int(c) & ctx.mask)
    return v


def unpack(ctx: FieldCtx, v: int, m: int) -> list[int]:
    p, mk = ctx.p, ctx.mask
    return [(v >> (p * (m - 1 - j))) & mk for j in range(m)]


def scale(ctx: FieldCtx, t: int, v: int, m: int) -> int:
    """t * v for a scalar t and a packed vector v."""
    return pack(ctx, [ctx.mul(t, c) for c in unpack(ctx, v, m)])


def dot(ctx: FieldCtx, u: Iterable[int], v: Iterable[int]) -> int:
    s = 0
    for a, b in zip(u, v):
        s ^= ctx.mul(a, b)
    return s


__all__ = [
    "FieldCtx", "FieldElem", "build_field", "first_irreducible",
    "add", "mul", "inv", "pow", "trace", "from_hex", "mat_apply",
    "pack", "unpack", "scale", "dot", "MAX_P",
]
