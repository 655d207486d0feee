"""Two-prover games: data model, library games and transformations.

Question and answer values are plain hashable Python objects.  Typed games
use questions ``(vertex, content)``; CL games use packed ints.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import gf2p
from .clspace import (
    CLDist, CLFunction, DetypedCLDist, LinMap, Subspace, TypedCLDist, detype, enumerate_dist, fspan,
    parallel_compose, pi_mask, sample_cl, sample_typed, series_compose, uniform_registers,
)
from .config import ENUM_CAP, capacity
from .errors import CapacityError, ParameterError
from .polylab import IdPoly, eval_univariate
from .rng import make_rng

BOT = "⊥"
STAR = "*"

Decider = Callable[[Any, Any, Any, Any], int]


def _parity(x: int) -> int:
    return bin(x).count("1") & 1


# -- distributions ------------------------------------------------------------

class ExplicitDist:
    """Finite table {(x, y): Fraction} summing to exactly one."""

    kind = "explicit"

    def __init__(self, table: Mapping):
        t = {k: Fraction(v) for k, v in table.items() if Fraction(v) != 0}
        if any(v < 0 for v in t.values()):
            raise ParameterError("negative probability")
        if sum(t.values(), Fraction(0)) != 1:
            raise ParameterError("probabilities must sum to 1 exactly")
        self.table = t

    def pairs(self) -> list[tuple[Any, Any, Fraction]]:
        return [(x, y, p) for (x, y), p in self.table.items()]

    def sample(self, rng: np.random.Generator):
        keys = list(self.table)
        w = np.array([float(self.table[k]) for k in keys])
        i = int(rng.choice(len(keys), p=w / w.sum()))
        return keys[i]


class ProductDist:
    """r-fold product of base distributions; pairs enumerate lazily."""

    kind = "product"

    def __init__(self, parts: Sequence[Any], part_pairs: Sequence[list]):
        self.parts = list(parts)
        self._part_pairs = list(part_pairs)

    @property
    def size(self) -> int:
        return math.prod(len(p) for p in self._part_pairs)

    def pairs(self) -> Iterator[tuple[tuple, tuple, Fraction]]:
        for combo in itertools.product(*self._part_pairs):
            yield (tuple(c[0] for c in combo), tuple(c[1] for c in combo),
                   math.prod((c[2] for c in combo), start=Fraction(1)))

    def sample(self, rng):
        xs, ys = [], []
        for g in self.parts:
            x, y = g.sample_pair(rng)
            xs.append(x)
            ys.append(y)
        return tuple(xs), tuple(ys)


# -- the game ----------------------------------------------------------------------

class Game:
    """G = (X^2, A^2, mu, D).

    ``answers(side, q)`` lists the answer alphabet for question q (None when
    the alphabet is too large to enumerate).  ``doc`` is the serialization.
    """

    def __init__(self, name: str, dist, decider: Decider, answers: Callable[[str, Any], Sequence | None],
                 synchronous: bool = False, doc: dict | None = None, meta: dict | None = None):
        self.name = name
        self.dist = dist
        self.decider = decider
        self._answers = answers
        self.synchronous = synchronous
        self.doc = doc if doc is not None else {"kind": "opaque", "name": name}
        self.meta = dict(meta or {})

    def __repr__(self):
        return f"Game({self.name!r})"

    @property
    def kind(self) -> str:
        d = self.dist
        if isinstance(d, DetypedCLDist):
            return "detyped"
        if isinstance(d, CLDist):
            return "cl"
        if isinstance(d, TypedCLDist):
            return "typed"
        return d.kind

    def D(self, x, y, a, b) -> int:
        try:
            return 1 if self.decider(x, y, a, b) else 0
        except (TypeError, ValueError, IndexError, KeyError):
            return 0

    def answers(self, side: str, q) -> Sequence | None:
        return self._answers(side, q)

    # distribution access
    @cached_property
    def _pair_list(self) -> list[tuple[Any, Any, Fraction]]:
        d = self.dist
        if isinstance(d, (CLDist, TypedCLDist)):
            return [(x, y, p) for (x, y), p in enumerate_dist(d).items()]
        if isinstance(d, ProductDist):
            if d.size > capacity(ENUM_CAP):
                raise CapacityError("product distribution too large to enumerate")
            return list(d.pairs())
        return d.pairs()

    def pairs(self) -> list[tuple[Any, Any, Fraction]]:
        return self._pair_list

    def questions(self, side: str) -> list:
        idx = 0 if side == "A" else 1
        seen = {}
        for t in self.pairs():
            seen.setdefault(t[idx], None)
        return sorted(seen, key=_sort_key)

    def marginal(self, side: str) -> dict:
        idx = 0 if side == "A" else 1
        out: dict = {}
        for t in self.pairs():
            out[t[idx]] = out.get(t[idx], Fraction(0)) + t[2]
        return out

    def sample_pair(self, rng: np.random.Generator):
        d = self.dist
        if isinstance(d, TypedCLDist):
            return sample_typed(d, rng)
        if isinstance(d, CLDist):
            x, y, _ = sample_cl(d, rng)
            return x, y
        return d.sample(rng)

    def sample(self, n: int, seed: int = 0) -> list:
        rng = make_rng(seed)
        return [self.sample_pair(rng) for _ in range(n)]

    # serialization
    def to_dict(self) -> dict:
        return self.doc

    def fingerprint(self) -> str:
        blob = json.dumps(self.doc, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _sort_key(q):
    return (type(q).__name__, repr(q))


def check_synchronous(G: Game) -> bool:
    """Every enumerable synchronous pair rejects unequal answers."""
    for x, y, _ in G.pairs():
        if x != y:
            continue
        ans = G.answers("A", x)
        if ans is None:
            continue
        for a in ans:
            for b in ans:
                if a != b and G.D(x, x, a, b):
                    return False
    return True


# -- registry for serialization ------------------------------------------------

_BUILDERS: dict[str, Callable[..., Game]] = {}


def _register(name: str):
    def deco(fn):
        _BUILDERS[name] = fn
        return fn
    return deco


def build_game(name: str, **params) -> Game:
    if name not in _BUILDERS:
        raise ParameterError(f"unknown library game {name!r}; known: {sorted(_BUILDERS)}")
    return _BUILDERS[name](**params)


def library_names() -> list[str]:
    return sorted(_BUILDERS)


def game_from_dict(doc: dict) -> Game:
    kind = doc.get("kind")
    if kind == "library":
        return build_game(doc["name"], **doc.get("params", {}))
    if kind == "transform":
        base = game_from_dict(doc["base"])
        op = doc["op"]
        if op == "repeat":
            return repeat(base, doc["r"])
        if op == "introspect":
            return introspection_game(base, doc["cap"], doc.get("k"))
        if op not in TRANSFORMS:
            raise ParameterError(f"unknown transformation {op!r}")
        return TRANSFORMS[op](base)
    if kind == "explicit":
        return explicit_from_dict(doc)
    raise ParameterError(f"cannot rebuild a game document of kind {kind!r}")


def _enc(v):
    """JSON-safe encoding of question/answer values."""
    if isinstance(v, tuple):
        return {"t": [_enc(x) for x in v]}
    return v


def _dec(v):
    if isinstance(v, dict) and "t" in v:
        return tuple(_dec(x) for x in v["t"])
    return v


def explicit_game(name: str, table: Mapping, answers_A: Mapping, answers_B: Mapping,
                  win: Callable[[Any, Any, Any, Any], int] | Mapping, synchronous: bool = False) -> Game:
    """Game with an explicit rational table and a truth-table decider."""
    dist = ExplicitDist(table)
    aA = {q: tuple(v) for q, v in answers_A.items()}
    aB = {q: tuple(v) for q, v in answers_B.items()}
    if callable(win):
        truth = {}
        for x, y, _ in dist.pairs():
            for a in aA[x]:
                for b in aB[y]:
                    if win(x, y, a, b):
                        truth[(x, y, a, b)] = 1
    else:
        truth = {k: 1 for k, v in win.items() if v}
    doc = {
        "kind": "explicit",
        "name": name,
        "synchronous": synchronous,
        "table": [[_enc(x), _enc(y), str(p)] for (x, y), p in sorted(dist.table.items(), key=lambda kv: _sort_key(kv[0]))],
        "answers_A": [[_enc(q), [_enc(a) for a in v]] for q, v in sorted(aA.items(), key=lambda kv: _sort_key(kv[0]))],
        "answers_B": [[_enc(q), [_enc(a) for a in v]] for q, v in sorted(aB.items(), key=lambda kv: _sort_key(kv[0]))],
        "accept": sorted([[_enc(z) for z in k] for k in truth], key=repr),
    }
    dec = lambda x, y, a, b: truth.get((x, y, a, b), 0)
    ans = lambda side, q: (aA if side == "A" else aB).get(q)
    return Game(name, dist, dec, ans, synchronous, doc)


def explicit_from_dict(doc: dict) -> Game:
    table = {(_dec(x), _dec(y)): Fraction(p) for x, y, p in doc["table"]}
    aA = {_dec(q): tuple(_dec(a) for a in v) for q, v in doc["answers_A"]}
    aB = {_dec(q): tuple(_dec(a) for a in v) for q, v in doc["answers_B"]}
    truth = {tuple(_dec(z) for z in k): 1 for k in doc["accept"]}
    return explicit_game(doc["name"], table, aA, aB, truth, doc.get("synchronous", False))


def materialize(G: Game) -> Game:
    """Explicit truth-table copy of an enumerable game."""
    table = {}
    for x, y, p in G.pairs():
        table[(x, y)] = table.get((x, y), Fraction(0)) + p
    aA = {x: tuple(G.answers("A", x)) for x in G.questions("A")}
    aB = {y: tuple(G.answers("B", y)) for y in G.questions("B")}
    return explicit_game(G.name, table, aA, aB, G.D, G.synchronous)


# -- library games -----------------------------------------------------------

@_register("accept")
def accept_game() -> Game:
    dist = ExplicitDist({(STAR, STAR): 1})
    dec = lambda x, y, a, b: a == 0 and b == 0
    return Game("accept", dist, dec, lambda side, q: (0, 1), True, {"kind": "library", "name": "accept"})


@_register("reject")
def reject_game() -> Game:
    t = Fraction(1, 3)
    s = Fraction(1, 6)
    dist = ExplicitDist({(1, 0): t, (0, 1): t, (0, 0): s, (1, 1): s})
    dec = lambda x, y, a, b: a == 0 and b == 0 and x == y
    return Game("reject", dist, dec, lambda side, q: (0, 1), True, {"kind": "library", "name": "reject"})


MS_CONSTRAINTS = (
    (1, 2, 3), (4, 5, 6), (7, 8, 9),   # rows
    (1, 4, 7), (2, 5, 8), (3, 6, 9),   # columns
)
MS_PARITY = (0, 0, 0, 0, 0, 1)         # the last column multiplies to -1


def ms_check(ci: int, a: int, var: int, b: int) -> bool:
    """Constraint ci (0-based) answered a (3 bits, first variable MSB) against variable var = b."""
    if not 0 <= a < 8 or b not in (0, 1):
        return False
    if _parity(a) != MS_PARITY[ci]:
        return False
    vs = MS_CONSTRAINTS[ci]
    if var not in vs:
        return False
    pos = vs.index(var)
    return ((a >> (2 - pos)) & 1) == b


def _ms_label(q: str) -> tuple[str, int]:
    return q[0], int(q[1:])


@_register("magic-square")
def magic_square_game() -> Game:
    cons = [f"c{i}" for i in range(1, 7)]
    var = [f"v{i}" for i in range(1, 10)]
    pairs = [(q, q) for q in cons + var]
    for i, vs in enumerate(MS_CONSTRAINTS):
        for v in vs:
            pairs += [(cons[i], var[v - 1]), (var[v - 1], cons[i])]
    w = Fraction(1, len(pairs))
    dist = ExplicitDist({p: w for p in pairs})

    def dec(x, y, a, b):
        if x == y:
            return a == b and a in _ms_answers(x)
        kx, ix = _ms_label(x)
        ky, iy = _ms_label(y)
        if kx == "c" and ky == "v":
            return ms_check(ix - 1, a, iy, b)
        if kx == "v" and ky == "c":
            return ms_check(iy - 1, b, ix, a)
        return False

    return Game("magic-square", dist, dec, lambda side, q: _ms_answers(q), True,
                {"kind": "library", "name": "magic-square"})


def _ms_answers(q: str) -> tuple:
    return tuple(range(8)) if q[0] == "c" else (0, 1)


def random_tiny_game(seed: int, nq: int = 3, na: int = 2) -> Game:
    """Seeded random explicit game with |X| = nq, |A| = na (rational weights)."""
    rng = make_rng(seed)
    w = rng.integers(0, 4, size=(nq, nq))
    if w.sum() == 0:
        w[0, 0] = 1
    tot = int(w.sum())
    table = {(x, y): Fraction(int(w[x, y]), tot) for x in range(nq) for y in range(nq) if w[x, y]}
    acc = rng.integers(0, 2, size=(nq, nq, na, na))
    ans = {q: tuple(range(na)) for q in range(nq)}
    G = explicit_game(f"random-{seed}", table, ans, ans, lambda x, y, a, b: int(acc[x, y, a, b]))
    return G


# -- Pauli basis test ----------------------------------------------------------

PB_VERTICES = (
    [f"Constraint{i}" for i in range(1, 7)]
    + [f"Variable{i}" for i in range(1, 10)]
    + ["CoordX", "CoordZ", "PauliX", "PauliZ", "Comm", "CommX", "CommZ"]
)
PB_INDEX = {name: i for i, name in enumerate(PB_VERTICES)}


def pb_edges() -> tuple[list, list, list]:
    """(blue, red, black) undirected edges of the Pauli basis graph, excluding self-loops."""
    ix = PB_INDEX
    blue = []
    for ci, vs in enumerate(MS_CONSTRAINTS):
        for v in vs:
            blue.append((ix[f"Constraint{ci + 1}"], ix[f"Variable{v}"]))
    blue += [(ix["Variable1"], ix["CoordX"]), (ix["Variable5"], ix["CoordZ"])]
    red = [(ix["CoordX"], ix["CommX"]), (ix["CoordZ"], ix["CommZ"]), (ix["CommZ"], ix["Comm"]), (ix["CommX"], ix["Comm"])]
    black = [(ix["CoordX"], ix["PauliX"]), (ix["CoordZ"], ix["PauliZ"])]
    return blue, red, black


@lru_cache(maxsize=None)
def pb_code(n: int) -> tuple[int, tuple[int, ...], int]:
    """(k, generator rows as n-bit ints, distance) of the desk-scale [n, k] code.

    k = max(1, floor(log2 n)); rows are the lexicographically first
    independent k-tuple of nonzero words maximizing the minimum distance.
    """
    if not 1 <= n <= 6:
        raise ParameterError("desk-scale Pauli basis test needs 1 <= n <= 6")
    k = max(1, int(math.floor(math.log2(n))))
    best, best_d = None, -1
    for rows in itertools.combinations(range(1, 1 << n), k):
        words = set()
        for c in range(1, 1 << k):
            w = 0
            for i in range(k):
                if (c >> (k - 1 - i)) & 1:
                    w ^= rows[i]
            words.add(w)
        if 0 in words or len(words) != (1 << k) - 1:
            continue
        d = min(bin(w).count("1") for w in words)
        if d > best_d:
            best, best_d = rows, d
    return k, tuple(best), best_d


def pb_encode(n: int, s: int) -> int:
    k, rows, _ = pb_code(n)
    u = 0
    for i in range(k):
        if (s >> (k - 1 - i)) & 1:
            u ^= rows[i]
    return u


def pb_typed(n: int) -> TypedCLDist:
    k, _, _ = pb_code(n)
    nb = 2 * k
    R = Subspace.canonical(nb, range(nb))
    hi = (1 << nb) - (1 << k)
    lo = (1 << k) - 1
    keep = lambda mask: CLFunction([R], [LinMap.from_func(R, lambda x, m=mask: x & m)], p=1)
    ident = CLFunction.identity([R])
    zero = CLFunction.zero([R])
    fam = []
    for name in PB_VERTICES:
        if name.startswith("Pauli"):
            fam.append(zero)
        elif name == "CoordX":
            fam.append(keep(hi))
        elif name == "CoordZ":
            fam.append(keep(lo))
        else:
            fam.append(ident)   # Comm, CommX, CommZ, Constraint*, Variable* see the full seed
    blue, red, black = pb_edges()
    edges = blue + red + black + [(v, v) for v in range(len(PB_VERTICES))]
    return TypedCLDist.build(len(PB_VERTICES), edges, fam, PB_VERTICES)


def pb_answers(n: int, name: str) -> tuple:
    if name.startswith("Pauli") or name.startswith("Coord"):
        return tuple(range(1 << n))
    if name in ("CommX", "CommZ") or name.startswith("Variable"):
        return (0, 1)
    if name == "Comm":
        return (0, 1, 2, 3)
    return tuple(range(8))


def pb_decide(n: int, v0: str, z0: int, v1: str, z1: int, a, b) -> bool:
    """Verification clauses of the n-qubit Pauli basis test on named vertices."""
    k, _, _ = pb_code(n)
    z = z0 | z1
    uX = pb_encode(n, z >> k)
    uZ = pb_encode(n, z & ((1 << k) - 1))
    ip = _parity(uX & uZ)
    if a not in pb_answers(n, v0) or b not in pb_answers(n, v1):
        return False
    if v0 == v1:
        return a == b
    pair = {v0: a, v1: b}
    names = {v0, v1}
    u = {"X": uX, "Z": uZ}
    for W in "XZ":
        if names == {f"Pauli{W}", f"Coord{W}"}:
            return (pair[f"Pauli{W}"] & u[W]) == (pair[f"Coord{W}"] & u[W])
        if names == {f"Coord{W}", f"Comm{W}"}:
            if ip:
                return pair[f"Comm{W}"] == 0
            return _parity(u[W] & pair[f"Coord{W}"]) == pair[f"Comm{W}"]
        if names == {"Comm", f"Comm{W}"}:
            if ip:
                return pair["Comm"] == 0 and pair[f"Comm{W}"] == 0
            tw = (pair["Comm"] >> 1) & 1 if W == "X" else pair["Comm"] & 1
            return tw == pair[f"Comm{W}"]
    for var, W in (("Variable1", "X"), ("Variable5", "Z")):
        if names == {var, f"Coord{W}"}:
            if not ip:
                return pair[var] == 0
            return _parity(u[W] & pair[f"Coord{W}"]) == pair[var]
    cons = [v for v in names if v.startswith("Constraint")]
    vars_ = [v for v in names if v.startswith("Variable")]
    if len(cons) == 1 and len(vars_) == 1:
        c, v = cons[0], vars_[0]
        if not ip:
            return pair[c] == 0 and pair[v] == 0
        return ms_check(int(c[len("Constraint"):]) - 1, pair[c], int(v[len("Variable"):]), pair[v])
    return False


@_register("pauli-basis")
def pauli_basis_game(n: int = 1) -> Game:
    d = pb_typed(n)

    def dec(x, y, a, b):
        (v0, z0), (v1, z1) = x, y
        if not d.has_edge(v0, v1):
            return False
        return pb_decide(n, PB_VERTICES[v0], z0, PB_VERTICES[v1], z1, a, b)

    ans = lambda side, q: pb_answers(n, PB_VERTICES[q[0]])
    k, rows, dist = pb_code(n)
    meta = {"code_k": k, "code_rows": rows, "code_distance": dist, "gap_surrogate": 2 * k / dist}
    return Game(f"pauli-basis-{n}", d, dec, ans, True, {"kind": "library", "name": "pauli-basis", "params": {"n": n}}, meta)


# -- low individual degree tests ----------------------------------------------------

LDT_VERTICES = ("Point", "Aline", "Dline")


def ldt_layout(p: int, m: int) -> dict:
    c = math.ceil(math.log2(m)) if m > 1 else 0
    mp = math.ceil(c / p) if c else 0
    return {"p": p, "m": m, "c": c, "m0": mp, "n0": p * mp, "n1": p * m, "n": p * (mp + 2 * m)}


def ldt_typed(p: int, m: int) -> TypedCLDist:
    """Typed CL form: registers V0 = F^{m'} (axis index), V1 = F^m (direction), V2 = F^m (point)."""
    ctx = gf2p.build_field(p)
    L = ldt_layout(p, m)
    n, n0, n1 = L["n"], L["n0"], L["n1"]
    R0, R1, R2 = uniform_registers(n, [n0, n1, n1])
    low2 = (1 << n1) - 1
    jmask = 0
    for i in range(L["c"]):
        jmask |= 1 << (n - 1 - i)

    def j_of(h: int) -> int:
        return ((h & jmask) >> (n - L["c"])) % m if L["c"] else 0

    sel0 = LinMap.from_func(R0, lambda x: x & jmask)

    def aline2(h: int) -> LinMap:
        j = j_of(h)
        keep = low2 & ~(ctx.mask << (p * (m - 1 - j)))
        return LinMap.from_func(R2, lambda x: x & keep)

    def dline1(h: int) -> LinMap:
        j = j_of(h)
        keep = pi_mask(m, j, "<=", p) << n1
        return LinMap.from_func(R1, lambda x: x & keep)

    def dline2(h: int) -> LinMap:
        v = (h >> n1) & low2
        F = fspan(ctx, v, m)
        return LinMap.from_func(R2, lambda x: F.reduce(x & low2))

    point = CLFunction([R0, R1, R2], [LinMap.zero(R0), LinMap.zero(R1), LinMap.identity(R2)], p=p, name="Point")
    aline = CLFunction([R0, R1, R2], [sel0, LinMap.zero(R1), aline2], p=p, name="Aline")
    dline = CLFunction([R0, R1, R2], [sel0, dline1, dline2], p=p, name="Dline")
    edges = [(0, 1), (0, 2), (0, 0), (1, 1), (2, 2)]
    return TypedCLDist.build(3, edges, [point, aline, dline], LDT_VERTICES)


def ldt_parse(p: int, m: int, vertex: int, z: int) -> dict:
    """Split a question content into (j, v, u) field coordinates."""
    L = ldt_layout(p, m)
    n, n1, c = L["n"], L["n1"], L["c"]
    ctx = gf2p.build_field(p)
    j = ((z >> (n - c)) % m) if c else 0
    v = gf2p.unpack(ctx, (z >> n1) & ((1 << n1) - 1), m)
    u = gf2p.unpack(ctx, z & ((1 << n1) - 1), m)
    return {"j": j, "v": v, "u": u}


def _line_param(ctx, vertex: int, q: dict, point: list[int]) -> int | None:
    """Parameter t with point = u + t * dir on the queried line, or None if off the line."""
    u = q["u"]
    if vertex == 1:
        j = q["j"]
        d = [ctx.one if i == j else 0 for i in range(len(u))]
    else:
        d = q["v"]
    nz = [i for i, x in enumerate(d) if x]
    if not nz:
        return 0 if point == u else None
    i = nz[0]
    t = ctx.mul(point[i] ^ u[i], ctx.inv(d[i]))
    if [ui ^ ctx.mul(t, di) for ui, di in zip(u, d)] != point:
        return None
    return t


def _ldt_ok(ctx, d: int, m: int, vertex: int, ans) -> bool:
    if vertex == 0:
        return isinstance(ans, int) and 0 <= ans < ctx.q
    L = d + 1 if vertex == 1 else d * m + 1
    return isinstance(ans, tuple) and len(ans) == L and all(isinstance(c, int) and 0 <= c < ctx.q for c in ans)


def ldt_decide_one(p: int, m: int, d: int, x, y, a, b) -> bool:
    ctx = gf2p.build_field(p)
    (v0, z0), (v1, z1) = x, y
    if not (_ldt_ok(ctx, d, m, v0, a) and _ldt_ok(ctx, d, m, v1, b)):
        return False
    if v0 == v1:
        return x == y and a == b
    if v1 == 0:
        (v0, z0, a), (v1, z1, b) = (v1, z1, b), (v0, z0, a)
    if v0 != 0:
        return False
    point = ldt_parse(p, m, 0, z0)["u"]
    q = ldt_parse(p, m, v1, z1)
    t = _line_param(ctx, v1, q, point)
    if t is None:
        return False
    return eval_univariate(ctx, b, t) == a


def _ldt_game(p: int, m: int, d: int, k: int | None, name: str, doc: dict) -> Game:
    if p % 2 == 0 or m < 1 or d < 0:
        raise ParameterError("need odd p, m >= 1, d >= 0")
    typed = ldt_typed(p, m)

    def dec(x, y, a, b):
        if not typed.has_edge(x[0], y[0]):
            return False
        if k is None:
            return ldt_decide_one(p, m, d, x, y, a, b)
        if not (isinstance(a, tuple) and isinstance(b, tuple) and len(a) == k and len(b) == k):
            return False
        return all(ldt_decide_one(p, m, d, x, y, ai, bi) for ai, bi in zip(a, b))

    return Game(name, typed, dec, lambda side, q: None, True, doc, {"p": p, "m": m, "d": d, "k": k})


@_register("ldt")
def qlowdeg_game(p: int = 1, m: int = 2, d: int = 1) -> Game:
    return _ldt_game(p, m, d, None, f"ldt-{p}-{m}-{d}", {"kind": "library", "name": "ldt", "params": {"p": p, "m": m, "d": d}})


@_register("sldt")
def sim_lowdeg_game(p: int = 1, m: int = 2, d: int = 1, k: int = 2) -> Game:
    if k < 1:
        raise ParameterError("k >= 1")
    return _ldt_game(p, m, d, k, f"sldt-{p}-{m}-{d}-{k}",
                     {"kind": "library", "name": "sldt", "params": {"p": p, "m": m, "d": d, "k": k}})


# -- transformations --------------------------------------------------------------

def _transform_doc(op: str, G: Game, **extra) -> dict:
    return {"kind": "transform", "op": op, "base": G.doc, **extra}


def oracularize(G: Game) -> Game:
    """Labels A, B, O sent uniformly to each prover (1/9 per ordered label pair)."""
    table: dict = {}
    ninth = Fraction(1, 9)
    for x, y, p in G.pairs():
        qs = {"A": ("A", x), "B": ("B", y), "O": ("O", (x, y))}
        for la in "ABO":
            for lb in "ABO":
                key = (qs[la], qs[lb])
                table[key] = table.get(key, Fraction(0)) + p * ninth
    dist = ExplicitDist(table)

    def answers(side, q):
        lab, c = q
        if lab == "A":
            return G.answers("A", c)
        if lab == "B":
            return G.answers("B", c)
        aa, bb = G.answers("A", c[0]), G.answers("B", c[1])
        if aa is None or bb is None:
            return None
        return tuple(itertools.product(aa, bb))

    def dec(x, y, a, b):
        lx, cx = x
        ly, cy = y
        if lx == ly:
            if lx == "O":
                return x == y and a == b and G.D(cx[0], cx[1], a[0], a[1])
            return x == y and a == b
        if lx == "O" or ly == "O":
            (lo, co, ao), (lp, cp, ap) = ((lx, cx, a), (ly, cy, b)) if lx == "O" else ((ly, cy, b), (lx, cx, a))
            if not G.D(co[0], co[1], ao[0], ao[1]):
                return False
            if lp == "A":
                return cp == co[0] and ap == ao[0]
            return cp == co[1] and ap == ao[1]
        return True     # (A, x) against (B, y)

    return Game(f"ora({G.name})", dist, dec, answers, True, _transform_doc("oracularize", G))


def _anchor_cl(G: Game) -> tuple[CLDist, int]:
    d = G.dist
    p = d.LA.p
    n2 = d.LA.n
    R = Subspace.canonical(2 * p, range(2 * p))
    top0, top1 = 1 << (2 * p - 1), 1 << (p - 1)
    MA = CLFunction([R], [LinMap.from_func(R, lambda x: x & top0)], p=p, name="anchor.A0")
    MB = CLFunction([R], [LinMap.from_func(R, lambda x: x & top1)], p=p, name="anchor.B0")
    zA, zB = CLFunction.zero(d.LA.registers, p=p), CLFunction.zero(d.LB.registers, p=p)
    LA = series_compose(MA, lambda h: zA if h else d.LA, name="anchor.A")
    LB = series_compose(MB, lambda h: zB if h else d.LB, name="anchor.B")
    return CLDist(LA, LB), n2


def anchor(G: Game) -> Game:
    doc = _transform_doc("anchor", G)
    if G.kind == "cl":
        dist, n2 = _anchor_cl(G)
        low = (1 << n2) - 1
        unq = lambda q: BOT if q >> n2 else q & low
        return _anchor_game(G, dist, unq, doc)
    q = Fraction(1, 4)
    table: dict = {}
    for x, y, p in G.pairs():
        table[(x, y)] = table.get((x, y), Fraction(0)) + q * p
    for x, p in G.marginal("A").items():
        table[(x, BOT)] = table.get((x, BOT), Fraction(0)) + q * p
    for y, p in G.marginal("B").items():
        table[(BOT, y)] = table.get((BOT, y), Fraction(0)) + q * p
    table[(BOT, BOT)] = q
    return _anchor_game(G, ExplicitDist(table), lambda q: q, doc)


def _anchor_game(G: Game, dist, unq: Callable, doc: dict) -> Game:
    def answers(side, q):
        q = unq(q)
        if q == BOT:
            ans = G.answers(side, G.questions(side)[0]) or ()
            return tuple(ans) + (BOT,)
        base = G.answers(side, q)
        return None if base is None else tuple(base) + (BOT,)

    def dec(x, y, a, b):
        x, y = unq(x), unq(y)
        if x == BOT and y == BOT:
            return a == BOT and b == BOT
        if x == BOT:
            return a == BOT
        if y == BOT:
            return b == BOT
        if a == BOT or b == BOT:
            return False
        return G.D(x, y, a, b)

    return Game(f"anchor({G.name})", dist, dec, answers, G.synchronous, doc, {"base": G, "unq": unq})


def repeat(G: Game, r: int) -> Game:
    if r < 1:
        raise ParameterError("r >= 1")
    doc = _transform_doc("repeat", G, r=r)
    if r == 1:
        H = Game(G.name, G.dist, G.decider, G._answers, G.synchronous, doc, dict(G.meta))
        return H
    if G.kind == "cl":
        d = G.dist
        LA, LB = d.LA, d.LB
        for _ in range(r - 1):
            LA, LB = parallel_compose(LA, d.LA), parallel_compose(LB, d.LB)
        n = d.LA.n
        split = lambda q: tuple((q >> (n * (r - 1 - i))) & ((1 << n) - 1) for i in range(r))
        dist = CLDist(LA, LB)
    else:
        dist = ProductDist([G] * r, [G.pairs()] * r)
        split = lambda q: q

    def answers(side, q):
        parts = [G.answers(side, c) for c in split(q)]
        if any(a is None for a in parts):
            return None
        return tuple(itertools.product(*parts))

    def dec(x, y, a, b):
        xs, ys = split(x), split(y)
        if len(a) != r or len(b) != r:
            return False
        return all(G.D(xi, yi, ai, bi) for xi, yi, ai, bi in zip(xs, ys, a, b))

    return Game(f"{G.name}^{r}", dist, dec, answers, G.synchronous, doc, {"base": G, "r": r, "split": split})


def detype_game(G: Game) -> Game:
    """Replace a typed distribution by its detyped CL distribution.

    Pairs that parse as views of an edge go to the original decider; any
    other pair is a synchronicity check (identical questions need identical
    answers, distinct ones are accepted).
    """
    if G.kind != "typed":
        raise ParameterError("detype_game needs a typed distribution")
    dd = detype(G.dist)
    t0 = G.dist.t

    def parse(q):
        return dd.parse(q)

    def dec(x, y, a, b):
        px, py = parse(x), parse(y)
        if px is not None and py is not None and dd.typed.has_edge(px[0], py[0]):
            if max(px[0], py[0]) >= t0:
                return a == b     # padding vertices only carry self-loops
            return G.D(px, py, a, b)
        return x != y or a == b

    def answers(side, q):
        pq = parse(q)
        if pq is None or pq[0] >= t0:
            return (STAR,)
        base = G.answers(side, pq)
        return None if base is None else tuple(base) + (STAR,)

    return Game(f"detype({G.name})", dd, dec, answers, G.synchronous, _transform_doc("detype", G),
                {"base": G, "parse": parse})


TRANSFORMS: dict[str, Callable[[Game], Game]] = {
    "oracularize": oracularize,
    "anchor": anchor,
    "detype": detype_game,
}


# -- introspection -------------------------------------------------------------------

def intro_vertices(k: int) -> list[str]:
    names = list(PB_VERTICES) + ["GenPauliX", "GenPauliZ"]
    for P in "AB":
        names += [f"Hide{i}.{P}" for i in range(k)] + [f"Read.{P}", f"Sample.{P}", f"Intro.{P}"]
    return names


def intro_edges(k: int) -> list[tuple[str, str]]:
    blue, red, black = pb_edges()
    E = [(PB_VERTICES[u], PB_VERTICES[v]) for u, v in blue + red + black]
    E += [("GenPauliX", "PauliX"), ("GenPauliZ", "PauliZ")]
    for P in "AB":
        E.append(("GenPauliX", f"Hide0.{P}"))
        E += [(f"Hide{i}.{P}", f"Hide{i + 1}.{P}") for i in range(k - 1)]
        E += [(f"Hide{k - 1}.{P}", f"Read.{P}"), (f"Read.{P}", f"Intro.{P}"),
              ("GenPauliZ", f"Sample.{P}"), (f"Sample.{P}", f"Intro.{P}")]
    E.append(("Intro.A", "Intro.B"))
    return E


class IntroCtx:
    """Per-prover level data used by both the introspection decider and its honest strategy."""

    def __init__(self, dist: CLDist):
        self.dist = dist
        self.n = dist.LA.n
        self.k = dist.LA.k
        self.regs = dist.LA.registers
        self.below = [0]
        for R in self.regs:
            self.below.append(self.below[-1] | R.mask)   # below[j] = mask of V_{<j}

    def L(self, P: str) -> CLFunction:
        return self.dist.LA if P == "A" else self.dist.LB

    @lru_cache(maxsize=None)
    def perp_space(self, P: str, j: int, prefix: int) -> Subspace:
        """ker(L_{j,prefix})^perp inside V_j; L^perp reduces by it."""
        from .clspace import kernel, orth
        M = self.L(P).level_map(j, prefix)
        return orth(kernel(M), self.regs[j])

    def lperp(self, P: str, j: int, prefix: int, r: int) -> int:
        return self.perp_space(P, j, prefix).reduce(r & self.regs[j].mask)

    def tperp(self, P: str, upto: int, tline: int, r: int) -> int:
        """sum_{j <= upto} L^perp_{j, tline_{<j}}(r_j)."""
        out = 0
        for j in range(upto + 1):
            out |= self.lperp(P, j, tline & self.below[j], r)
        return out


def introspection_game(G: Game, cap: int, k: int | None = None) -> Game:
    """Typed introspection protocol for a CL game G over an N = cap qubit Pauli basis test."""
    if G.kind != "cl":
        raise ParameterError("introspection needs a CL distribution")
    dist: CLDist = G.dist
    kk, m, p = dist.params
    if k is None:
        k = kk
    if k != kk:
        raise ParameterError("k must match the level count of the CL distribution")
    n = dist.LA.n
    if n > cap:
        raise ParameterError(f"m*p = {n} exceeds the cap {cap}")
    N = cap
    ic = IntroCtx(dist)
    names = intro_vertices(k)
    index = {v: i for i, v in enumerate(names)}
    pbd = pb_typed(N)
    R = pbd.registers[0]
    zero = CLFunction.zero([R])
    fam = [pbd.family[PB_INDEX[v]] if v in PB_INDEX else zero for v in names]
    edges = [(index[u], index[v]) for u, v in intro_edges(k)] + [(i, i) for i in range(len(names))]
    typed = TypedCLDist.build(len(names), edges, fam, names)
    vmask = dist.LA.vmask
    below = ic.below

    def reg_after(i: int) -> int:          # mask of V_{>i}
        return vmask & ~below[i + 1]

    def ok_vec(x, mask) -> bool:
        return isinstance(x, int) and not (x & ~mask)

    def intro_clause(u: str, a, v: str, b, zu: int, zv: int) -> bool:
        if u == v:
            return a == b
        if u in PB_INDEX and v in PB_INDEX:
            return pb_decide(N, u, zu, v, zv, a, b)
        pair = {u: a, v: b}
        names_ = {u, v}
        for W in "XZ":
            if names_ == {f"Pauli{W}", f"GenPauli{W}"}:
                t = pair[f"Pauli{W}"]
                return ok_vec(pair[f"GenPauli{W}"], vmask) and (t >> (N - n)) == pair[f"GenPauli{W}"]
        if names_ == {"Intro.A", "Intro.B"}:
            (xa, aa), (xb, ab) = pair["Intro.A"], pair["Intro.B"]
            return G.D(xa, xb, aa, ab)
        for P in "AB":
            L = ic.L(P)
            if names_ == {"GenPauliX", f"Hide0.{P}"}:
                sx = pair["GenPauliX"]
                tp, r = pair[f"Hide0.{P}"][1:]
                return ok_vec(sx, vmask) and tp == ic.lperp(P, 0, 0, sx) and r == (sx & reg_after(0))
            for i in range(k - 1):
                if names_ == {f"Hide{i}.{P}", f"Hide{i + 1}.{P}"}:
                    tl, tp, r = pair[f"Hide{i}.{P}"]
                    tl2, tp2, r2 = pair[f"Hide{i + 1}.{P}"]
                    Ri = ic.regs[i + 1].mask
                    return (tp2 & below[i + 1]) == tp and (tl2 & below[i]) == tl \
                        and ic.lperp(P, i + 1, tl2, r & Ri) == (tp2 & Ri) and (r & reg_after(i + 1)) == r2
            if names_ == {f"Hide{k - 1}.{P}", f"Read.{P}"}:
                tl, tp, _ = pair[f"Hide{k - 1}.{P}"]
                rtp, rtl, _ = pair[f"Read.{P}"]
                return (rtl & below[k - 1]) == tl and rtp == tp
            if names_ == {f"Read.{P}", f"Intro.{P}"}:
                _, rtl, ra = pair[f"Read.{P}"]
                x, ia = pair[f"Intro.{P}"]
                return rtl == x and ra == ia
            if names_ == {"GenPauliZ", f"Sample.{P}"}:
                return ok_vec(pair["GenPauliZ"], vmask) and pair["GenPauliZ"] == pair[f"Sample.{P}"][0]
            if names_ == {f"Sample.{P}", f"Intro.{P}"}:
                s, sa = pair[f"Sample.{P}"]
                x, ia = pair[f"Intro.{P}"]
                return ok_vec(s, vmask) and L.eval(s) == x and sa == ia
        return False

    def dec(x, y, a, b):
        (v0, z0), (v1, z1) = x, y
        if not typed.has_edge(v0, v1):
            return False
        return intro_clause(names[v0], a, names[v1], b, z0, z1)

    def answers(side, q):
        nm = names[q[0]]
        if nm in PB_INDEX:
            return pb_answers(N, nm)
        return None

    doc = _transform_doc("introspect", G, cap=cap, k=k)
    return Game(f"intro({G.name})", typed, dec, answers, True, doc,
                {"base": G, "N": N, "k": k, "names": names, "ctx": ic})


def intro_test_game() -> Game:
    """1-level CL game over F_2^2: L^A(s) = (s0+s1, 0), L^B(s) = (s0, 0); win iff a+b = x0+y0."""
    R = Subspace.canonical(2, range(2))
    LA = CLFunction([R], [LinMap.from_func(R, lambda s: ((_parity(s) << 1)))], name="LA")
    LB = CLFunction([R], [LinMap.from_func(R, lambda s: s & 0b10)], name="LB")
    dist = CLDist(LA, LB)
    dec = lambda x, y, a, b: (a ^ b) == ((x >> 1) ^ (y >> 1))
    return Game("intro-test", dist, dec, lambda side, q: (0, 1), True, {"kind": "library", "name": "intro-test"})


_register("intro-test")(intro_test_game)


@_register("identity-cl")
def identity_cl_game(bits: int = 1) -> Game:
    """L^A = L^B = identity on F_2^bits; win iff answers are equal."""
    R = Subspace.canonical(bits, range(bits))
    f = CLFunction.identity([R])
    dist = CLDist(f, f)
    return Game(f"identity-cl-{bits}", dist, lambda x, y, a, b: a == b, lambda side, q: (0, 1), True,
                {"kind": "library", "name": "identity-cl", "params": {"bits": bits}})


# -- conditionally linear verifiers ---------------------------------------------

@dataclass
class VerifierDesc:
    """Uniform family n -> CL game exposed through the four verifier interfaces."""

    builder: Callable[[int], Game]

    def _g(self, n: int) -> Game:
        G = self.builder(n)
        if G.kind != "cl":
            raise ParameterError("verifier family must produce CL games")
        return G

    def parameter(self, n: int) -> tuple[int, int, int]:
        return self._g(n).dist.params

    def divide(self, n: int, s: int) -> list[int]:
        d = self._g(n).dist
        return [s & R.mask for R in d.LA.registers]

    def func(self, n: int, prover: str, level: int, prefix: int, x: int) -> int:
        d = self._g(n).dist
        L = d.LA if prover == "A" else d.LB
        return L.level_map(level, prefix).apply(x & L.registers[level].mask)

    def decide(self, n: int, x, y, a, b) -> int:
        return self._g(n).D(x, y, a, b)

    def sample(self, n: int, s: int) -> tuple[int, int]:
        """Evaluate both CL functions level by level through func()."""
        out = []
        for P in "AB":
            x = 0
            for j, sj in enumerate(self.divide(n, s)):
                x |= self.func(n, P, j, x, sj)
            out.append(x)
        return out[0], out[1]


__all__ = [
    "BOT", "STAR", "Game", "ExplicitDist", "ProductDist", "VerifierDesc", "accept_game", "reject_game",
    "magic_square_game", "pauli_basis_game", "qlowdeg_game", "sim_lowdeg_game", "introspection_game",
    "intro_test_game", "identity_cl_game", "oracularize", "anchor", "repeat", "detype_game", "random_tiny_game",
    "explicit_game", "materialize", "check_synchronous", "build_game", "game_from_dict", "library_names",
    "pb_code", "pb_encode", "pb_typed", "pb_decide", "pb_answers", "PB_VERTICES", "PB_INDEX", "MS_CONSTRAINTS",
    "ms_check", "ldt_typed", "ldt_parse", "ldt_layout", "LDT_VERTICES", "intro_vertices", "intro_edges",
    "IntroCtx", "TRANSFORMS",
]
