"""Exact classical values, heuristic quantum lower bounds and completeness chains."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import gamecore as gc
from . import quantlab as ql
from .config import SEARCH_CAP, capacity
from .errors import CapacityError, ParameterError
from .rng import make_rng

NEG = -(1 << 40)   # invalid answer slots; stays far from int64 overflow when summed


@dataclass
class SolveReport:
    value: Any
    witness: Any
    work: int
    converged: bool = True
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        v = self.value
        val = {"fraction": str(v), "float": float(v)} if isinstance(v, Fraction) else {"float": float(v)}
        wit = self.witness
        if isinstance(wit, dict) and "A" in wit:
            wit = {s: [[gc._enc(q), gc._enc(a)] for q, a in wit[s].items()] for s in ("A", "B")}
        elif isinstance(wit, ql.Strategy):
            wit = {"strategy": wit.name, "dims": [wit.dA, wit.dB]}
        return {"value": val, "witness": wit, "work": self.work, "converged": self.converged, **self.extra}


# -- classical value -------------------------------------------------------------

def _tables(G: gc.Game):
    pairs = G.pairs()
    XA, XB = G.questions("A"), G.questions("B")
    ansA = [tuple(G.answers("A", x) or ()) for x in XA]
    ansB = [tuple(G.answers("B", y) or ()) for y in XB]
    if any(not a for a in ansA + ansB):
        raise CapacityError("answer alphabet is not enumerable")
    den = math.lcm(*[p.denominator for *_, p in pairs])
    ia = {x: i for i, x in enumerate(XA)}
    ib = {y: j for j, y in enumerate(XB)}
    nB = max(len(a) for a in ansB)
    nA = max(len(a) for a in ansA)
    # C[i, a, j, b] = weight * D, invalid answer slots are NEG
    C = np.zeros((len(XA), nA, len(XB), nB), dtype=np.int64)
    for j, bs in enumerate(ansB):
        C[:, :, j, len(bs):] = NEG
    for i, as_ in enumerate(ansA):
        C[i, len(as_):, :, :] = NEG
    for x, y, p in pairs:
        w = int(p * den)
        i, j = ia[x], ib[y]
        for ai, a in enumerate(ansA[i]):
            for bi, b in enumerate(ansB[j]):
                if G.D(x, y, a, b):
                    C[i, ai, j, bi] += w
    return XA, XB, ansA, ansB, C, den


def _best_response(score: np.ndarray, nbs: Sequence[int]) -> tuple[int, list[int]]:
    tot, bs = 0, []
    for j, row in enumerate(score):
        b = int(np.argmax(row[: nbs[j]]))
        bs.append(b)
        tot += int(row[b])
    return tot, bs


def _sync_value(G: gc.Game, XA, XB, ansA, C) -> tuple[int, list[int] | None]:
    """Best identical answer function (small instances only)."""
    if XA != XB or not G.synchronous:
        return NEG, None
    n = len(XA)
    sizes = [len(a) for a in ansA]
    if math.prod(sizes) > 1 << 14:
        return NEG, None
    best, arg = NEG, None
    idx = np.arange(n)
    for f in np.ndindex(*sizes):
        f = np.array(f)
        v = int(C[idx[:, None], f[:, None], idx[None, :], f[None, :]].sum())
        if v > best:
            best, arg = v, list(f)
    return best, arg


def classical_value_exact(G: gc.Game) -> SolveReport:
    """max over deterministic (f_A, f_B) of the winning probability, as a Fraction.

    Depth-first search over Alice's answers in question order; Bob best
    responds.  The bound adds, per Bob question and answer, the best
    possible contribution of every unassigned Alice question.
    """
    XA, XB, ansA, ansB, C, den = _tables(G)
    nX = len(XA)
    nbs = [len(b) for b in ansB]
    cap = capacity(SEARCH_CAP)
    flat = C.reshape(nX, C.shape[1], -1)                   # (x, a, (y, b))
    best_a = flat.max(axis=1)                               # (x, (y, b))
    rest = np.zeros((nX + 1, flat.shape[2]), dtype=np.int64)
    for i in range(nX - 1, -1, -1):
        rest[i] = rest[i + 1] + best_a[i]
    shape = (len(XB), C.shape[3])

    sync_v, sync_f = _sync_value(G, XA, XB, ansA, C)
    threshold = max(sync_v, 0)
    best = [NEG, None]
    nodes = 0
    assign = [0] * nX

    def bound(score_flat, i):
        return int((score_flat + rest[i]).reshape(shape).max(axis=1).sum())

    def dfs(i, score):
        nonlocal nodes
        nodes += 1
        if nodes > cap:
            raise CapacityError(f"classical search exceeded {cap} nodes")
        if i == nX:
            v, _ = _best_response(score.reshape(shape), nbs)
            if v > best[0] and v >= threshold:
                best[0], best[1] = v, list(assign)
            return
        for a in range(len(ansA[i])):
            s2 = score + flat[i, a]
            b = bound(s2, i + 1)
            if b < threshold or b <= best[0]:
                continue
            assign[i] = a
            dfs(i + 1, s2)

    dfs(0, np.zeros(flat.shape[2], dtype=np.int64))
    if best[1] is None:         # nothing beat the synchronous seed strictly; it is optimal
        if sync_f is None:
            raise AssertionError("search found no strategy")
        best = [sync_v, list(sync_f)]
    fA = best[1]
    score = sum(flat[i, fA[i]] for i in range(nX))
    v, fB = _best_response(np.asarray(score).reshape(shape), nbs)
    witness = {
        "A": {x: ansA[i][fA[i]] for i, x in enumerate(XA)},
        "B": {y: ansB[j][fB[j]] for j, y in enumerate(XB)},
    }
    return SolveReport(Fraction(v, den), witness, nodes, True,
                       {"synchronous_seed": str(Fraction(max(sync_v, 0), den)) if sync_f is not None else None})


def deterministic_value(G: gc.Game, fA: dict, fB: dict) -> Fraction:
    return sum((p for x, y, p in G.pairs() if G.D(x, y, fA[x], fB[y])), Fraction(0))


# -- quantum lower bound --------------------------------------------------------------

GOLD = (math.sqrt(5) - 1) / 2


class _Param:
    """Projective strategy: real unit state, Givens-parameterized bases, basis-to-answer labels."""

    def __init__(self, G: gc.Game, d: int, rng: np.random.Generator):
        self.G, self.d = G, d
        self.XA, self.XB = G.questions("A"), G.questions("B")
        self.ansA = [tuple(G.answers("A", x)) for x in self.XA]
        self.ansB = [tuple(G.answers("B", y)) for y in self.XB]
        self.rot = [(i, j) for i in range(d) for j in range(i + 1, d)]
        nq = len(self.XA) + len(self.XB)
        self.theta = rng.uniform(-math.pi, math.pi, size=(nq, len(self.rot)))
        self.labels = [rng.integers(0, len(a), size=d) for a in self.ansA + self.ansB]
        self.state = rng.normal(size=d * d)
        self.state /= np.linalg.norm(self.state)
        ia = {x: i for i, x in enumerate(self.XA)}
        ib = {y: j for j, y in enumerate(self.XB)}
        self.pairs = []
        for x, y, p in G.pairs():
            i, j = ia[x], ib[y]
            D = np.array([[G.D(x, y, a, b) for b in self.ansB[j]] for a in self.ansA[i]], dtype=float)
            self.pairs.append((i, len(self.XA) + j, float(p), D))
        self.touch = [[] for _ in range(nq)]
        for k, (qa, qb, _, _) in enumerate(self.pairs):
            self.touch[qa].append(k)
            if qb != qa:
                self.touch[qb].append(k)

    def basis(self, q: int) -> np.ndarray:
        U = np.eye(self.d)
        for (i, j), t in zip(self.rot, self.theta[q]):
            c, s = math.cos(t), math.sin(t)
            R = np.eye(self.d)
            R[i, i] = R[j, j] = c
            R[i, j], R[j, i] = -s, s
            U = U @ R
        return U

    def projectors(self, q: int, na: int) -> np.ndarray:
        U = self.basis(q)
        P = np.zeros((na, self.d, self.d))
        for k in range(self.d):
            v = U[:, k]
            P[self.labels[q][k]] += np.outer(v, v)
        return P

    def _nans(self, q: int) -> int:
        return len((self.ansA + self.ansB)[q])

    def _pair(self, k: int) -> float:
        qa, qb, p, D = self.pairs[k]
        M = self.state.reshape(self.d, self.d)
        K = np.einsum("ij,aik,kl->ajl", M, self.proj[qa], M)
        return p * float((np.einsum("ajl,bjl->ab", K, self.proj[qb]) * D).sum())

    def full(self) -> float:
        """Recompute every projector and pair contribution."""
        self.proj = [self.projectors(q, self._nans(q)) for q in range(len(self.labels))]
        self.contrib = np.array([self._pair(k) for k in range(len(self.pairs))])
        return float(self.contrib.sum())

    def refresh(self, q: int) -> float:
        """Recompute after a change to question q only."""
        self.proj[q] = self.projectors(q, self._nans(q))
        for k in self.touch[q]:
            self.contrib[k] = self._pair(k)
        return float(self.contrib.sum())

    def value(self) -> float:
        return self.full()

    def strategy(self) -> ql.Strategy:
        d = self.d
        nA = len(self.XA)
        tabA = {x: ql.Povm({a: P for a, P in zip(self.ansA[i], self.projectors(i, len(self.ansA[i])))})
                for i, x in enumerate(self.XA)}
        tabB = {y: ql.Povm({b: P for b, P in zip(self.ansB[j], self.projectors(nA + j, len(self.ansB[j])))})
                for j, y in enumerate(self.XB)}
        return ql.Strategy(self.state.copy(), d, d, tabA.__getitem__, tabB.__getitem__, "local-search")


def _golden(f, lo: float, hi: float, iters: int = 18) -> tuple[float, float]:
    a, b = lo, hi
    c, d = b - GOLD * (b - a), a + GOLD * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLD * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLD * (b - a)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def _climb(P: _Param, iters: int) -> tuple[float, list[float]]:
    cur = P.full()
    trace = [cur]
    for _ in range(iters):
        start = cur
        for q, lab in enumerate(P.labels):            # basis vector -> answer labels
            for k in range(P.d):
                old = lab[k]
                for a in range(P._nans(q)):
                    if a == old:
                        continue
                    lab[k] = a
                    v = P.refresh(q)
                    if v > cur + 1e-15:
                        cur, old = v, a
                lab[k] = old
            cur = P.refresh(q)
        for q in range(P.theta.shape[0]):             # Givens angles
            for r in range(P.theta.shape[1]):
                old = P.theta[q, r]

                def f(t, q=q, r=r):
                    P.theta[q, r] = t
                    return P.refresh(q)

                t, v = _golden(f, old - math.pi / 2, old + math.pi / 2, 12)
                P.theta[q, r] = t if v > cur else old
                cur = P.refresh(q)
        for k in range(P.state.size):                 # state: rotate toward each coordinate
            base = P.state.copy()
            e = np.zeros_like(base)
            e[k] = 1.0

            def g(t, base=base, e=e):
                v = math.cos(t) * base + math.sin(t) * e
                P.state = v / np.linalg.norm(v)
                return P.full()

            t, v = _golden(g, -math.pi / 2, math.pi / 2, 12)
            if v > cur:
                g(t)
            else:
                P.state = base
            cur = P.full()
        trace.append(cur)
        if cur - start < 1e-12:
            break
    return cur, trace


def _embed_deterministic(P: _Param, wit: dict) -> None:
    for q, lab in enumerate(P.labels):
        if q < len(P.XA):
            a = P.ansA[q].index(wit["A"][P.XA[q]])
        else:
            j = q - len(P.XA)
            a = P.ansB[j].index(wit["B"][P.XB[j]])
        lab[:] = a


def quantum_lower_bound(G: gc.Game, dim: int, iters: int = 10, seed: int = 0, restarts: int = 1,
                        warm_start: dict | None = None) -> SolveReport:
    """Best value over seeded random-restart hill climbing on projective strategies.

    Restart r uses its own generator derived from (seed, r); with
    ``warm_start`` (a deterministic witness) restart 0 starts from it.
    """
    if not 1 <= dim <= 16:
        raise CapacityError("dim must be in 1..16")
    best, best_P, work, traces = -1.0, None, 0, []
    for r in range(restarts):
        rng = make_rng(seed * 1_000_003 + r)
        P = _Param(G, dim, rng)
        if warm_start is not None and r == 0:
            _embed_deterministic(P, warm_start)
        v, trace = _climb(P, iters)
        traces.append(trace)
        work += len(trace)
        if v > best:
            best, best_P = v, P
    S = best_P.strategy()
    return SolveReport(min(best, 1.0) if best <= 1 + 1e-9 else best, S, work, True,
                       {"traces": [[round(t, 15) for t in tr] for tr in traces]})


# -- completeness chains ---------------------------------------------------------------

def _parse_op(op) -> tuple[str, int]:
    if isinstance(op, (tuple, list)):
        return op[0], int(op[1])
    if isinstance(op, str) and op.startswith("repeat"):
        digits = op[len("repeat"):].strip("()")
        return "repeat", int(digits or 2)
    return op, 0


def verify_completeness_chain(G: gc.Game, S: ql.Strategy, transforms: Sequence, tol: float = ql.TOL) -> dict:
    """Lift S through each transformation, evaluating the value after every stage."""
    stages = []
    report = {"game": G.name, "input_value": ql.eval_value(G, S), "stages": stages, "passed": True, "failed_stage": None}
    cur_G, cur_S = G, S
    for idx, op in enumerate(transforms, start=1):
        name, r = _parse_op(op)
        cur_G, cur_S = ql.lift_strategy(cur_G, cur_S, name, r=r or 2, check=False)
        v = ql.eval_value(cur_G, cur_S)
        ok = v >= 1 - tol
        stages.append({"stage": idx, "op": name if not r else f"repeat({r})", "value": v, "dim": cur_S.dA, "pass": ok})
        if not ok:
            report["passed"] = False
            report["failed_stage"] = idx
            break
    return report


__all__ = [
    "SolveReport", "classical_value_exact", "deterministic_value", "quantum_lower_bound",
    "verify_completeness_chain",
]
