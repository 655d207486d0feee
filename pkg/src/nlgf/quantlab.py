"""Finite-dimensional strategies: POVMs, generalized Paulis, honest strategies and lifts.

States live on C^{dA} (x) C^{dB}.  A strategy built on a maximally entangled
state is usually described by one "A-frame" family of operators; the B side
then uses transposes, so that <ME| P (x) Q^T |ME> = Tr(PQ)/d.
"""

from __future__ import annotations

import base64
import itertools
import math
import struct
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from . import gamecore as gc
from . import gf2p
from .clspace import DetypedCLDist
from .errors import CapacityError, DomainError, InvariantError, ParameterError
from .polylab import IdPoly, restrict_line, univariate_coeffs

TOL = 1e-9
DIM_CAP = 1 << 10

I2 = np.eye(2)
PX = np.array([[0.0, 1.0], [1.0, 0.0]])
PZ = np.array([[1.0, 0.0], [0.0, -1.0]])


def _kron(*ms):
    out = np.eye(1)
    for m in ms:
        out = np.kron(out, m)
    return out


# -- POVMs ----------------------------------------------------------------------

class Povm:
    """Outcome-indexed positive operators summing to the identity."""

    __slots__ = ("elems", "dim", "_stack")

    def __init__(self, elems: Mapping[Any, np.ndarray]):
        self.elems = {a: np.asarray(M) for a, M in elems.items()}
        if not self.elems:
            raise ParameterError("empty POVM")
        dims = {M.shape for M in self.elems.values()}
        if len(dims) != 1:
            raise ParameterError("POVM elements have different shapes")
        self.dim = next(iter(dims))[0]
        self._stack = None

    @classmethod
    def trivial(cls, outcome, d: int) -> "Povm":
        return cls({outcome: np.eye(d)})

    @property
    def outcomes(self) -> list:
        return list(self.elems)

    def stack(self) -> tuple[list, np.ndarray]:
        if self._stack is None:
            keys = list(self.elems)
            self._stack = (keys, np.stack([self.elems[k] for k in keys]))
        return self._stack

    def __getitem__(self, a) -> np.ndarray:
        M = self.elems.get(a)
        return M if M is not None else np.zeros((self.dim, self.dim))

    def transpose(self) -> "Povm":
        return Povm({a: M.T for a, M in self.elems.items()})

    def kron(self, other: "Povm") -> "Povm":
        return Povm({(a, b): np.kron(A, B) for a, A in self.elems.items() for b, B in other.elems.items()})

    def tensor_id(self, left: int = 1, right: int = 1) -> "Povm":
        return Povm({a: _kron(np.eye(left), M, np.eye(right)) for a, M in self.elems.items()})

    def relabel(self, f: Callable) -> "Povm":
        out: dict = {}
        for a, M in self.elems.items():
            b = f(a)
            out[b] = out[b] + M if b in out else M
        return Povm(out)

    def is_projective(self, tol: float = TOL) -> bool:
        return all(np.abs(M @ M - M).max() <= tol for M in self.elems.values())

    def validate(self, projective: bool = False, tol: float = TOL) -> None:
        S = sum(self.elems.values())
        if np.abs(S - np.eye(self.dim)).max() > tol:
            raise InvariantError("POVM elements do not sum to the identity")
        for M in self.elems.values():
            if np.abs(M - M.conj().T).max() > tol:
                raise InvariantError("POVM element is not Hermitian")
            if np.linalg.eigvalsh(M).min() < -tol:
                raise InvariantError("POVM element is not positive semidefinite")
        if projective and not self.is_projective(tol):
            raise InvariantError("PVM element is not idempotent")


# -- strategies --------------------------------------------------------------------

class Strategy:
    """(psi, {A^x_a}, {B^y_b}) with psi a unit vector on C^dA (x) C^dB.

    ``A`` and ``B`` map a question to a Povm.  ``frame`` optionally maps a
    question to A-frame operators (for ME states) used by both provers.
    """

    def __init__(self, psi: np.ndarray, dA: int, dB: int, A: Callable[[Any], Povm], B: Callable[[Any], Povm],
                 name: str = "strategy", frame: Callable[[Any], Povm] | None = None, me: bool = False,
                 meta: dict | None = None):
        psi = np.asarray(psi)
        if psi.shape != (dA * dB,):
            raise ParameterError("state dimension mismatch")
        if abs(np.linalg.norm(psi) - 1) > 1e-12:
            raise InvariantError("state is not a unit vector")
        if max(dA, dB) > DIM_CAP:
            raise CapacityError(f"local dimension exceeds {DIM_CAP}")
        self.psi, self.dA, self.dB = psi, dA, dB
        self._A = lru_cache(maxsize=None)(A)
        self._B = lru_cache(maxsize=None)(B)
        self._frame = lru_cache(maxsize=None)(frame) if frame else None
        self.name = name
        self.me = me
        self.meta = dict(meta or {})

    def A(self, x) -> Povm:
        P = self._A(x)
        if P.dim != self.dA:
            raise ParameterError("Alice's POVM has the wrong dimension")
        return P

    def B(self, y) -> Povm:
        P = self._B(y)
        if P.dim != self.dB:
            raise ParameterError("Bob's POVM has the wrong dimension")
        return P

    def frame(self, q) -> Povm:
        """A-frame family (symmetric strategies on ME states)."""
        if self._frame is None:
            raise ParameterError("strategy has no A-frame description")
        return self._frame(q)

    @property
    def symmetric(self) -> bool:
        return self._frame is not None and self.me

    @classmethod
    def symmetric_me(cls, d: int, frame: Callable[[Any], Povm], name: str = "strategy", meta: dict | None = None):
        return cls(me_state(d), d, d, frame, lambda q: frame(q).transpose(), name, frame, True, meta)

    @classmethod
    def deterministic(cls, fA: Callable[[Any], Any], fB: Callable[[Any], Any] | None = None, name: str = "deterministic"):
        one = np.ones((1, 1))
        if fB is None:
            fr = lambda q: Povm({fA(q): one})
            return cls.symmetric_me(1, fr, name)
        return cls(np.ones(1), 1, 1, lambda q: Povm({fA(q): one}), lambda q: Povm({fB(q): one}), name)

    def validate(self, questions_A: Sequence, questions_B: Sequence, projective: bool = False) -> None:
        for x in questions_A:
            self.A(x).validate(projective)
        for y in questions_B:
            self.B(y).validate(projective)

    # serialization: versioned header + little-endian float64 payloads
    HEADER = b"NLGFSTRAT\x01"

    def to_dict(self, questions_A: Sequence, questions_B: Sequence) -> dict:
        def enc(M):
            M = np.asarray(M, dtype=complex)
            inter = np.stack([M.real, M.imag], axis=-1).astype("<f8")
            return base64.b64encode(self.HEADER + struct.pack("<II", *M.shape[:2] if M.ndim == 2 else (M.shape[0], 1)) + inter.tobytes()).decode()

        def povms(side, qs):
            P = self.A if side == "A" else self.B
            return [[gc._enc(q), [[gc._enc(a), enc(M)] for a, M in P(q).elems.items()]] for q in qs]

        return {
            "format": "nlgf-strategy/1",
            "name": self.name,
            "dims": [self.dA, self.dB],
            "me": self.me,
            "state": enc(self.psi.reshape(-1, 1)),
            "A": povms("A", questions_A),
            "B": povms("B", questions_B),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Strategy":
        def dec(s):
            raw = base64.b64decode(s)
            if not raw.startswith(cls.HEADER):
                raise ParameterError("bad strategy payload header")
            raw = raw[len(cls.HEADER):]
            r, c = struct.unpack("<II", raw[:8])
            arr = np.frombuffer(raw[8:], dtype="<f8").reshape(r, c, 2)
            M = arr[..., 0] + 1j * arr[..., 1]
            return M.real.copy() if not np.any(arr[..., 1]) else M

        dA, dB = doc["dims"]
        psi = dec(doc["state"]).reshape(-1)
        tabA = {gc._dec(q): Povm({gc._dec(a): dec(M) for a, M in els}) for q, els in doc["A"]}
        tabB = {gc._dec(q): Povm({gc._dec(a): dec(M) for a, M in els}) for q, els in doc["B"]}

        def look(tab):
            def f(q):
                if q not in tab:
                    raise DomainError(f"strategy has no POVM for question {q!r}")
                return tab[q]
            return f

        return cls(psi, dA, dB, look(tabA), look(tabB), doc.get("name", "strategy"), me=doc.get("me", False))


def me_state(n: int) -> np.ndarray:
    """(1/sqrt n) sum_i |i>|i>."""
    if n < 1:
        raise ParameterError("n >= 1")
    v = np.zeros(n * n)
    v[:: n + 1] = 1 / math.sqrt(n)
    return v


# -- evaluation --------------------------------------------------------------------------

def joint(S: Strategy, x, y) -> tuple[list, list, np.ndarray]:
    """(outcomes_A, outcomes_B, P) with P[i, j] = <psi| A^x_i (x) B^y_j |psi>."""
    ka, As = S.A(x).stack()
    kb, Bs = S.B(y).stack()
    if S.me:
        P = np.einsum("ajl,bjl->ab", As, Bs) / S.dA
    else:
        M = S.psi.reshape(S.dA, S.dB)
        K = np.einsum("ij,aik,kl->ajl", M.conj(), As, M)
        P = np.einsum("ajl,bjl->ab", K, Bs)
    return ka, kb, np.real(P)


def correlation(S: Strategy, pairs: Sequence[tuple[Any, Any]]) -> dict:
    """{(x, y): {(a, b): prob}} for the listed question pairs."""
    out = {}
    for x, y in pairs:
        ka, kb, P = joint(S, x, y)
        if abs(P.sum() - 1) > TOL:
            raise InvariantError("correlation row does not sum to 1")
        out[(x, y)] = {(a, b): float(P[i, j]) for i, a in enumerate(ka) for j, b in enumerate(kb)}
    return out


def _pair_win(G: gc.Game, S: Strategy, x, y) -> float:
    ka, kb, P = joint(S, x, y)
    if P.min() < -TOL or P.max() > 1 + TOL:
        raise InvariantError("probability out of range")
    w = 0.0
    for i, j in zip(*np.nonzero(np.abs(P) > 1e-15)):
        if G.D(x, y, ka[i], kb[j]):
            w += P[i, j]
    return float(w)


def eval_value(G: gc.Game, S: Strategy) -> float:
    """omega(G, S) = sum mu(x,y) sum D(x,y,a,b) <psi|A^x_a (x) B^y_b|psi>."""
    if G.kind == "detyped":
        return _eval_detyped(G, S)
    if "r" in G.meta and isinstance(S, ProductStrategy) and len(S.parts) == G.meta["r"]:
        return _eval_product(G, S)
    return float(sum(float(p) * _pair_win(G, S, x, y) for x, y, p in G.pairs()))


def pair_values(G: gc.Game, S: Strategy) -> list[tuple[Any, Any, float, float]]:
    """(x, y, mu, win probability) per supported pair."""
    return [(x, y, float(p), _pair_win(G, S, x, y)) for x, y, p in G.pairs()]


def _eval_product(G: gc.Game, S: "ProductStrategy") -> float:
    """Repeated game under a product strategy: per-copy win probabilities multiply."""
    base: gc.Game = G.meta["base"]
    split = G.meta["split"]
    caches = [dict() for _ in S.parts]
    total = 0.0
    for x, y, p in G.pairs():
        pr = float(p)
        for i, (xi, yi) in enumerate(zip(split(x), split(y))):
            c = caches[i]
            if (xi, yi) not in c:
                c[(xi, yi)] = _pair_win(base, S.parts[i], xi, yi)
            pr *= c[(xi, yi)]
            if pr == 0:
                break
        total += pr
    return total


def _eval_detyped(G: gc.Game, S: Strategy) -> float:
    """Value of a detype-lifted strategy.

    Both questions parse exactly on non-trivial seeds, whose conditioned law
    is the typed law; on every trivial seed at most one prover parses, the
    questions differ and the decider accepts.  Hence
    omega = P(nt) * omega_typed(S_base) + (1 - P(nt)).
    """
    base_S = S.meta.get("base_strategy")
    if base_S is None:
        return _eval_enumerated(G, S)
    d: DetypedCLDist = G.dist
    pnt = d.nontrivial_fraction()
    wt = eval_value(G.meta["base"], base_S)
    return float(pnt) * wt + float(1 - pnt)


def _eval_enumerated(G: gc.Game, S: Strategy) -> float:
    from .clspace import enumerate_dist
    tot = 0.0
    for (x, y), p in enumerate_dist(G.dist).items():
        tot += float(p) * _pair_win(G, S, x, y)
    return tot


def eval_detyped_exhaustive(G: gc.Game, S: Strategy) -> float:
    """Seed-by-seed value of a detyped game (small ambients only)."""
    return _eval_enumerated(G, S)


def delta_sync(G: gc.Game, S: Strategy) -> float:
    """E_{x ~ mu_A} sum_{a != b} C(x, x, a, b)."""
    tot = 0.0
    for x, p in G.marginal("A").items():
        ka, kb, P = joint(S, x, x)
        for i, a in enumerate(ka):
            for j, b in enumerate(kb):
                if a != b:
                    tot += float(p) * P[i, j]
    return max(tot, 0.0)


def dist_consistent(A: Callable[[Any], Povm], B: Callable[[Any], Povm], mu: Mapping, psi: np.ndarray,
                    dA: int, dB: int) -> float:
    """E_x sum_{a != b} <psi| A^x_a (x) B^x_b |psi>."""
    M = np.asarray(psi).reshape(dA, dB)
    tot = 0.0
    for x, p in mu.items():
        PA, PB = A(x), B(x)
        for a, Aa in PA.elems.items():
            K = M.conj().T @ Aa @ M
            for b, Bb in PB.elems.items():
                if a != b:
                    tot += float(p) * float(np.real(np.sum(K * Bb)))
    return max(tot, 0.0)


def dist_close(A: Callable[[Any], Povm], B: Callable[[Any], Povm], mu: Mapping, psi: np.ndarray) -> float:
    """E_x sum_a ||(A^x_a - B^x_a) psi||^2 with both families on the space of psi."""
    psi = np.asarray(psi)
    tot = 0.0
    for x, p in mu.items():
        PA, PB = A(x), B(x)
        for a in set(PA.elems) | set(PB.elems):
            v = (PA[a] - PB[a]) @ psi
            tot += float(p) * float(np.real(np.vdot(v, v)))
    return tot


def max_commutator(S: Strategy, G: gc.Game, pairs: Sequence | None = None) -> float:
    """max ||[A^x_a, (B^y_b)^T]|| over supported pairs, B transposed onto the first factor."""
    if not S.me:
        raise ParameterError("oracularizability is checked on maximally entangled presentations")
    worst = 0.0
    seen = set()
    for x, y, *_ in (pairs if pairs is not None else G.pairs()):
        if (x, y) in seen:
            continue
        seen.add((x, y))
        _, As = S.A(x).stack()
        _, Bs = S.B(y).stack()
        Bt = np.transpose(Bs, (0, 2, 1))
        AB = np.einsum("aij,bjk->abik", As, Bt)
        BA = np.einsum("bij,ajk->abik", Bt, As)
        C = AB - BA
        fro = float(np.sqrt(np.max(np.sum(np.abs(C) ** 2, axis=(2, 3)))))
        if fro > TOL:
            flat = C.reshape(-1, S.dA, S.dA)
            fro = max(float(np.linalg.norm(c, 2)) for c in flat)
        worst = max(worst, fro)
    return worst


def is_oracularizable(S: Strategy, G: gc.Game, tol: float = TOL) -> bool:
    return max_commutator(S, G) <= tol


# -- generalized Pauli measurements -----------------------------------------------------

def gen_pauli_obs(W: str, ctx: gf2p.FieldCtx, a: int) -> np.ndarray:
    """rho^W(a) on C^{2^p}; basis |b> labelled by polynomial words."""
    q = ctx.q
    M = np.zeros((q, q))
    if W == "X":
        pa = ctx.poly(a)
        for i in range(q):
            M[i ^ pa, i] = 1.0
    elif W == "Z":
        for i in range(q):
            M[i, i] = -1.0 if ctx.trace(ctx.mul(a, ctx.kappa(i))) else 1.0
    else:
        raise ParameterError("W must be 'X' or 'Z'")
    return M


def gen_pauli_pvm(W: str, ctx: gf2p.FieldCtx) -> Povm:
    """{rho^W_s}: rho^W(a) = sum_s (-1)^{Tr(as)} rho^W_s; outcomes are field elements."""
    q = ctx.q
    out = {}
    for s in range(q):
        if W == "Z":
            M = np.zeros((q, q))
            i = ctx.poly(s)
            M[i, i] = 1.0
        else:
            M = sum(((-1.0) ** ctx.trace(ctx.mul(a, s))) * gen_pauli_obs("X", ctx, a) for a in range(q)) / q
        out[s] = M
    return Povm(out)


def u2top(ctx: gf2p.FieldCtx, m: int = 1) -> np.ndarray:
    """U = sum_b |poly(b)><kappa(b)|, tensored over m registers."""
    q = ctx.q
    U = np.zeros((q, q))
    for b in range(q):
        U[ctx.poly(b), b] = 1.0
    return _kron(*[U] * m)


def qubit_pauli(W: str, u: int, n: int) -> np.ndarray:
    """X^u or Z^u on n qubits (qubit 0 is the most significant bit)."""
    P = PX if W == "X" else PZ
    return _kron(*[P if (u >> (n - 1 - i)) & 1 else I2 for i in range(n)])


@lru_cache(maxsize=None)
def _hadamard(n: int) -> np.ndarray:
    H = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)
    return _kron(*[H] * n)


def processed_pvm(W: str, n: int, f: Callable[[int], Any] = lambda t: t) -> Povm:
    """Data-processed n-qubit W-basis measurement: outcome f(t)."""
    N = 1 << n
    groups: dict = {}
    for t in range(N):
        groups.setdefault(f(t), []).append(t)
    out = {}
    for k, ts in groups.items():
        M = np.zeros((N, N))
        M[ts, ts] = 1.0
        if W == "X":
            H = _hadamard(n)
            M = H @ M @ H
        out[k] = M
    return Povm(out)


def parity_pvm(W: str, u: int, n: int) -> Povm:
    O = qubit_pauli(W, u, n)
    I = np.eye(1 << n)
    return Povm({0: (I + O) / 2, 1: (I - O) / 2})


# -- magic square ----------------------------------------------------------------------------

XZ = PX @ PZ
MS_OBS = {
    1: np.kron(I2, PZ), 2: np.kron(PZ, I2), 3: np.kron(PZ, PZ),
    4: np.kron(PX, I2), 5: np.kron(I2, PX), 6: np.kron(PX, PX),
    7: np.kron(PX, PZ), 8: np.kron(PZ, PX), 9: -np.kron(XZ, XZ),
}


def ms_povms(obs: Mapping[int, np.ndarray]) -> dict[str, Povm]:
    """Constraint and variable PVMs from nine +-1 observables (bit 0 <-> +1)."""
    d = next(iter(obs.values())).shape[0]
    I = np.eye(d)
    out = {}
    for v, O in obs.items():
        out[f"v{v}"] = Povm({0: (I + O) / 2, 1: (I - O) / 2})
    for ci, vs in enumerate(gc.MS_CONSTRAINTS):
        els = {}
        for a in range(8):
            M = I
            for pos, v in enumerate(vs):
                bit = (a >> (2 - pos)) & 1
                M = M @ ((I + (-1) ** bit * obs[v]) / 2)
            if np.abs(M).max() > 1e-12:
                els[a] = M
        out[f"c{ci + 1}"] = Povm(els)
    return out


def magic_square_strategy() -> Strategy:
    P = ms_povms(MS_OBS)
    return Strategy.symmetric_me(4, lambda q: P[q], "magic-square")


# -- Pauli basis test ---------------------------------------------------------------------------

def _pb_frame(n: int, name: str, z: int) -> Povm:
    k, _, _ = gc.pb_code(n)
    d = 1 << (n + 1)
    uX = gc.pb_encode(n, z >> k)
    uZ = gc.pb_encode(n, z & ((1 << k) - 1))
    ip = bin(uX & uZ).count("1") & 1
    I = np.eye(d)
    e = lambda P: P.tensor_id(right=2)
    if name.startswith("Pauli"):
        return e(processed_pvm(name[-1], n))
    if name.startswith("Coord"):
        u = uX if name == "CoordX" else uZ
        return e(processed_pvm(name[-1], n, lambda t, u=u: t & u))
    if name in ("CommX", "CommZ"):
        if ip:
            return Povm({0: I})
        return e(parity_pvm(name[-1], uX if name == "CommX" else uZ, n))
    if name == "Comm":
        if ip:
            return Povm({0: I})
        PXp, PZp = parity_pvm("X", uX, n), parity_pvm("Z", uZ, n)
        return e(Povm({(a << 1) | b: PXp[a] @ PZp[b] for a in (0, 1) for b in (0, 1)}))
    if not ip:
        return Povm({0: I})
    Pn, Qn, In = qubit_pauli("X", uX, n), qubit_pauli("Z", uZ, n), np.eye(1 << n)
    obs = {
        1: np.kron(Pn, I2), 2: np.kron(In, PZ), 3: np.kron(Pn, PZ),
        4: np.kron(In, PX), 5: np.kron(Qn, I2), 6: np.kron(Qn, PX),
        7: np.kron(Pn, PX), 8: np.kron(Qn, PZ), 9: -np.kron(Qn @ Pn, XZ),
    }
    P = ms_povms(obs)
    if name.startswith("Variable"):
        return P["v" + name[len("Variable"):]]
    return P["c" + name[len("Constraint"):]]


def pauli_basis_strategy(n: int) -> Strategy:
    fr = lambda q: _pb_frame(n, gc.PB_VERTICES[q[0]], q[1])
    return Strategy.symmetric_me(1 << (n + 1), fr, f"pauli-basis-{n}")


# -- low-degree tests ------------------------------------------------------------------------------

def _ldt_answer(f: IdPoly, p: int, m: int, d: int, q) -> Any:
    ctx = f.ctx
    v, z = q
    parts = gc.ldt_parse(p, m, v, z)
    u = parts["u"]
    if v == 0:
        return f(u)
    if v == 1:
        j = parts["j"]
        dirv = [ctx.one if i == j else 0 for i in range(m)]
        L = d + 1
    else:
        dirv = parts["v"]
        L = d * m + 1
    g = restrict_line(f, (dirv, u))
    c = list(univariate_coeffs(g))
    c = (c + [0] * L)[:L]
    return tuple(c)


def ldt_classical_strategy(f: IdPoly, d: int | None = None) -> Strategy:
    d = f.d if d is None else d
    p, m = f.ctx.p, f.m
    return Strategy.deterministic(lambda q: _ldt_answer(f, p, m, d, q), name="ldt-classical")


def sldt_classical_strategy(fs: Sequence[IdPoly], d: int | None = None) -> Strategy:
    f0 = fs[0]
    d = f0.d if d is None else d
    p, m = f0.ctx.p, f0.m
    return Strategy.deterministic(lambda q: tuple(_ldt_answer(f, p, m, d, q) for f in fs), name="sldt-classical")


# -- lifts --------------------------------------------------------------------------------------------

def _require_perfect(G: gc.Game, S: Strategy, check: bool) -> None:
    if not S.symmetric:
        raise ParameterError("lifting needs a symmetric strategy on a maximally entangled state")
    if check:
        v = eval_value(G, S)
        if v < 1 - TOL:
            raise ParameterError(f"strategy is not perfect (value {v})")
        if not is_oracularizable(S, G):
            raise ParameterError("strategy is not oracularizable")


def lift_oracularize(G: gc.Game, S: Strategy, check: bool = True) -> Strategy:
    _require_perfect(G, S, check)
    BT = lambda y: S.B(y).transpose()

    def fr(q):
        lab, c = q
        if lab == "A":
            return S.A(c)
        if lab == "B":
            return BT(c)
        PA, PB = S.A(c[0]), BT(c[1])
        els = {}
        for a, Ma in PA.elems.items():
            for b, Mb in PB.elems.items():
                M = Ma @ Mb
                if np.abs(M).max() > 1e-12:
                    els[(a, b)] = M
        return Povm(els)

    return Strategy.symmetric_me(S.dA, fr, f"ora({S.name})")


def lift_anchor(G: gc.Game, S: Strategy, AG: gc.Game | None = None, check: bool = True) -> Strategy:
    _require_perfect(G, S, check)
    AG = AG or gc.anchor(G)
    unq = AG.meta["unq"]
    d = S.dA
    fr = lambda q: Povm({gc.BOT: np.eye(d)}) if unq(q) == gc.BOT else S.frame(unq(q))
    return Strategy.symmetric_me(d, fr, f"anchor({S.name})")


class ProductStrategy(Strategy):
    """Tensor product of component strategies on a product of ME states."""

    def __init__(self, parts: Sequence[Strategy], split: Callable[[Any], tuple]):
        self.parts = list(parts)
        d = math.prod(P.dA for P in parts)
        if d > DIM_CAP:
            raise CapacityError(f"product dimension {d} exceeds {DIM_CAP}")

        def fr(q):
            out = None
            for P, c in zip(self.parts, split(q)):
                F = P.frame(c)
                out = F if out is None else out.kron(F)
            return out.relabel(_flatten_pair(len(self.parts)))

        super().__init__(me_state(d), d, d, fr, lambda q: fr(q).transpose(), "product", fr, True)


def _flatten_pair(r: int):
    def f(a):
        out = []
        for _ in range(r - 1):
            a, last = a
            out.append(last)
        out.append(a)
        return tuple(reversed(out))
    return f


def lift_repeat(G: gc.Game, S: Strategy, r: int, RG: gc.Game | None = None, check: bool = True) -> Strategy:
    _require_perfect(G, S, check)
    RG = RG or gc.repeat(G, r)
    if r == 1:
        return S
    return ProductStrategy([S] * r, RG.meta["split"])


def lift_detype(G: gc.Game, S: Strategy, DG: gc.Game | None = None, check: bool = True) -> Strategy:
    _require_perfect(G, S, check)
    DG = DG or gc.detype_game(G)
    parse = DG.meta["parse"]
    t0 = G.dist.t
    d = S.dA

    def fr(q):
        pq = parse(q)
        if pq is None or pq[0] >= t0:
            return Povm({gc.STAR: np.eye(d)})
        return S.frame(pq)

    return Strategy.symmetric_me(d, fr, f"detype({S.name})", {"base_strategy": S})


def lift_strategy(G: gc.Game, S: Strategy, op: str, r: int = 2, check: bool = True) -> tuple[gc.Game, Strategy]:
    """Transform the game and lift a perfect oracularizable strategy along."""
    if op == "oracularize":
        return gc.oracularize(G), lift_oracularize(G, S, check)
    if op == "anchor":
        AG = gc.anchor(G)
        return AG, lift_anchor(G, S, AG, check)
    if op == "repeat":
        RG = gc.repeat(G, r)
        return RG, lift_repeat(G, S, r, RG, check)
    if op == "detype":
        DG = gc.detype_game(G)
        return DG, lift_detype(G, S, DG, check)
    raise ParameterError(f"unknown transformation {op!r}")


# -- introspection -------------------------------------------------------------------------------------

def introspection_honest_strategy(IG: gc.Game, S: Strategy, check: bool = True) -> Strategy:
    """Honest strategy for an introspection game built from a perfect symmetric strategy S of its base."""
    G: gc.Game = IG.meta["base"]
    _require_perfect(G, S, check)
    N, k, names = IG.meta["N"], IG.meta["k"], IG.meta["names"]
    ic: gc.IntroCtx = IG.meta["ctx"]
    n = ic.n
    dA = S.dA
    D = (1 << (N + 1)) * dA
    if D > DIM_CAP:
        raise CapacityError(f"introspection dimension {D} exceeds {DIM_CAP}")
    pad = 1 << (N - n + 1)     # unused Pauli-basis qubits plus the extra qubit
    Ireg = np.eye(1 << n)

    def on_regs(M: np.ndarray, A: np.ndarray | None = None) -> np.ndarray:
        return _kron(M, np.eye(pad), A if A is not None else np.eye(dA))

    def zproj(f: Callable[[int], Any]) -> dict:
        return processed_pvm("Z", n, f).elems

    def xproj(f: Callable[[int], Any]) -> dict:
        return processed_pvm("X", n, f).elems

    def fr(q):
        v, z = q
        nm = names[v]
        if nm in gc.PB_INDEX:
            return _pb_frame(N, nm, z).tensor_id(right=dA)
        if nm.startswith("GenPauli"):
            return Povm({s: on_regs(M) for s, M in processed_pvm(nm[-1], n).elems.items()})
        kind, P = nm.split(".")
        L = ic.L(P)
        if kind == "Intro":
            els = {}
            for x, Mz in zproj(L.eval).items():
                for a, Ma in S.frame(x).elems.items():
                    els[(x, a)] = on_regs(Mz, Ma)
            return Povm(els)
        if kind == "Sample":
            els = {}
            for s, Mz in zproj(lambda s: s).items():
                for a, Ma in S.frame(L.eval(s)).elems.items():
                    els[(s, a)] = on_regs(Mz, Ma)
            return Povm(els)
        i = k - 1 if kind == "Read" else int(kind[len("Hide"):])
        upto_line = ic.below[i] if kind != "Read" else ic.below[k]
        after = ic.n and (L.vmask & ~ic.below[i + 1])
        els = {}
        for tl, Mz in zproj(lambda s: L.eval(s) & upto_line).items():
            g = lambda r, tl=tl: (ic.tperp(P, i, tl, r), r & after)
            for (tp, r), Mx in xproj(g).items():
                M = Mz @ Mx
                if np.abs(M).max() < 1e-12:
                    continue
                if kind == "Read":
                    for a, Ma in S.frame(tl).elems.items():
                        els[(tp, tl, a)] = on_regs(M, Ma)
                else:
                    els[(tl, tp, r)] = on_regs(M)
        return Povm(els)

    return Strategy.symmetric_me(D, fr, f"intro({S.name})")


def trivial_strategy(f: Callable[[Any], Any], name: str = "trivial") -> Strategy:
    return Strategy.deterministic(f, name=name)


__all__ = [
    "Povm", "Strategy", "ProductStrategy", "me_state", "joint", "correlation", "eval_value", "pair_values",
    "delta_sync", "dist_consistent", "dist_close", "max_commutator", "is_oracularizable", "gen_pauli_obs",
    "gen_pauli_pvm", "u2top", "qubit_pauli", "processed_pvm", "parity_pvm", "MS_OBS", "ms_povms",
    "magic_square_strategy", "pauli_basis_strategy", "ldt_classical_strategy", "sldt_classical_strategy",
    "lift_oracularize", "lift_anchor", "lift_repeat", "lift_detype", "lift_strategy",
    "introspection_honest_strategy", "trivial_strategy", "eval_detyped_exhaustive", "TOL", "DIM_CAP",
]
