"""Independent reference implementations used as test oracles.

Nothing here imports the code under test except for plain data access.
"""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction


def poly_mul_mod(a: int, b: int, mod: int, p: int) -> int:
    """Product of two polynomial-basis words modulo an irreducible of degree p."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> p & 1:
            a ^= mod
    return out


def poly_trace(a: int, mod: int, p: int) -> int:
    """Tr(a) = a + a^2 + ... + a^{2^{p-1}} in the polynomial basis; returns 0 or 1."""
    acc, x = 0, a
    for _ in range(p):
        acc ^= x
        x = poly_mul_mod(x, x, mod, p)
    assert acc in (0, 1)
    return acc


def self_dual_normal_bases(mod: int, p: int) -> list[tuple[int, ...]]:
    """All conjugate sets (a, a^2, ..., a^{2^{p-1}}) with Tr(e_i e_j) = delta_ij."""
    found = []
    for a in range(1, 1 << p):
        conj = [a]
        for _ in range(p - 1):
            conj.append(poly_mul_mod(conj[-1], conj[-1], mod, p))
        ok = all(poly_trace(poly_mul_mod(x, y, mod, p), mod, p) == int(i == j)
                 for i, x in enumerate(conj) for j, y in enumerate(conj))
        if ok:
            found.append(tuple(conj))
    return found


def dense_eval(ctx, terms: dict, s) -> int:
    """Term-by-term evaluation with repeated multiplication (no pow tables)."""
    acc = 0
    for e, c in terms.items():
        t = c
        for x, k in zip(s, e):
            for _ in range(k):
                t = ctx.mul(t, x)
        acc ^= t
    return acc


def typed_law_by_simulation(t: int, edges, funcs, seeds) -> dict:
    """Simulate the typed sampler: (v0, v1) uniform on T^2, keep edges, b uniform, shared seed.

    Returns the law of ((v_b, x_b), (v_{1-b}, x_{1-b})) as exact fractions.
    """
    E = {frozenset(e) for e in edges}
    cnt: Counter = Counter()
    for v0, v1 in itertools.product(range(t), repeat=2):
        if frozenset((v0, v1)) not in E:
            continue
        for b in (0, 1):
            for s in seeds:
                q = [(v0, funcs[v0](s)), (v1, funcs[v1](s))]
                cnt[(q[b], q[1 - b])] += 1
    tot = sum(cnt.values())
    return {k: Fraction(v, tot) for k, v in cnt.items()}


def brute_classical_value(pairs, answers_A, answers_B, D) -> Fraction:
    """Enumerate every deterministic strategy pair (tiny games only)."""
    XA = sorted({x for x, _, _ in pairs}, key=repr)
    XB = sorted({y for _, y, _ in pairs}, key=repr)
    best = Fraction(0)
    for fa in itertools.product(*[answers_A(x) for x in XA]):
        A = dict(zip(XA, fa))
        for fb in itertools.product(*[answers_B(y) for y in XB]):
            B = dict(zip(XB, fb))
            v = sum((p for x, y, p in pairs if D(x, y, A[x], B[y])), Fraction(0))
            best = max(best, v)
    return best
