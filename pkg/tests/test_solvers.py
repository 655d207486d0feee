from __future__ import annotations

import time
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlgf import gamecore as gc
from nlgf import quantlab as ql
from nlgf import solvers as sv
from nlgf.errors import CapacityError
from oracles import brute_classical_value


def _brute(G):
    return brute_classical_value(G.pairs(), lambda q: G.answers("A", q), lambda q: G.answers("B", q), G.D)


def test_small_values():
    assert sv.classical_value_exact(gc.accept_game()).value == 1
    assert sv.classical_value_exact(gc.reject_game()).value == Fraction(1, 3)
    assert sv.classical_value_exact(gc.anchor(gc.reject_game())).value == Fraction(5, 6)
    assert sv.classical_value_exact(gc.repeat(gc.reject_game(), 3)).value == Fraction(1, 27)


def test_witness_attains_value():
    G = gc.reject_game()
    rep = sv.classical_value_exact(G)
    assert sv.deterministic_value(G, rep.witness["A"], rep.witness["B"]) == rep.value


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_exact_matches_brute_force(seed):
    G = gc.random_tiny_game(seed)
    assert sv.classical_value_exact(G).value == _brute(G)


@settings(max_examples=15)
@given(st.integers(0, 10_000))
def test_repeat_supermultiplicative(seed):
    G = gc.random_tiny_game(seed)
    v = sv.classical_value_exact(G).value
    assert sv.classical_value_exact(gc.repeat(G, 2)).value >= v ** 2


def test_quantum_lb_trivial_cases():
    assert sv.quantum_lower_bound(gc.accept_game(), 1).value >= 1 - 1e-12
    rep = sv.quantum_lower_bound(gc.reject_game(), 2, iters=3, restarts=5)
    assert rep.value <= 1 / 3 + 1e-6
    with pytest.raises(CapacityError):
        sv.quantum_lower_bound(gc.accept_game(), 0)


def test_quantum_lb_magic_square_beats_classical():
    G = gc.magic_square_game()
    warm = sv.classical_value_exact(G).witness
    t = time.perf_counter()
    rep = sv.quantum_lower_bound(G, 4, iters=6, restarts=2, seed=1, warm_start=warm)
    assert time.perf_counter() - t < 120
    assert rep.value >= 49 / 51 - 1e-9


def test_quantum_lb_reproducible_and_monotone():
    G = gc.random_tiny_game(7)
    a = sv.quantum_lower_bound(G, 2, iters=4, seed=3, restarts=3)
    b = sv.quantum_lower_bound(G, 2, iters=4, seed=3, restarts=3)
    assert a.value == b.value and a.extra == b.extra
    for tr in a.extra["traces"]:
        assert all(y >= x - 1e-9 for x, y in zip(tr, tr[1:]))


def test_chain_passes():
    rep = sv.verify_completeness_chain(gc.magic_square_game(), ql.magic_square_strategy(),
                                       ["oracularize", "anchor", "repeat(2)"])
    assert rep["passed"] and rep["failed_stage"] is None
    assert [s["op"] for s in rep["stages"]] == ["oracularize", "anchor", "repeat(2)"]


def test_chain_negative_control():
    G = gc.magic_square_game()
    broken = gc.Game("broken", G.dist, lambda x, y, a, b: False, G.answers, synchronous=True)
    rep = sv.verify_completeness_chain(broken, ql.magic_square_strategy(), ["oracularize", "anchor"])
    assert not rep["passed"]
    assert rep["failed_stage"] == 1


def test_report_serializes():
    d = sv.classical_value_exact(gc.reject_game()).to_dict()
    assert d["value"]["fraction"] == "1/3"
