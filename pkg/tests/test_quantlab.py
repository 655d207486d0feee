from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nlgf import gamecore as gc
from nlgf import gf2p
from nlgf import quantlab as ql
from nlgf.errors import InvariantError, ParameterError
from nlgf.rng import make_rng
from nlgf.suite import pauli_identities


def _rand_unitary(d, rng):
    Q, R = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


# -- generalized Paulis ----------------------------------------------------------------

def test_p1_paulis_are_qubit_paulis():
    F = gf2p.build_field(1)
    assert np.array_equal(ql.gen_pauli_obs("X", F, 1), ql.PX)
    assert np.array_equal(ql.gen_pauli_obs("Z", F, 1), ql.PZ)
    assert np.array_equal(ql.u2top(F), np.eye(2))


@pytest.mark.parametrize("p", [1, 3, 5])
def test_rho_zero_is_identity(p):
    F = gf2p.build_field(p)
    for W in "XZ":
        assert np.array_equal(ql.gen_pauli_obs(W, F, 0), np.eye(F.q))
    with pytest.raises(ParameterError):
        ql.gen_pauli_obs("Y", F, 1)


def test_p3_identities_exhaustive():
    errs = pauli_identities(3)
    assert all(e <= 1e-12 for e in errs.values())


def test_p3_twisted_commutation_is_not_trivial():
    F = gf2p.build_field(3)
    anti = sum(F.trace(F.mul(a, b)) for a, b in itertools.product(range(8), repeat=2))
    assert 0 < anti < 64
    a, b = next((a, b) for a, b in itertools.product(range(8), repeat=2) if F.trace(F.mul(a, b)))
    X, Z = ql.gen_pauli_obs("X", F, a), ql.gen_pauli_obs("Z", F, b)
    assert np.allclose(X @ Z, -Z @ X)


def test_intertwining_z_branch_all_s():
    F = gf2p.build_field(3)
    U = ql.u2top(F)
    P = ql.gen_pauli_pvm("Z", F)
    Q = ql.processed_pvm("Z", 3)
    for s in range(8):
        assert np.abs(U @ Q[s] @ U.T - P[s]).max() <= 1e-12


def test_generalized_pvm_resolves_observable():
    F = gf2p.build_field(3)
    for W in "XZ":
        P = ql.gen_pauli_pvm(W, F)
        P.validate(projective=True)
        for a in range(8):
            O = sum((-1) ** F.trace(F.mul(a, s)) * P[s] for s in range(8))
            assert np.abs(O - ql.gen_pauli_obs(W, F, a)).max() <= 1e-12


# -- states ------------------------------------------------------------------------------

def test_me_state():
    assert np.array_equal(ql.me_state(1), np.ones(1))
    assert np.allclose(ql.me_state(2), np.array([1, 0, 0, 1]) / np.sqrt(2))
    with pytest.raises(ParameterError):
        ql.me_state(0)


@pytest.mark.parametrize("seed", range(5))
def test_switching_identity(seed):
    A = make_rng(seed).normal(size=(4, 4))
    psi = ql.me_state(4)
    assert np.abs(np.kron(A, np.eye(4)) @ psi - np.kron(np.eye(4), A.T) @ psi).max() <= 1e-12


# -- values ------------------------------------------------------------------------------

def test_accept_all_zero_strategy():
    assert ql.eval_value(gc.accept_game(), ql.trivial_strategy(lambda q: 0)) == 1


@given(st.integers(0, 2**20))
def test_reject_ceiling_random_strategies(seed):
    rng = make_rng(seed)
    d = 2
    U = _rand_unitary(d, rng)
    V = _rand_unitary(d, rng)
    proj = lambda W, i: np.outer(W[:, i], W[:, i].conj())
    A = {x: ql.Povm({0: proj(U, x), 1: proj(U, 1 - x)}) for x in (0, 1)}
    B = {y: ql.Povm({0: proj(V, y), 1: proj(V, 1 - y)}) for y in (0, 1)}
    psi = rng.normal(size=d * d) + 1j * rng.normal(size=d * d)
    psi /= np.linalg.norm(psi)
    S = ql.Strategy(psi, d, d, A.__getitem__, B.__getitem__)
    assert ql.eval_value(gc.reject_game(), S) <= 1 / 3 + 1e-9


def test_magic_square_strategy():
    G, S = gc.magic_square_game(), ql.magic_square_strategy()
    assert S.dA == 4
    assert abs(ql.eval_value(G, S) - 1) <= 1e-9
    assert ql.delta_sync(G, S) <= 1e-12
    assert ql.is_oracularizable(S, G)
    for x, y, _, w in ql.pair_values(G, S):
        assert abs(w - 1) <= 1e-9


def test_pauli_basis_n1():
    G, S = gc.pauli_basis_game(1), ql.pauli_basis_strategy(1)
    assert abs(ql.eval_value(G, S) - 1) <= 1e-9


@given(st.integers(0, 2**20))
def test_local_unitary_invariance(seed):
    rng = make_rng(seed)
    G, S = gc.magic_square_game(), ql.magic_square_strategy()
    U = _rand_unitary(4, rng)
    conj = lambda P: ql.Povm({a: U @ M @ U.conj().T for a, M in P.elems.items()})
    psi = np.kron(U, np.eye(4)) @ S.psi
    T = ql.Strategy(psi, 4, 4, lambda x: conj(S.A(x)), S.B)
    assert abs(ql.eval_value(G, T) - ql.eval_value(G, S)) <= 1e-9


# -- distances and commutation -------------------------------------------------------------

def test_symmetric_projective_has_zero_delta_sync():
    G = gc.reject_game()
    S = ql.trivial_strategy(lambda q: q)
    assert ql.delta_sync(G, S) == 0


def test_distances_zero_for_equal_families():
    P = ql.Povm({0: np.diag([1.0, 0]), 1: np.diag([0, 1.0])})
    mu = {0: 1.0}
    psi = ql.me_state(2)
    assert ql.dist_close(lambda x: P, lambda x: P, mu, np.array([0.6, 0.8])) == 0
    assert ql.dist_consistent(lambda x: P, lambda x: P.transpose(), mu, psi, 2, 2) <= 1e-15


@given(st.integers(0, 2**20))
def test_conversion_for_commuting_pvms(seed):
    rng = make_rng(seed)
    d = 4
    U = np.linalg.qr(rng.normal(size=(d, d)))[0]
    ga, gb = rng.integers(0, 2, d), rng.integers(0, 2, d)

    def pvm(g):
        return ql.Povm({o: U @ np.diag((g == o).astype(float)) @ U.T for o in (0, 1)})

    A, B = pvm(ga), pvm(gb)
    psi = rng.normal(size=d)
    psi /= np.linalg.norm(psi)
    mass = sum(float(psi @ A[o] @ B[o] @ psi) for o in (0, 1))
    close = ql.dist_close(lambda x: A, lambda x: B, {0: 1.0}, psi)
    assert close <= 2 * (1 - mass) + 1e-12


def test_non_commuting_detected():
    X = ql.Povm({0: (np.eye(2) + ql.PX) / 2, 1: (np.eye(2) - ql.PX) / 2})
    Z = ql.Povm({0: (np.eye(2) + ql.PZ) / 2, 1: (np.eye(2) - ql.PZ) / 2})
    S = ql.Strategy.symmetric_me(2, lambda q: X if q == 0 else Z)
    G = gc.reject_game()
    assert not ql.is_oracularizable(S, G)
    assert ql.max_commutator(S, G) > 0.4
    same = ql.Strategy.symmetric_me(2, lambda q: Z)
    assert ql.is_oracularizable(same, gc.accept_game())


# -- POVMs and serialization -----------------------------------------------------------------

def test_povm_validation():
    with pytest.raises(ParameterError):
        ql.Povm({})
    with pytest.raises(InvariantError):
        ql.Povm({0: np.eye(2) * 0.5}).validate()
    with pytest.raises(InvariantError):
        ql.Povm({0: np.diag([2.0, 0.0]), 1: np.diag([-1.0, 1.0])}).validate()
    with pytest.raises(InvariantError):
        ql.Povm({0: np.eye(2) / 2, 1: np.eye(2) / 2}).validate(projective=True)


def test_state_dimension_mismatch():
    with pytest.raises(ParameterError):
        ql.Strategy(np.ones(3) / np.sqrt(3), 2, 2, None, None)
    S = ql.Strategy(ql.me_state(2), 2, 2, lambda q: ql.Povm.trivial(0, 3), lambda q: ql.Povm.trivial(0, 2))
    with pytest.raises(ParameterError):
        S.A(0)


def test_strategy_roundtrip():
    G, S = gc.magic_square_game(), ql.magic_square_strategy()
    doc = S.to_dict(G.questions("A"), G.questions("B"))
    T = ql.Strategy.from_dict(doc)
    assert abs(ql.eval_value(G, T) - 1) <= 1e-9
    assert T.to_dict(G.questions("A"), G.questions("B")) == doc


def test_strategy_bad_payload():
    G, S = gc.accept_game(), ql.trivial_strategy(lambda q: 0)
    doc = S.to_dict(G.questions("A"), G.questions("B"))
    doc["state"] = "AAAA"
    with pytest.raises(ParameterError):
        ql.Strategy.from_dict(doc)


# -- lifts and introspection --------------------------------------------------------------------

@pytest.mark.parametrize("op", ["oracularize", "anchor", "repeat"])
def test_magic_square_lifts(op):
    G2, S2 = ql.lift_strategy(gc.magic_square_game(), ql.magic_square_strategy(), op)
    assert abs(ql.eval_value(G2, S2) - 1) <= 1e-9


def test_lift_requires_perfect_strategy():
    with pytest.raises(ParameterError):
        ql.lift_strategy(gc.reject_game(), ql.trivial_strategy(lambda q: 0), "anchor")


def test_product_evaluator_matches_enumeration():
    G = gc.magic_square_game()
    S = ql.magic_square_strategy()
    RG, RS = ql.lift_strategy(G, S, "repeat", r=2)
    fast = ql.eval_value(RG, RS)
    pairs = RG.pairs()[:200]
    slow = sum(float(p) * ql._pair_win(RG, RS, x, y) for x, y, p in pairs)
    assert abs(slow - sum(float(p) for *_, p in pairs)) <= 1e-9
    assert abs(fast - 1) <= 1e-9


def test_introspection_identity_game():
    IG = gc.introspection_game(gc.identity_cl_game(1), 1)
    IS = ql.introspection_honest_strategy(IG, ql.trivial_strategy(lambda x: x))
    assert IS.dA == 4
    assert abs(ql.eval_value(IG, IS) - 1) <= 1e-9
    from nlgf.suite import intro_marginal
    marg = intro_marginal(IG, IS)
    assert {k: round(v, 12) for k, v in marg.items() if v > 1e-12} == {(0, 0): 0.5, (1, 1): 0.5}


def test_introspection_rejects_non_cl_and_small_cap():
    with pytest.raises(ParameterError):
        gc.introspection_game(gc.reject_game(), 2)
    with pytest.raises(ParameterError):
        gc.introspection_game(gc.intro_test_game(), 1)
