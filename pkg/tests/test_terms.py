from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from bindsig import terms as T
from bindsig.catalog import FIX_SIG, LC_SIG, MONOID_SIG
from bindsig.signature import AlgebraicSignature
from bindsig.terms import Con, ScopeError, Var, con, var

LCF = AlgebraicSignature(LC_SIG.ops + FIX_SIG.ops)


def app(f, a):
    return Con("app", (f, a), (0, 0))


def lam(b):
    return Con("abs", (b,), (1,))


# -- construction and scope ------------------------------------------------------------------

def test_var_and_unit_substitution():
    assert var(0) == Var(0)
    u = lam(Var(0))
    assert T.subst(Var(0), [u]) == u


def test_var_rejects_negative():
    with pytest.raises(ScopeError):
        var(-1)


def test_con_checks_arguments():
    t = con(LC_SIG, "app", [lam(Var(0)), Var(0)])
    assert t == app(lam(Var(0)), Var(0))
    assert T.scope(t) == 1
    assert con(MONOID_SIG, "e", []) == Con("e", (), ())
    assert T.scope(lam(Var(0))) == 0
    with pytest.raises(ScopeError):
        con(LC_SIG, "app", [Var(0)])


def test_check_scope():
    T.check_scope(lam(Var(1)), 1, LC_SIG)
    with pytest.raises(ScopeError):
        T.check_scope(lam(Var(1)), 0, LC_SIG)
    with pytest.raises(ScopeError):
        T.check_scope(Con("fix", (Var(0),), (1,)), 0, LC_SIG)


# -- renaming and substitution ----------------------------------------------------------------

def test_rename_examples():
    assert T.rename(Var(1), lambda i: i + 1) == Var(2)
    assert T.rename(app(Var(0), Var(1)), [1, 0]) == app(Var(1), Var(0))
    assert T.shift(lam(Var(0))) == lam(Var(0))
    assert T.shift(lam(Var(1))) == lam(Var(2))


def test_subst_duplicates_and_goes_under_binders():
    u = app(Var(3), Var(4))
    assert T.subst(app(Var(0), Var(0)), [u]) == app(u, u)
    # under a binder the image is shifted and bound index 0 is kept
    assert T.subst(lam(app(Var(0), Var(1))), [Var(5)]) == lam(app(Var(0), Var(6)))


def test_subst_out_of_range():
    with pytest.raises(ScopeError):
        T.subst(Var(2), [Var(0)])


def test_memo_does_not_change_results():
    rng = random.Random(1)
    memo: dict = {}
    for _ in range(200):
        t = T.random_term(LCF, 2, 4, rng)
        sigma = [T.random_term(LCF, 1, 3, rng) for _ in range(2)]
        assert T.subst(t, sigma, memo) == T.subst(t, sigma)


# -- against named terms -------------------------------------------------------------------

CONTEXT = ["a", "b", "c", "d"]


def test_renaming_agrees_with_named_renamer():
    rng = random.Random(0)
    for _ in range(100):
        t = T.random_term(LC_SIG, 2, 4, rng)
        named = O.from_nameless(t, CONTEXT[:2])
        renamed = O.named_subst(named, {"a": O.V("c"), "b": O.V("a")})
        # a -> c (index 2), b -> a (index 0)
        assert O.to_nameless(renamed, CONTEXT[:3]) == T.rename(t, [2, 0])


def test_substitution_agrees_with_named_substitution():
    rng = random.Random(3)
    for _ in range(100):
        t = T.random_term(LC_SIG, 2, 4, rng)
        images = [T.random_term(LC_SIG, 2, 3, rng) for _ in range(2)]
        env = {x: O.from_nameless(s, ["c", "d"]) for x, s in zip("ab", images)}
        got = O.to_nameless(O.named_subst(O.from_nameless(t, ["a", "b"]), env), ["c", "d"])
        assert got == T.subst(t, images)


# -- enumeration ----------------------------------------------------------------------------

def test_enumeration_small_cases():
    assert list(T.enumerate_terms(LC_SIG, 1, 1)) == [Var(0)]
    assert list(T.enumerate_terms(MONOID_SIG, 0, 1)) == [Con("e", (), ())]


@pytest.mark.parametrize("sig", [LC_SIG, MONOID_SIG, LCF], ids=["lc", "monoid", "lc_fix"])
@pytest.mark.parametrize("ctx", [0, 1, 2])
@pytest.mark.parametrize("depth", [1, 2, 3])
def test_enumeration_counts_match_formula(sig, ctx, depth):
    terms = T.enumerate_terms(sig, ctx, depth)
    assert len(terms) == O.count_terms([op.arity for op in sig.ops], ctx, depth)
    assert len(set(terms)) == len(terms)
    assert T.count_terms(sig, ctx, depth) == len(terms)
    for t in terms:
        assert T.height(t) <= depth and T.scope(t) <= ctx


def test_lc_counts_frozen():
    assert T.count_terms(LC_SIG, 1, 3) == 26
    assert T.count_terms(LC_SIG, 2, 3) == 99


def test_budget_truncates():
    out = T.enumerate_terms(LC_SIG, 2, 3, budget=10)
    assert len(out) == 10 and out.truncated


def test_random_term_in_empty_context():
    rng = random.Random(0)
    for _ in range(50):
        t = T.random_term(LC_SIG, 0, 3, rng)
        assert T.scope(t) == 0 and T.height(t) <= 3
    with pytest.raises(ValueError):
        T.random_term(LC_SIG, 0, 1, rng)


# -- properties -------------------------------------------------------------------------------

def lc_terms(ctx: int, depth: int = 4):
    return st.integers(0, 2**32 - 1).map(lambda s: T.random_term(LCF, ctx, depth, random.Random(s)))


@settings(max_examples=150, deadline=None)
@given(lc_terms(2), lc_terms(2), lc_terms(2), lc_terms(1), lc_terms(1))
def test_substitution_is_associative(t, s0, s1, d0, d1):
    sigma, delta = [s0, s1], [d0, d1]
    assert T.subst(T.subst(t, sigma), delta) == T.subst(t, T.compose_subst(sigma, delta))


@settings(max_examples=150, deadline=None)
@given(lc_terms(2))
def test_identity_substitution_and_renaming(t):
    assert T.subst(t, T.identity_subst(2)) == t
    assert T.rename(t, [0, 1]) == t
    assert T.rename(T.rename(t, [1, 0]), [1, 0]) == t


@settings(max_examples=150, deadline=None)
@given(lc_terms(2), st.permutations([0, 1, 2]))
def test_renaming_is_substitution_by_variables(t, perm):
    assert T.rename(t, perm[:2]) == T.subst(t, [Var(i) for i in perm[:2]])


@settings(max_examples=100, deadline=None)
@given(lc_terms(1), lc_terms(0, 3))
def test_shift_then_instantiate_is_identity(t, u):
    assert T.instantiate_one(T.shift(t), u, 1) == t


def test_exhaustive_monad_laws_small():
    tally = T.check_monad_laws(MONOID_SIG, contexts=(0, 1), depth=2, subst_depth=2)
    assert tally.ok
    assert tally.checks["associativity"] > 0
