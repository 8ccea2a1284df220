from __future__ import annotations

import pytest

import oracles as O
from bindsig.catalog import (
    FIX_SIG,
    PLUS,
    Y_CURRY,
    Y_TURING,
    LCWithFixModel,
    ListMonoidModel,
    Presentation,
    all_bundles,
    app,
    bundle_algebraic_theory,
    bundle_commutative,
    bundle_idempotent,
    bundle_lc_fix,
    bundle_monoid,
    church,
    fix_two,
    lc_two,
)
from bindsig.models import SyntacticModel, Verdict, check_model, fold
from bindsig.oracle import congruence_oracle
from bindsig.presentation import EMPTY_TWO, Orientation, Regime, TwoSignature, pushout_as_algebraic, renaming_morphism
from bindsig.recursion import satisfies
from bindsig.rewriting import NotAPattern, compile_all, joinable, normalize
from bindsig.signature import EMPTY
from bindsig.syntax import parse_term
from bindsig.terms import Con, MetaVar, Var

BUNDLES = all_bundles()


@pytest.mark.parametrize("name", sorted(BUNDLES))
def test_bundle_is_well_formed(name):
    b = BUNDLES[name]
    for eq in b.two.equations:
        eq.check(b.sig)
    rules = compile_all(b.two)
    oriented = [e for e in b.two.equations if e.orient is not Orientation.NONE]
    assert len(rules) >= len(oriented)
    assert b.model().signature == b.sig


@pytest.mark.parametrize("name", sorted(BUNDLES))
def test_bundle_golden_pairs(name):
    b = BUNDLES[name]
    model = b.model()
    for lhs, rhs, want in b.golden:
        t, names = parse_term(lhs, b.sig)
        u, _ = parse_term(rhs, b.sig, names)
        ctx = len(names)
        a, c = fold(t, model, ctx), fold(u, model, ctx)
        assert model.equal(a, c) is want, (lhs, rhs)


@pytest.mark.parametrize("name", sorted(BUNDLES))
def test_bundle_reference_model_passes_check_model(name):
    b = BUNDLES[name]
    report = check_model(b.model(), depth=2, contexts=(0, 1, 2), budget=2000)
    assert report.ok


# -- monoid ----------------------------------------------------------------------------------

def test_monoid_normalizations():
    b = bundle_monoid()
    rules = compile_all(b.two)
    for lhs, rhs in [("m(e, x)", "x"), ("m(m(x, y), z)", "m(x, m(y, z))")]:
        t, names = parse_term(lhs, b.sig)
        assert normalize(t, rules).term == parse_term(rhs, b.sig, names)[0]
    assert b.two.regime is Regime.TERMINATING


def test_monoid_fold_into_lists():
    t, names = parse_term("m(x, m(y, e))", bundle_monoid().sig)
    model = ListMonoidModel()
    assert model.render(fold(t, model), names) == "[x, y]"
    assert fold(t, model) == O.flatten(t)


def test_presented_monoid_coincides_with_monoid():
    ours = compile_all(bundle_monoid().two)
    presented = compile_all(BUNDLES["monoid_presented"].two)
    assert [(r.name, r.pattern, r.template) for r in ours] == [(r.name, r.pattern, r.template) for r in presented]


# -- lambda calculus ---------------------------------------------------------------------------

def test_church_addition_with_named_reducer():
    rules = compile_all(lc_two())
    t = app(PLUS, church(2), church(2))
    assert joinable(t, church(4), rules, 100) is Verdict.EQUAL
    named = O.beta_eta_normal(O.from_nameless(t, []))
    assert O.to_nameless(named, []) == church(4)
    assert O.to_nameless(O.church(4), []) == church(4)


def test_eta_with_weakened_function():
    rules = compile_all(lc_two())
    t = Con("app", (Con("abs", (Var(0),), (1,)), Var(0)), (0, 0))
    expanded = Con("abs", (Con("app", (Var(1), Var(0)), (0, 0)),), (1,))
    assert joinable(expanded, Var(0), rules, 10, 1) is Verdict.EQUAL
    assert joinable(t, Var(0), rules, 10, 1) is Verdict.EQUAL


# -- fixpoints ---------------------------------------------------------------------------------

def test_lc_fix_is_the_pushout_over_the_empty_base():
    f = renaming_morphism(EMPTY, lc_two().sig, {})
    g = renaming_morphism(EMPTY, FIX_SIG, {})
    result, _, _ = pushout_as_algebraic(EMPTY_TWO, (f, lc_two()), (g, fix_two()))
    assert result == bundle_lc_fix().two


def test_fix_translation_and_unfolding():
    model = LCWithFixModel(fuel=50)
    body = Con("app", (Var(1), Var(0)), (0, 0))
    t = Con("fix", (body,), (1,))
    image = fold(t, model, 1)
    assert image == app(Y_CURRY, Con("abs", (body,), (1,)))
    unfolded = fold(Con("app", (Var(0), t), (0, 0)), model, 1)
    assert model.equal(image, unfolded) is Verdict.EQUAL


def test_turing_combinator_gives_a_different_fold_with_the_same_law():
    curry, turing = LCWithFixModel(fuel=50), LCWithFixModel(Y_TURING, fuel=50)
    t = Con("fix", (Con("app", (Var(1), Var(0)), (0, 0)),), (1,))
    a, b = fold(t, curry, 1), fold(t, turing, 1)
    assert a != b
    unfolded = Con("app", (Var(0), t), (0, 0))
    assert turing.equal(b, fold(unfolded, turing, 1)) is Verdict.EQUAL


def test_fix_without_its_equation_is_satisfied_vacuously():
    bare = TwoSignature(FIX_SIG, (), Regime.CONFLUENT)
    assert check_model(SyntacticModel(bare.sig), depth=2).ok
    assert bare.equations == () and compile_all(bare) == []


def test_fix_orientation_is_forced():
    (eq,) = fix_two().equations
    assert eq.orient is Orientation.RL


# -- first-order presentations ------------------------------------------------------------------

def test_commutative_presentation_is_unoriented():
    b = bundle_commutative()
    assert b.two.regime is Regime.UNORIENTED and compile_all(b.two) == []
    p = congruence_oracle(b.two, 2, 2)
    t, names = parse_term("m(a, b)", b.sig)
    assert p.same(t, parse_term("m(b, a)", b.sig, names)[0])


def test_idempotent_presentation():
    b = bundle_idempotent()
    assert b.two.regime is Regime.TERMINATING
    t, names = parse_term("u(u(u(x)))", b.sig)
    assert normalize(t, compile_all(b.two)).term == parse_term("u(x)", b.sig, names)[0]


def test_variable_left_side_is_not_a_pattern():
    loose = Presentation((("f", 1),), (("grow", "x", "f(x)", Orientation.LR),))
    b = bundle_algebraic_theory("grow", loose)
    with pytest.raises(NotAPattern):
        compile_all(b.two)
    flipped = Presentation((("f", 1),), (("shrink", "x", "f(x)", Orientation.RL),))
    (rule,) = compile_all(bundle_algebraic_theory("shrink", flipped).two)
    assert rule.pattern == Con("f", (MetaVar("M0", ()),), (0,))
    assert rule.template == MetaVar("M0", ())


def test_free_syntax_does_not_satisfy_a_presentation():
    two = bundle_algebraic_theory("grow", Presentation((("f", 1),), (("g", "f(x)", "f(f(x))", Orientation.LR),))).two
    assert satisfies(SyntacticModel(two.sig), two.equations[0], (1,), 2).distinct > 0
