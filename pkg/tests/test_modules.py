from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bindsig import terms as T
from bindsig.catalog import LC_SIG, MONOID_SIG, lc
from bindsig.models import HookModel, SyntacticModel, Verdict
from bindsig.modules import (
    SWAP,
    THETA,
    UNIT,
    Comp,
    Curry,
    Deriv,
    DerivM,
    Id,
    ModuleTypeError,
    OpInj,
    Proj,
    Prod,
    SigExpr,
    SigmaSubst,
    SigValue,
    Tau,
    Uncurry,
    Weaken,
    case,
    check_linearity,
    comp,
    deriv,
    evaluate,
    module_subst,
    op_tau,
    prod,
    theta_arity,
    tuple_,
    typecheck,
)
from bindsig.terms import Con, Var

SYN = SyntacticModel(LC_SIG)
THETA1 = deriv(THETA)


def app(f, a):
    return Con("app", (f, a), (0, 0))


# -- typing ------------------------------------------------------------------------------

def test_module_shapes():
    assert theta_arity((0, 0)) == Prod((THETA, THETA))
    assert theta_arity((1,)) == THETA1
    assert theta_arity(()) == UNIT
    assert prod(THETA) == THETA
    assert repr(Prod((THETA1, THETA))) == "(Θ′ × Θ)"


def test_curried_application_types():
    assert typecheck(Curry(op_tau("app")), LC_SIG) == (THETA, THETA1)


def test_identity_types():
    assert typecheck(Id(THETA1), LC_SIG) == (THETA1, THETA1)


def test_operation_injection_and_tau():
    assert typecheck(op_tau("abs"), LC_SIG) == (THETA1, THETA)
    assert typecheck(OpInj("app"), LC_SIG) == (Prod((THETA, THETA)), SigExpr(LC_SIG))
    assert typecheck(Tau(), LC_SIG) == (SigExpr(LC_SIG), THETA)


def test_mismatched_composition_is_rejected():
    with pytest.raises(ModuleTypeError):
        typecheck(Comp(Proj(0), Curry(op_tau("app"))), LC_SIG)
    with pytest.raises(ModuleTypeError):
        typecheck(Comp(op_tau("app"), op_tau("abs")), LC_SIG)


def test_unknown_operation_and_bad_projection():
    with pytest.raises(ModuleTypeError):
        typecheck(OpInj("fix"), LC_SIG)
    with pytest.raises(ModuleTypeError):
        typecheck(Proj(2), LC_SIG, Prod((THETA, THETA)))
    with pytest.raises(ModuleTypeError):
        typecheck(Proj(0), LC_SIG)


def test_tau_outside_ambient_rejected():
    with pytest.raises(ModuleTypeError):
        typecheck(Tau(MONOID_SIG), LC_SIG)


def test_case_must_cover_every_operation():
    with pytest.raises(ModuleTypeError):
        typecheck(case({"app": op_tau("app")}), LC_SIG)
    e = case({"app": comp(op_tau("app"), SWAP), "abs": op_tau("abs")})
    assert typecheck(e, LC_SIG) == (SigExpr(LC_SIG), THETA)


def test_derivation_uncurry_and_weaken_types():
    assert typecheck(DerivM(op_tau("abs")), LC_SIG) == (deriv(THETA, 2), THETA1)
    assert typecheck(Uncurry(Curry(op_tau("app"))), LC_SIG) == (Prod((THETA, THETA)), THETA)
    assert typecheck(Weaken(THETA), LC_SIG) == (THETA, THETA1)
    assert typecheck(SigmaSubst(), LC_SIG) == (Prod((THETA1, THETA)), THETA)
    with pytest.raises(ModuleTypeError):
        typecheck(Uncurry(op_tau("abs")), LC_SIG)


# -- evaluation --------------------------------------------------------------------------

def test_sigma_subst_on_syntax():
    t = app(Var(1), Var(0))
    out = evaluate(SigmaSubst(), SYN, 1, (t, Var(0)))
    assert out == app(Var(0), Var(0))


def test_curried_application_on_syntax():
    t = lc("abs(x. x)")
    out = evaluate(Curry(op_tau("app")), SYN, 0, t)
    assert out == app(t, Var(0))
    # in a nonempty context the argument is weakened past the new variable
    assert evaluate(Curry(op_tau("app")), SYN, 1, Var(0)) == app(Var(1), Var(0))


def test_uncurry_undoes_curry():
    f, a = Var(0), Var(1)
    assert evaluate(Uncurry(Curry(op_tau("app"))), SYN, 2, (f, a)) == app(f, a)


def test_swap_and_case_evaluation():
    assert evaluate(SWAP, SYN, 2, (Var(0), Var(1)), Prod((THETA, THETA))) == (Var(1), Var(0))
    e = case({"app": comp(op_tau("app"), SWAP), "abs": op_tau("abs")})
    assert evaluate(e, SYN, 2, SigValue("app", (Var(0), Var(1)))) == app(Var(1), Var(0))


def test_weaken_shifts():
    assert evaluate(Weaken(THETA), SYN, 2, app(Var(0), Var(1))) == app(Var(1), Var(2))


def test_module_subst_goes_under_derivation():
    # a value of Θ′ over ctx 1 is a term over ctx 2 whose index 0 is the bound one
    v = app(Var(0), Var(1))
    out = module_subst(THETA1, v, [lc("abs(x. x)")], 0, SYN)
    assert out == app(Var(0), lc("abs(x. x)"))


# -- linearity -----------------------------------------------------------------------------

def test_tau_is_linear_on_syntax():
    report = check_linearity(Tau(), SYN, depth=3)
    assert report.ok and report.unknown == 0


def test_sigma_subst_is_linear_on_syntax():
    report = check_linearity(SigmaSubst(), SYN, depth=3)
    assert report.ok and report.checks > 0


def test_curry_is_linear_on_syntax():
    assert check_linearity(Curry(op_tau("app")), SYN, depth=2).ok


def _broken_model():
    # application forgets its arguments and returns the first variable in scope
    def action(op, args, ctx):
        if op == "app" and ctx > 0:
            return Var(0)
        return Con(op, tuple(args), LC_SIG.arity(op))

    return HookModel(LC_SIG, lambda ctx, i: Var(i), T.subst, action)


def test_broken_hook_fails_linearity():
    report = check_linearity(op_tau("app"), _broken_model(), depth=2)
    assert not report.ok
    assert report.violations[0].law == "linearity"
    assert report.violations[0].verdict is Verdict.DISTINCT


# -- properties ------------------------------------------------------------------------------

def terms(ctx: int, depth: int = 4):
    return st.integers(0, 2**32 - 1).map(lambda s: T.random_term(LC_SIG, ctx, depth, random.Random(s)))


MORPHISMS = [
    (Curry(op_tau("app")), THETA),
    (op_tau("abs"), THETA1),
    (Weaken(THETA), THETA),
    (DerivM(op_tau("abs")), deriv(THETA, 2)),
    (comp(op_tau("app"), SWAP), Prod((THETA, THETA))),
    (SigmaSubst(), Prod((THETA1, THETA))),
]


def _value(source, ctx, seed):
    rng = random.Random(seed)
    match source:
        case Prod(fs):
            return tuple(_value(f, ctx, rng.random()) for f in fs)
        case Deriv(inner):
            return _value(inner, ctx + 1, seed)
    return T.random_term(LC_SIG, ctx, 3, rng)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2))
def test_curry_uncurry_inverse(seed, ctx):
    f = op_tau("app")
    a, b = (T.random_term(LC_SIG, ctx, 3, random.Random(seed + k)) for k in range(2))
    assert evaluate(Uncurry(Curry(f)), SYN, ctx, (a, b)) == evaluate(f, SYN, ctx, (a, b))
    g = Curry(op_tau("app"))
    assert evaluate(Curry(Uncurry(g)), SYN, ctx, a) == evaluate(g, SYN, ctx, a)


@settings(max_examples=100, deadline=None)
@given(terms(2), terms(2), st.sampled_from([0, 1]))
def test_product_laws(a, b, i):
    fs = (op_tau("abs"), Weaken(THETA))
    src = prod(THETA1, THETA)
    assert typecheck(tuple_(Proj(0), Proj(1)), LC_SIG, src) == (src, src)
    v = (Con("app", (a, Var(0)), (0, 0)), b)
    tupled = evaluate(tuple_(Comp(fs[0], Proj(0)), Comp(fs[1], Proj(1))), SYN, 2, v, src)
    assert evaluate(Proj(i), SYN, 2, tupled, prod(THETA, THETA1)) == tupled[i]
    assert tupled[i] == evaluate(fs[i], SYN, 2, v[i])


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(range(len(MORPHISMS))), st.integers(0, 2**32 - 1), st.permutations([0, 1, 2]))
def test_evaluation_is_natural_in_renaming(k, seed, perm):
    e, source = MORPHISMS[k]
    _, target = typecheck(e, LC_SIG, source)
    from bindsig.modules import module_rename

    v = _value(source, 2, seed)
    mapping = perm[:2]
    lhs = evaluate(e, SYN, 3, module_rename(source, v, mapping, 3, SYN), source)
    rhs = module_rename(target, evaluate(e, SYN, 2, v, source), mapping, 3, SYN)
    assert lhs == rhs


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 2))
def test_derivation_runs_one_context_up(seed, ctx):
    t = T.random_term(LC_SIG, ctx + 1, 4, random.Random(seed))
    inner = Curry(op_tau("app"))
    assert evaluate(DerivM(inner), SYN, ctx, t) == evaluate(inner, SYN, ctx + 1, t)


def test_empty_product_is_total():
    assert evaluate(tuple_(), SYN, 0, (), UNIT) == ()
    assert evaluate(Comp(op_tau("abs"), Curry(op_tau("app"))), SYN, 0, lc("abs(x. x)")) == \
        lc("abs(y. app(abs(x. x), y))")
