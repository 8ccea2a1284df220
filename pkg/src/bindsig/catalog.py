"""Ready-made 2-signatures, reference models and stock terms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from . import terms as T
from .models import Model, Verdict
from .modules import (
    THETA,
    UNIT,
    Comp,
    Curry,
    Id,
    MorphismExpr,
    Proj,
    SigmaSubst,
    Tuple,
    deriv,
    op_tau,
    prod,
    tuple_,
)
from .presentation import (
    Equation,
    Orientation,
    Regime,
    SignatureMorphism,
    TwoSignature,
    coequalizer_as_equation,
    coproduct_two,
    renaming_morphism,
)
from .recursion import QuotientModel
from .signature import AlgebraicSignature, Operation, coproduct
from .syntax import parse_term, print_term
from .terms import Con, Term, Var


@dataclass(frozen=True)
class ExampleBundle:
    """A 2-signature with its reference model and a few known equalities."""

    name: str
    two: TwoSignature
    model: Callable[[], Model]
    golden: tuple[tuple[str, str, Verdict], ...] = ()
    notes: str = ""
    contexts: tuple[int, ...] = (0, 1, 2)
    depth: int = 3
    fuel: int = 100

    @property
    def sig(self) -> AlgebraicSignature:
        return self.two.sig


# -- list monoid ---------------------------------------------------------------------------

MONOID_SIG = AlgebraicSignature.of(m=(0, 0), e=())


class ListMonoidModel(Model):
    """Words over the variables: the free monoid, with substitution by concatenation."""

    def __init__(self, signature: AlgebraicSignature = MONOID_SIG, mul: str = "m", unit: str = "e"):
        if signature.arity(mul) != (0, 0) or signature.arity(unit) != ():
            raise ValueError("the list model needs a binary product and a constant")
        self.signature = signature
        self.mul, self.unit = mul, unit

    def var(self, ctx, i):
        return (i,)

    def subst(self, x, sigma):
        return tuple(j for i in x for j in sigma[i])

    def rename(self, x, mapping, ctx):
        return tuple(mapping[i] for i in x)

    def action(self, op, args, ctx):
        if op == self.mul:
            return args[0] + args[1]
        if op == self.unit:
            return ()
        raise KeyError(op)

    def render(self, x, names=None):
        names = names or [f"x{i}" for i in range(max(x, default=-1) + 1)]
        return "[" + ", ".join(names[i] for i in x) + "]"


def bundle_monoid() -> ExampleBundle:
    m, e = op_tau("m"), op_tau("e")
    three = prod(THETA, THETA, THETA)
    equations = (
        Equation("assoc", three, THETA,
                 Comp(m, tuple_(Comp(m, tuple_(Proj(0), Proj(1))), Proj(2))),
                 Comp(m, tuple_(Proj(0), Comp(m, tuple_(Proj(1), Proj(2)))))),
        Equation("unitL", THETA, THETA, Comp(m, tuple_(Comp(e, tuple_()), Id(THETA))), Id(THETA)),
        Equation("unitR", THETA, THETA, Comp(m, tuple_(Id(THETA), Comp(e, tuple_()))), Id(THETA)),
    )
    two = TwoSignature(MONOID_SIG, equations, Regime.TERMINATING)
    golden = (
        ("m(e, x)", "x", Verdict.EQUAL),
        ("m(m(x, y), z)", "m(x, m(y, z))", Verdict.EQUAL),
        ("m(x, y)", "m(y, x)", Verdict.DISTINCT),
    )
    return ExampleBundle("monoid", two, ListMonoidModel, golden)


# -- lambda calculus -----------------------------------------------------------------------

LC_SIG = AlgebraicSignature.of(app=(0, 0), abs=(1,))
FIX_SIG = AlgebraicSignature.of(fix=(1,))


def beta_equation() -> Equation:
    """``app`` curried after ``abs`` is the identity on ``Θ′``."""
    return Equation("beta", deriv(THETA), deriv(THETA),
                    Comp(Curry(op_tau("app")), op_tau("abs")), Id(deriv(THETA)))


def eta_equation() -> Equation:
    """``abs`` after curried ``app`` is the identity on ``Θ``."""
    return Equation("eta", THETA, THETA, Comp(op_tau("abs"), Curry(op_tau("app"))), Id(THETA))


def fix_equation() -> Equation:
    """Substituting ``fix t`` into ``t`` gives ``fix t``; only the fix side is a pattern."""
    return Equation("fix", deriv(THETA), THETA,
                    Comp(SigmaSubst(), tuple_(Id(deriv(THETA)), op_tau("fix"))), op_tau("fix"),
                    Orientation.RL)


def lc_two() -> TwoSignature:
    return TwoSignature(LC_SIG, (beta_equation(), eta_equation()), Regime.CONFLUENT)


def fix_two() -> TwoSignature:
    return TwoSignature(FIX_SIG, (fix_equation(),), Regime.CONFLUENT)


def lc(text: str, free: Sequence[str] = ()) -> Term:
    return parse_term(text, LC_SIG, free)[0]


def church(n: int) -> Term:
    body: Term = Var(0)
    for _ in range(n):
        body = Con("app", (Var(1), body), (0, 0))
    return Con("abs", (Con("abs", (body,), (1,)),), (1,))


PLUS = lc("abs(m. abs(n. abs(f. abs(x. app(app(m, f), app(app(n, f), x))))))")
TIMES = lc("abs(m. abs(n. abs(f. app(m, app(n, f)))))")
S_COMB = lc("abs(x. abs(y. abs(z. app(app(x, z), app(y, z)))))")
K_COMB = lc("abs(x. abs(y. x))")
I_COMB = lc("abs(x. x)")
OMEGA = lc("app(abs(x. app(x, x)), abs(x. app(x, x)))")
Y_CURRY = lc("abs(f. app(abs(x. app(f, app(x, x))), abs(x. app(f, app(x, x)))))")
_HALF_TURING = lc("abs(x. abs(y. app(y, app(app(x, x), y))))")
Y_TURING = Con("app", (_HALF_TURING, _HALF_TURING), (0, 0))


def app(*ts: Term) -> Term:
    out = ts[0]
    for t in ts[1:]:
        out = Con("app", (out, t), (0, 0))
    return out


def bundle_lc_beta_eta() -> ExampleBundle:
    two = lc_two()
    golden = (
        ("app(abs(x. x), u)", "u", Verdict.EQUAL),
        ("abs(x. app(f, x))", "f", Verdict.EQUAL),
        ("abs(x. app(x, x))", "abs(x. x)", Verdict.DISTINCT),
        (print_term(app(PLUS, church(2), church(2))), print_term(church(4)), Verdict.EQUAL),
    )
    return ExampleBundle("lcbe", two, lambda: QuotientModel(two, 100), golden)


def bundle_fixpoint() -> ExampleBundle:
    two = fix_two()
    golden = (("fix(x. x)", "fix(x. x)", Verdict.EQUAL),)
    return ExampleBundle("fix", two, lambda: QuotientModel(two, 100), golden,
                         notes="only the fix side of the equation is a pattern")


def bundle_lc_fix() -> ExampleBundle:
    two = coproduct_two([lc_two(), fix_two()]).result
    golden = (("fix(x. app(abs(y. y), x))", "fix(x. x)", Verdict.EQUAL),)
    return ExampleBundle("lc_fix", two, lambda: LCWithFixModel(), golden)


class LCWithFixModel(Model):
    """Lambda terms modulo beta-eta, with ``fix t`` read as ``app(Y, abs t)``."""

    def __init__(self, combinator: Term = Y_CURRY, fuel: int = 100, signature: AlgebraicSignature | None = None):
        self.base = QuotientModel(lc_two(), fuel)
        self.combinator = combinator
        self.signature = signature if signature is not None else coproduct([LC_SIG, FIX_SIG])
        self.fix_name = next(op.name for op in self.signature.ops if op.name.split(".")[-1] == "fix")
        missing = set(self.signature.names) - set(LC_SIG.names) - {self.fix_name}
        if missing:
            raise ValueError(f"no reading for operations {sorted(missing)}")

    def var(self, ctx, i):
        return Var(i)

    def subst(self, x, sigma):
        return T.subst(x, sigma)

    def rename(self, x, mapping, ctx):
        return T.rename(x, mapping)

    def weaken(self, x, ctx, by=1):
        return T.shift(x, by)

    def action(self, op, args, ctx):
        if op == self.fix_name:
            return app(self.combinator, Con("abs", (args[0],), (1,)))
        return self.base.action(op, args, ctx)

    def equal(self, x, y):
        return self.base.equal(x, y)

    def render(self, x, names=None):
        return print_term(x, names, abbrev={Y_CURRY: "Y", Y_TURING: "Θ"})


# -- first-order presentations --------------------------------------------------------------

@dataclass(frozen=True)
class Presentation:
    """First-order operations (by argument count) and equations written as terms."""

    ops: tuple[tuple[str, int], ...]
    equations: tuple[tuple[str, str, str, Orientation], ...]

    @property
    def sig(self) -> AlgebraicSignature:
        return AlgebraicSignature(tuple(Operation(n, (0,) * k) for n, k in self.ops))


def first_order_morphism(t: Term, k: int) -> MorphismExpr:
    """A first-order term in ``k`` variables as a morphism ``Θ^k -> Θ``."""
    if type(t) is Var:
        return Id(THETA) if k == 1 else Proj(t.index)
    return Comp(op_tau(t.op), Tuple(tuple(first_order_morphism(a, k) for a in t.args)))


def presentation_equation(sig: AlgebraicSignature, name: str, lhs: str, rhs: str, orient: Orientation) -> Equation:
    l, names = parse_term(lhs, sig)
    r, names = parse_term(rhs, sig, names)
    if any(b for t in (l, r) for s in T.subterms(t) if type(s) is Con for b in s.binds):
        raise ValueError(f"equation {name} is not first order")
    k = len(names)
    source = prod(*([THETA] * k)) if k else UNIT
    return Equation(name, source, THETA, first_order_morphism(l, k), first_order_morphism(r, k), orient)


def bundle_algebraic_theory(
    name: str,
    presentation: Presentation,
    regime: Regime | None = None,
    model: Callable[[], Model] | None = None,
    golden: tuple = (),
) -> ExampleBundle:
    sig = presentation.sig
    equations = tuple(presentation_equation(sig, *e) for e in presentation.equations)
    if regime is None:
        unoriented = any(e.orient is Orientation.NONE for e in equations)
        regime = Regime.UNORIENTED if unoriented else Regime.TERMINATING
    two = TwoSignature(sig, equations, regime)
    return ExampleBundle(name, two, model or (lambda: QuotientModel(two, 100)), golden)


MONOID_PRESENTATION = Presentation(
    (("m", 2), ("e", 0)),
    (
        ("assoc", "m(m(x, y), z)", "m(x, m(y, z))", Orientation.LR),
        ("unitL", "m(e, x)", "x", Orientation.LR),
        ("unitR", "m(x, e)", "x", Orientation.LR),
    ),
)
COMMUTATIVE_PRESENTATION = Presentation(
    (("m", 2),), (("comm", "m(x, y)", "m(y, x)", Orientation.NONE),)
)
IDEMPOTENT_PRESENTATION = Presentation(
    (("u", 1),), (("idem", "u(u(x))", "u(x)", Orientation.LR),)
)


def bundle_commutative() -> ExampleBundle:
    return bundle_algebraic_theory(
        "commutative", COMMUTATIVE_PRESENTATION,
        golden=(("m(a, b)", "m(b, a)", Verdict.EQUAL),),
    )


def bundle_idempotent() -> ExampleBundle:
    return bundle_algebraic_theory(
        "idempotent", IDEMPOTENT_PRESENTATION,
        golden=(("u(u(u(x)))", "u(x)", Verdict.EQUAL), ("u(x)", "x", Verdict.DISTINCT)),
    )


# -- coequalizer ---------------------------------------------------------------------------

BINARY_SIG = AlgebraicSignature.of(op=(0, 0))


def coequalizer_legs() -> tuple[SignatureMorphism, SignatureMorphism]:
    """The two injections of one binary operation into two copies of it."""
    target = coproduct([BINARY_SIG, BINARY_SIG])
    left, right = target.names
    return (renaming_morphism(BINARY_SIG, target, {"op": left}),
            renaming_morphism(BINARY_SIG, target, {"op": right}))


def bundle_coequalizer() -> ExampleBundle:
    f, g = coequalizer_legs()
    two = TwoSignature(f.target, (coequalizer_as_equation(f, g, "identify"),), Regime.TERMINATING)
    golden = (("left.op(x, y)", "right.op(x, y)", Verdict.EQUAL),)
    return ExampleBundle("coequalizer", two, lambda: QuotientModel(two, 100), golden)


def all_bundles() -> dict[str, ExampleBundle]:
    return {
        b.name: b
        for b in (
            bundle_monoid(),
            bundle_lc_beta_eta(),
            bundle_fixpoint(),
            bundle_lc_fix(),
            bundle_algebraic_theory("monoid_presented", MONOID_PRESENTATION),
            bundle_commutative(),
            bundle_idempotent(),
            bundle_coequalizer(),
        )
    }


# -- shipped documents ----------------------------------------------------------------------

def shipped_documents() -> dict[str, TwoSignature]:
    """The signature documents installed under ``bindsig/signatures``, by file stem."""
    bundles = all_bundles()
    docs = {name: b.two for name, b in bundles.items()}
    docs["lc"] = docs["lcbe"]
    docs["comm"] = docs.pop("commutative")
    docs["empty"] = TwoSignature(AlgebraicSignature(()), (), Regime.TERMINATING)
    return docs


def signature_path(stem: str):
    """Path of a shipped document such as ``signature_path("monoid")``."""
    from importlib.resources import files

    return files("bindsig") / "signatures" / f"{stem}.json"
