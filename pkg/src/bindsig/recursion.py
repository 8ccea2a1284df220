"""Quotient models, folds between models, and the checks built on them."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from . import terms as T
from .models import (
    Model,
    Report,
    SyntacticModel,
    Verdict,
    bounded_product,
    fold,
)
from .modules import (
    Comp,
    OpInj,
    Tau,
    evaluate,
    module_equal,
    pack,
    render_value,
    sample_values,
    theta_arity,
)
from .oracle import Partition, congruence_oracle, equation_instances, universe_heights
from .presentation import Equation, Regime, SignatureMorphism, TwoSignature, compose
from .rewriting import RuleSet, compile_all, decide, joinable, normalize, reducts
from .terms import Term

DEFAULT_FUEL = 1000


class QuotientModel(SyntacticModel):
    """Terms modulo the equations of a 2-signature.

    Under a terminating regime elements are kept in normal form.  Otherwise
    they are raw terms compared by joinability; unoriented equations are
    decided by the congruence oracle on terms small enough for its universe.
    """

    def __init__(
        self, two: TwoSignature, fuel: int | None = None, oracle_depth: int = 3, oracle_limit: int = 5000
    ):
        super().__init__(two.sig)
        self.two = two
        self.rules = RuleSet(compile_all(two))
        self.fuel = fuel if fuel is not None else (two.fuel or DEFAULT_FUEL)
        self.oracle_depth = oracle_depth
        self.oracle_limit = oracle_limit
        self._partitions: dict[tuple[int, int], Partition] = {}
        self._normal = two.regime is Regime.TERMINATING
        self._nf_cache: dict[Term, Term] = {}

    def _nf(self, t: Term) -> Term:
        if not self._normal:
            return t
        out = self._nf_cache.get(t)
        if out is None:
            if len(self._nf_cache) >= 200_000:
                self._nf_cache.clear()
            out = self._nf_cache[t] = normalize(t, self.rules, self.fuel).term
        return out

    def subst(self, x, sigma):
        return self._nf(T.subst(x, sigma))

    def action(self, op, args, ctx):
        return self._nf(super().action(op, args, ctx))

    def normal_form(self, t: Term, ctx: int | None = None):
        return normalize(t, self.rules, self.fuel, ctx)

    def equal(self, x, y):
        if x == y:
            return Verdict.EQUAL
        regime = self.two.regime
        if regime is not Regime.UNORIENTED:
            return decide(x, y, self.rules, regime, self.fuel)
        if joinable(x, y, self.rules, self.fuel) is Verdict.EQUAL:
            return Verdict.EQUAL
        return Verdict.EQUAL if self._oracle_same(x, y) else Verdict.UNKNOWN

    def _oracle_same(self, x: Term, y: Term) -> bool:
        ctx = max(T.scope(x), T.scope(y))
        depth = max(self.oracle_depth, T.height(x), T.height(y))
        if depth > self.oracle_depth and T.count_terms(self.signature, ctx, depth) > self.oracle_limit:
            return False
        key = (ctx, depth)
        if key not in self._partitions:
            self._partitions[key] = congruence_oracle(self.two, ctx, depth)
        return self._partitions[key].same(x, y)

    def key(self, x):
        return self._nf(x)


class PullbackModel(Model):
    """A model of ``morphism.target`` seen as a model of ``morphism.source``."""

    def __init__(self, model: Model, morphism: SignatureMorphism):
        if model.signature != morphism.target:
            raise ValueError("the model's signature must be the morphism's target")
        self.base = model
        self.morphism = morphism
        self.signature = morphism.source

    def var(self, ctx, i):
        return self.base.var(ctx, i)

    def subst(self, x, sigma):
        return self.base.subst(x, sigma)

    def rename(self, x, mapping, ctx):
        return self.base.rename(x, mapping, ctx)

    def weaken(self, x, ctx, by=1):
        return self.base.weaken(x, ctx, by)

    def action(self, op, args, ctx):
        arity = self.signature.arity(op)
        return evaluate(
            self.morphism.component(op), self.base, ctx, pack(list(args)),
            source=theta_arity(arity), ambient=self.morphism.target,
        )

    def equal(self, x, y):
        return self.base.equal(x, y)

    def key(self, x):
        return self.base.key(x)

    def render(self, x, names=None):
        return self.base.render(x, names)


def translate(t: Term, morphism: SignatureMorphism, ctx: int | None = None) -> Term:
    """Push a term along a signature morphism."""
    return fold(t, PullbackModel(SyntacticModel(morphism.target), morphism), ctx)


# -- satisfaction --------------------------------------------------------------------------

@dataclass
class SatisfactionReport:
    equation: str
    contexts: tuple[int, ...]
    depth: int
    probes: int = 0
    equal: int = 0
    distinct: int = 0
    unknown: int = 0
    sampled: bool = False
    counterexamples: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.distinct == 0

    @property
    def unknown_rate(self) -> float:
        return self.unknown / self.probes if self.probes else 0.0

    def summary(self) -> str:
        mode = "sampled" if self.sampled else "exhaustive"
        return (
            f"{self.equation}: {self.probes} probes ({mode}), {self.equal} equal, "
            f"{self.distinct} distinct, {self.unknown} unknown"
        )


def satisfies(
    model: Model,
    eq: Equation,
    contexts: Sequence[int] = (0, 1, 2),
    depth: int = 3,
    budget: int | None = 20000,
    seed: int = 0,
    max_counterexamples: int = 10,
) -> SatisfactionReport:
    """Compare both sides of ``eq`` on source values folded from enumerated terms.

    Values are deduplicated with ``model.key``; when more than ``budget``
    remain a seeded sample of that size is used instead.
    """
    rng = random.Random(seed)
    report = SatisfactionReport(eq.name, tuple(contexts), depth)
    for ctx in contexts:
        values = sample_values(eq.source, model, ctx, depth)
        if budget is not None and len(values) > budget:
            values = [rng.choice(values) for _ in range(budget)]
            report.sampled = True
        for v in values:
            lhs = evaluate(eq.lhs, model, ctx, v, eq.source)
            rhs = evaluate(eq.rhs, model, ctx, v, eq.source)
            verdict = module_equal(eq.target, lhs, rhs, model)
            report.probes += 1
            if verdict is Verdict.EQUAL:
                report.equal += 1
            elif verdict is Verdict.UNKNOWN:
                report.unknown += 1
            else:
                report.distinct += 1
                if len(report.counterexamples) < max_counterexamples:
                    report.counterexamples.append(
                        f"ctx {ctx}, input {render_value(eq.source, v, model)}: "
                        f"{render_value(eq.target, lhs, model)} vs {render_value(eq.target, rhs, model)}"
                    )
    return report


@dataclass
class TwoModelCertificate:
    model: Model
    reports: tuple[SatisfactionReport, ...]
    contexts: tuple[int, ...]
    depth: int
    budget: int | None
    seed: int

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)

    @property
    def unknown(self) -> int:
        return sum(r.unknown for r in self.reports)


def certify(
    model: Model,
    two: TwoSignature,
    contexts: Sequence[int] = (0, 1, 2),
    depth: int = 3,
    budget: int | None = 20000,
    seed: int = 0,
) -> TwoModelCertificate:
    """Run :func:`satisfies` on every equation of ``two``."""
    if model.signature != two.sig:
        raise ValueError("model and 2-signature disagree on the operations")
    reports = tuple(satisfies(model, eq, contexts, depth, budget, seed) for eq in two.equations)
    return TwoModelCertificate(model, reports, tuple(contexts), depth, budget, seed)


# -- folds as morphisms ----------------------------------------------------------------------

def _random_terms(sig, ctx, depth, rng, n):
    try:
        return [T.random_term(sig, ctx, depth, rng) for _ in range(n)]
    except ValueError:
        return []


def check_fold_is_morphism(
    model: Model,
    source: TwoSignature,
    contexts: Sequence[int] = (0, 1, 2),
    depth: int = 3,
    subst_depth: int = 2,
    budget: int | None = 5000,
    samples: int | None = None,
    respect_depth: int | None = None,
    seed: int = 0,
) -> Report:
    """Does folding the initial model of ``source`` into ``model`` give a morphism?

    Checks that fold commutes with substitution and that it identifies both
    sides of every equation instance and of every one-step rewrite.  With
    ``samples`` set, terms and substitutions are drawn at random instead of
    enumerated.
    """
    rng = random.Random(seed)
    sig = source.sig
    report = Report("fold is a morphism")
    render = model.render

    def enum(c, d):
        return list(T.enumerate_terms(sig, c, d))

    pairs = []
    for n in contexts:
        for m in contexts:
            if samples is not None:
                for _ in range(max(1, samples // (len(contexts) ** 2))):
                    ts = _random_terms(sig, n, depth, rng, 1)
                    sig_terms = _random_terms(sig, m, subst_depth, rng, n)
                    if ts and len(sig_terms) == n:
                        pairs.append((n, m, ts[0], tuple(sig_terms)))
            else:
                sigmas = bounded_product([enum(m, subst_depth)] * n, 64, rng)
                for t, sigma in bounded_product([enum(n, depth), sigmas], budget, rng):
                    pairs.append((n, m, t, sigma))
    for n, m, t, sigma in pairs:
        lhs = fold(T.subst(t, sigma), model, m)
        rhs = model.subst(fold(t, model, n), [fold(s, model, m) for s in sigma])
        report.record("substitution", model.equal(lhs, rhs), lambda: (
            f"fold(subst({t!r}, {list(sigma)!r})) = {render(lhs)} but subst(fold ..) = {render(rhs)}"
        ))

    rdepth = depth if respect_depth is None else respect_depth
    rules = RuleSet(compile_all(source))
    for c in contexts:
        hmax = universe_heights(sig, c, rdepth)
        for eq in source.equations:
            instances = [(k, l, r) for k, l, r in equation_instances(eq, sig, hmax) if k == c]
            if budget is not None and len(instances) > budget:
                instances = rng.sample(instances, budget)
            for k, l, r in instances:
                a, b = fold(l, model, k), fold(r, model, k)
                report.record(f"respects {eq.name}", model.equal(a, b), lambda: (
                    f"{l!r} ~ {r!r} but folds to {render(a)} vs {render(b)}"
                ))
        terms = enum(c, rdepth) if samples is None else _random_terms(sig, c, rdepth, rng, samples)
        for t in terms[: budget or None]:
            for r in reducts(t, rules, c):
                a, b = fold(t, model, c), fold(r, model, c)
                report.record("respects rewriting", model.equal(a, b), lambda: (
                    f"{t!r} -> {r!r} but folds to {render(a)} vs {render(b)}"
                ))
    return report


def check_fold_unique(
    model: Model, candidate: Callable[[Term, int], Any], contexts: Sequence[int] = (0, 1, 2), depth: int = 3
) -> Report:
    """Compare ``fold`` with another structure-preserving map on every enumerated term."""
    report = Report("fold is unique")
    for c in contexts:
        for t in T.enumerate_terms(model.signature, c, depth):
            a, b = fold(t, model, c), candidate(t, c)
            report.record("agreement", model.equal(a, b), lambda: f"{t!r}: {model.render(a)} vs {model.render(b)}")
    return report


# -- modularity ------------------------------------------------------------------------------

def check_modularity(
    base: TwoSignature,
    left: tuple[SignatureMorphism, TwoSignature],
    right: tuple[SignatureMorphism, TwoSignature],
    pushout: tuple[TwoSignature, SignatureMorphism, SignatureMorphism],
    contexts: Sequence[int] = (0, 1, 2),
    depth: int = 2,
    fuel: int | None = None,
) -> Report:
    """The square of translations commutes, and the injections cover the result.

    Every base term is pushed through both legs of the square and the two
    images are compared in the quotient of the amalgamated signature.
    """
    result, inl, inr = pushout
    (f, _), (g, _) = left, right
    via_left, via_right = compose(inl, f), compose(inr, g)
    target = QuotientModel(result, fuel)
    report = Report("modularity")
    for c in contexts:
        for t in T.enumerate_terms(base.sig, c, depth):
            a, b = translate(t, via_left, c), translate(t, via_right, c)
            report.record("square commutes", target.equal(a, b), lambda: f"{t!r}: {a!r} vs {b!r}")
    covered = {_head_op(inj.component(op)) for inj in (inl, inr) for op in inj.source.names}
    for op in result.sig.names:
        report.record("injections cover", Verdict.EQUAL if op in covered else Verdict.DISTINCT,
                      lambda: f"operation {op} is not the image of an injection")
    for c in contexts:
        for t in T.enumerate_terms(result.sig, c, depth):
            ok = T.ops_of(t) <= covered
            report.record("generated by the images", Verdict.EQUAL if ok else Verdict.DISTINCT,
                          lambda: f"{t!r} uses operations outside both images")
    return report


def _head_op(e) -> str | None:
    match e:
        case Comp(Tau(), OpInj(op, _)):
            return op
    return None
