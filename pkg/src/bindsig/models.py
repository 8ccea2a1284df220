"""Models of a signature: a carrier whose hooks interpret variables and operations.

A model is given by hooks.  Elements are opaque to the engine; every element
lives at some context size ``n`` that the caller tracks.

* ``var(ctx, i)`` -- the ``i``-th variable at context ``ctx``;
* ``subst(x, sigma)`` -- ``x`` over ``len(sigma)`` variables, ``sigma`` over ``m``;
* ``action(op, args, ctx)`` -- ``args[i]`` lives at ``ctx + arity[i]``;
* ``equal(x, y)`` -- a :class:`Verdict`.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

from . import terms as T
from .signature import AlgebraicSignature
from .terms import Con, Term, Var


class Verdict(enum.Enum):
    EQUAL = "equal"
    DISTINCT = "distinct"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


def combine(verdicts: Iterable[Verdict]) -> Verdict:
    """Conjunction: distinct wins over unknown, which wins over equal."""
    seen = set(verdicts)
    if Verdict.DISTINCT in seen:
        return Verdict.DISTINCT
    if Verdict.UNKNOWN in seen:
        return Verdict.UNKNOWN
    return Verdict.EQUAL


class Model:
    signature: AlgebraicSignature

    def var(self, ctx: int, i: int) -> Any:
        raise NotImplementedError

    def subst(self, x: Any, sigma: Sequence[Any]) -> Any:
        raise NotImplementedError

    def action(self, op: str, args: Sequence[Any], ctx: int) -> Any:
        raise NotImplementedError

    def equal(self, x: Any, y: Any) -> Verdict:
        return Verdict.EQUAL if x == y else Verdict.DISTINCT

    def rename(self, x: Any, mapping: Sequence[int], ctx: int) -> Any:
        """Rename ``x`` along ``mapping`` into context ``ctx``."""
        return self.subst(x, [self.var(ctx, j) for j in mapping])

    def weaken(self, x: Any, ctx: int, by: int = 1) -> Any:
        """``x`` over ``ctx`` seen over ``ctx + by``, new variables at the front."""
        if by == 0:
            return x
        return self.rename(x, [j + by for j in range(ctx)], ctx + by)

    def lift(self, sigma: Sequence[Any], target_ctx: int, by: int) -> list[Any]:
        """Push a substitution under ``by`` binders."""
        head = [self.var(target_ctx + by, j) for j in range(by)]
        return head + [self.weaken(s, target_ctx, by) for s in sigma]

    def key(self, x: Any) -> Any:
        """Hashable identity used to deduplicate samples."""
        return x

    def render(self, x: Any, names: Sequence[str] | None = None) -> str:
        return str(x)


class SyntacticModel(Model):
    """The free model: terms themselves, with the constructors as actions."""

    def __init__(self, signature: AlgebraicSignature):
        self.signature = signature

    def var(self, ctx, i):
        return Var(i)

    def subst(self, x, sigma):
        return T.subst(x, sigma)

    def rename(self, x, mapping, ctx):
        return T.rename(x, mapping)

    def weaken(self, x, ctx, by=1):
        return T.shift(x, by)

    def action(self, op, args, ctx):
        return Con(op, tuple(args), self.signature.arity(op))

    def render(self, x, names=None):
        from .syntax import print_term

        return print_term(x, names)


class HookModel(Model):
    """A model assembled from plain callables."""

    def __init__(
        self,
        signature: AlgebraicSignature,
        var: Callable[[int, int], Any],
        subst: Callable[[Any, Sequence[Any]], Any],
        action: Callable[[str, Sequence[Any], int], Any],
        equal: Callable[[Any, Any], Verdict] | None = None,
        render: Callable[..., str] | None = None,
    ):
        self.signature = signature
        self._var, self._subst, self._action = var, subst, action
        self._equal, self._render = equal, render

    def var(self, ctx, i):
        return self._var(ctx, i)

    def subst(self, x, sigma):
        return self._subst(x, sigma)

    def action(self, op, args, ctx):
        return self._action(op, args, ctx)

    def equal(self, x, y):
        return self._equal(x, y) if self._equal else super().equal(x, y)

    def render(self, x, names=None):
        return self._render(x, names) if self._render else super().render(x, names)


def fold(t: Term, model: Model, ctx: int | None = None) -> Any:
    """The unique hook-respecting map out of the free model.

    Variables go to ``model.var`` and each constructor to the model's action
    on the folded arguments (each in its extended context).
    """
    if ctx is None:
        ctx = T.scope(t)
    if type(t) is Var:
        return model.var(ctx, t.index)
    if type(t) is Con:
        args = [fold(a, model, ctx + b) for a, b in zip(t.args, t.binds)]
        return model.action(t.op, args, ctx)
    raise T.ScopeError(f"cannot fold non-ground term {t!r}")


# -- law checking ----------------------------------------------------------------------

@dataclass
class Finding:
    law: str
    detail: str
    verdict: Verdict = Verdict.DISTINCT


@dataclass
class Report:
    """Outcome of a sampled law check: counts plus any violations found."""

    name: str
    checks: int = 0
    unknown: int = 0
    violations: list[Finding] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    laws: dict[str, list[int]] = field(default_factory=dict)
    max_findings: int = 20

    @property
    def ok(self) -> bool:
        return not self.violations

    def record(self, law: str, verdict: Verdict, detail: Callable[[], str]) -> None:
        """Count one check; ``detail`` is only rendered for violations."""
        tally = self.laws.setdefault(law, [0, 0, 0])
        self.checks += 1
        tally[0] += 1
        if verdict is Verdict.UNKNOWN:
            self.unknown += 1
            tally[1] += 1
        elif verdict is Verdict.DISTINCT:
            tally[2] += 1
            text = detail() if len(self.violations) < self.max_findings else "(not rendered)"
            self.violations.append(Finding(law, text))

    def merge(self, other: Report) -> Report:
        self.checks += other.checks
        self.unknown += other.unknown
        self.violations.extend(other.violations)
        self.notes.extend(other.notes)
        for law, (c, u, v) in other.laws.items():
            tally = self.laws.setdefault(law, [0, 0, 0])
            tally[0] += c
            tally[1] += u
            tally[2] += v
        return self

    def summary(self) -> str:
        status = "ok" if self.ok else f"{len(self.violations)} violation(s)"
        return f"{self.name}: {self.checks} checks, {self.unknown} unknown, {status}"


def bounded_product(pools: Sequence[Sequence[Any]], budget: int | None, rng: random.Random) -> list[tuple]:
    """The full product when it fits in ``budget``, else a seeded sample of that size."""
    total = 1
    for p in pools:
        total *= len(p)
    if budget is None or total <= budget:
        return list(itertools.product(*pools))
    return [tuple(rng.choice(p) for p in pools) for _ in range(budget)]


def dedupe(model: Model, xs: Iterable[Any]) -> list[Any]:
    seen: dict = {}
    for x in xs:
        seen.setdefault(model.key(x), x)
    return list(seen.values())


def sample_elements(model: Model, ctx: int, depth: int) -> list[Any]:
    """Images of all enumerated syntactic terms, deduplicated by ``model.key``."""
    return dedupe(model, (fold(t, model, ctx) for t in T.enumerate_terms(model.signature, ctx, depth)))


def check_model(
    model: Model,
    depth: int = 3,
    budget: int = 20000,
    contexts: Sequence[int] = (0, 1, 2),
    subst_depth: int | None = None,
    seed: int = 0,
) -> Report:
    """Sampled monad laws, action linearity and equality coherence."""
    rng = random.Random(seed)
    sig = model.signature
    report = Report("check_model")
    subst_depth = max(1, depth - 1) if subst_depth is None else subst_depth
    elements = {c: sample_elements(model, c, depth) for c in contexts}
    pool = {c: sample_elements(model, c, subst_depth) for c in contexts}
    r = model.render

    def eq(law, x, y, detail):
        report.record(law, model.equal(x, y), detail)

    for n in contexts:
        for i in range(n):
            for m in contexts:
                for sigma in bounded_product([pool[m]] * n, budget // max(1, n), rng)[:50]:
                    eq("left unit", model.subst(model.var(n, i), sigma), sigma[i],
                       lambda: f"subst(var {i}, {[r(s) for s in sigma]}) != sigma[{i}]")
        ids = [model.var(n, i) for i in range(n)]
        for x in elements[n]:
            eq("right unit", model.subst(x, ids), x, lambda: f"subst({r(x)}, id) != itself")
        for m in contexts:
            sigmas = bounded_product([pool[m]] * n, 64, rng)
            for k in contexts:
                deltas = bounded_product([pool[k]] * m, 16, rng)
                triples = bounded_product([elements[n], sigmas, deltas], budget, rng)
                for x, sigma, delta in triples:
                    lhs = model.subst(model.subst(x, sigma), delta)
                    rhs = model.subst(x, [model.subst(s, delta) for s in sigma])
                    eq("associativity", lhs, rhs, lambda: f"subst(subst({r(x)}, .), .) mismatch")
    for op in sig.ops:
        for n in contexts:
            arg_pools = [elements.get(n + a) or sample_elements(model, n + a, max(1, depth - 1)) for a in op.arity]
            argss = bounded_product(arg_pools, 200, rng)
            for m in contexts:
                sigmas = bounded_product([pool[m]] * n, 16, rng)
                for args, sigma in bounded_product([argss, sigmas], budget, rng):
                    lhs = model.subst(model.action(op.name, args, n), sigma)
                    moved = [model.subst(a, model.lift(sigma, m, b)) for a, b in zip(args, op.arity)]
                    rhs = model.action(op.name, moved, m)
                    eq(f"linearity of {op.name}", lhs, rhs,
                       lambda: f"{op.name}({', '.join(r(a) for a in args)}) does not commute with substitution")
    for n in contexts:
        xs = elements[n]
        for x in xs[:200]:
            v = model.equal(x, x)
            report.record("reflexivity", Verdict.DISTINCT if v is Verdict.DISTINCT else v,
                          lambda: f"{r(x)} not equal to itself")
        for x, y in bounded_product([xs[:60], xs[:60]], budget, rng):
            a, b = model.equal(x, y), model.equal(y, x)
            ok = a is b or Verdict.UNKNOWN in (a, b)
            report.record("symmetry", Verdict.EQUAL if ok else Verdict.DISTINCT,
                          lambda: f"equal({r(x)}, {r(y)}) is {a} but the converse is {b}")
        for x, y, z in bounded_product([xs[:25]] * 3, budget, rng):
            if model.equal(x, y) is Verdict.EQUAL and model.equal(y, z) is Verdict.EQUAL:
                report.record("transitivity", model.equal(x, z), lambda: f"{r(x)} ~ {r(y)} ~ {r(z)} but not transitive")
    return report
