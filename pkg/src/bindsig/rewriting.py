"""Second-order rewriting compiled from oriented equations.

An equation is turned into rules by uncurrying both sides until the target is
``Θ`` and evaluating them on the syntactic model at fresh metavariables, one
per component of the source.  The side chosen as left-hand side must come out
as a Miller pattern.

Matching and instantiation happen at a site whose surrounding context has
``K`` variables; a metavariable of arity ``a`` is bound to a term over
``a + K`` variables (its parameters first).
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

from . import terms as T
from .models import SyntacticModel, Verdict
from .modules import (
    ModuleExpr,
    SigExpr,
    SigValue,
    append_theta,
    deriv_depth,
    evaluate,
    factors_of,
    pack,
    uncurry_times,
)
from .presentation import Equation, Orientation, Regime, TwoSignature
from .signature import AlgebraicSignature
from .terms import Con, ExplicitSubst, MetaVar, Term, Var


class NotAPattern(ValueError):
    """The chosen left-hand side is not a Miller pattern."""


@dataclass(frozen=True)
class RewriteRule:
    name: str
    pattern: Term
    template: Term
    arities: tuple[tuple[str, int], ...]

    @property
    def nonlinear(self) -> bool:
        return len(_metas(self.pattern)) != len({m.name for m in _metas(self.pattern)})

    def __str__(self) -> str:
        return f"{self.name}: {self.pattern!r} -> {self.template!r}"


def _metas(t: Term) -> list[MetaVar]:
    out: list[MetaVar] = []
    stack = [t]
    while stack:
        s = stack.pop()
        if type(s) is MetaVar:
            out.append(s)
        elif type(s) is Con:
            stack.extend(s.args)
        elif type(s) is ExplicitSubst:
            stack.append(s.body)
            stack.extend(s.bindings)
    return out


def _has_esubst(t: Term) -> bool:
    if type(t) is ExplicitSubst:
        return True
    return type(t) is Con and any(_has_esubst(a) for a in t.args)


# -- compilation --------------------------------------------------------------------------

def _symbolic_values(source: ModuleExpr) -> Iterator[tuple[str | None, object]]:
    """Source values made of fresh metavariables; one per operation for table factors."""
    choices = []
    counter = itertools.count()
    for f in factors_of(source):
        if isinstance(f, SigExpr):
            opts = []
            for op in f.sig.ops:
                args = tuple(MetaVar(f"M{next(counter)}", tuple(range(a))) for a in op.arity)
                opts.append((op.name, SigValue(op.name, args)))
            choices.append(opts)
        else:
            a = deriv_depth(f)
            if a < 0:
                raise NotAPattern(f"source factor {f!r} is not algebraic")
            choices.append([(None, MetaVar(f"M{next(counter)}", tuple(range(a))))])
    for combo in itertools.product(*choices):
        tags = [tag for tag, _ in combo if tag is not None]
        yield ("/".join(tags) or None), pack([v for _, v in combo]) if combo else ()


def compile_rules(eq: Equation, sig: AlgebraicSignature) -> list[RewriteRule]:
    """Rules for ``eq`` in its declared orientation (none for unoriented equations)."""
    if eq.orient is Orientation.NONE:
        return []
    n = eq.order
    lhs, rhs = uncurry_times(eq.lhs, n), uncurry_times(eq.rhs, n)
    source = eq.source
    for _ in range(n):
        source = append_theta(source)
    model = SyntacticModel(sig)
    rules = []
    for tag, value in _symbolic_values(source):
        left = evaluate(lhs, model, 0, value, source)
        right = evaluate(rhs, model, 0, value, source)
        if eq.orient is Orientation.RL:
            left, right = right, left
        name = eq.name if tag is None else f"{eq.name}/{tag}"
        if left == right:
            continue
        rules.append(make_rule(name, left, right))
    return rules


def make_rule(name: str, pattern: Term, template: Term) -> RewriteRule:
    if type(pattern) is not Con:
        raise NotAPattern(f"{name}: left-hand side {pattern!r} is not headed by an operation")
    if _has_esubst(pattern):
        raise NotAPattern(f"{name}: left-hand side {pattern!r} needs a substitution")
    arities: dict[str, int] = {}
    for m in _metas(pattern):
        if len(set(m.renaming)) != len(m.renaming):
            raise NotAPattern(f"{name}: metavariable {m.name} has a non-injective renaming")
        if arities.setdefault(m.name, m.arity) != m.arity:
            raise NotAPattern(f"{name}: metavariable {m.name} used at two arities")
    extra = {m.name for m in _metas(template)} - set(arities)
    if extra:
        raise NotAPattern(f"{name}: right-hand side uses unbound metavariables {sorted(extra)}")
    return RewriteRule(name, pattern, template, tuple(sorted(arities.items())))


def compile_all(two: TwoSignature) -> list[RewriteRule]:
    return [r for eq in two.equations for r in compile_rules(eq, two.sig)]


# -- matching -------------------------------------------------------------------------------

def match(pattern: Term, t: Term, ambient: int = 0) -> dict[str, Term] | None:
    """Bindings making ``pattern`` equal to ``t``, or ``None``."""
    env: dict[str, Term] = {}
    return env if _match(pattern, t, 0, env) else None


def _match(p: Term, t: Term, d: int, env: dict[str, Term]) -> bool:
    tp = type(p)
    if tp is Con:
        if type(t) is not Con or t.op != p.op or t.binds != p.binds:
            return False
        return all(_match(pa, ta, d + b, env) for pa, ta, b in zip(p.args, t.args, p.binds))
    if tp is MetaVar:
        r = p.renaming
        inverse = {j: k for k, j in enumerate(r)}
        a = len(r)

        def back(i: int) -> int:
            if i < d:
                k = inverse.get(i)
                if k is None:
                    raise _Escape
                return k
            return a + i - d

        try:
            value = T.rename(t, back) if (d or a) else t
        except _Escape:
            return False
        seen = env.get(p.name)
        if seen is None:
            env[p.name] = value
            return True
        return seen == value
    if tp is Var:
        return t == p
    raise NotAPattern(f"cannot match against {p!r}")


class _Escape(Exception):
    pass


def instantiate(template: Term, env: dict[str, Term], ambient: int) -> Term:
    """Replace metavariables and eliminate explicit substitutions."""
    return _inst(template, env, 0, ambient)


def _inst(t: Term, env: dict[str, Term], d: int, k: int) -> Term:
    tt = type(t)
    if tt is Var:
        return t
    if tt is Con:
        if not t.args:
            return t
        return Con(t.op, tuple(_inst(a, env, d + b, k) for a, b in zip(t.args, t.binds)), t.binds)
    if tt is MetaVar:
        s = env[t.name]
        r = t.renaming
        a = len(r)
        if a == 0 and d == 0:
            return s
        return T.rename(s, lambda j: r[j] if j < a else j - a + d)
    if tt is ExplicitSubst:
        bs = [_inst(b, env, d, k) for b in t.bindings]
        body = _inst(t.body, env, len(bs), k)
        return T.subst(body, bs + [Var(d + j) for j in range(k)])
    raise TypeError(f"not a template: {t!r}")


# -- strategies -------------------------------------------------------------------------------

class RuleSet:
    """Rules indexed by the head operation of their pattern.

    Also remembers subterms already found normal (normality does not depend
    on the context) and the results of bounded searches from given terms.
    """

    CACHE_LIMIT = 500_000

    def __init__(self, rules: Iterable[RewriteRule]):
        self.rules = tuple(rules)
        self.by_head: dict[str, list[RewriteRule]] = {}
        for r in self.rules:
            self.by_head.setdefault(r.pattern.op, []).append(r)
        self.normal: set[Term] = set()
        self._results: dict = {}

    def cached(self, key, compute):
        """Memoize a search result; the rules never change, so neither do results."""
        hit = self._results.get(key)
        if hit is None:
            if len(self._results) >= 20_000:
                self._results.clear()
            hit = self._results[key] = compute()
        return hit

    def mark_normal(self, t: Term) -> None:
        if len(self.normal) >= self.CACHE_LIMIT:
            self.normal.clear()
        self.normal.add(t)

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)


def _ruleset(rules) -> RuleSet:
    return rules if isinstance(rules, RuleSet) else RuleSet(rules)


def _root_steps(t: Term, rs: RuleSet, ctx: int) -> Iterator[tuple[RewriteRule, Term]]:
    if type(t) is not Con:
        return
    for rule in rs.by_head.get(t.op, ()):
        env = match(rule.pattern, t)
        if env is not None:
            yield rule, instantiate(rule.template, env, ctx)


def rewrite_step(t: Term, rules, ctx: int | None = None) -> Term | None:
    """One leftmost-outermost step, or ``None`` when ``t`` is normal."""
    rs = _ruleset(rules)
    return _step(t, rs, T.scope(t) if ctx is None else ctx)


def _step(t: Term, rs: RuleSet, ctx: int) -> Term | None:
    if type(t) is not Con or not rs.rules or t in rs.normal:
        return None
    for _, out in _root_steps(t, rs, ctx):
        return out
    for i, (a, b) in enumerate(zip(t.args, t.binds)):
        new = _step(a, rs, ctx + b)
        if new is not None:
            return Con(t.op, t.args[:i] + (new,) + t.args[i + 1:], t.binds)
    rs.mark_normal(t)
    return None


def reducts(t: Term, rules, ctx: int | None = None) -> list[Term]:
    """All one-step reducts, without duplicates, in leftmost-outermost order."""
    rs = _ruleset(rules)
    out = list(dict.fromkeys(_all_steps(t, rs, T.scope(t) if ctx is None else ctx)))
    return out


def _all_steps(t: Term, rs: RuleSet, ctx: int) -> Iterator[Term]:
    if type(t) is not Con:
        return
    for _, out in _root_steps(t, rs, ctx):
        yield out
    for i, (a, b) in enumerate(zip(t.args, t.binds)):
        for new in _all_steps(a, rs, ctx + b):
            yield Con(t.op, t.args[:i] + (new,) + t.args[i + 1:], t.binds)


class NormalForm(NamedTuple):
    term: Term
    exhausted: bool
    steps: int


def normalize(t: Term, rules, fuel: int = 1000, ctx: int | None = None) -> NormalForm:
    """Iterate leftmost-outermost steps; ``exhausted`` when fuel ran out first."""
    rs = _ruleset(rules)
    ctx = T.scope(t) if ctx is None else ctx
    for steps in range(fuel + 1):
        new = _step(t, rs, ctx)
        if new is None:
            return NormalForm(t, False, steps)
        if steps == fuel:
            break
        t = new
    return NormalForm(t, True, fuel)


def trajectory(t: Term, rules, fuel: int, ctx: int) -> tuple[list[Term], bool]:
    """The leftmost-outermost reduction sequence and whether it reached a normal form."""
    rs = _ruleset(rules)
    seq = [t]
    for _ in range(fuel):
        new = _step(t, rs, ctx)
        if new is None:
            return seq, True
        t = new
        seq.append(t)
    return seq, _step(t, rs, ctx) is None


def joinable(t: Term, u: Term, rules, fuel: int = 1000, ctx: int | None = None) -> Verdict:
    """Equal when reduction graphs meet, distinct when both normalize apart.

    The leftmost-outermost sequences are tried first; then both reduction
    graphs are explored breadth first over all redexes, up to ``fuel`` terms
    each.  Distinct is only definitive for confluent rule sets.
    """
    if t == u:
        return Verdict.EQUAL
    rs = _ruleset(rules)
    if ctx is None:
        ctx = max(T.scope(t), T.scope(u))
    seq_t, done_t = rs.cached(("trajectory", t, fuel, ctx), lambda: trajectory(t, rs, fuel, ctx))
    seq_u, done_u = rs.cached(("trajectory", u, fuel, ctx), lambda: trajectory(u, rs, fuel, ctx))
    if done_t and done_u:
        return Verdict.EQUAL if seq_t[-1] == seq_u[-1] else Verdict.DISTINCT
    if not set(seq_t).isdisjoint(seq_u):
        return Verdict.EQUAL
    # The capped searches do not depend on each other, so they meet exactly
    # when their explored sets intersect.
    seen_t, open_t, nf_t = rs.cached(("reach", t, fuel, ctx), lambda: reachable(t, rs, fuel, ctx))
    seen_u, open_u, nf_u = rs.cached(("reach", u, fuel, ctx), lambda: reachable(u, rs, fuel, ctx))
    if not seen_t.isdisjoint(seen_u):
        return Verdict.EQUAL
    # A closed graph without a normal form (a cycle such as omega) stays unknown.
    if not open_t and not open_u and nf_t and nf_u:
        return Verdict.DISTINCT
    return Verdict.UNKNOWN


def reachable(t: Term, rules, fuel: int, ctx: int) -> tuple[frozenset, bool, bool]:
    """Breadth-first search from ``t`` that stops expanding once ``fuel`` terms are known.

    Returns the terms found, whether unexplored terms remain, and whether a
    normal form was among the expanded terms.
    """
    rs = _ruleset(rules)
    seen = {t: None}
    todo = deque([t])
    normal = False
    while todo and len(seen) < fuel:
        stuck = True
        for r in _all_steps(todo.popleft(), rs, ctx):
            stuck = False
            if r not in seen:
                seen[r] = None
                todo.append(r)
        normal |= stuck
    return frozenset(seen), bool(todo), normal


def decide(t: Term, u: Term, rules, regime: Regime, fuel: int = 1000, ctx: int | None = None) -> Verdict:
    """Equality by rewriting under the given regime.

    Unoriented equations have no rules; an equal verdict from the oriented
    part is still sound, anything else is unknown.
    """
    if regime is Regime.TERMINATING:
        if ctx is None:
            ctx = max(T.scope(t), T.scope(u))
        a, b = normalize(t, rules, fuel, ctx), normalize(u, rules, fuel, ctx)
        if a.exhausted or b.exhausted:
            return Verdict.UNKNOWN
        return Verdict.EQUAL if a.term == b.term else Verdict.DISTINCT
    v = joinable(t, u, rules, fuel, ctx)
    if regime is Regime.UNORIENTED and v is Verdict.DISTINCT:
        return Verdict.UNKNOWN
    return v


@dataclass
class ConfluenceFinding:
    term: Term
    left: Term
    right: Term
    verdict: Verdict


def check_local_confluence(
    sig: AlgebraicSignature, rules, ctx: int, depth: int, fuel: int = 50
) -> list[ConfluenceFinding]:
    """Peaks ``l <- t -> r`` over enumerated terms that do not rejoin within ``fuel``."""
    rs = _ruleset(rules)
    out = []
    for t in T.enumerate_terms(sig, ctx, depth):
        rds = reducts(t, rs, ctx)
        for l, r in itertools.combinations(rds, 2):
            v = joinable(l, r, rs, fuel, ctx)
            if v is not Verdict.EQUAL:
                out.append(ConfluenceFinding(t, l, r, v))
    return out
