"""Brute-force congruence closure on a finite universe of terms.

This is deliberately independent of the rewrite engine: equation instances are
produced by evaluating both sides with the module evaluator on enumerated
argument tuples, and the closure is computed with a union-find structure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

from . import terms as T
from .models import SyntacticModel
from .modules import SigExpr, SigValue, append_theta, deriv_depth, evaluate, factors_of, pack, uncurry_times
from .presentation import Equation, TwoSignature
from .signature import AlgebraicSignature
from .terms import Con, ExplicitSubst, MetaVar, Term

Node = tuple[int, Term]


class UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def add(self, x) -> None:
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self.parent[ry] = rx
        return True


@dataclass(frozen=True)
class Partition:
    """Classes of the enumerated terms, each listed in enumeration order."""

    context: int
    classes: tuple[tuple[Term, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "_index", {t: i for i, c in enumerate(self.classes) for t in c})

    def __len__(self) -> int:
        return len(self.classes)

    def class_of(self, t: Term) -> int:
        return self._index[t]

    def same(self, t: Term, u: Term) -> bool:
        return self._index[t] == self._index[u]

    def refines(self, other: Partition) -> bool:
        """Every class of ``self`` lies inside a class of ``other``."""
        return all(len({other.class_of(t) for t in c}) == 1 for c in self.classes)


def partition_by(terms: Iterable[Term], key, context: int = 0) -> Partition:
    groups: dict = {}
    for t in terms:
        groups.setdefault(key(t), []).append(t)
    return Partition(context, tuple(tuple(g) for g in groups.values()))


def universe_heights(sig: AlgebraicSignature, ctx: int, depth: int) -> dict[int, int]:
    """Largest height needed at each context reachable under binders."""
    hmax: dict[int, int] = {}
    todo = [(ctx, depth)]
    while todo:
        c, h = todo.pop()
        if h < 1 or hmax.get(c, 0) >= h:
            continue
        hmax[c] = h
        for op in sig.ops:
            for a in op.arity:
                todo.append((c + a, h - 1))
    return hmax


def _levels(t: Term, level: int, out: dict[str, int]) -> None:
    if type(t) is MetaVar:
        out[t.name] = min(out.get(t.name, level), level)
    elif type(t) is Con:
        for a in t.args:
            _levels(a, level + 1, out)
    elif type(t) is ExplicitSubst:
        _levels(t.body, level, out)
        for b in t.bindings:
            _levels(b, level, out)


def _source_shapes(source) -> list[list[tuple[str, int]]]:
    """Per choice of operations in table factors: the list of (metavariable, arity)."""
    choices = []
    for f in factors_of(source):
        if isinstance(f, SigExpr):
            choices.append([(op.name, op.arity) for op in f.sig.ops])
        else:
            choices.append([(None, (deriv_depth(f),))])
    return [list(c) for c in itertools.product(*choices)]


def equation_instances(
    eq: Equation, sig: AlgebraicSignature, hmax: dict[int, int]
) -> Iterator[tuple[int, Term, Term]]:
    """Ground instances ``(ctx, lhs, rhs)`` of the uncurried equation with both sides in range."""
    model = SyntacticModel(sig)
    n = eq.order
    lhs, rhs = uncurry_times(eq.lhs, n), uncurry_times(eq.rhs, n)
    source = eq.source
    for _ in range(n):
        source = append_theta(source)
    for shape in _source_shapes(source):
        # Symbolic evaluation gives the nesting depth of each argument slot.
        names = itertools.count()
        slots = []
        symbolic = []
        for tag, arity in shape:
            metas = tuple(MetaVar(f"M{next(names)}", tuple(range(a))) for a in arity)
            slots.append([(m.name, a) for m, a in zip(metas, arity)])
            symbolic.append(SigValue(tag, metas) if tag is not None else metas[0])
        value = pack(symbolic) if symbolic else ()
        levels: dict[str, int] = {}
        limit: dict[str, int] = {}
        for side in (lhs, rhs):
            side_levels: dict[str, int] = {}
            _levels(evaluate(side, model, 0, value, source), 0, side_levels)
            for name, lv in side_levels.items():
                limit[name] = max(limit.get(name, 0), lv)
            levels.update(side_levels)
        for c, h in sorted(hmax.items()):
            pools = []
            for group in slots:
                for name, a in group:
                    bound = h - limit.get(name, 0)
                    pool = T.enumerate_terms(sig, c + a, bound) if bound >= 1 else []
                    if name not in levels:
                        pool = pool[:1]
                    pools.append(pool)
            for combo in itertools.product(*pools):
                it = iter(combo)
                parts = []
                for (tag, arity), group in zip(shape, slots):
                    args = tuple(next(it) for _ in group)
                    parts.append(SigValue(tag, args) if tag is not None else args[0])
                v = pack(parts) if parts else ()
                yield c, evaluate(lhs, model, c, v, source), evaluate(rhs, model, c, v, source)


def congruence_oracle(
    two: TwoSignature,
    ctx: int,
    depth: int,
    rounds: int | None = None,
    subst_depth: int = 1,
) -> Partition:
    """Smallest congruence containing the equations, on terms of height <= ``depth``.

    Works on every context reachable under binders, closes under constructors
    and under substitution by terms of height <= ``subst_depth``, and returns
    the induced partition of ``enumerate_terms(sig, ctx, depth)``.
    """
    sig = two.sig
    hmax = universe_heights(sig, ctx, depth)
    universe: dict[int, set[Term]] = {c: set(T.enumerate_terms(sig, c, h)) for c, h in hmax.items()}
    uf = UnionFind()
    for c, terms in universe.items():
        for t in terms:
            uf.add((c, t))

    def member(c: int, t: Term) -> bool:
        return c in universe and t in universe[c]

    for eq in two.equations:
        for c, l, r in equation_instances(eq, sig, hmax):
            if member(c, l) and member(c, r):
                uf.union((c, l), (c, r))

    cons = [(c, t) for c, ts in universe.items() for t in ts if type(t) is Con and t.args]
    pools = {c: T.enumerate_terms(sig, c, subst_depth) for c in universe}
    done = 0
    while rounds is None or done < rounds:
        done += 1
        changed = _congruence(uf, cons)
        changed |= _substitution(uf, universe, pools, member)
        if not changed:
            break
    base = T.enumerate_terms(sig, ctx, depth)
    groups: dict = {}
    for t in base:
        groups.setdefault(uf.find((ctx, t)), []).append(t)
    return Partition(ctx, tuple(tuple(g) for g in groups.values()))


def _congruence(uf: UnionFind, cons: list[Node]) -> bool:
    changed = False
    while True:
        table: dict = {}
        merged = False
        for c, t in cons:
            key = (c, t.op, tuple(uf.find((c + b, a)) for a, b in zip(t.args, t.binds)))
            other = table.setdefault(key, (c, t))
            if other != (c, t) and uf.union(other, (c, t)):
                merged = True
        if not merged:
            return changed
        changed = True


def _substitution(uf: UnionFind, universe, pools, member) -> bool:
    changed = False
    members = [(n, uf.find(n)) for n in uf.parent]
    for (c, t), root in members:
        if root == (c, t):
            continue
        u = root[1]
        for m in universe:
            for sigma in itertools.product(pools[m], repeat=c):
                a, b = T.subst(t, sigma), T.subst(u, sigma)
                if a != b and member(m, a) and member(m, b):
                    changed |= uf.union((m, a), (m, b))
    return changed
