"""De Bruijn terms over an algebraic signature.

Conventions:

* ``Var(i)`` is a de Bruijn index into the surrounding context.
* Under an argument whose arity entry is ``a`` the newly bound variables are
  ``0 .. a-1`` (the innermost binder is ``0``) and every outer index is
  shifted by ``a``.
* ``Con`` records the binder count of each argument, so renaming and
  substitution never need the signature.

``MetaVar`` and ``ExplicitSubst`` only occur in rewrite patterns and templates.
A metavariable ``M`` of arity ``a`` stands for a term in ``a`` parameters plus
the (implicit) context in which the whole pattern is matched;
``MetaVar(M, r)`` places parameter ``j`` at local index ``r[j]``.
``ExplicitSubst(body, bs)`` interprets ``body`` in ``len(bs)`` local
variables and replaces them by ``bs``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence, Union

from .signature import AlgebraicSignature


class ScopeError(ValueError):
    pass


class Term:
    __slots__ = ()

    def __repr__(self) -> str:
        return _repr(self)


@dataclass(frozen=True, slots=True, eq=False, repr=False)
class Var(Term):
    index: int

    def __eq__(self, other):
        return type(other) is Var and other.index == self.index

    def __hash__(self):
        return hash(("var", self.index))


@dataclass(frozen=True, slots=True, eq=False, repr=False)
class Con(Term):
    op: str
    args: tuple[Term, ...] = ()
    binds: tuple[int, ...] = ()
    _hash: int = field(default=0, init=False, compare=False)

    def __post_init__(self):
        if len(self.args) != len(self.binds):
            raise ScopeError(f"{self.op}: {len(self.args)} args but {len(self.binds)} binder counts")
        object.__setattr__(self, "_hash", hash((self.op, self.binds, self.args)))

    def __eq__(self, other):
        return self is other or (
            type(other) is Con
            and self._hash == other._hash
            and self.op == other.op
            and self.binds == other.binds
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, slots=True, eq=False, repr=False)
class MetaVar(Term):
    name: str
    renaming: tuple[int, ...] = ()

    def __eq__(self, other):
        return type(other) is MetaVar and other.name == self.name and other.renaming == self.renaming

    def __hash__(self):
        return hash(("meta", self.name, self.renaming))

    @property
    def arity(self) -> int:
        return len(self.renaming)


@dataclass(frozen=True, slots=True, eq=False, repr=False)
class ExplicitSubst(Term):
    body: Term
    bindings: tuple[Term, ...]

    def __eq__(self, other):
        return type(other) is ExplicitSubst and other.body == self.body and other.bindings == self.bindings

    def __hash__(self):
        return hash(("esubst", self.body, self.bindings))


def _repr(t: Term) -> str:
    if type(t) is Var:
        return f"#{t.index}"
    if type(t) is Con:
        if not t.args:
            return t.op
        parts = []
        for a, b in zip(t.args, t.binds):
            parts.append(f"{b}.{_repr(a)}" if b else _repr(a))
        return f"{t.op}({', '.join(parts)})"
    if type(t) is MetaVar:
        return f"?{t.name}{list(t.renaming)}"
    if type(t) is ExplicitSubst:
        return f"{_repr(t.body)}[{', '.join(map(_repr, t.bindings))}]"
    return object.__repr__(t)


# -- construction ----------------------------------------------------------------

def var(i: int) -> Var:
    if i < 0:
        raise ScopeError("variable index must be >= 0")
    return Var(i)


def con(sig: AlgebraicSignature, op: str, args: Sequence[Term] = ()) -> Con:
    """Apply ``op``; argument ``i`` lives in the context extended by ``arity[i]``."""
    arity = sig.arity(op)
    if len(args) != len(arity):
        raise ScopeError(f"{op} expects {len(arity)} arguments, got {len(args)}")
    return Con(op, tuple(args), arity)


# -- inspection --------------------------------------------------------------------

def free_indices(t: Term, depth: int = 0) -> set[int]:
    out: set[int] = set()
    _free(t, depth, out)
    return out


def _free(t: Term, depth: int, out: set[int]) -> None:
    if type(t) is Var:
        if t.index >= depth:
            out.add(t.index - depth)
    elif type(t) is Con:
        for a, b in zip(t.args, t.binds):
            _free(a, depth + b, out)
    elif type(t) is MetaVar:
        out.update(i - depth for i in t.renaming if i >= depth)
    elif type(t) is ExplicitSubst:
        for b in t.bindings:
            _free(b, depth, out)


def scope(t: Term) -> int:
    """Smallest context size in which ``t`` is well scoped."""
    fv = free_indices(t)
    return max(fv) + 1 if fv else 0


def check_scope(t: Term, ctx: int, sig: AlgebraicSignature | None = None) -> None:
    """Raise :class:`ScopeError` unless ``t`` is a ground term over ``ctx`` variables."""
    if type(t) is Var:
        if t.index >= ctx:
            raise ScopeError(f"variable #{t.index} out of scope (context size {ctx})")
    elif type(t) is Con:
        if sig is not None:
            if t.op not in sig:
                raise ScopeError(f"unknown operation {t.op!r}")
            if sig.arity(t.op) != t.binds:
                raise ScopeError(f"{t.op}: binder counts {t.binds} do not match arity {sig.arity(t.op)}")
        for a, b in zip(t.args, t.binds):
            check_scope(a, ctx + b, sig)
    else:
        raise ScopeError(f"{type(t).__name__} is not allowed in ground terms")


def is_ground(t: Term) -> bool:
    if type(t) is Var:
        return True
    if type(t) is Con:
        return all(is_ground(a) for a in t.args)
    return False


def height(t: Term) -> int:
    """Syntactic height: variables and constants have height 1."""
    if type(t) is Con:
        return 1 + max((height(a) for a in t.args), default=0)
    if type(t) is ExplicitSubst:
        return height(t.body)
    return 1


def size(t: Term) -> int:
    if type(t) is Con:
        return 1 + sum(size(a) for a in t.args)
    return 1


def subterms(t: Term) -> Iterable[Term]:
    yield t
    if type(t) is Con:
        for a in t.args:
            yield from subterms(a)


def ops_of(t: Term) -> set[str]:
    return {s.op for s in subterms(t) if type(s) is Con}


# -- renaming and substitution -----------------------------------------------------

Renaming = Union[Sequence[int], Mapping[int, int], Callable[[int], int]]


def _as_function(rho: Renaming) -> Callable[[int], int]:
    if callable(rho):
        return rho
    table = rho

    def f(i: int) -> int:
        try:
            return table[i]
        except (IndexError, KeyError):
            raise ScopeError(f"renaming undefined on free index {i}") from None

    return f


def rename(t: Term, rho: Renaming) -> Term:
    """Apply a variable renaming; bound variables are left alone."""
    return _rename(t, _as_function(rho), 0)


def _rename(t: Term, f: Callable[[int], int], depth: int) -> Term:
    if type(t) is Var:
        i = t.index
        return t if i < depth else Var(f(i - depth) + depth)
    if type(t) is Con:
        if not t.args:
            return t
        return Con(t.op, tuple(_rename(a, f, depth + b) for a, b in zip(t.args, t.binds)), t.binds)
    if type(t) is MetaVar:
        return MetaVar(t.name, tuple(i if i < depth else f(i - depth) + depth for i in t.renaming))
    if type(t) is ExplicitSubst:
        return ExplicitSubst(t.body, tuple(_rename(b, f, depth) for b in t.bindings))
    raise TypeError(f"not a term: {t!r}")


def shift(t: Term, by: int = 1) -> Term:
    """Weaken ``t`` by ``by`` fresh variables placed at the front of the context."""
    if by == 0:
        return t
    return _rename(t, lambda i: i + by, 0)


def subst(t: Term, sigma: Sequence[Term], memo: dict | None = None) -> Term:
    """Simultaneous capture-avoiding substitution of ``sigma[i]`` for ``Var(i)``.

    ``memo`` caches results per (subterm, substitution) across calls, which
    pays off when many terms sharing subterms meet the same substitutions.
    """
    return _subst(t, tuple(sigma), memo)


def _lift(sigma: tuple[Term, ...], b: int) -> tuple[Term, ...]:
    if b == 0:
        return sigma
    return tuple(Var(j) for j in range(b)) + tuple(shift(s, b) for s in sigma)


def _subst(t: Term, sigma: tuple[Term, ...], memo: dict | None = None) -> Term:
    if type(t) is Var:
        try:
            return sigma[t.index]
        except IndexError:
            raise ScopeError(
                f"substitution of length {len(sigma)} undefined on #{t.index}"
            ) from None
    if type(t) is Con:
        if not t.args:
            return t
        if memo is None:
            return Con(t.op, tuple(_subst(a, _lift(sigma, b)) for a, b in zip(t.args, t.binds)), t.binds)
        hit = memo.get((t, sigma))
        if hit is not None:
            return hit
        lifted = []
        for a, b in zip(t.args, t.binds):
            if b:
                lk = (b, sigma)
                up = memo.get(lk)
                if up is None:
                    up = memo[lk] = _lift(sigma, b)
                lifted.append(_subst(a, up, memo))
            else:
                lifted.append(_subst(a, sigma, memo))
        out = memo[(t, sigma)] = Con(t.op, tuple(lifted), t.binds)
        return out
    if type(t) is MetaVar:
        try:
            images = tuple(sigma[i] for i in t.renaming)
        except IndexError:
            raise ScopeError(f"substitution undefined on a parameter of ?{t.name}") from None
        indices = [s.index for s in images if type(s) is Var]
        if len(indices) == len(images) and len(set(indices)) == len(indices):
            return MetaVar(t.name, tuple(indices))
        return ExplicitSubst(MetaVar(t.name, tuple(range(len(images)))), images)
    if type(t) is ExplicitSubst:
        return ExplicitSubst(t.body, tuple(_subst(b, sigma) for b in t.bindings))
    raise TypeError(f"not a term: {t!r}")


def identity_subst(n: int) -> tuple[Var, ...]:
    return tuple(Var(i) for i in range(n))


def compose_subst(sigma: Sequence[Term], delta: Sequence[Term], memo: dict | None = None) -> tuple[Term, ...]:
    """``sigma`` then ``delta``: ``subst(t, compose_subst(s, d)) == subst(subst(t, s), d)``."""
    return tuple(subst(s, delta, memo) for s in sigma)


def instantiate_one(body: Term, value: Term, ctx: int) -> Term:
    """``body`` over ``ctx + 1`` with its index 0 replaced by ``value`` (over ``ctx``)."""
    return subst(body, (value,) + identity_subst(ctx))


# -- enumeration -------------------------------------------------------------------

class TermList(list):
    """A list of terms; ``truncated`` is set when a budget cut enumeration short."""

    truncated: bool = False


@lru_cache(maxsize=None)
def _enum(sig: AlgebraicSignature, ctx: int, depth: int) -> tuple[Term, ...]:
    if depth <= 0:
        return ()
    out: list[Term] = [Var(i) for i in range(ctx)]
    for op in sig.ops:
        pools = [_enum(sig, ctx + a, depth - 1) for a in op.arity]
        for args in itertools.product(*pools):
            out.append(Con(op.name, tuple(args), op.arity))
    return tuple(out)


@lru_cache(maxsize=None)
def count_terms(sig: AlgebraicSignature, ctx: int, depth: int) -> int:
    """``len(enumerate_terms(sig, ctx, depth))`` without enumerating."""
    if depth <= 0:
        return 0
    total = ctx
    for op in sig.ops:
        n = 1
        for a in op.arity:
            n *= count_terms(sig, ctx + a, depth - 1)
        total += n
    return total


def enumerate_terms(
    sig: AlgebraicSignature, context: int, depth: int, budget: int | None = None
) -> TermList:
    """All ground terms of height <= ``depth`` over ``context`` variables.

    Variables come first, then operations in table order with arguments in
    lexicographic order of their own enumerations.
    """
    terms = _enum(sig, context, depth)
    out = TermList(terms if budget is None else terms[:budget])
    out.truncated = budget is not None and len(terms) > budget
    return out


def random_term(
    sig: AlgebraicSignature, ctx: int, depth: int, rng: random.Random, leaf_bias: float = 0.3
) -> Term:
    """A random ground term of height <= ``depth``.

    Only constructors whose arguments can be filled are chosen, so this
    fails only when no term of that height exists at all.
    """
    if count_terms(sig, ctx, depth) == 0:
        raise ValueError(f"no terms of height <= {depth} in context {ctx}")
    leaves = [Var(i) for i in range(ctx)] + [Con(op.name, (), ()) for op in sig.ops if not op.arity]
    nodes = [
        op for op in sig.ops
        if op.arity and depth > 1 and all(count_terms(sig, ctx + a, depth - 1) for a in op.arity)
    ]
    if leaves and (not nodes or rng.random() < leaf_bias):
        return rng.choice(leaves)
    op = rng.choice(nodes)
    args = tuple(random_term(sig, ctx + a, depth - 1, rng, leaf_bias) for a in op.arity)
    return Con(op.name, args, op.arity)


# -- exhaustive monad laws -------------------------------------------------------------

@dataclass
class LawTally:
    """Checks and failures per law; failures keep the offending inputs."""

    checks: dict[str, int] = field(default_factory=dict)
    failures: list[tuple[str, tuple]] = field(default_factory=list)

    def count(self, law: str, ok: bool, witness: Callable[[], tuple]) -> None:
        self.checks[law] = self.checks.get(law, 0) + 1
        if not ok and len(self.failures) < 20:
            self.failures.append((law, witness()))

    @property
    def ok(self) -> bool:
        return not self.failures


def check_monad_laws(
    sig: AlgebraicSignature,
    contexts: Sequence[int] = (0, 1, 2),
    depth: int = 3,
    subst_depth: int = 2,
) -> LawTally:
    """Unit and associativity laws of substitution, with no sampling.

    Every term of height <= ``depth`` over each context is checked against
    every substitution built from terms of height <= ``subst_depth``.
    Results are memoized per substitution ``sigma`` so the shared structure
    of enumerated terms is only substituted once.
    """
    tally = LawTally()
    terms = {c: _enum(sig, c, depth) for c in contexts}
    images = {c: _enum(sig, c, subst_depth) for c in contexts}
    subs = {
        (n, m): list(itertools.product(images[m], repeat=n)) for n in contexts for m in contexts
    }
    for n in contexts:
        ids = identity_subst(n)
        for t in terms[n]:
            tally.count("right unit", subst(t, ids) == t, lambda: (t,))
        for m in contexts:
            for sigma in subs[n, m]:
                for i in range(n):
                    tally.count("left unit", subst(Var(i), sigma) == sigma[i], lambda: (Var(i), sigma))
    checked = 0
    for n in contexts:
        for m in contexts:
            for sigma in subs[n, m]:
                memo: dict = {}
                once = [subst(t, sigma, memo) for t in terms[n]]
                for k in contexts:
                    for delta in subs[m, k]:
                        both = compose_subst(sigma, delta, memo)
                        for t, s in zip(terms[n], once):
                            if _subst(s, delta, memo) != _subst(t, both, memo):
                                tally.count("associativity", False, lambda: (t, sigma, delta))
                                tally.checks["associativity"] -= 1
                        checked += len(once)
    tally.checks["associativity"] = tally.checks.get("associativity", 0) + checked
    return tally
