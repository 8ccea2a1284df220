"""Equations, 2-signatures, signature morphisms and their colimits."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .modules import (
    THETA,
    Case,
    Comp,
    Curry,
    DerivM,
    Id,
    ModuleExpr,
    ModuleTypeError,
    MorphismExpr,
    OpInj,
    Prod,
    SigExpr,
    Deriv,
    Tau,
    Tuple,
    Uncurry,
    Weaken,
    deriv_depth,
    factors_of,
    op_tau,
    theta_arity,
    typecheck,
)
from .signature import (
    EMPTY,
    AlgebraicSignature,
    SignatureError,
    coproduct,
    coproduct_renamings,
    default_labels,
)


class Orientation(enum.Enum):
    LR = "lr"
    RL = "rl"
    NONE = "none"


class Regime(enum.Enum):
    """How equality in the quotient is decided."""

    TERMINATING = "terminating"
    CONFLUENT = "confluent"
    UNORIENTED = "unoriented"


_REGIME_RANK = {Regime.TERMINATING: 0, Regime.CONFLUENT: 1, Regime.UNORIENTED: 2}


def weakest_regime(regimes: Sequence[Regime]) -> Regime:
    return max(regimes, key=_REGIME_RANK.__getitem__, default=Regime.TERMINATING)


@dataclass(frozen=True)
class Equation:
    """A parallel pair ``lhs, rhs : source -> target`` with a rewriting orientation."""

    name: str
    source: ModuleExpr
    target: ModuleExpr
    lhs: MorphismExpr
    rhs: MorphismExpr
    orient: Orientation = Orientation.LR

    @property
    def order(self) -> int:
        """``n`` for a target ``Θ`` derived ``n`` times."""
        return deriv_depth(self.target)

    def check(self, sig: AlgebraicSignature) -> None:
        """Raise unless both sides are well typed and the equation is elementary."""
        if self.order < 0:
            raise ModuleTypeError(f"equation {self.name}: target {self.target!r} is not a derived Θ")
        if not is_algebraic_module(self.source):
            raise ModuleTypeError(f"equation {self.name}: source {self.source!r} is not algebraic")
        for side, e in (("lhs", self.lhs), ("rhs", self.rhs)):
            try:
                src, tgt = typecheck(e, sig, self.source)
            except (ModuleTypeError, SignatureError) as exc:
                raise ModuleTypeError(f"equation {self.name}, {side}: {exc}") from None
            if tgt != self.target:
                raise ModuleTypeError(
                    f"equation {self.name}, {side}: target {tgt!r} but {self.target!r} declared"
                )


def is_algebraic_module(m: ModuleExpr) -> bool:
    """Products of derived ``Θ`` factors, or an operation table."""
    if isinstance(m, SigExpr):
        return True
    return all(deriv_depth(f) >= 0 for f in factors_of(m))


@dataclass(frozen=True)
class TwoSignature:
    sig: AlgebraicSignature
    equations: tuple[Equation, ...] = ()
    regime: Regime = Regime.CONFLUENT
    fuel: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))
        names = [e.name for e in self.equations]
        if len(set(names)) != len(names):
            raise SignatureError(f"duplicate equation names: {names}")
        for eq in self.equations:
            eq.check(self.sig)

    def equation(self, name: str) -> Equation:
        for eq in self.equations:
            if eq.name == name:
                return eq
        raise KeyError(name)


# -- signature morphisms -----------------------------------------------------------------

@dataclass(frozen=True)
class SignatureMorphism:
    """One component ``Θ^(a) -> Θ`` over ``target`` per operation of ``source``."""

    source: AlgebraicSignature
    target: AlgebraicSignature
    assignment: tuple[tuple[str, MorphismExpr], ...]
    _table: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        assignment = tuple(
            self.assignment.items() if isinstance(self.assignment, Mapping) else self.assignment
        )
        object.__setattr__(self, "assignment", assignment)
        table = dict(assignment)
        object.__setattr__(self, "_table", table)
        if set(table) != set(self.source.names) or len(table) != len(assignment):
            raise SignatureError(
                f"morphism must assign each of {list(self.source.names)} exactly once, got {list(table)}"
            )
        for op in self.source.ops:
            want = (theta_arity(op.arity), THETA)
            try:
                got = typecheck(table[op.name], self.target, want[0])
            except (ModuleTypeError, SignatureError) as exc:
                raise ModuleTypeError(f"component {op.name}: {exc}") from None
            if got != want:
                raise ModuleTypeError(f"component {op.name}: has type {got}, expected {want}")

    def component(self, op: str) -> MorphismExpr:
        return self._table[op]

    def as_case(self) -> Case:
        """The whole morphism as one module morphism ``Sig(source) -> Θ``."""
        return Case(self.assignment, self.source, THETA)


def identity_morphism(sig: AlgebraicSignature) -> SignatureMorphism:
    return SignatureMorphism(sig, sig, tuple((op, op_tau(op)) for op in sig.names))


def renaming_morphism(
    source: AlgebraicSignature, target: AlgebraicSignature, mapping: Mapping[str, str]
) -> SignatureMorphism:
    """Send each operation to the equally-shaped operation ``mapping[op]`` of ``target``."""
    for op in source.ops:
        new = mapping.get(op.name, op.name)
        if target.arity(new) != op.arity:
            raise SignatureError(f"{op.name} -> {new}: arities differ")
    return SignatureMorphism(
        source, target, tuple((op, op_tau(mapping.get(op, op))) for op in source.names)
    )


def _reinterpret(e: MorphismExpr, old: AlgebraicSignature, g: SignatureMorphism) -> MorphismExpr:
    """Move ``e`` from ambient ``old`` to ``g.target`` along ``g``."""
    r = lambda x: _reinterpret(x, old, g)
    match e:
        case Tau(sig):
            s = old if sig is None else sig
            return Case(tuple((op, g.component(op)) for op in s.names), s, THETA)
        case OpInj(op, sig):
            return OpInj(op, old if sig is None else sig)
        case Case(branches, sig, target):
            return Case(tuple((n, r(f)) for n, f in branches), old if sig is None else sig, target)
        case Comp(outer, inner):
            return Comp(r(outer), r(inner))
        case Tuple(parts):
            return Tuple(tuple(map(r, parts)))
        case DerivM(inner):
            return DerivM(r(inner))
        case Curry(inner):
            return Curry(r(inner))
        case Uncurry(inner):
            return Uncurry(r(inner))
    return e


def compose(g: SignatureMorphism, f: SignatureMorphism) -> SignatureMorphism:
    """``g`` after ``f``."""
    if f.target != g.source:
        raise SignatureError("cannot compose: target of the first is not the source of the second")
    return SignatureMorphism(
        f.source, g.target, tuple((op, _reinterpret(c, f.target, g)) for op, c in f.assignment)
    )


# -- renaming operations -----------------------------------------------------------------

def _rename_sig(s: AlgebraicSignature, old: AlgebraicSignature, mapping: Mapping[str, str]):
    return s.rename(dict(mapping)) if s.is_subsignature_of(old) else s


def rename_module(m: ModuleExpr, old: AlgebraicSignature, mapping: Mapping[str, str]) -> ModuleExpr:
    match m:
        case Deriv(inner):
            return Deriv(rename_module(inner, old, mapping))
        case Prod(fs):
            return Prod(tuple(rename_module(f, old, mapping) for f in fs))
        case SigExpr(s):
            return SigExpr(_rename_sig(s, old, mapping))
    return m


def rename_ops(e: MorphismExpr, old: AlgebraicSignature, mapping: Mapping[str, str]) -> MorphismExpr:
    """Transport ``e`` from ambient ``old`` to the ambient with renamed operations.

    The new ambient may be larger, so ambient-wide case analyses are pinned to
    the renamed copy of ``old``.  Explicit signatures are renamed when they are
    part of ``old``.
    """
    r = lambda x: rename_ops(x, old, mapping)
    rs = lambda s: None if s is None else _rename_sig(s, old, mapping)
    match e:
        case Id(m):
            return Id(rename_module(m, old, mapping))
        case Weaken(m):
            return Weaken(rename_module(m, old, mapping))
        case Tau(sig):
            return Tau(rs(sig))
        case OpInj(op, sig):
            if sig is None or sig.is_subsignature_of(old):
                op = mapping.get(op, op)
            return OpInj(op, rs(sig))
        case Case(branches, sig, target):
            s = old if sig is None else sig
            new_s = _rename_sig(s, old, mapping)
            names = [mapping.get(n, n) if new_s is not s else n for n, _ in branches]
            tgt = None if target is None else rename_module(target, old, mapping)
            return Case(tuple((n, r(f)) for n, (_, f) in zip(names, branches)), new_s, tgt)
        case Comp(outer, inner):
            return Comp(r(outer), r(inner))
        case Tuple(parts):
            return Tuple(tuple(map(r, parts)))
        case DerivM(inner):
            return DerivM(r(inner))
        case Curry(inner):
            return Curry(r(inner))
        case Uncurry(inner):
            return Uncurry(r(inner))
    return e


def rename_equation(eq: Equation, old: AlgebraicSignature, mapping: Mapping[str, str], name: str | None = None):
    return Equation(
        eq.name if name is None else name,
        rename_module(eq.source, old, mapping),
        rename_module(eq.target, old, mapping),
        rename_ops(eq.lhs, old, mapping),
        rename_ops(eq.rhs, old, mapping),
        eq.orient,
    )


# -- colimits -----------------------------------------------------------------------------

def coequalizer_as_equation(
    f: SignatureMorphism, g: SignatureMorphism, name: str = "coeq", orient: Orientation = Orientation.LR
) -> Equation:
    """The single equation whose models are those where ``f`` and ``g`` agree."""
    if f.source != g.source or f.target != g.target:
        raise SignatureError("coequalizer needs two morphisms with the same source and target")
    return Equation(name, SigExpr(f.source), THETA, f.as_case(), g.as_case(), orient)


@dataclass(frozen=True)
class Coproduct:
    result: TwoSignature
    injections: tuple[SignatureMorphism, ...]
    renamings: tuple[dict, ...]


def coproduct_two(
    parts: Sequence[TwoSignature], policy: str = "qualify", labels: Sequence[str] | None = None
) -> Coproduct:
    """Disjoint union of operations and of equations, with injections."""
    parts = list(parts)
    labels = tuple(labels) if labels is not None else default_labels(len(parts))
    maps = coproduct_renamings([p.sig for p in parts], policy, labels)
    sig = coproduct([p.sig for p in parts], policy, labels)
    eq_names = [e.name for p in parts for e in p.equations]
    clashing = {n for n in eq_names if eq_names.count(n) > 1}
    equations = []
    for label, p, m in zip(labels, parts, maps):
        for eq in p.equations:
            new_name = f"{label}.{eq.name}" if eq.name in clashing else eq.name
            equations.append(rename_equation(eq, p.sig, m, new_name))
    fuels = [p.fuel for p in parts if p.fuel is not None]
    result = TwoSignature(
        sig, tuple(equations), weakest_regime([p.regime for p in parts]), max(fuels) if fuels else None
    )
    injections = tuple(renaming_morphism(p.sig, sig, m) for p, m in zip(parts, maps))
    return Coproduct(result, injections, tuple(maps))


def pushout_as_algebraic(
    base: TwoSignature,
    left: tuple[SignatureMorphism, TwoSignature],
    right: tuple[SignatureMorphism, TwoSignature],
    policy: str = "qualify",
    labels: Sequence[str] | None = None,
    glue_name: str = "glue",
) -> tuple[TwoSignature, SignatureMorphism, SignatureMorphism]:
    """Amalgamate ``left`` and ``right`` along ``base``.

    The result is the coproduct plus one equation identifying the two images
    of every base operation.  Over a base without operations that equation has
    no instances and is left out.
    """
    (f, lsig), (g, rsig) = left, right
    if f.source != base.sig or g.source != base.sig:
        raise SignatureError("pushout legs must start at the base signature")
    if f.target != lsig.sig or g.target != rsig.sig:
        raise SignatureError("pushout legs must end at the given 2-signatures")
    cp = coproduct_two([lsig, rsig], policy, labels)
    inl, inr = cp.injections
    equations = list(cp.result.equations)
    if len(base.sig):
        if glue_name in {e.name for e in equations}:
            raise SignatureError(f"equation name {glue_name!r} already used")
        equations.append(coequalizer_as_equation(compose(inl, f), compose(inr, g), glue_name))
    result = TwoSignature(cp.result.sig, tuple(equations), cp.result.regime, cp.result.fuel)
    return result, inl, inr


EMPTY_TWO = TwoSignature(EMPTY, (), Regime.TERMINATING)
