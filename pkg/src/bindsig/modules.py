"""A small language of modules and module morphisms, with a typed evaluator.

Modules (``ModuleExpr``) describe shapes of values living at a context:

* ``Theta()`` -- a model element;
* ``Deriv(M)`` -- a value of ``M`` in the context extended by one variable;
* ``Prod(Ms)`` -- a tuple (``UNIT`` is the empty product);
* ``SigExpr(sig)`` -- an operation of ``sig`` together with its arguments.

A product of a single factor is that factor; :func:`prod` normalizes.

Morphisms (``MorphismExpr``) denote context-indexed functions between module
values.  ``Comp(f, g)`` runs ``g`` first.  ``Tau`` and ``OpInj`` refer to the
ambient signature unless they carry one.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Sequence

from .models import Model, Report, Verdict, bounded_product, combine, sample_elements
from .signature import AlgebraicSignature


class ModuleTypeError(TypeError):
    """Ill-typed module or morphism expression."""


# -- modules ---------------------------------------------------------------------------

class ModuleExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Theta(ModuleExpr):
    def __repr__(self):
        return "Θ"


@dataclass(frozen=True)
class Deriv(ModuleExpr):
    inner: ModuleExpr

    def __repr__(self):
        return f"{self.inner!r}′"


@dataclass(frozen=True)
class Prod(ModuleExpr):
    factors: tuple[ModuleExpr, ...] = ()

    def __repr__(self):
        return "1" if not self.factors else "(" + " × ".join(map(repr, self.factors)) + ")"


@dataclass(frozen=True)
class SigExpr(ModuleExpr):
    sig: AlgebraicSignature

    def __repr__(self):
        return f"Sig{list(self.sig.names)}"


THETA = Theta()
UNIT = Prod(())


def deriv(m: ModuleExpr, times: int = 1) -> ModuleExpr:
    for _ in range(times):
        m = Deriv(m)
    return m


def prod(*factors: ModuleExpr) -> ModuleExpr:
    return factors[0] if len(factors) == 1 else Prod(tuple(factors))


def factors_of(m: ModuleExpr) -> tuple[ModuleExpr, ...]:
    return m.factors if isinstance(m, Prod) else (m,)


def theta_arity(arity: Sequence[int]) -> ModuleExpr:
    """The module of argument tuples for an operation of the given arity."""
    return prod(*(deriv(THETA, a) for a in arity))


def append_theta(m: ModuleExpr) -> ModuleExpr:
    """``m × Θ`` with the new factor last (products are flattened one level)."""
    return prod(*factors_of(m), THETA)


def split_theta(s: ModuleExpr) -> ModuleExpr:
    """Inverse of :func:`append_theta`; raises when ``s`` is not of that form."""
    fs = factors_of(s)
    if not fs or fs[-1] != THETA:
        raise ModuleTypeError(f"expected a module of the form M × Θ, got {s!r}")
    m = prod(*fs[:-1])
    if append_theta(m) != s:
        raise ModuleTypeError(f"ambiguous product {s!r}; flatten nested products")
    return m


def deriv_depth(m: ModuleExpr) -> int:
    """``n`` when ``m`` is ``Θ`` derived ``n`` times, else -1."""
    n = 0
    while isinstance(m, Deriv):
        m, n = m.inner, n + 1
    return n if m == THETA else -1


# -- module values -----------------------------------------------------------------------

@dataclass(frozen=True)
class SigValue:
    """A value of ``SigExpr``: ``args[i]`` lives at ``ctx + arity[i]``."""

    op: str
    args: tuple


def pack(values: Sequence[Any]) -> Any:
    return values[0] if len(values) == 1 else tuple(values)


def unpack(m: ModuleExpr, v: Any) -> tuple:
    return tuple(v) if isinstance(m, Prod) else (v,)


def module_subst(m: ModuleExpr, v: Any, sigma: Sequence[Any], target_ctx: int, model: Model) -> Any:
    """The substitution action of ``m``: ``v`` over ``len(sigma)`` into ``target_ctx``."""
    match m:
        case Theta():
            return model.subst(v, sigma)
        case Deriv(inner):
            return module_subst(inner, v, model.lift(sigma, target_ctx, 1), target_ctx + 1, model)
        case Prod(fs):
            return tuple(module_subst(f, x, sigma, target_ctx, model) for f, x in zip(fs, v))
        case SigExpr(sig):
            arity = sig.arity(v.op)
            return SigValue(v.op, tuple(
                model.subst(x, model.lift(sigma, target_ctx, a)) for x, a in zip(v.args, arity)
            ))
    raise ModuleTypeError(f"not a module: {m!r}")


def module_rename(m: ModuleExpr, v: Any, mapping: Sequence[int], target_ctx: int, model: Model) -> Any:
    match m:
        case Theta():
            return model.rename(v, mapping, target_ctx)
        case Deriv(inner):
            lifted = [0] + [j + 1 for j in mapping]
            return module_rename(inner, v, lifted, target_ctx + 1, model)
        case Prod(fs):
            return tuple(module_rename(f, x, mapping, target_ctx, model) for f, x in zip(fs, v))
        case SigExpr(sig):
            arity = sig.arity(v.op)
            return SigValue(v.op, tuple(
                model.rename(x, list(range(a)) + [j + a for j in mapping], target_ctx + a)
                for x, a in zip(v.args, arity)
            ))
    raise ModuleTypeError(f"not a module: {m!r}")


def module_equal(m: ModuleExpr, v: Any, w: Any, model: Model) -> Verdict:
    match m:
        case Theta():
            return model.equal(v, w)
        case Deriv(inner):
            return module_equal(inner, v, w, model)
        case Prod(fs):
            return combine(module_equal(f, x, y, model) for f, x, y in zip(fs, v, w))
        case SigExpr():
            if v.op != w.op:
                return Verdict.DISTINCT
            return combine(model.equal(x, y) for x, y in zip(v.args, w.args))
    raise ModuleTypeError(f"not a module: {m!r}")


def render_value(m: ModuleExpr, v: Any, model: Model) -> str:
    match m:
        case Theta():
            return model.render(v)
        case Deriv(inner):
            return render_value(inner, v, model)
        case Prod(fs):
            return "(" + ", ".join(render_value(f, x, model) for f, x in zip(fs, v)) + ")"
        case SigExpr():
            return f"{v.op}(" + ", ".join(model.render(x) for x in v.args) + ")"
    return repr(v)


def sample_values(m: ModuleExpr, model: Model, ctx: int, depth: int) -> list[Any]:
    """Values of ``m`` at ``ctx`` built from folded enumerated terms."""
    match m:
        case Theta():
            return sample_elements(model, ctx, depth)
        case Deriv(inner):
            return sample_values(inner, model, ctx + 1, depth)
        case Prod(fs):
            return [tuple(p) for p in itertools.product(*(sample_values(f, model, ctx, depth) for f in fs))]
        case SigExpr(sig):
            out = []
            for op in sig.ops:
                pools = [sample_elements(model, ctx + a, depth) for a in op.arity]
                out.extend(SigValue(op.name, tuple(args)) for args in itertools.product(*pools))
            return out
    raise ModuleTypeError(f"not a module: {m!r}")


# -- morphisms ---------------------------------------------------------------------------

class MorphismExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Id(MorphismExpr):
    module: ModuleExpr


@dataclass(frozen=True)
class Comp(MorphismExpr):
    """``outer`` after ``inner``."""

    outer: MorphismExpr
    inner: MorphismExpr


@dataclass(frozen=True)
class Tau(MorphismExpr):
    sig: AlgebraicSignature | None = None


@dataclass(frozen=True)
class OpInj(MorphismExpr):
    op: str
    sig: AlgebraicSignature | None = None


@dataclass(frozen=True)
class Proj(MorphismExpr):
    index: int


@dataclass(frozen=True)
class Tuple(MorphismExpr):
    parts: tuple[MorphismExpr, ...] = ()


@dataclass(frozen=True)
class Case(MorphismExpr):
    """One branch per operation of ``sig``, each out of that operation's arguments."""

    branches: tuple[tuple[str, MorphismExpr], ...]
    sig: AlgebraicSignature | None = None
    target: ModuleExpr | None = None

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(sorted(self.branches, key=lambda b: b[0])))


@dataclass(frozen=True)
class DerivM(MorphismExpr):
    inner: MorphismExpr


@dataclass(frozen=True)
class Curry(MorphismExpr):
    inner: MorphismExpr


@dataclass(frozen=True)
class Uncurry(MorphismExpr):
    inner: MorphismExpr


@dataclass(frozen=True)
class Weaken(MorphismExpr):
    module: ModuleExpr


@dataclass(frozen=True)
class SigmaSubst(MorphismExpr):
    pass


def comp(*fs: MorphismExpr) -> MorphismExpr:
    """``comp(f, g, h)`` is ``f`` after ``g`` after ``h``."""
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Comp(f, out)
    return out


def tuple_(*parts: MorphismExpr) -> Tuple:
    return Tuple(tuple(parts))


def case(branches: dict[str, MorphismExpr], sig=None, target=None) -> Case:
    return Case(tuple(branches.items()), sig, target)


def op_tau(op: str) -> MorphismExpr:
    """The action of a single operation: ``Θ^(a) → Θ``."""
    return Comp(Tau(), OpInj(op))


SWAP = Tuple((Proj(1), Proj(0)))


# -- typing ------------------------------------------------------------------------------

Fn = Callable[[Model, int, Any], Any]


@dataclass(frozen=True)
class Typed:
    source: ModuleExpr
    target: ModuleExpr
    fn: Fn


def _expect(src: ModuleExpr | None, actual: ModuleExpr, what: str) -> None:
    if src is not None and src != actual:
        raise ModuleTypeError(f"{what}: source is {actual!r} but {src!r} was required")


@lru_cache(maxsize=4096)
def compile_morphism(e: MorphismExpr, amb: AlgebraicSignature, src: ModuleExpr | None = None) -> Typed:
    """Typecheck ``e`` over ``amb`` (with an optional known source) and build its evaluator."""
    match e:
        case Id(m):
            _expect(src, m, "id")
            return Typed(m, m, lambda model, ctx, v: v)

        case Comp(outer, inner):
            g = compile_morphism(inner, amb, src)
            f = compile_morphism(outer, amb, g.target)
            gf, ff = g.fn, f.fn
            return Typed(g.source, f.target, lambda model, ctx, v: ff(model, ctx, gf(model, ctx, v)))

        case Tau(sig):
            # The ambient tau also acts on any part of the ambient signature.
            if sig is None and isinstance(src, SigExpr):
                s = src.sig
            else:
                s = amb if sig is None else sig
            if not s.is_subsignature_of(amb):
                raise ModuleTypeError(f"tau over {s!r} is not part of the ambient {amb!r}")
            _expect(src, SigExpr(s), "tau")
            return Typed(SigExpr(s), THETA, lambda model, ctx, v: model.action(v.op, v.args, ctx))

        case OpInj(op, sig):
            s = amb if sig is None else sig
            if op not in s:
                raise ModuleTypeError(f"unknown operation {op!r} in opinj")
            arity = s.arity(op)
            m = theta_arity(arity)
            _expect(src, m, f"opinj {op}")
            single = len(arity) == 1
            if single:
                return Typed(m, SigExpr(s), lambda model, ctx, v: SigValue(op, (v,)))
            return Typed(m, SigExpr(s), lambda model, ctx, v: SigValue(op, tuple(v)))

        case Proj(i):
            if src is None:
                raise ModuleTypeError("proj needs a known source")
            if not isinstance(src, Prod):
                raise ModuleTypeError(f"proj {i} out of a non-product {src!r}")
            if not 0 <= i < len(src.factors):
                raise ModuleTypeError(f"proj {i} out of range for {src!r}")
            return Typed(src, src.factors[i], lambda model, ctx, v: v[i])

        case Tuple(parts):
            if src is None:
                for p in parts:
                    try:
                        src = compile_morphism(p, amb, None).source
                        break
                    except ModuleTypeError:
                        continue
                else:
                    raise ModuleTypeError("tuple needs a known source")
            typed = [compile_morphism(p, amb, src) for p in parts]
            fns = [t.fn for t in typed]
            tgt = prod(*(t.target for t in typed))
            if len(fns) == 1:
                return Typed(src, tgt, fns[0])
            return Typed(src, tgt, lambda model, ctx, v: tuple(f(model, ctx, v) for f in fns))

        case Case(branches, sig, target):
            s = amb if sig is None else sig
            names = [n for n, _ in branches]
            if sorted(names) != sorted(s.names) or len(set(names)) != len(names):
                raise ModuleTypeError(f"case branches {names} must cover exactly {list(s.names)}")
            _expect(src, SigExpr(s), "case")
            table: dict[str, tuple[bool, Fn]] = {}
            tgt = target
            for name, f in branches:
                arity = s.arity(name)
                t = compile_morphism(f, amb, theta_arity(arity))
                if tgt is None:
                    tgt = t.target
                elif t.target != tgt:
                    raise ModuleTypeError(f"case branch {name}: target {t.target!r}, expected {tgt!r}")
                table[name] = (len(arity) == 1, t.fn)
            if tgt is None:
                raise ModuleTypeError("case with no branches needs an explicit target")

            def run_case(model, ctx, v):
                single, fn = table[v.op]
                return fn(model, ctx, v.args[0] if single else tuple(v.args))

            return Typed(SigExpr(s), tgt, run_case)

        case DerivM(inner):
            if src is not None and not isinstance(src, Deriv):
                raise ModuleTypeError(f"deriv: source {src!r} is not derived")
            f = compile_morphism(inner, amb, None if src is None else src.inner)
            ff = f.fn
            return Typed(Deriv(f.source), Deriv(f.target), lambda model, ctx, v: ff(model, ctx + 1, v))

        case Curry(inner):
            if src is None:
                f = compile_morphism(inner, amb, None)
                m = split_theta(f.source)
            else:
                m = src
                f = compile_morphism(inner, amb, append_theta(m))
            ff = f.fn

            def run_curry(model, ctx, v):
                weak = module_rename(m, v, [j + 1 for j in range(ctx)], ctx + 1, model)
                arg = pack(unpack(m, weak) + (model.var(ctx + 1, 0),))
                return ff(model, ctx + 1, arg)

            return Typed(m, Deriv(f.target), run_curry)

        case Uncurry(inner):
            m = None if src is None else split_theta(src)
            g = compile_morphism(inner, amb, m)
            if not isinstance(g.target, Deriv):
                raise ModuleTypeError(f"uncurry: target {g.target!r} is not derived")
            m, n, gf = g.source, g.target.inner, g.fn

            def run_uncurry(model, ctx, v):
                parts = unpack(append_theta(m), v)
                mv, t = pack(parts[:-1]), parts[-1]
                body = gf(model, ctx, mv)
                sigma = [t] + [model.var(ctx, j) for j in range(ctx)]
                return module_subst(n, body, sigma, ctx, model)

            return Typed(append_theta(m), n, run_uncurry)

        case Weaken(m):
            _expect(src, m, "weaken")
            return Typed(m, Deriv(m), lambda model, ctx, v: module_rename(
                m, v, [j + 1 for j in range(ctx)], ctx + 1, model))

        case SigmaSubst():
            s = Prod((Deriv(THETA), THETA))
            _expect(src, s, "sigma")
            return Typed(s, THETA, lambda model, ctx, v: model.subst(
                v[0], [v[1]] + [model.var(ctx, j) for j in range(ctx)]))

    raise ModuleTypeError(f"not a morphism expression: {e!r}")


def typecheck(
    e: MorphismExpr, ambient: AlgebraicSignature, source: ModuleExpr | None = None
) -> tuple[ModuleExpr, ModuleExpr]:
    t = compile_morphism(e, ambient, source)
    return t.source, t.target


def evaluate(
    e: MorphismExpr,
    model: Model,
    ctx: int,
    v: Any,
    source: ModuleExpr | None = None,
    ambient: AlgebraicSignature | None = None,
) -> Any:
    amb = model.signature if ambient is None else ambient
    return compile_morphism(e, amb, source).fn(model, ctx, v)


def uncurry_times(e: MorphismExpr, n: int) -> MorphismExpr:
    for _ in range(n):
        e = Uncurry(e)
    return e


# -- linearity ---------------------------------------------------------------------------

def check_linearity(
    e: MorphismExpr,
    model: Model,
    source: ModuleExpr | None = None,
    contexts: Sequence[int] = (0, 1, 2),
    depth: int = 3,
    subst_depth: int = 2,
    budget: int | None = 20000,
    seed: int = 0,
) -> Report:
    """Sampled check that ``e`` commutes with substitution."""
    rng = random.Random(seed)
    t = compile_morphism(e, model.signature, source)
    report = Report(f"linearity of {e!r}")
    pools = {c: sample_elements(model, c, subst_depth) for c in contexts}
    for n in contexts:
        values = sample_values(t.source, model, n, depth)
        for m in contexts:
            sigmas = bounded_product([pools[m]] * n, budget, rng)
            for v, sigma in bounded_product([values, sigmas], budget, rng):
                lhs = t.fn(model, m, module_subst(t.source, v, sigma, m, model))
                rhs = module_subst(t.target, t.fn(model, n, v), sigma, m, model)
                report.record("linearity", module_equal(t.target, lhs, rhs, model), lambda: (
                    f"at {render_value(t.source, v, model)} with "
                    f"[{', '.join(model.render(s) for s in sigma)}]: "
                    f"{render_value(t.target, lhs, model)} vs {render_value(t.target, rhs, model)}"
                ))
    return report
