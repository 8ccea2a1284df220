"""JSON encoding of signature documents and the expressions inside them.

Morphisms are nested arrays tagged by their first element.  ``["comp", f, g]``
means ``g`` first, then ``f``.  Output is canonical: sorted keys, two-space
indentation and a trailing newline.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .modules import (
    THETA,
    Case,
    Comp,
    Curry,
    Deriv,
    DerivM,
    Id,
    ModuleExpr,
    MorphismExpr,
    OpInj,
    Prod,
    Proj,
    SigExpr,
    SigmaSubst,
    Tau,
    Theta,
    Tuple,
    Uncurry,
    Weaken,
    op_tau,
    prod,
)
from .presentation import Equation, Orientation, Regime, SignatureMorphism, TwoSignature
from .signature import AlgebraicSignature, Operation


class DocumentError(ValueError):
    """Malformed document; ``where`` is a path such as ``equations[1].lhs``."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- signatures ------------------------------------------------------------------------------

def sig_to_json(sig: AlgebraicSignature) -> list:
    return [{"name": op.name, "arity": list(op.arity)} for op in sig.ops]


def sig_from_json(data: Any, where: str = "ops") -> AlgebraicSignature:
    if not isinstance(data, list):
        raise DocumentError(where, "expected a list of operations")
    ops = []
    for i, entry in enumerate(data):
        w = f"{where}[{i}]"
        if not isinstance(entry, dict) or set(entry) - {"name", "arity"} or "name" not in entry:
            raise DocumentError(w, 'expected {"name": ..., "arity": [...]}')
        arity = entry.get("arity", [])
        if not isinstance(entry["name"], str) or not isinstance(arity, list) or not all(
            isinstance(a, int) and not isinstance(a, bool) and a >= 0 for a in arity
        ):
            raise DocumentError(w, "name must be a string and arity a list of naturals")
        ops.append(Operation(entry["name"], tuple(arity)))
    try:
        return AlgebraicSignature(tuple(ops))
    except ValueError as exc:
        raise DocumentError(where, str(exc)) from None


# -- modules -------------------------------------------------------------------------------

def module_to_json(m: ModuleExpr) -> Any:
    match m:
        case Theta():
            return "theta"
        case Deriv(inner):
            return ["deriv", module_to_json(inner)]
        case Prod(fs):
            return ["prod", *map(module_to_json, fs)]
        case SigExpr(sig):
            return ["sig", sig_to_json(sig)]
    raise TypeError(f"not a module: {m!r}")


def module_from_json(data: Any, where: str = "module") -> ModuleExpr:
    if data == "theta":
        return THETA
    if isinstance(data, list) and data:
        tag, *rest = data
        if tag == "deriv" and len(rest) == 1:
            return Deriv(module_from_json(rest[0], f"{where}[1]"))
        if tag == "prod":
            return prod(*(module_from_json(x, f"{where}[{i + 1}]") for i, x in enumerate(rest)))
        if tag == "sig" and len(rest) == 1:
            return SigExpr(sig_from_json(rest[0], f"{where}[1]"))
    raise DocumentError(where, f"not a module expression: {json.dumps(data)}")


# -- morphisms -------------------------------------------------------------------------------

def _opts(**kw) -> list:
    opts = {k: v for k, v in kw.items() if v is not None}
    return [opts] if opts else []


def morphism_to_json(e: MorphismExpr) -> Any:
    match e:
        case Id(m):
            return ["id", module_to_json(m)]
        case Comp(outer, inner):
            return ["comp", morphism_to_json(outer), morphism_to_json(inner)]
        case Tau(sig):
            return ["tau", *_opts(sig=None if sig is None else sig_to_json(sig))]
        case OpInj(op, sig):
            return ["opinj", op, *_opts(sig=None if sig is None else sig_to_json(sig))]
        case Proj(i):
            return ["proj", i]
        case Tuple(parts):
            return ["tuple", *map(morphism_to_json, parts)]
        case Case(branches, sig, target):
            return ["case", {n: morphism_to_json(f) for n, f in branches}, *_opts(
                sig=None if sig is None else sig_to_json(sig),
                target=None if target is None else module_to_json(target),
            )]
        case DerivM(inner):
            return ["deriv", morphism_to_json(inner)]
        case Curry(inner):
            return ["curry", morphism_to_json(inner)]
        case Uncurry(inner):
            return ["uncurry", morphism_to_json(inner)]
        case Weaken(m):
            return ["weaken", module_to_json(m)]
        case SigmaSubst():
            return ["sigma"]
    raise TypeError(f"not a morphism: {e!r}")


def morphism_from_json(data: Any, where: str = "morphism") -> MorphismExpr:
    if not isinstance(data, list) or not data or not isinstance(data[0], str):
        raise DocumentError(where, f"expected a tagged array, got {json.dumps(data)}")
    tag, *rest = data
    sub = lambda i: morphism_from_json(rest[i], f"{where}[{i + 1}]")
    opts = rest[-1] if rest and isinstance(rest[-1], dict) else {}

    def opt_sig():
        return sig_from_json(opts["sig"], f"{where}.sig") if "sig" in opts else None

    n = len(rest)
    match tag:
        case "id" if n == 1:
            return Id(module_from_json(rest[0], f"{where}[1]"))
        case "comp" if n == 2:
            return Comp(sub(0), sub(1))
        case "tau" if n <= 1:
            return Tau(opt_sig())
        case "opinj" if 1 <= n <= 2 and isinstance(rest[0], str):
            return OpInj(rest[0], opt_sig())
        case "proj" if n == 1 and isinstance(rest[0], int):
            return Proj(rest[0])
        case "tuple":
            return Tuple(tuple(sub(i) for i in range(n)))
        case "case" if 1 <= n <= 2 and isinstance(rest[0], dict):
            branches = tuple(
                (name, morphism_from_json(f, f"{where}.{name}")) for name, f in rest[0].items()
            )
            target = module_from_json(opts["target"], f"{where}.target") if "target" in opts else None
            return Case(branches, opt_sig(), target)
        case "deriv" if n == 1:
            return DerivM(sub(0))
        case "curry" if n == 1:
            return Curry(sub(0))
        case "uncurry" if n == 1:
            return Uncurry(sub(0))
        case "weaken" if n == 1:
            return Weaken(module_from_json(rest[0], f"{where}[1]"))
        case "sigma" if n == 0:
            return SigmaSubst()
    raise DocumentError(where, f"unknown or malformed morphism {json.dumps(data)}")


# -- equations and documents -----------------------------------------------------------------

def equation_to_json(eq: Equation) -> dict:
    return {
        "name": eq.name,
        "source": module_to_json(eq.source),
        "target": module_to_json(eq.target),
        "lhs": morphism_to_json(eq.lhs),
        "rhs": morphism_to_json(eq.rhs),
        "orient": eq.orient.value,
    }


def equation_from_json(data: Any, where: str = "equation") -> Equation:
    if not isinstance(data, dict):
        raise DocumentError(where, "expected an object")
    missing = {"name", "source", "target", "lhs", "rhs"} - set(data)
    if missing:
        raise DocumentError(where, f"missing fields {sorted(missing)}")
    try:
        orient = Orientation(data.get("orient", "lr"))
    except ValueError:
        raise DocumentError(f"{where}.orient", f"unknown orientation {data.get('orient')!r}") from None
    return Equation(
        data["name"],
        module_from_json(data["source"], f"{where}.source"),
        module_from_json(data["target"], f"{where}.target"),
        morphism_from_json(data["lhs"], f"{where}.lhs"),
        morphism_from_json(data["rhs"], f"{where}.rhs"),
        orient,
    )


def document_to_json(two: TwoSignature) -> dict:
    doc = {
        "ops": sig_to_json(two.sig),
        "equations": [equation_to_json(e) for e in two.equations],
        "regime": two.regime.value,
    }
    if two.fuel is not None:
        doc["fuel"] = two.fuel
    return doc


def document_from_json(data: Any) -> TwoSignature:
    if not isinstance(data, dict):
        raise DocumentError("document", "expected an object")
    unknown = set(data) - {"ops", "equations", "regime", "fuel"}
    if unknown:
        raise DocumentError("document", f"unknown fields {sorted(unknown)}")
    sig = sig_from_json(data.get("ops", []))
    equations = data.get("equations", [])
    if not isinstance(equations, list):
        raise DocumentError("equations", "expected a list")
    eqs = [equation_from_json(e, f"equations[{i}]") for i, e in enumerate(equations)]
    for i, eq in enumerate(eqs):
        try:
            eq.check(sig)
        except (TypeError, ValueError) as exc:
            raise DocumentError(f"equations[{i}]", str(exc)) from None
    try:
        regime = Regime(data.get("regime", "confluent"))
    except ValueError:
        raise DocumentError("regime", f"unknown regime {data.get('regime')!r}") from None
    fuel = data.get("fuel")
    if fuel is not None and (not isinstance(fuel, int) or fuel < 0):
        raise DocumentError("fuel", "expected a natural number")
    try:
        return TwoSignature(sig, tuple(eqs), regime, fuel)
    except (TypeError, ValueError) as exc:
        raise DocumentError("document", str(exc)) from None


def dumps_document(two: TwoSignature) -> str:
    return canonical_json(document_to_json(two))


def load_document(path: str | Path) -> TwoSignature:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DocumentError(str(path), f"invalid JSON: {exc}") from None
    return document_from_json(data)


def morphism_map_to_json(f: SignatureMorphism) -> dict:
    return {op: morphism_to_json(c) for op, c in f.assignment}


def morphism_from_map(data: Any, source: AlgebraicSignature, target: AlgebraicSignature, where: str):
    """A morphism from ``{"op": "name"}`` (renaming) or ``{"op": <morphism>}`` entries."""
    if not isinstance(data, dict):
        raise DocumentError(where, "expected an object mapping operations")
    assignment = []
    for op in source.names:
        if op not in data:
            raise DocumentError(where, f"no image for operation {op!r}")
        v = data[op]
        assignment.append((op, op_tau(v) if isinstance(v, str) else morphism_from_json(v, f"{where}.{op}")))
    try:
        return SignatureMorphism(source, target, tuple(assignment))
    except (TypeError, ValueError) as exc:
        raise DocumentError(where, str(exc)) from None
