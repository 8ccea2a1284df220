"""Command-line interface.

Exit codes: 0 success or equal, 1 usage or input error, 2 fuel exhausted,
3 distinct, 4 unknown, 5 law violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from .catalog import LCWithFixModel, ListMonoidModel
from .jsonio import DocumentError, canonical_json, dumps_document, load_document, morphism_from_map
from .models import Model, Verdict, check_model, fold
from .modules import ModuleTypeError
from .presentation import SignatureMorphism, TwoSignature, pushout_as_algebraic, renaming_morphism
from .recursion import DEFAULT_FUEL, QuotientModel, _head_op, satisfies
from .rewriting import RuleSet, compile_all, normalize
from .signature import SignatureError
from .syntax import ParseError, parse_term, print_term
from .terms import ScopeError

EXIT_OK, EXIT_USAGE, EXIT_FUEL, EXIT_DISTINCT, EXIT_UNKNOWN, EXIT_LAW = range(6)
VERDICT_EXIT = {Verdict.EQUAL: EXIT_OK, Verdict.DISTINCT: EXIT_DISTINCT, Verdict.UNKNOWN: EXIT_UNKNOWN}
TARGETS = ("list-model", "lcbe-with-Y", "self-quotient")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def resolve_fuel(flag: int | None, two: TwoSignature | None = None) -> int:
    """Flag, then ``BINDSIG_FUEL``, then the document, then the default."""
    if flag is not None:
        return flag
    env = os.environ.get("BINDSIG_FUEL")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"BINDSIG_FUEL must be an integer, got {env!r}") from None
    if two is not None and two.fuel is not None:
        return two.fuel
    return DEFAULT_FUEL


def _vars(text: str | None) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()] if text else []


def _target_model(name: str, two: TwoSignature, fuel: int) -> Model:
    if name == "self-quotient":
        return QuotientModel(two, fuel)
    if name == "list-model":
        binary = [op.name for op in two.sig.ops if op.arity == (0, 0)]
        const = [op.name for op in two.sig.ops if op.arity == ()]
        if len(two.sig) != 2 or len(binary) != 1 or len(const) != 1:
            raise UsageError("list-model needs a signature with one binary operation and one constant")
        return ListMonoidModel(two.sig, binary[0], const[0])
    if name == "lcbe-with-Y":
        try:
            return LCWithFixModel(fuel=fuel, signature=two.sig)
        except (StopIteration, ValueError):
            raise UsageError("lcbe-with-Y needs the operations app, abs and fix") from None
    raise UsageError(f"unknown target {name!r}; choose from {', '.join(TARGETS)}")


# -- commands -----------------------------------------------------------------------------

def cmd_normalize(args) -> int:
    two = load_document(args.sig)
    t, names = parse_term(args.term, two.sig, _vars(args.vars))
    nf = normalize(t, RuleSet(compile_all(two)), resolve_fuel(args.fuel, two), len(names))
    print(print_term(nf.term, names))
    if nf.exhausted:
        print(f"fuel exhausted after {nf.steps} steps", file=sys.stderr)
        return EXIT_FUEL
    return EXIT_OK


def cmd_eq(args) -> int:
    two = load_document(args.sig)
    lhs, names = parse_term(args.lhs, two.sig, _vars(args.vars))
    rhs, names = parse_term(args.rhs, two.sig, names)
    verdict = QuotientModel(two, resolve_fuel(args.fuel, two)).equal(lhs, rhs)
    print(verdict.value)
    return VERDICT_EXIT[verdict]


def cmd_fold(args) -> int:
    two = load_document(args.sig)
    t, names = parse_term(args.term, two.sig, _vars(args.vars))
    model = _target_model(args.target, two, resolve_fuel(args.fuel, two))
    print(model.render(fold(t, model, len(names)), names))
    return EXIT_OK


def _table(rows: list[tuple[str, str, int, int, int]]) -> None:
    width = max((len(r[1]) for r in rows), default=4)
    for status, law, checks, unknown, bad in rows:
        print(f"{status:4}  {law:<{width}}  {checks:7} checks  {unknown:5} unknown  {bad:5} violations")


def cmd_laws(args) -> int:
    two = load_document(args.sig)
    model = QuotientModel(two, resolve_fuel(args.fuel, two))
    contexts = tuple(range(args.max_context + 1))
    report = check_model(model, depth=args.depth, budget=args.budget, contexts=contexts, seed=args.seed)
    rows = [("PASS" if bad == 0 else "FAIL", law, c, u, bad) for law, (c, u, bad) in report.laws.items()]
    failed = not report.ok
    examples = [f"[{f.law}] {f.detail}" for f in report.violations[: report.max_findings]]
    for eq in two.equations:
        r = satisfies(model, eq, contexts, args.depth, args.budget, args.seed)
        rows.append(("PASS" if r.ok else "FAIL", f"equation {eq.name}", r.probes, r.unknown, r.distinct))
        failed |= not r.ok
        examples += [f"[equation {eq.name}] {ce}" for ce in r.counterexamples]
    _table(rows)
    for text in examples:
        print(f"counterexample {text}")
    return EXIT_LAW if failed else EXIT_OK


def cmd_satisfies(args) -> int:
    two = load_document(args.sig)
    model = _target_model(args.target, two, resolve_fuel(args.fuel, two))
    if model.signature != two.sig:
        raise UsageError("target model does not match the document's operations")
    wanted = args.equation or [e.name for e in two.equations]
    contexts = tuple(range(args.max_context + 1))
    failed = False
    for name in wanted:
        try:
            eq = two.equation(name)
        except KeyError:
            raise UsageError(f"no equation named {name!r}") from None
        r = satisfies(model, eq, contexts, args.depth, args.budget, args.seed)
        print(("PASS  " if r.ok else "FAIL  ") + r.summary())
        for ce in r.counterexamples:
            print(f"  counterexample: {ce}")
        failed |= not r.ok
    return EXIT_LAW if failed else EXIT_OK


def _leg(spec: str | None, base: TwoSignature, side: TwoSignature, which: str) -> SignatureMorphism:
    if spec is None:
        missing = [op for op in base.sig.names if op not in side.sig]
        if missing:
            raise UsageError(f"{which} side lacks base operations {missing}; pass --{which}-map")
        return renaming_morphism(base.sig, side.sig, {})
    text = Path(spec).read_text(encoding="utf-8") if Path(spec).exists() else spec
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--{which}-map is neither a file nor JSON: {exc}") from None
    return morphism_from_map(data, base.sig, side.sig, f"{which}-map")


def cmd_pushout(args) -> int:
    base, left, right = load_document(args.base), load_document(args.left), load_document(args.right)
    f = _leg(args.left_map, base, left, "left")
    g = _leg(args.right_map, base, right, "right")
    labels = tuple(args.labels.split(",")) if args.labels else None
    result, inl, inr = pushout_as_algebraic(base, (f, left), (g, right), args.policy, labels)
    text = dumps_document(result)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    maps = {
        "left": {op: _image(inl, op) for op in inl.source.names},
        "right": {op: _image(inr, op) for op in inr.source.names},
    }
    (sys.stdout if args.out else sys.stderr).write(canonical_json(maps))
    return EXIT_OK


def _image(f: SignatureMorphism, op: str) -> str:
    return _head_op(f.component(op)) or op


# -- entry point -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bindsig", description="Binding signatures with equations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--sig", required=True, help="signature document (JSON)")
        sp.add_argument("--fuel", type=int, help="rewrite step / search budget")
        sp.add_argument("--vars", help="comma-separated context names (default: order of first use)")

    sp = sub.add_parser("normalize", help="print the normal form of a term")
    common(sp)
    sp.add_argument("--term", required=True)
    sp.set_defaults(func=cmd_normalize)

    sp = sub.add_parser("eq", help="decide equality of two terms")
    common(sp)
    sp.add_argument("--lhs", required=True)
    sp.add_argument("--rhs", required=True)
    sp.set_defaults(func=cmd_eq)

    sp = sub.add_parser("fold", help="fold a term into a built-in model")
    common(sp)
    sp.add_argument("--term", required=True)
    sp.add_argument("--target", required=True, choices=TARGETS)
    sp.set_defaults(func=cmd_fold)

    for name, func, helptext in (
        ("laws", cmd_laws, "check the monad laws, linearity and the equations on the quotient"),
        ("satisfies", cmd_satisfies, "check equations against a built-in model"),
    ):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.add_argument("--depth", type=int, default=3)
        sp.add_argument("--max-context", type=int, default=2)
        sp.add_argument("--budget", type=int, default=20000)
        sp.add_argument("--seed", type=int, default=0)
        sp.set_defaults(func=func)
    sp.add_argument("--target", default="self-quotient", choices=TARGETS)
    sp.add_argument("--equation", action="append", help="equation name (repeatable; default all)")

    sp = sub.add_parser("pushout", help="amalgamate two documents over a base")
    sp.add_argument("--base", required=True)
    sp.add_argument("--left", required=True)
    sp.add_argument("--right", required=True)
    sp.add_argument("--out", help="output document (default: stdout)")
    sp.add_argument("--left-map", help="JSON object (or file) sending base operations to the left side")
    sp.add_argument("--right-map", help="JSON object (or file) sending base operations to the right side")
    sp.add_argument("--policy", choices=("qualify", "reject"), default="qualify")
    sp.add_argument("--labels", help="comma-separated qualifiers (default: left,right)")
    sp.set_defaults(func=cmd_pushout)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DocumentError, ParseError, ScopeError, SignatureError, ModuleTypeError, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
