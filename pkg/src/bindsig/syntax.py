"""Named concrete syntax for terms.

Grammar::

    term  ::= name | name "(" [arg ("," arg)*] ")"
    arg   ::= [name+ "."] term

``op(x y. body, u)`` binds ``x`` and ``y`` in ``body`` with ``y`` innermost
(de Bruijn index 0).  An optional leading ``bind`` keyword before the binder
names is accepted.  Free names form the context in order of first occurrence
unless a context is supplied.  Names may contain dots so that qualified
operations such as ``left.app`` can be written directly; ``x.x`` splits into
binder, dot and body unless the joined name is an operation.
"""

from __future__ import annotations

import re
from typing import Iterator, Mapping, Sequence

from .signature import AlgebraicSignature
from .terms import Con, Term, Var, free_indices, scope


class ParseError(ValueError):
    def __init__(self, message: str, pos: int | None = None):
        super().__init__(message if pos is None else f"{message} (at offset {pos})")
        self.pos = pos


_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_']*(?:\.[A-Za-z_][A-Za-z0-9_']*)*")
_SPACE = re.compile(r"\s+")


def _tokens(text: str, sig: AlgebraicSignature) -> Iterator[tuple[str, str, int]]:
    pos = 0
    while pos < len(text):
        if m := _SPACE.match(text, pos):
            pos = m.end()
            continue
        ch = text[pos]
        if ch in "(),.":
            yield ch, ch, pos
            pos += 1
            continue
        m = _WORD.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {ch!r}", pos)
        yield from _split_word(m.group(), m.start(), sig)
        pos = m.end()


def _split_word(word: str, start: int, sig: AlgebraicSignature) -> Iterator[tuple[str, str, int]]:
    parts = word.split(".")
    i, offset = 0, start
    while i < len(parts):
        j = len(parts)
        while j > i + 1 and ".".join(parts[i:j]) not in sig:
            j -= 1
        name = ".".join(parts[i:j])
        if i > 0:
            yield ".", ".", offset - 1
        yield "name", name, offset
        offset += len(name) + 1
        i = j


class _Parser:
    def __init__(self, text: str, sig: AlgebraicSignature, free: list[str], extend: bool):
        self.toks = list(_tokens(text, sig))
        self.toks.append(("eof", "", len(text)))
        self.i = 0
        self.sig = sig
        self.free = free
        self.extend = extend

    def peek(self, k: int = 0) -> tuple[str, str, int]:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind: str) -> str:
        tok = self.peek()
        if tok[0] != kind:
            shown = tok[1] or "end of input"
            raise ParseError(f"expected {kind!r} but found {shown!r}", tok[2])
        self.i += 1
        return tok[1]

    def term(self, bound: list[str]) -> Term:
        _, name, pos = self.peek()
        self.take("name")
        if self.peek()[0] == "(":
            return self.application(name, pos, bound)
        if name in bound:
            return Var(len(bound) - 1 - _rindex(bound, name))
        if name in self.sig:
            if self.sig.arity(name):
                raise ParseError(f"operation {name!r} needs arguments", pos)
            return Con(name, (), ())
        if name not in self.free:
            if not self.extend:
                raise ParseError(f"unknown variable {name!r}", pos)
            self.free.append(name)
        return Var(len(bound) + self.free.index(name))

    def application(self, name: str, pos: int, bound: list[str]) -> Term:
        if name not in self.sig:
            raise ParseError(f"unknown operation {name!r}", pos)
        arity = self.sig.arity(name)
        self.take("(")
        args: list[Term] = []
        if self.peek()[0] != ")":
            while True:
                args.append(self.argument(bound, arity, len(args), name))
                if self.peek()[0] != ",":
                    break
                self.take(",")
        self.take(")")
        if len(args) != len(arity):
            raise ParseError(f"{name} expects {len(arity)} arguments, got {len(args)}", pos)
        return Con(name, tuple(args), arity)

    def argument(self, bound: list[str], arity, k: int, op: str) -> Term:
        binders: list[str] = []
        j = 0
        while self.peek(j)[0] == "name":
            j += 1
        if j and self.peek(j)[0] == ".":
            binders = [self.take("name") for _ in range(j)]
            self.take(".")
            if binders[0] == "bind" and len(binders) > 1:
                binders = binders[1:]
        pos = self.peek()[2]
        if k < len(arity) and len(binders) != arity[k]:
            raise ParseError(f"argument {k} of {op} binds {arity[k]} variable(s), got {len(binders)}", pos)
        return self.term(bound + binders)


def _rindex(xs: list[str], x: str) -> int:
    return len(xs) - 1 - xs[::-1].index(x)


def parse_term(
    text: str, sig: AlgebraicSignature, free: Sequence[str] | None = None, extend: bool = True
) -> tuple[Term, list[str]]:
    """Parse ``text``; returns the term and the context names (possibly extended)."""
    names = list(free or [])
    p = _Parser(text, sig, names, extend)
    t = p.term([])
    p.take("eof")
    return t, names


def default_names(n: int) -> list[str]:
    return [f"x{i}" for i in range(n)]


def print_term(
    t: Term,
    names: Sequence[str] | None = None,
    sig: AlgebraicSignature | None = None,
    abbrev: Mapping[Term, str] | None = None,
) -> str:
    """Render a ground term; binders at absolute level ``L`` are called ``xL``.

    ``abbrev`` maps closed subterms to display names (output is then for
    reading only and need not reparse).
    """
    ctx = len(names) if names is not None else scope(t)
    free = list(names) if names is not None else default_names(ctx)
    taken = set(free) | set(sig.names if sig else ()) | _op_names(t)
    out: list[str] = []
    _print(t, free, [], taken, out, abbrev or {})
    return "".join(out)


def _op_names(t: Term) -> set[str]:
    seen: set[str] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if type(s) is Con:
            seen.add(s.op)
            stack.extend(s.args)
    return seen


def _fresh(level: int, avoid: set[str]) -> str:
    name = f"x{level}"
    while name in avoid:
        name += "'"
    return name


def _print(t, free, bound, taken, out, abbrev) -> None:
    if abbrev and t in abbrev and not free_indices(t):
        out.append(abbrev[t])
        return
    if type(t) is Var:
        i = t.index
        if i < len(bound):
            out.append(bound[len(bound) - 1 - i])
        elif i - len(bound) < len(free):
            out.append(free[i - len(bound)])
        else:
            raise ValueError(f"free index {i - len(bound)} has no name")
        return
    if type(t) is not Con:
        out.append(repr(t))
        return
    out.append(t.op)
    if not t.args:
        return
    out.append("(")
    for k, (a, b) in enumerate(zip(t.args, t.binds)):
        if k:
            out.append(", ")
        new: list[str] = []
        for _ in range(b):
            new.append(_fresh(len(free) + len(bound) + len(new), taken | set(bound) | set(new)))
        if new:
            out.append(" ".join(new) + ". ")
        _print(a, free, bound + new, taken, out, abbrev)
    out.append(")")
