"""Reference implementations that share no code with the package.

Lambda terms here use names: ``("var", x)``, ``("lam", x, body)`` and
``("app", f, a)``.  Conversion to the package's nameless terms happens only
at the comparison boundary, through :func:`to_nameless`.
"""

from __future__ import annotations

import itertools

from bindsig.terms import Con, Var

# -- named lambda terms -----------------------------------------------------------------------

_fresh = itertools.count()


def V(x):
    return ("var", x)


def L(x, body):
    return ("lam", x, body)


def A(f, *args):
    for a in args:
        f = ("app", f, a)
    return f


def free_vars(t) -> set:
    match t:
        case ("var", x):
            return {x}
        case ("lam", x, b):
            return free_vars(b) - {x}
        case ("app", f, a):
            return free_vars(f) | free_vars(a)
    raise ValueError(t)


def substitute(t, x, s):
    """``t[x := s]``, renaming binders that would capture free names of ``s``."""
    match t:
        case ("var", y):
            return s if y == x else t
        case ("app", f, a):
            return ("app", substitute(f, x, s), substitute(a, x, s))
        case ("lam", y, b):
            if y == x:
                return t
            if y in free_vars(s):
                z = f"_{next(_fresh)}"
                b = substitute(b, y, V(z))
                y = z
            return ("lam", y, substitute(b, x, s))
    raise ValueError(t)


def beta_step(t):
    """One normal-order beta step, or None."""
    match t:
        case ("app", ("lam", x, b), a):
            return substitute(b, x, a)
        case ("app", f, a):
            g = beta_step(f)
            if g is not None:
                return ("app", g, a)
            b = beta_step(a)
            return None if b is None else ("app", f, b)
        case ("lam", x, b):
            c = beta_step(b)
            return None if c is None else ("lam", x, c)
    return None


def eta_step(t):
    """One eta contraction anywhere, or None."""
    match t:
        case ("lam", x, ("app", f, ("var", y))) if y == x and x not in free_vars(f):
            return f
        case ("app", f, a):
            g = eta_step(f)
            if g is not None:
                return ("app", g, a)
            b = eta_step(a)
            return None if b is None else ("app", f, b)
        case ("lam", x, b):
            c = eta_step(b)
            return None if c is None else ("lam", x, c)
    return None


def eta_redexes(t) -> int:
    """Number of positions where an eta contraction applies."""
    n = 0
    match t:
        case ("lam", x, body):
            if body[0] == "app" and body[2] == ("var", x) and x not in free_vars(body[1]):
                n += 1
            n += eta_redexes(body)
        case ("app", f, a):
            n += eta_redexes(f) + eta_redexes(a)
    return n


def beta_eta_normal(t, fuel: int = 10_000):
    """Beta normal form by normal order, then eta contractions to the end."""
    for _ in range(fuel):
        u = beta_step(t)
        if u is None:
            break
        t = u
    else:
        raise RuntimeError("beta fuel exhausted")
    while (u := eta_step(t)) is not None:
        t = u
    return t


def to_nameless(t, context: list[str], bound: tuple = ()):
    """Package term for a named term; the innermost binder gets index 0."""
    match t:
        case ("var", x):
            if x in bound:
                return Var(len(bound) - 1 - max(i for i, y in enumerate(bound) if y == x))
            return Var(len(bound) + context.index(x))
        case ("lam", x, b):
            return Con("abs", (to_nameless(b, context, bound + (x,)),), (1,))
        case ("app", f, a):
            return Con("app", (to_nameless(f, context, bound), to_nameless(a, context, bound)), (0, 0))
    raise ValueError(t)


def from_nameless(t, context: list[str], depth: int = 0):
    """Named term for a package lambda term; binders are called ``b0, b1, ...``."""
    if type(t) is Var:
        return V(f"b{depth - 1 - t.index}" if t.index < depth else context[t.index - depth])
    if t.op == "abs":
        return L(f"b{depth}", from_nameless(t.args[0], context, depth + 1))
    return A(from_nameless(t.args[0], context, depth), from_nameless(t.args[1], context, depth))


def church(n: int):
    body = V("x")
    for _ in range(n):
        body = A(V("f"), body)
    return L("f", L("x", body))


PLUS = L("m", L("n", L("f", L("x", A(V("m"), V("f"), A(V("n"), V("f"), V("x")))))))
TIMES = L("m", L("n", L("f", A(V("m"), A(V("n"), V("f"))))))

# -- monoid words -------------------------------------------------------------------------------


def flatten(t) -> tuple[int, ...]:
    """The word of variable indices read left to right, dropping units."""
    if type(t) is Var:
        return (t.index,)
    return tuple(i for a in t.args for i in flatten(a))


def right_nested(word: tuple[int, ...], mul: str = "m", unit: str = "e"):
    if not word:
        return Con(unit, (), ())
    out = Var(word[-1])
    for i in reversed(word[:-1]):
        out = Con(mul, (Var(i), out), (0, 0))
    return out


def words(letters: int, max_len: int) -> set[tuple[int, ...]]:
    return {w for k in range(max_len + 1) for w in itertools.product(range(letters), repeat=k)}


# -- term counts ---------------------------------------------------------------------------------


def count_terms(arities: list[tuple[int, ...]], ctx: int, depth: int) -> int:
    """Terms of height <= depth, by the recurrence over the outermost operation."""
    if depth <= 0:
        return 0
    total = ctx
    for arity in arities:
        prod = 1
        for a in arity:
            prod *= count_terms(arities, ctx + a, depth - 1)
        total += prod
    return total


# -- substitution on named first-order terms -------------------------------------------------------


def named_subst(t, env: dict):
    """Substitution on named lambda terms, used to cross-check de Bruijn substitution."""
    for x, s in env.items():
        pass
    match t:
        case ("var", x):
            return env.get(x, t)
        case ("app", f, a):
            return ("app", named_subst(f, env), named_subst(a, env))
        case ("lam", y, b):
            avoid = set().union(*(free_vars(s) for s in env.values())) if env else set()
            inner = {k: v for k, v in env.items() if k != y}
            if y in avoid:
                z = f"_{next(_fresh)}"
                b = substitute(b, y, V(z))
                y = z
            return ("lam", y, named_subst(b, inner))
    raise ValueError(t)
