"""Binding signatures as operation tables.

An algebraic signature is a finite coproduct of elementary pieces, one per
operation.  Each operation has a binding arity ``(a1, ..., an)``: it takes
``n`` arguments and binds ``ai`` fresh variables in the ``i``-th one.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

BindingArity = tuple[int, ...]


class SignatureError(ValueError):
    pass


def binding_arity(entries: Iterable[int]) -> BindingArity:
    arity = tuple(int(a) for a in entries)
    if any(a < 0 for a in arity):
        raise SignatureError(f"binding arity entries must be >= 0, got {arity}")
    return arity


@dataclass(frozen=True, slots=True)
class Operation:
    name: str
    arity: BindingArity

    def __post_init__(self):
        if not self.name:
            raise SignatureError("operation name must be non-empty")
        object.__setattr__(self, "arity", binding_arity(self.arity))


@dataclass(frozen=True)
class AlgebraicSignature:
    """An ordered table of operations with unique names."""

    ops: tuple[Operation, ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        ops = tuple(
            op if isinstance(op, Operation) else Operation(op[0], tuple(op[1]))
            for op in self.ops
        )
        object.__setattr__(self, "ops", ops)
        dupes = [name for name, n in Counter(op.name for op in ops).items() if n > 1]
        if dupes:
            raise SignatureError(f"duplicate operation names: {sorted(dupes)}")
        object.__setattr__(self, "_index", {op.name: op for op in ops})

    @classmethod
    def of(cls, **arities: Sequence[int]) -> AlgebraicSignature:
        return cls(tuple(Operation(name, tuple(a)) for name, a in arities.items()))

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __iter__(self):
        return iter(self.ops)

    def __len__(self) -> int:
        return len(self.ops)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(op.name for op in self.ops)

    def arity(self, name: str) -> BindingArity:
        try:
            return self._index[name].arity
        except KeyError:
            raise SignatureError(f"unknown operation {name!r}") from None

    def is_subsignature_of(self, other: AlgebraicSignature) -> bool:
        return all(op.name in other and other.arity(op.name) == op.arity for op in self.ops)

    def rename(self, mapping: dict[str, str]) -> AlgebraicSignature:
        return AlgebraicSignature(
            tuple(Operation(mapping.get(op.name, op.name), op.arity) for op in self.ops)
        )

    def __repr__(self) -> str:
        body = ", ".join(f"{op.name}:{list(op.arity)}" for op in self.ops)
        return f"AlgebraicSignature[{body}]"


EMPTY = AlgebraicSignature()


def elementary(arity: Iterable[int], name: str) -> AlgebraicSignature:
    """The one-operation signature for a single binding arity."""
    return AlgebraicSignature((Operation(name, binding_arity(arity)),))


def default_labels(n: int) -> tuple[str, ...]:
    if n == 2:
        return ("left", "right")
    return tuple(f"s{i}" for i in range(n))


def coproduct_renamings(
    sigs: Sequence[AlgebraicSignature],
    policy: str = "qualify",
    labels: Sequence[str] | None = None,
) -> list[dict[str, str]]:
    """Per-summand name maps used to build the coproduct table.

    Under ``"qualify"`` every name occurring in more than one summand is
    prefixed with its summand label; ``"reject"`` raises on any collision.
    """
    if policy not in ("qualify", "reject"):
        raise SignatureError(f"unknown collision policy {policy!r}")
    labels = tuple(labels) if labels is not None else default_labels(len(sigs))
    if len(labels) != len(sigs):
        raise SignatureError("one label per summand is required")
    counts = Counter(name for sig in sigs for name in sig.names)
    clashing = {name for name, n in counts.items() if n > 1}
    if clashing and policy == "reject":
        raise SignatureError(f"name collision in coproduct: {sorted(clashing)}")
    maps = [
        {name: (f"{label}.{name}" if name in clashing else name) for name in sig.names}
        for label, sig in zip(labels, sigs)
    ]
    final = Counter(new for m in maps for new in m.values())
    if any(n > 1 for n in final.values()):
        raise SignatureError("qualified names still collide; pass distinct labels")
    return maps


def coproduct(
    sigs: Sequence[AlgebraicSignature],
    policy: str = "qualify",
    labels: Sequence[str] | None = None,
) -> AlgebraicSignature:
    """Concatenate operation tables; see :func:`coproduct_renamings` for naming."""
    sigs = list(sigs)
    maps = coproduct_renamings(sigs, policy, labels)
    return AlgebraicSignature(
        tuple(Operation(m[op.name], op.arity) for sig, m in zip(sigs, maps) for op in sig.ops)
    )
