"""Prenex quantified Boolean circuits.

Variables and gates share one positive id space; a signed id is a literal.
``and()`` with no inputs is true and ``or()`` with no inputs is false.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field

from .model import Quantifier


@dataclass(frozen=True)
class Block:
    quantifier: Quantifier
    variables: tuple[int, ...]
    level: int | None = None

    @property
    def letter(self) -> str:
        return "e" if self.quantifier is Quantifier.EXISTS else "a"


Prefix = tuple[Block, ...]


def merge_blocks(prefix: Iterable[Block]) -> Prefix:
    """Drop empty blocks and merge neighbours with the same quantifier."""
    out: list[Block] = []
    for b in prefix:
        if not b.variables:
            continue
        if out and out[-1].quantifier is b.quantifier:
            out[-1] = Block(b.quantifier, out[-1].variables + b.variables)
        else:
            out.append(Block(b.quantifier, b.variables))
    return tuple(out)


def prefix_variables(prefix: Iterable[Block]) -> list[int]:
    return [v for b in prefix for v in b.variables]


def check_prefix(prefix: Iterable[Block]) -> None:
    seen: set[int] = set()
    for b in prefix:
        for v in b.variables:
            if v <= 0:
                raise ValueError(f"invalid variable {v}")
            if v in seen:
                raise ValueError(f"variable {v} quantified twice")
            seen.add(v)


@dataclass(frozen=True)
class Gate:
    id: int
    kind: str  # "and" | "or"
    inputs: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.kind not in ("and", "or"):
            raise ValueError(f"unknown gate kind {self.kind!r}")


@dataclass(frozen=True)
class QbfCircuit:
    prefix: Prefix
    gates: tuple[Gate, ...]
    output: int
    names: dict[int, str] = field(default_factory=dict, compare=False)
    gate_vars: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "gates", tuple(self.gates))

    def variables(self) -> list[int]:
        return prefix_variables(self.prefix)

    @property
    def num_vars(self) -> int:
        return len(self.variables())

    def gate_table(self) -> dict[int, Gate]:
        return {g.id: g for g in self.gates}

    def max_id(self) -> int:
        ids = [abs(self.output)] + self.variables() + [g.id for g in self.gates]
        return max(ids)

    def validate(self) -> None:
        """Raise ValueError unless the circuit is well formed."""
        check_prefix(self.prefix)
        variables = set(self.variables())
        defined: set[int] = set()
        for g in self.gates:
            if g.id in variables or g.id in defined:
                raise ValueError(f"id {g.id} defined twice")
            for lit in g.inputs:
                if lit == 0 or (abs(lit) not in variables and abs(lit) not in defined):
                    raise ValueError(f"gate {g.id} uses undefined literal {lit}")
            defined.add(g.id)
        if abs(self.output) not in variables and abs(self.output) not in defined:
            raise ValueError(f"output {self.output} is undefined")

    def reachable(self) -> set[int]:
        table = self.gate_table()
        seen: set[int] = set()
        stack = [abs(self.output)]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            if v in table:
                stack.extend(abs(l) for l in table[v].inputs)
        return seen


class CircuitBuilder:
    """Allocates ids in creation order; gates are kept or handed to ``sink``."""

    def __init__(self, sink: Callable[[Gate], None] | None = None) -> None:
        self.next_id = 1
        self.gates: list[Gate] = []
        self.names: dict[int, str] = {}
        self.sink = sink

    def var(self, name: str | None = None) -> int:
        v = self.next_id
        self.next_id += 1
        if name is not None:
            self.names[v] = name
        return v

    def gate(self, kind: str, inputs: Sequence[int]) -> int:
        g = Gate(self.var(), kind, tuple(inputs))
        if self.sink is None:
            self.gates.append(g)
        else:
            self.sink(g)
        return g.id

    def and_(self, inputs: Sequence[int]) -> int:
        return self.gate("and", inputs)

    def or_(self, inputs: Sequence[int]) -> int:
        return self.gate("or", inputs)
