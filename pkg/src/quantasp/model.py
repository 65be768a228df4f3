"""Propositional programs, quantified programs and partial interpretations."""

from __future__ import annotations

import enum
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

import networkx as nx

RESERVED_PREFIXES = ("_na_", "_u_", "_phi_", "_t_")


def is_reserved(name: str) -> bool:
    return name.startswith(RESERVED_PREFIXES)


class Quantifier(enum.Enum):
    EXISTS = "exists"
    FORALL = "forall"

    def __str__(self) -> str:
        return self.value


class Truth(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNDEF = "undef"


@dataclass(frozen=True)
class Atom:
    """A propositional atom. Identity is the name; ``id`` orders output."""

    id: int = field(compare=False)
    name: str

    def __str__(self) -> str:
        return self.name


class SymbolTable:
    """Append-only bijection between atom names and dense integer ids."""

    def __init__(self) -> None:
        self._by_name: dict[str, Atom] = {}
        self._by_id: list[Atom] = []

    def intern(self, name: str) -> Atom:
        atom = self._by_name.get(name)
        if atom is None:
            atom = Atom(len(self._by_id), name)
            self._by_name[name] = atom
            self._by_id.append(atom)
        return atom

    def get(self, name: str) -> Atom | None:
        return self._by_name.get(name)

    def __getitem__(self, key: int | str) -> Atom:
        if isinstance(key, int):
            return self._by_id[key]
        return self._by_name[key]

    def __contains__(self, name: object) -> bool:
        return name in self._by_name

    def __len__(self) -> int:
        return len(self._by_id)

    def __iter__(self) -> Iterator[Atom]:
        return iter(list(self._by_id))

    def names(self) -> set[str]:
        return set(self._by_name)


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True

    def complement(self) -> Literal:
        return Literal(self.atom, not self.positive)

    def __str__(self) -> str:
        return self.atom.name if self.positive else f"not {self.atom.name}"


@dataclass(frozen=True)
class ChoiceHead:
    atoms: tuple[Atom, ...]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise ValueError("choice head needs at least one atom")
        object.__setattr__(self, "atoms", tuple(dict.fromkeys(self.atoms)))

    def __str__(self) -> str:
        return "{" + ";".join(a.name for a in self.atoms) + "}"


@dataclass(frozen=True)
class Rule:
    """``head :- body``. A ``None`` head is a constraint."""

    head: Atom | ChoiceHead | None
    body: tuple[Literal, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "body", tuple(dict.fromkeys(self.body)))

    @property
    def is_constraint(self) -> bool:
        return self.head is None

    @property
    def is_choice(self) -> bool:
        return isinstance(self.head, ChoiceHead)

    @property
    def is_normal(self) -> bool:
        return isinstance(self.head, Atom)

    @property
    def is_fact(self) -> bool:
        return self.is_normal and not self.body

    def head_atoms(self) -> tuple[Atom, ...]:
        if self.head is None:
            return ()
        if isinstance(self.head, ChoiceHead):
            return self.head.atoms
        return (self.head,)

    def atoms(self) -> Iterator[Atom]:
        yield from self.head_atoms()
        for lit in self.body:
            yield lit.atom

    def positive_body(self) -> tuple[Atom, ...]:
        return tuple(l.atom for l in self.body if l.positive)

    def negative_body(self) -> tuple[Atom, ...]:
        return tuple(l.atom for l in self.body if not l.positive)

    def __str__(self) -> str:
        body = ", ".join(str(l) for l in self.body)
        if self.head is None:
            return f":- {body}."
        if not body:
            return f"{self.head}."
        return f"{self.head} :- {body}."


def by_id(atoms: Iterable[Atom]) -> list[Atom]:
    return sorted(atoms, key=lambda a: a.id)


@dataclass(frozen=True)
class Program:
    rules: tuple[Rule, ...]
    symbols: SymbolTable = field(compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(self.rules))

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __str__(self) -> str:
        return "\n".join(str(r) for r in self.rules)

    def with_rules(self, rules: Iterable[Rule]) -> Program:
        return Program(tuple(rules), self.symbols)

    def union(self, *others: Program) -> Program:
        rules = list(self.rules)
        seen = set(rules)
        for other in others:
            for r in other.rules:
                if r not in seen:
                    seen.add(r)
                    rules.append(r)
        return Program(tuple(rules), self.symbols)

    @property
    def is_normal(self) -> bool:
        return all(r.is_normal for r in self.rules)


def herbrand_base(program: Program) -> frozenset[Atom]:
    return frozenset(a for r in program.rules for a in r.atoms())


def heads(program: Program) -> frozenset[Atom]:
    return frozenset(a for r in program.rules for a in r.head_atoms())


def facts(program: Program) -> frozenset[Atom]:
    return frozenset(r.head for r in program.rules if r.is_fact)  # type: ignore[misc]


def interface_atoms(p: Program, q: Program) -> frozenset[Atom]:
    return herbrand_base(p) & herbrand_base(q)


class FreshAtoms:
    """Allocates reserved-prefix atoms that avoid every name already taken."""

    def __init__(self, symbols: SymbolTable, taken: Iterable[str] = ()) -> None:
        self.symbols = symbols
        self.taken = set(taken)
        self._constraint_counter = 0

    def _claim(self, name: str) -> Atom:
        self.taken.add(name)
        return self.symbols.intern(name)

    def named(self, base: str) -> Atom:
        if base not in self.taken:
            return self._claim(base)
        k = 2
        while f"{base}_{k}" in self.taken:
            k += 1
        return self._claim(f"{base}_{k}")

    def negation_of(self, atom: Atom) -> Atom:
        return self.named(f"_na_{atom.name}")

    def constraint_atom(self) -> Atom:
        while f"_t_{self._constraint_counter}" in self.taken:
            self._constraint_counter += 1
        atom = self._claim(f"_t_{self._constraint_counter}")
        self._constraint_counter += 1
        return atom


def desugar(program: Program, fresh: FreshAtoms | None = None) -> Program:
    """Rewrite choice rules and constraints into normal rules.

    ``{a1;...;am} :- B`` becomes ``ai :- not _na_ai, B`` and ``_na_ai :- not ai``
    per atom; ``:- B`` becomes ``x :- B, not x`` for a fresh ``_t_k``. Passing a
    shared ``fresh`` allocator keeps names unique across several programs.
    """
    if fresh is None:
        fresh = FreshAtoms(program.symbols, (a.name for a in herbrand_base(program)))
    out: list[Rule] = []
    for rule in program.rules:
        if rule.is_choice:
            for atom in rule.head_atoms():
                na = fresh.negation_of(atom)
                out.append(Rule(atom, (Literal(na, False),) + rule.body))
                out.append(Rule(na, (Literal(atom, False),)))
        elif rule.is_constraint:
            x = fresh.constraint_atom()
            out.append(Rule(x, rule.body + (Literal(x, False),)))
        else:
            out.append(rule)
    return program.with_rules(out)


def dependency_graph(program: Program) -> nx.DiGraph:
    """Labeled dependency graph; edge attribute ``signs`` holds {+1, -1}.

    Constraints contribute no arcs. A choice atom gets a negative self-loop,
    mirroring the even negative cycle its desugaring introduces.
    """
    graph = nx.DiGraph()
    graph.add_nodes_from(by_id(herbrand_base(program)))

    def arc(src: Atom, dst: Atom, sign: int) -> None:
        if graph.has_edge(src, dst):
            graph[src][dst]["signs"].add(sign)
        else:
            graph.add_edge(src, dst, signs={sign})

    for rule in program.rules:
        for h in rule.head_atoms():
            for lit in rule.body:
                arc(lit.atom, h, 1 if lit.positive else -1)
            if rule.is_choice:
                arc(h, h, -1)
    return graph


def is_stratified(program: Program) -> bool:
    graph = dependency_graph(program)
    component = {}
    for k, scc in enumerate(nx.strongly_connected_components(graph)):
        for a in scc:
            component[a] = k
    for src, dst, data in graph.edges(data=True):
        if -1 in data["signs"] and component[src] == component[dst]:
            return False
    return True


@dataclass(frozen=True)
class PartialInterpretation:
    """Three-valued assignment over ``base``; atoms in neither set are undefined."""

    base: frozenset[Atom]
    true: frozenset[Atom] = frozenset()
    false: frozenset[Atom] = frozenset()

    def __post_init__(self) -> None:
        if self.true & self.false:
            raise ValueError("inconsistent interpretation")

    @classmethod
    def total(cls, base: Iterable[Atom], true: Iterable[Atom]) -> PartialInterpretation:
        base = frozenset(base)
        t = frozenset(true) & base
        return cls(base, t, base - t)

    def value(self, atom: Atom) -> Truth:
        if atom in self.true:
            return Truth.TRUE
        if atom in self.false:
            return Truth.FALSE
        return Truth.UNDEF

    @property
    def is_total(self) -> bool:
        return len(self.true) + len(self.false) == len(self.base)

    @property
    def undefined(self) -> frozenset[Atom]:
        return self.base - self.true - self.false

    def literal_true(self, lit: Literal) -> bool:
        return lit.atom in (self.true if lit.positive else self.false)

    def literal_false(self, lit: Literal) -> bool:
        return lit.atom in (self.false if lit.positive else self.true)

    def __str__(self) -> str:
        parts = [a.name for a in by_id(self.true)]
        parts += [f"not {a.name}" for a in by_id(self.false)]
        return "{" + ", ".join(parts) + "}"


def fix(program: Program, model: PartialInterpretation | Mapping[Atom, bool]) -> Program:
    """Facts for the true atoms of ``model`` and constraints for the false ones."""
    base = by_id(herbrand_base(program))
    if isinstance(model, PartialInterpretation):
        if not base_covered(model, base):
            raise ValueError("fix requires a model that is total on the Herbrand base")
        true = model.true
    else:
        missing = [a for a in base if a not in model]
        if missing:
            raise ValueError(f"model undefined on {missing[0].name}")
        true = frozenset(a for a, v in model.items() if v)
    rules = [Rule(a) if a in true else Rule(None, (Literal(a),)) for a in base]
    return program.with_rules(rules)


def base_covered(model: PartialInterpretation, base: Iterable[Atom]) -> bool:
    return all(a in model.true or a in model.false for a in base)


def fix_set(program: Program, true_atoms: Iterable[Atom]) -> Program:
    """``fix`` for a total model given as the set of its true atoms."""
    true = frozenset(true_atoms)
    return program.with_rules(
        Rule(a) if a in true else Rule(None, (Literal(a),)) for a in by_id(herbrand_base(program))
    )


@dataclass(frozen=True)
class Level:
    quantifier: Quantifier
    program: Program


@dataclass(frozen=True)
class QuantifiedProgram:
    """``Q1 P1 ... Qn Pn : C`` sharing one symbol table."""

    levels: tuple[Level, ...]
    constraint: Program
    symbols: SymbolTable = field(compare=False, repr=False)
    strict: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.levels:
            raise ValueError("a quantified program needs at least one level")
        if self.strict and not is_stratified(self.constraint):
            raise ValueError("constraint program is not stratified")

    @property
    def n(self) -> int:
        return len(self.levels)

    def program(self, i: int) -> Program:
        """1-based level program; ``i == n + 1`` is the constraint program."""
        if i == self.n + 1:
            return self.constraint
        if not 1 <= i <= self.n:
            raise IndexError(f"level {i} out of range 1..{self.n + 1}")
        return self.levels[i - 1].program

    def quantifier(self, i: int) -> Quantifier:
        if i == self.n + 1:
            return Quantifier.EXISTS
        return self.levels[i - 1].quantifier

    def programs(self) -> list[Program]:
        return [lv.program for lv in self.levels] + [self.constraint]

    @property
    def is_existential(self) -> bool:
        return self.levels[0].quantifier is Quantifier.EXISTS

    def replace(
        self,
        levels: Iterable[Level] | None = None,
        constraint: Program | None = None,
        strict: bool | None = None,
    ) -> QuantifiedProgram:
        return QuantifiedProgram(
            tuple(self.levels if levels is None else levels),
            self.constraint if constraint is None else constraint,
            self.symbols,
            self.strict if strict is None else strict,
        )

    def empty_program(self) -> Program:
        return Program((), self.symbols)


def prefix_union(qp: QuantifiedProgram, i: int) -> Program:
    if not 1 <= i <= qp.n:
        raise IndexError(f"prefix index {i} out of range 1..{qp.n}")
    first = qp.levels[0].program
    return first.union(*(lv.program for lv in qp.levels[1:i]))
