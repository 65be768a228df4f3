"""CNF encoding of normal programs: Clark completion plus loop formulas.

Models of ``cnf_encode(P)`` projected onto the atoms of ``P`` are exactly the
answer sets of ``P``; auxiliary body variables are functionally determined.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass

import networkx as nx

from .model import Atom, Literal, Program, Rule, by_id, herbrand_base

Clause = tuple[int, ...]

DEFAULT_SCC_BOUND = 12
DEFAULT_INCOHERENCE_LIMIT = 20

_CONSTRAINT_ATOM = re.compile(r"_t_\d+")


class NonTightTooLarge(ValueError):
    """A positive strongly connected component exceeds the loop-enumeration bound."""


def normalize_clause(lits: Iterable[int]) -> Clause | None:
    """Sorted, duplicate-free clause, or ``None`` for a tautology."""
    seen = set(lits)
    if any(-l in seen for l in seen):
        return None
    return tuple(sorted(seen, key=lambda l: (abs(l), l < 0)))


@dataclass(frozen=True)
class CnfFormula:
    clauses: tuple[Clause, ...]
    names: tuple[str, ...]
    aux: frozenset[int] = frozenset()

    @property
    def num_vars(self) -> int:
        return len(self.names)

    @property
    def var_map(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names, start=1)}

    def name(self, var: int) -> str:
        return self.names[abs(var) - 1]

    def variables(self) -> frozenset[int]:
        return frozenset(range(1, len(self.names) + 1))

    def __len__(self) -> int:
        return len(self.clauses)

    def __str__(self) -> str:
        def lit(l: int) -> str:
            return ("-" if l < 0 else "") + self.name(l)

        return " & ".join("(" + " | ".join(lit(l) for l in c) + ")" for c in self.clauses)


class CnfBuilder:
    def __init__(self) -> None:
        self.names: list[str] = []
        self.index: dict[str, int] = {}
        self.aux: set[int] = set()
        self.clauses: list[Clause] = []
        self._seen: set[Clause] = set()

    def var(self, name: str, aux: bool = False) -> int:
        v = self.index.get(name)
        if v is None:
            self.names.append(name)
            v = len(self.names)
            self.index[name] = v
            if aux:
                self.aux.add(v)
        return v

    def add(self, lits: Iterable[int]) -> None:
        clause = normalize_clause(lits)
        if clause is not None and clause not in self._seen:
            self._seen.add(clause)
            self.clauses.append(clause)

    def build(self) -> CnfFormula:
        return CnfFormula(tuple(self.clauses), tuple(self.names), frozenset(self.aux))


def _constraint_atoms(program: Program) -> dict[Atom, Rule]:
    """Atoms introduced by constraint desugaring: ``x :- B, not x`` and nothing else."""
    occurrences: dict[Atom, int] = {}
    for r in program.rules:
        for a in set(r.atoms()):
            occurrences[a] = occurrences.get(a, 0) + 1
    found = {}
    for r in program.rules:
        x = r.head
        if (
            isinstance(x, Atom)
            and _CONSTRAINT_ATOM.fullmatch(x.name)
            and occurrences[x] == 1
            and Literal(x, False) in r.body
            and Literal(x, True) not in r.body
        ):
            found[x] = r
    return found


class _Encoder:
    def __init__(self, program: Program) -> None:
        for r in program.rules:
            if not r.is_normal:
                raise ValueError(f"clark completion needs a normal program, found {r}")
        self.program = program
        self.constraint_rules = _constraint_atoms(program)
        self.cnf = CnfBuilder()
        self.atoms = [a for a in by_id(herbrand_base(program)) if a not in self.constraint_rules]
        for a in self.atoms:
            self.cnf.var(a.name)
        self.rules_for: dict[Atom, list[Rule]] = {a: [] for a in self.atoms}
        for r in program.rules:
            if r.head in self.rules_for:
                self.rules_for[r.head].append(r)  # type: ignore[index]
        self.body_var: dict[tuple[Atom, int], int] = {}

    def lit(self, l: Literal) -> int:
        v = self.cnf.var(l.atom.name)
        return v if l.positive else -v

    def body_literal(self, head: Atom, j: int) -> int | None:
        """A literal equivalent to the body of the ``j``-th rule of ``head``; None if empty."""
        body = self.rules_for[head][j].body
        if not body:
            return None
        if len(body) == 1:
            return self.lit(body[0])
        key = (head, j)
        if key not in self.body_var:
            t = self.cnf.var(f"_t_{head.name}_{j + 1}", aux=True)
            lits = [self.lit(l) for l in body]
            for l in lits:
                self.cnf.add((-t, l))
            self.cnf.add([t] + [-l for l in lits])
            self.body_var[key] = t
        return self.body_var[key]

    def completion(self) -> None:
        for a in self.atoms:
            va = self.cnf.var(a.name)
            rules = self.rules_for[a]
            if not rules:
                self.cnf.add((-va,))
            elif any(not r.body for r in rules):
                self.cnf.add((va,))
            elif len(rules) == 1:
                lits = [self.lit(l) for l in rules[0].body]
                for l in lits:
                    self.cnf.add((-va, l))
                self.cnf.add([va] + [-l for l in lits])
            else:
                bodies = [self.body_literal(a, j) for j in range(len(rules))]
                self.cnf.add([-va] + bodies)  # type: ignore[operator]
                for b in bodies:
                    self.cnf.add((va, -b))  # type: ignore[operator]
        for x, rule in self.constraint_rules.items():
            self.cnf.add(-self.lit(l) for l in rule.body if l.atom != x)

    def loops(self, scc_bound: int) -> None:
        graph = positive_dependency_graph(self.program)
        for scc in nx.strongly_connected_components(graph):
            if len(scc) == 1:
                (a,) = scc
                if not graph.has_edge(a, a):
                    continue
            if len(scc) > scc_bound:
                names = ", ".join(a.name for a in by_id(scc))
                raise NonTightTooLarge(
                    f"non-tight component too large ({len(scc)} > {scc_bound} atoms): {names}"
                )
            for loop in enumerate_loops(graph.subgraph(scc)):
                self.loop_formula(loop)

    def loop_formula(self, loop: frozenset[Atom]) -> None:
        support: list[int] = []
        for a in by_id(loop):
            for j, r in enumerate(self.rules_for[a]):
                if loop.isdisjoint(r.positive_body()):
                    lit = self.body_literal(a, j)
                    if lit is None:
                        return
                    support.append(lit)
        for a in by_id(loop):
            self.cnf.add([-self.cnf.var(a.name)] + support)


def positive_dependency_graph(program: Program) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(by_id(herbrand_base(program)))
    for r in program.rules:
        for h in r.head_atoms():
            for b in r.positive_body():
                graph.add_edge(b, h)
    return graph


def enumerate_loops(graph: nx.DiGraph) -> Iterator[frozenset[Atom]]:
    """Every non-empty node set of ``graph`` whose induced subgraph is strongly connected."""
    nodes = by_id(graph.nodes)
    for size in range(1, len(nodes) + 1):
        for subset in itertools.combinations(nodes, size):
            if size == 1:
                if graph.has_edge(subset[0], subset[0]):
                    yield frozenset(subset)
            elif nx.is_strongly_connected(graph.subgraph(subset)):
                yield frozenset(subset)


def clark_completion(program: Program) -> CnfFormula:
    enc = _Encoder(program)
    enc.completion()
    return enc.cnf.build()


def loop_formulas(program: Program, completion: CnfFormula, scc_bound: int = DEFAULT_SCC_BOUND) -> CnfFormula:
    """Clauses for the loop formulas of ``program`` not already in ``completion``.

    Returned over the same variable numbering, extended by any body variables
    the loop formulas need.
    """
    enc = _Encoder(program)
    enc.completion()
    if enc.cnf.names != list(completion.names) or tuple(enc.cnf.clauses) != completion.clauses:
        raise ValueError("completion does not belong to this program")
    before = len(enc.cnf.clauses)
    enc.loops(scc_bound)
    full = enc.cnf.build()
    return CnfFormula(full.clauses[before:], full.names, full.aux)


def cnf_encode(program: Program, scc_bound: int = DEFAULT_SCC_BOUND) -> CnfFormula:
    enc = _Encoder(program)
    enc.completion()
    enc.loops(scc_bound)
    return enc.cnf.build()


# -- small SAT machinery ---------------------------------------------------


def unit_propagate(
    clauses: Sequence[Clause], assignment: dict[int, bool] | None = None
) -> dict[int, bool] | None:
    """Exhaustive unit propagation; ``None`` on conflict."""
    assign = dict(assignment or {})
    changed = True
    while changed:
        changed = False
        for clause in clauses:
            unassigned = None
            count = 0
            satisfied = False
            for l in clause:
                v = assign.get(abs(l))
                if v is None:
                    count += 1
                    unassigned = l
                elif v == (l > 0):
                    satisfied = True
                    break
            if satisfied:
                continue
            if count == 0:
                return None
            if count == 1:
                assert unassigned is not None
                assign[abs(unassigned)] = unassigned > 0
                changed = True
    return assign


def find_model(clauses: Sequence[Clause], num_vars: int) -> dict[int, bool] | None:
    """Complete DPLL search; returns a total model or ``None``."""

    def solve(assign: dict[int, bool]) -> dict[int, bool] | None:
        assign = unit_propagate(clauses, assign)  # type: ignore[assignment]
        if assign is None:
            return None
        for v in range(1, num_vars + 1):
            if v not in assign:
                for value in (False, True):
                    result = solve({**assign, v: value})
                    if result is not None:
                        return result
                return None
        return assign

    return solve({})


def bounded_incoherence_check(cnf: CnfFormula, limit: int = DEFAULT_INCOHERENCE_LIMIT) -> bool | None:
    """True when ``cnf`` is shown unsatisfiable, False when a model is found, else None.

    Unit propagation runs unconditionally; a complete search only when the
    formula has at most ``limit`` variables.
    """
    if unit_propagate(cnf.clauses) is None:
        return True
    if cnf.num_vars > limit:
        return None
    return find_model(cnf.clauses, cnf.num_vars) is None


def models(cnf: CnfFormula) -> Iterator[frozenset[str]]:
    """All models by truth-table enumeration, as sets of true variable names."""
    n = cnf.num_vars
    for bits in itertools.product((False, True), repeat=n):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in cnf.clauses):
            yield frozenset(cnf.names[i] for i in range(n) if bits[i])
