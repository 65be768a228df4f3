"""Brute-force answer sets and ASP(Q) coherence, straight from the definitions.

Everything here is deliberately naive: it is the ground truth the encodings
are checked against.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable
from dataclasses import dataclass

from .model import Atom, Program, QuantifiedProgram, Quantifier, Rule, by_id, fix_set, herbrand_base

DEFAULT_MAX_ATOMS = 20
DEFAULT_BUDGET = 2**18


class OracleLimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class AnswerSetCollection:
    base: frozenset[Atom]
    models: frozenset[frozenset[Atom]]

    def __len__(self) -> int:
        return len(self.models)

    def __iter__(self):
        return iter(sorted(self.models, key=lambda m: sorted(a.id for a in m)))

    def names(self) -> set[frozenset[str]]:
        return {frozenset(a.name for a in m) for m in self.models}

    def project(self, atoms: Iterable[Atom]) -> set[frozenset[Atom]]:
        keep = frozenset(atoms)
        return {m & keep for m in self.models}


def satisfies(rule: Rule, true: frozenset[Atom]) -> bool:
    body_true = all((l.atom in true) == l.positive for l in rule.body)
    if not body_true:
        return True
    if rule.head is None:
        return False
    if rule.is_choice:
        return True
    return rule.head in true


def reduct(program: Program, true: frozenset[Atom]) -> list[tuple[Atom, tuple[Atom, ...]]]:
    """Gelfond-Lifschitz reduct as definite rules ``(head, positive body)``.

    A choice rule contributes ``a :- B+`` for each of its atoms in the model;
    constraints are model conditions and have no reduct rule.
    """
    out = []
    for r in program.rules:
        if r.head is None or any(a in true for a in r.negative_body()):
            continue
        pos = r.positive_body()
        if r.is_choice:
            out.extend((a, pos) for a in r.head_atoms() if a in true)
        else:
            out.append((r.head, pos))  # type: ignore[arg-type]
    return out


def least_model(definite: list[tuple[Atom, tuple[Atom, ...]]]) -> frozenset[Atom]:
    model: set[Atom] = set()
    changed = True
    while changed:
        changed = False
        for head, body in definite:
            if head not in model and all(b in model for b in body):
                model.add(head)
                changed = True
    return frozenset(model)


def _models_definite(definite: list[tuple[Atom, tuple[Atom, ...]]], true: frozenset[Atom]) -> bool:
    return all(h in true or not all(b in true for b in body) for h, body in definite)


def _minimal_by_subsets(definite: list[tuple[Atom, tuple[Atom, ...]]], true: frozenset[Atom]) -> bool:
    atoms = by_id(true)
    for size in range(len(atoms)):
        for subset in itertools.combinations(atoms, size):
            if _models_definite(definite, frozenset(subset)):
                return False
    return True


def answer_sets_bruteforce(
    program: Program, max_atoms: int = DEFAULT_MAX_ATOMS, cross_check: bool = True
) -> AnswerSetCollection:
    """Answer sets of ``program`` by enumerating candidate interpretations.

    Choice rules and constraints are handled natively. Only atoms occurring in
    some head can be true, and facts are always true, so the enumeration runs
    over the remaining head atoms. With ``cross_check`` minimality is decided
    both by the least model of the reduct and by enumerating subsets, and the
    two verdicts must agree.
    """
    base = herbrand_base(program)
    if len(base) > max_atoms:
        raise OracleLimitExceeded(f"Herbrand base has {len(base)} atoms (limit {max_atoms})")
    fact_atoms = frozenset(r.head for r in program.rules if r.is_fact)  # type: ignore[misc]
    open_atoms = by_id({a for r in program.rules for a in r.head_atoms()} - fact_atoms)
    found = set()
    for bits in itertools.product((False, True), repeat=len(open_atoms)):
        true = fact_atoms | frozenset(a for a, b in zip(open_atoms, bits) if b)
        if not all(satisfies(r, true) for r in program.rules):
            continue
        definite = reduct(program, true)
        stable = least_model(definite) == true
        if cross_check:
            by_subsets = _models_definite(definite, true) and _minimal_by_subsets(definite, true)
            if by_subsets != stable:
                raise AssertionError(f"minimality checks disagree on {sorted(a.name for a in true)}")
        if stable:
            found.add(true)
    return AnswerSetCollection(base, frozenset(found))


class _Budget:
    def __init__(self, limit: int) -> None:
        self.left = limit

    def spend(self, n: int) -> None:
        self.left -= n
        if self.left < 0:
            raise OracleLimitExceeded("coherence oracle budget exceeded")


def _answer_sets(program: Program, budget: _Budget) -> frozenset[frozenset[Atom]]:
    fact_atoms = {r.head for r in program.rules if r.is_fact}
    open_atoms = {a for r in program.rules for a in r.head_atoms()} - fact_atoms
    budget.spend(2 ** len(open_atoms))
    return answer_sets_bruteforce(program, cross_check=False).models


def _coherent(qp: QuantifiedProgram, i: int, current: Program, budget: _Budget) -> bool:
    """Coherence of ``Q_i current Q_{i+1} P_{i+1} ... : C``."""
    quantifier = qp.quantifier(i)
    for m in sorted(_answer_sets(current, budget), key=lambda s: sorted(a.id for a in s)):
        nxt = qp.program(i + 1).union(fix_set(current, m))
        if i + 1 == qp.n + 1:
            ok = bool(_answer_sets(nxt, budget))
        else:
            ok = _coherent(qp, i + 1, nxt, budget)
        if quantifier is Quantifier.EXISTS and ok:
            return True
        if quantifier is Quantifier.FORALL and not ok:
            return False
    return quantifier is Quantifier.FORALL


def coherence_bruteforce(qp: QuantifiedProgram, budget: int = DEFAULT_BUDGET) -> bool:
    return _coherent(qp, 1, qp.program(1), _Budget(budget))


def quantified_answer_sets(qp: QuantifiedProgram, budget: int = DEFAULT_BUDGET) -> AnswerSetCollection:
    """Answer sets of the first level whose suffix program stays coherent."""
    if not qp.is_existential:
        raise ValueError("quantified answer sets are defined for existential programs")
    b = _Budget(budget)
    first = qp.program(1)
    keep = set()
    for m in _answer_sets(first, b):
        nxt = qp.program(2).union(fix_set(first, m))
        if qp.n == 1:
            ok = bool(_answer_sets(nxt, b))
        else:
            ok = _coherent(qp, 2, nxt, b)
        if ok:
            keep.add(m)
    return AnswerSetCollection(herbrand_base(first), frozenset(keep))
