"""Trivial levels and the Guess&Check rewriting of universal levels."""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    Atom,
    Level,
    Literal,
    Program,
    QuantifiedProgram,
    Quantifier,
    Rule,
    facts,
    heads,
    herbrand_base,
    interface_atoms,
    is_stratified,
)


class NotGC(ValueError):
    """The program (or level) does not have the Guess&Check shape required."""


def ext_atoms(qp: QuantifiedProgram, i: int) -> frozenset[Atom]:
    """Atoms defined at level ``i`` that later levels (or C) share."""
    p = qp.program(i)
    later: set[Atom] = set()
    for j in range(i + 1, qp.n + 2):
        later |= interface_atoms(p, qp.program(j))
    return heads(p) & frozenset(later)


@dataclass(frozen=True)
class TrivialityReport:
    level: int
    syntactically_trivial: bool
    ext_atoms: frozenset[Atom]
    interface_ok: bool


def is_pure_choice(program: Program) -> bool:
    return all(r.is_choice and not r.body for r in program.rules)


def check_trivial(qp: QuantifiedProgram, i: int) -> TrivialityReport:
    p = qp.program(i)
    ext = ext_atoms(qp, i)
    interface_ok = all(
        interface_atoms(p, qp.program(j)) <= facts(qp.program(j)) for j in range(1, i)
    )
    pure = is_pure_choice(p) and ext <= heads(p)
    return TrivialityReport(i, interface_ok and pure, ext, interface_ok)


def trivial_levels(qp: QuantifiedProgram) -> frozenset[int]:
    return frozenset(i for i in range(1, qp.n + 1) if check_trivial(qp, i).syntactically_trivial)


@dataclass(frozen=True)
class GcSplit:
    guess: Program
    check: Program
    unsat_atom: Atom | None = None


def split_guess_check(program: Program) -> GcSplit:
    guess, check = [], []
    for r in program.rules:
        if r.is_choice:
            if r.body:
                raise NotGC(f"guess rule with a body: {r}")
            guess.append(r)
        else:
            check.append(r)
    g = program.with_rules(guess)
    c = program.with_rules(check)
    if not is_stratified(c):
        raise NotGC("check part is not stratified")
    clash = heads(c) & herbrand_base(g)
    if clash:
        name = min(clash, key=lambda a: a.id).name
        raise NotGC(f"check part defines guessed atom {name}")
    return GcSplit(g, c)


def _require_fresh(u: Atom, *programs: Program) -> None:
    for p in programs:
        if u in herbrand_base(p):
            raise ValueError(f"atom {u.name} is not fresh")


def tau(u: Atom, split: GcSplit) -> Program:
    _require_fresh(u, split.guess, split.check)
    return split.check.with_rules(Rule(u, r.body) if r.is_constraint else r for r in split.check.rules)


def rho(u: Atom, program: Program) -> Program:
    _require_fresh(u, program)
    guard = Literal(u, False)
    return program.with_rules(Rule(r.head, r.body + (guard,)) for r in program.rules)


def sigma(u: Atom, split: GcSplit, nxt: Program) -> Program:
    return tau(u, split).union(rho(u, nxt))


def _isolation_problem(qp: QuantifiedProgram, i: int, split: GcSplit) -> str | None:
    """Why the check part of level ``i`` cannot move to level ``i + 1``, if it cannot.

    Check-defined atoms must be new at level ``i``, and later levels must not
    define any atom private to the check part. Without this the rewriting
    changes which answer sets the fix constraints admit.
    """
    earlier: set[Atom] = set()
    for j in range(1, i):
        earlier |= herbrand_base(qp.program(j))
    clash = heads(split.check) & earlier
    if clash:
        return f"check atom {min(clash, key=lambda a: a.id).name} occurs in an earlier level"
    private = herbrand_base(split.check) - herbrand_base(split.guess) - earlier
    for j in range(i + 1, qp.n + 2):
        clash = heads(qp.program(j)) & private
        if clash:
            return f"level {j} defines check atom {min(clash, key=lambda a: a.id).name}"
    return None


def split_level(qp: QuantifiedProgram, i: int) -> GcSplit:
    """Split a universal level, including the isolation checks for rewriting."""
    if qp.quantifier(i) is not Quantifier.FORALL or i > qp.n:
        raise NotGC(f"level {i} is not universal")
    split = split_guess_check(qp.program(i))
    problem = _isolation_problem(qp, i, split)
    if problem:
        raise NotGC(problem)
    return split


def unsat_atom(qp: QuantifiedProgram, i: int) -> Atom:
    name = f"_u_{i}"
    k = 2
    while name in qp.symbols and any(
        qp.symbols[name] in herbrand_base(p) for p in qp.programs()
    ):
        name = f"_u_{i}_{k}"
        k += 1
    return qp.symbols.intern(name)


def gc_rewrite_level(qp: QuantifiedProgram, i: int) -> QuantifiedProgram:
    split = split_level(qp, i)
    u = unsat_atom(qp, i)
    split = GcSplit(split.guess, split.check, u)
    levels = list(qp.levels)
    levels[i - 1] = Level(Quantifier.FORALL, split.guess)
    constraint = qp.constraint
    if i == qp.n:
        constraint = sigma(u, split, qp.constraint)
    else:
        levels[i] = Level(qp.quantifier(i + 1), sigma(u, split, qp.program(i + 1)))
        if i == qp.n - 1:
            constraint = rho(u, qp.constraint)
        else:
            p = qp.program(i + 2)
            levels[i + 1] = Level(qp.quantifier(i + 2), p.with_rules((Rule(None, (Literal(u),)),) + p.rules))
    return qp.replace(levels, constraint, strict=False)


def check_def5(qp: QuantifiedProgram) -> None:
    """Raise NotGC unless quantifiers alternate and every universal level splits."""
    for i in range(1, qp.n):
        if qp.quantifier(i) is qp.quantifier(i + 1):
            raise NotGC(f"levels {i} and {i + 1} share a quantifier")
    for i in range(1, qp.n + 1):
        if qp.quantifier(i) is Quantifier.FORALL:
            try:
                split_guess_check(qp.program(i))
            except NotGC as exc:
                raise NotGC(f"level {i}: {exc}") from None


def gc_chain(qp: QuantifiedProgram) -> QuantifiedProgram:
    check_def5(qp)
    current = qp
    for i in range(1, qp.n + 1):
        if qp.quantifier(i) is Quantifier.FORALL:
            try:
                current = gc_rewrite_level(current, i)
            except NotGC as exc:
                raise NotGC(f"level {i}: {exc}") from None
    return current


def cnf_target(qp: QuantifiedProgram) -> QuantifiedProgram:
    """The chained rewriting when every universal level ends up trivial.

    Raises NotGC with the reason otherwise; the result is what the direct
    CNF encoding expects.
    """
    chained = gc_chain(qp)
    k = trivial_levels(chained)
    for i in range(1, chained.n + 1):
        if chained.quantifier(i) is Quantifier.FORALL and i not in k:
            raise NotGC(f"universal level {i} is not trivial after rewriting")
    return chained
