"""Seeded generators of small programs and circuits for property tests."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .circuit import Block, CircuitBuilder, QbfCircuit
from .model import (
    Atom,
    ChoiceHead,
    Level,
    Literal,
    Program,
    QuantifiedProgram,
    Quantifier,
    Rule,
    SymbolTable,
    is_stratified,
)


@dataclass(frozen=True)
class ProgramShape:
    max_levels: int = 3
    max_atoms: int = 5
    max_rules: int = 7
    max_body: int = 3
    reuse: float = 0.35


def _literal(rng: random.Random, pool: list[Atom], neg: float = 0.4) -> Literal:
    return Literal(rng.choice(pool), rng.random() >= neg)


def _body(rng: random.Random, pool: list[Atom], max_body: int) -> tuple[Literal, ...]:
    if not pool:
        return ()
    return tuple(_literal(rng, pool) for _ in range(rng.randint(1, max_body)))


def random_rule(rng: random.Random, own: list[Atom], pool: list[Atom], max_body: int) -> Rule:
    kind = rng.random()
    if kind < 0.15:
        return Rule(rng.choice(own))
    if kind < 0.35:
        k = rng.randint(1, min(3, len(own)))
        body = _body(rng, pool, 1) if rng.random() < 0.25 else ()
        return Rule(ChoiceHead(tuple(rng.sample(own, k))), body)
    if kind < 0.5:
        return Rule(None, _body(rng, pool, max_body))
    return Rule(rng.choice(own), _body(rng, pool, max_body))


def random_program(
    rng: random.Random, symbols: SymbolTable, atoms: list[Atom], n_rules: int, max_body: int = 3
) -> Program:
    rules = [random_rule(rng, atoms, atoms, max_body) for _ in range(n_rules)]
    return Program(tuple(rules), symbols)


def random_normal_program(rng: random.Random, n_atoms: int, n_rules: int, max_body: int = 3) -> Program:
    """Normal rules and facts only, over atoms ``p0..``."""
    symbols = SymbolTable()
    atoms = [symbols.intern(f"p{k}") for k in range(n_atoms)]
    rules = []
    for _ in range(n_rules):
        if rng.random() < 0.15:
            rules.append(Rule(rng.choice(atoms)))
        else:
            rules.append(Rule(rng.choice(atoms), _body(rng, atoms, max_body)))
    return Program(tuple(rules), symbols)


def _stratified_constraint(
    rng: random.Random, symbols: SymbolTable, own: list[Atom], earlier: list[Atom], n_rules: int, max_body: int
) -> Program:
    pool = earlier + own
    while True:
        rules = []
        for _ in range(n_rules):
            if not pool:
                break
            if rng.random() < 0.5 or not own:
                rules.append(Rule(None, _body(rng, pool, max_body)))
            else:
                rules.append(Rule(rng.choice(own), _body(rng, pool, max_body)))
        prog = Program(tuple(rules), symbols)
        if is_stratified(prog):
            return prog


def random_quantified_program(rng: random.Random, shape: ProgramShape = ProgramShape()) -> QuantifiedProgram:
    """Mixed quantifiers; every level owns fresh atoms and may reuse earlier ones."""
    symbols = SymbolTable()
    n = rng.randint(1, shape.max_levels)
    levels = []
    earlier: list[Atom] = []
    counter = 0
    for i in range(1, n + 1):
        n_own = rng.randint(1, max(1, shape.max_atoms - 1))
        own = [symbols.intern(f"x{counter + k}") for k in range(n_own)]
        counter += n_own
        reused = [a for a in earlier if rng.random() < shape.reuse][: shape.max_atoms - n_own]
        pool = own + reused
        heads = own + [a for a in reused if rng.random() < 0.3]
        rules = [random_rule(rng, heads, pool, shape.max_body) for _ in range(rng.randint(1, shape.max_rules))]
        q = Quantifier.EXISTS if rng.random() < 0.5 else Quantifier.FORALL
        levels.append(Level(q, Program(tuple(rules), symbols)))
        earlier.extend(own)
    n_own = rng.randint(0, 2)
    own = [symbols.intern(f"x{counter + k}") for k in range(n_own)]
    reused = [a for a in earlier if rng.random() < 0.6][: shape.max_atoms]
    constraint = _stratified_constraint(rng, symbols, own, reused, rng.randint(0, 3), shape.max_body)
    return QuantifiedProgram(tuple(levels), constraint, symbols)


def random_gc_program(rng: random.Random, max_levels: int = 3, max_atoms: int = 5) -> QuantifiedProgram:
    """Alternating quantifiers with Guess&Check universal levels.

    Check heads are new atoms and later levels only define their own atoms,
    so every universal level can be rewritten.
    """
    symbols = SymbolTable()
    n = rng.randint(1, max_levels)
    first = Quantifier.EXISTS if rng.random() < 0.5 else Quantifier.FORALL
    levels = []
    earlier: list[Atom] = []
    counter = 0

    def fresh(k: int) -> list[Atom]:
        nonlocal counter
        out = [symbols.intern(f"y{counter + j}") for j in range(k)]
        counter += k
        return out

    for i in range(n):
        q = first if i % 2 == 0 else (Quantifier.FORALL if first is Quantifier.EXISTS else Quantifier.EXISTS)
        reused = [a for a in earlier if rng.random() < 0.4][:2]
        if q is Quantifier.FORALL:
            guess = fresh(rng.randint(1, 3))
            check = fresh(rng.randint(0, max(0, max_atoms - len(guess) - 1)))
            rules: list[Rule] = [Rule(ChoiceHead(tuple(guess)))]
            pool = guess + reused
            for h in check:
                rules.append(Rule(h, _body(rng, pool, 2)))
                pool = pool + [h]
            for _ in range(rng.randint(0, 2)):
                rules.append(Rule(None, _body(rng, pool, 2)))
            prog = Program(tuple(rules), symbols)
            if not is_stratified(prog.with_rules(rules[1:])):
                prog = prog.with_rules(rules[:1])
            levels.append(Level(q, prog))
            earlier.extend(guess + check)
        else:
            own = fresh(rng.randint(1, max(1, max_atoms - len(reused))))
            pool = own + reused
            rules = [random_rule(rng, own, pool, 2) for _ in range(rng.randint(1, 5))]
            levels.append(Level(q, Program(tuple(rules), symbols)))
            earlier.extend(own)
    reused = [a for a in earlier if rng.random() < 0.6][:5]
    constraint = _stratified_constraint(rng, symbols, fresh(rng.randint(0, 1)), reused, rng.randint(0, 3), 2)
    return QuantifiedProgram(tuple(levels), constraint, symbols)


def random_circuit(rng: random.Random, max_vars: int = 16, max_gates: int = 20) -> QbfCircuit:
    n_vars = rng.randint(1, max_vars)
    cb = CircuitBuilder()
    variables = [cb.var(f"v{k}") for k in range(n_vars)]
    blocks: list[Block] = []
    q = Quantifier.EXISTS if rng.random() < 0.5 else Quantifier.FORALL
    k = 0
    while k < n_vars:
        size = rng.randint(1, n_vars - k)
        blocks.append(Block(q, tuple(variables[k : k + size])))
        k += size
        q = Quantifier.FORALL if q is Quantifier.EXISTS else Quantifier.EXISTS
    nodes = list(variables)
    for _ in range(rng.randint(1, max_gates)):
        fan = rng.randint(0 if rng.random() < 0.05 else 1, 4)
        inputs = [rng.choice(nodes) * (1 if rng.random() < 0.5 else -1) for _ in range(fan)]
        nodes.append(cb.gate(rng.choice(("and", "or")), list(dict.fromkeys(inputs))))
    output = nodes[-1] * (1 if rng.random() < 0.8 else -1)
    return QbfCircuit(tuple(blocks), tuple(cb.gates), output, dict(cb.names))
