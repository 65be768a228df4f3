"""Well-founded model, residual programs and the well-founded choice interface."""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    Atom,
    ChoiceHead,
    Literal,
    PartialInterpretation,
    Program,
    Rule,
    by_id,
    heads,
    herbrand_base,
)


@dataclass(frozen=True)
class WfResult:
    model: PartialInterpretation
    residual: Program
    trivially_incoherent: bool = False


def _body_true(rule: Rule, interp: PartialInterpretation) -> bool:
    return all(interp.literal_true(l) for l in rule.body)


def _body_false(rule: Rule, interp: PartialInterpretation) -> bool:
    return any(interp.literal_false(l) for l in rule.body)


def _require_normal(program: Program) -> None:
    for rule in program.rules:
        if not rule.is_normal:
            raise ValueError(f"program must be desugared, found {rule}")


def tp_step(program: Program, interp: PartialInterpretation) -> frozenset[Atom]:
    """Heads of rules whose body is true w.r.t. ``interp``."""
    return frozenset(r.head for r in program.rules if r.is_normal and _body_true(r, interp))  # type: ignore[misc]


def greatest_unfounded(program: Program, interp: PartialInterpretation) -> frozenset[Atom]:
    """Greatest unfounded set, as the complement of the supportable atoms.

    An atom is supportable when some rule for it has a body that is not false
    and all of whose positive atoms are already supportable.
    """
    base = herbrand_base(program) | interp.base
    live = [r for r in program.rules if r.is_normal and not _body_false(r, interp)]
    supported: set[Atom] = set()
    changed = True
    while changed:
        changed = False
        for r in live:
            if r.head not in supported and all(a in supported for a in r.positive_body()):
                supported.add(r.head)  # type: ignore[arg-type]
                changed = True
    return frozenset(base - supported)


def well_founded_model(program: Program) -> WfResult:
    """Least fixpoint of ``I -> T_P(I) U not U_P(I)`` and the residual program."""
    _require_normal(program)
    base = herbrand_base(program)
    interp = PartialInterpretation(base)
    while True:
        true = tp_step(program, interp)
        false = greatest_unfounded(program, interp)
        if true & false:
            return WfResult(interp, residual(program, interp), trivially_incoherent=True)
        nxt = PartialInterpretation(base, true, false)
        if nxt == interp:
            break
        interp = nxt
    return WfResult(interp, residual(program, interp))


def residual(program: Program, w: PartialInterpretation) -> Program:
    """Drop rules with a false body and delete true literals from the rest."""
    rules = []
    for r in program.rules:
        if _body_false(r, w):
            continue
        rules.append(Rule(r.head, tuple(l for l in r.body if not w.literal_true(l))))
    return program.with_rules(rules)


def wf_choice_interface(lower: Program, upper: Program, w_lower: PartialInterpretation) -> Program:
    """Interface program opening the atoms shared by ``lower`` and ``upper``.

    Atoms undefined in ``w_lower`` become choices and true atoms become facts.
    False atoms are left out, except that when ``upper`` can derive one a
    constraint keeps it false.
    """
    shared = herbrand_base(lower) & herbrand_base(upper)
    defined_above = heads(upper)
    choices = [a for a in by_id(shared) if a not in w_lower.true and a not in w_lower.false]
    rules: list[Rule] = []
    if choices:
        rules.extend(Rule(ChoiceHead((a,))) for a in choices)
    for a in by_id(shared):
        if a in w_lower.true:
            rules.append(Rule(a))
        elif a in w_lower.false and a in defined_above:
            rules.append(Rule(None, (Literal(a),)))
    return upper.with_rules(rules)


def choice_interface(lower: Program, upper: Program) -> Program:
    """``ch(Int(lower, upper))``: one single-atom choice per shared atom."""
    shared = herbrand_base(lower) & herbrand_base(upper)
    return upper.with_rules(Rule(ChoiceHead((a,))) for a in by_id(shared))
