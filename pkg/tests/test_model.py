import random

from hypothesis import given, settings
from hypothesis import strategies as st

from quantasp.model import (
    FreshAtoms,
    PartialInterpretation,
    desugar,
    facts,
    fix,
    heads,
    herbrand_base,
    interface_atoms,
    is_reserved,
    is_stratified,
    prefix_union,
)
from quantasp.oracle import answer_sets_bruteforce
from quantasp.random_programs import random_program
from quantasp.model import SymbolTable

from helpers import names, prog, qprog, rules_text


def test_choice_desugaring():
    assert rules_text(desugar(prog("{a}."))) == ["a :- not _na_a.", "_na_a :- not a."]


def test_choice_with_body_appends_body():
    assert rules_text(desugar(prog("{a} :- b. b."))) == ["a :- not _na_a, b.", "_na_a :- not a.", "b."]


def test_constraint_desugaring():
    assert rules_text(desugar(prog(":- a, b."))) == ["_t_0 :- a, b, not _t_0."]


def test_desugar_is_idempotent():
    once = desugar(prog("{a;b}. :- a, b. c :- not a."))
    assert rules_text(desugar(once)) == rules_text(once)


def test_fresh_names_avoid_existing_atoms():
    p = prog("{a}. _na_a :- b. b.")
    out = rules_text(desugar(p))
    assert out[0] == "a :- not _na_a_2."


def test_shared_allocator_keeps_names_unique():
    p = prog(":- a.")
    fresh = FreshAtoms(p.symbols, {"a"})
    first = desugar(p, fresh)
    second = desugar(p, fresh)
    assert rules_text(first) != rules_text(second)


def test_herbrand_base():
    assert herbrand_base(prog("")) == frozenset()
    assert names(herbrand_base(prog("a. b :- a, c."))) == {"a", "b", "c"}


def test_heads_and_facts():
    p = prog("a. {b;c}. d :- a. :- d.")
    assert names(heads(p)) == {"a", "b", "c", "d"}
    assert names(facts(p)) == {"a"}


def test_stratification():
    assert is_stratified(prog("a :- b. b :- a."))
    assert not is_stratified(prog("p :- not p."))
    assert is_stratified(prog(""))
    assert is_stratified(prog("a :- not b. c :- a."))
    assert not is_stratified(prog("a :- not b. b :- not a."))


def test_fix_total_model():
    p = prog("a :- b. b :- a.")
    a, b = p.symbols.get("a"), p.symbols.get("b")
    fixed = fix(p, PartialInterpretation.total({a, b}, {a}))
    assert rules_text(fixed) == ["a.", ":- b."]
    assert rules_text(fix(prog(""), {})) == []


def test_interface_atoms():
    qp = qprog("%@exists\na. b.\n%@forall\nc.\n%@constraint\n:- a, c.\n")
    assert interface_atoms(qp.program(1), qp.program(2)) == frozenset()
    assert names(interface_atoms(qp.program(1), qp.program(3))) == {"a"}
    assert names(interface_atoms(qp.program(1), qp.program(1))) == {"a", "b"}


def test_prefix_union():
    qp = qprog("%@exists\na.\n%@forall\nb :- a.\n%@constraint\n")
    assert rules_text(prefix_union(qp, 1)) == ["a."]
    u = prefix_union(qp, 2)
    assert rules_text(u) == ["a.", "b :- a."]
    assert u.rules[0].head is u.rules[1].body[0].atom


def test_reserved_prefixes():
    assert is_reserved("_na_x") and is_reserved("_u_1") and is_reserved("_phi_2") and is_reserved("_t_0")
    assert not is_reserved("na_x")


def test_partial_interpretation_rejects_clash():
    p = prog("a.")
    a = p.symbols.get("a")
    try:
        PartialInterpretation(frozenset({a}), frozenset({a}), frozenset({a}))
    except ValueError:
        return
    raise AssertionError("clash accepted")


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_desugar_preserves_answer_sets(seed):
    rng = random.Random(seed)
    symbols = SymbolTable()
    atoms = [symbols.intern(f"q{k}") for k in range(rng.randint(1, 4))]
    p = random_program(rng, symbols, atoms, rng.randint(1, 5))
    native = answer_sets_bruteforce(p).names()
    base = {a.name for a in herbrand_base(p)}
    lowered = {m & base for m in answer_sets_bruteforce(desugar(p), max_atoms=20).names()}
    assert lowered == native
