import random

import pytest

from quantasp.gc import (
    NotGC,
    check_def5,
    check_trivial,
    cnf_target,
    ext_atoms,
    gc_chain,
    gc_rewrite_level,
    rho,
    sigma,
    split_guess_check,
    tau,
    trivial_levels,
    unsat_atom,
)
from quantasp.model import Quantifier
from quantasp.oracle import coherence_bruteforce
from quantasp.random_programs import random_gc_program

from conftest import load
from helpers import names, prog, qprog, rules_text


def test_ext_atoms():
    qp = qprog("%@exists\n{a;b}.\n%@constraint\n:- a.\n")
    assert names(ext_atoms(qp, 1)) == {"a"}
    qp = qprog("%@exists\n{a;b}.\n%@constraint\n")
    assert ext_atoms(qp, 1) == frozenset()
    assert names(ext_atoms(load("exists_forall.aspq"), 2)) == {"c", "d", "e"}


def test_trivial_levels():
    qp = qprog("%@forall\n{x1;x2}.\n%@constraint\n:- x1, x2.\n")
    assert check_trivial(qp, 1).syntactically_trivial
    qp = qprog("%@forall\na.\n%@constraint\n:- a.\n")
    assert not check_trivial(qp, 1).syntactically_trivial
    qp = qprog("%@exists\n{a}.\n%@forall\n{b}.\n%@constraint\n:- a, b.\n")
    assert trivial_levels(qp) == frozenset({1, 2})
    qp = qprog("%@exists\n{a}.\n%@forall\n{b}.\nb :- a.\n%@constraint\n:- b.\n")
    report = check_trivial(qp, 2)
    assert not report.syntactically_trivial and not report.interface_ok


def test_split():
    split = split_guess_check(prog("{a;b;c}. d :- a. d :- b. :- c, d."))
    assert rules_text(split.guess) == ["{a;b;c}."]
    assert rules_text(split.check) == ["d :- a.", "d :- b.", ":- c, d."]
    with pytest.raises(NotGC):
        split_guess_check(prog("{a}. a :- b."))
    whole = split_guess_check(prog("{a}."))
    assert rules_text(whole.check) == []
    with pytest.raises(NotGC):
        split_guess_check(prog("{a}. b :- not c. c :- not b."))
    with pytest.raises(NotGC):
        split_guess_check(prog("{a} :- b. b."))


def test_tau():
    p = prog("{a(1);a(2)}. :- a(1), a(2).")
    u = p.symbols.intern("_u_1")
    assert rules_text(tau(u, split_guess_check(p))) == ["_u_1 :- a(1), a(2)."]
    q = prog("{a;c}. d :- a. :- c, d.")
    assert rules_text(tau(u, split_guess_check(q))) == ["d :- a.", "_u_1 :- c, d."]
    assert rules_text(tau(u, split_guess_check(prog("{a}.")))) == []


def test_rho_and_sigma():
    p = prog("b. c :- b. :- c.")
    u = p.symbols.intern("_u_1")
    assert rules_text(rho(u, p)) == ["b :- not _u_1.", "c :- b, not _u_1.", ":- c, not _u_1."]
    assert rules_text(rho(u, prog(""))) == []
    check = split_guess_check(prog("{a}. :- a."))
    s = sigma(u, check, p)
    assert len(s.rules) == len(tau(u, check).rules) + len(rho(u, p).rules)


def test_guess_check_rewrite_structure():
    qp = load("guess_check.aspq")
    out = gc_rewrite_level(qp, 1)
    assert rules_text(out.program(1)) == ["{a(1);a(2)}."]
    assert rules_text(out.program(2)) == [
        "_u_1 :- a(1), a(2).",
        "b(1) :- not _u_1.",
        "b(2) :- not _u_1.",
        "c(1) :- b(1), not _u_1.",
        "c(2) :- b(2), not _u_1.",
    ]
    assert rules_text(out.constraint) == []
    assert coherence_bruteforce(out) == coherence_bruteforce(qp)


def test_last_level_rewrite_goes_to_constraint():
    qp = qprog("%@exists\n{x}.\n%@forall\n{y}.\n:- x, y.\n%@constraint\n")
    out = gc_rewrite_level(qp, 2)
    assert rules_text(out.constraint) == ["_u_2 :- x, y."]
    assert coherence_bruteforce(out) == coherence_bruteforce(qp)


def test_inner_rewrite_prefixes_constraint():
    text = "%@exists\n{a}.\n%@forall\n{b}.\n:- a, b.\n%@exists\n{c}.\n%@forall\n{d}.\n%@constraint\n:- c, d.\n"
    qp = qprog(text)
    out = gc_rewrite_level(qp, 2)
    assert out.n == 4
    assert rules_text(out.program(4)) == [":- _u_2."] + rules_text(qp.program(4))
    assert rules_text(out.program(3)) == ["_u_2 :- a, b.", "{c} :- not _u_2."]
    assert rules_text(out.constraint) == rules_text(qp.constraint)
    assert coherence_bruteforce(out) == coherence_bruteforce(qp)


def test_unsat_atom_is_fresh():
    qp = qprog("%@forall\n{_u_1}.\n%@constraint\n")
    assert unsat_atom(qp, 1).name == "_u_1_2"


def test_def5():
    with pytest.raises(NotGC):
        check_def5(qprog("%@exists\n{a}.\n%@exists\n{b}.\n%@constraint\n"))
    check_def5(load("guess_check.aspq"))


def test_chain_leaves_one_universal_level_per_original():
    qp = load("guess_check.aspq")
    chained = gc_chain(qp)
    assert [chained.quantifier(i) for i in range(1, 3)] == [Quantifier.FORALL, Quantifier.EXISTS]
    assert trivial_levels(chained) >= {1}
    assert cnf_target(qp).n == 2


def test_isolation_is_required():
    qp = qprog("%@exists\nx0 :- x0.\n%@forall\nx0.\n{x2;x1}.\n:- x0, x2.\n%@constraint\n")
    assert coherence_bruteforce(qp)
    with pytest.raises(NotGC):
        gc_rewrite_level(qp, 2)


@pytest.mark.parametrize("seed", range(4))
def test_random_chain_preserves_coherence(seed):
    rng = random.Random(1000 + seed)
    for _ in range(25):
        qp = random_gc_program(rng)
        assert coherence_bruteforce(gc_chain(qp)) == coherence_bruteforce(qp)
