import pytest

from quantasp.oracle import (
    OracleLimitExceeded,
    answer_sets_bruteforce,
    coherence_bruteforce,
    quantified_answer_sets,
)

from helpers import names, prog, qprog


def test_even_loop():
    assert answer_sets_bruteforce(prog("a :- not b. b :- not a.")).names() == {frozenset("a"), frozenset("b")}


def test_choice():
    assert answer_sets_bruteforce(prog("{a}.")).names() == {frozenset(), frozenset("a")}


def test_odd_loop_has_none():
    assert len(answer_sets_bruteforce(prog("p :- not p."))) == 0


def test_positive_loop_is_unfounded():
    assert answer_sets_bruteforce(prog("a :- b. b :- a.")).names() == {frozenset()}


def test_exists_even_loop():
    qp = qprog("%@exists\na :- not b.\nb :- not a.\n%@constraint\n:- a.\n")
    assert coherence_bruteforce(qp)
    assert {frozenset(names(m)) for m in quantified_answer_sets(qp)} == {frozenset({"b"})}


def test_forall_even_loop():
    qp = qprog("%@forall\na :- not b.\nb :- not a.\n%@constraint\n:- a.\n")
    assert not coherence_bruteforce(qp)


def test_forall_without_answer_sets_is_vacuous():
    assert coherence_bruteforce(qprog("%@forall\np :- not p.\n%@constraint\n"))
    assert not coherence_bruteforce(qprog("%@exists\np :- not p.\n%@constraint\n"))


def test_corpus_results():
    from conftest import load

    assert coherence_bruteforce(load("exists_forall.aspq"))
    assert coherence_bruteforce(load("guess_check.aspq"))
    assert not coherence_bruteforce(load("unfounded_loop.aspq"))


def test_limits():
    big = prog(" ".join(f"{{x{k}}}." for k in range(12)))
    with pytest.raises(OracleLimitExceeded):
        answer_sets_bruteforce(big, max_atoms=10)
    qp = qprog("%@exists\n" + " ".join(f"{{x{k}}}." for k in range(12)) + "\n%@constraint\n")
    with pytest.raises(OracleLimitExceeded):
        coherence_bruteforce(qp, budget=100)
