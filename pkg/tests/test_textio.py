import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quantasp.model import Quantifier, desugar
from quantasp.random_programs import random_quantified_program
from quantasp.textio import ParseError, parse, render, render_program

from conftest import load


def test_two_level_program_sections():
    qp = load("exists_forall.aspq")
    assert qp.n == 2
    assert qp.quantifier(1) is Quantifier.EXISTS and qp.quantifier(2) is Quantifier.FORALL
    assert len(qp.constraint.rules) == 2


def test_single_level_with_empty_constraint():
    qp = parse("%@exists\na.\n%@constraint\n")
    assert qp.n == 1 and [str(r) for r in qp.program(1).rules] == ["a."]
    assert qp.constraint.rules == ()


def test_constraint_only_atom():
    qp = parse("%@exists\np :- not p.\n%@constraint\n:- q.\n")
    assert parse(render(qp)) == qp
    assert "q" not in {a.name for r in qp.program(1).rules for a in r.atoms()}


def test_render_parse_fixpoint():
    text = render(load("exists_forall.aspq"))
    assert render(parse(text)) == text


def test_empty_constraint_renders_alone():
    assert render(parse("%@exists\na.\n%@constraint\n")).endswith("%@constraint\n")


def test_fresh_atoms_render_with_reserved_names():
    qp = parse("%@exists\n{a}.\n%@constraint\n")
    assert render_program(desugar(qp.program(1))) == "a :- not _na_a.\n_na_a :- not a.\n"


def test_comments_and_functional_atoms():
    qp = parse("% header\n%@forall\n{a(1);a(2)}. % trailing\n:- a(1), a(2).\n%@constraint\n")
    assert qp.symbols.names() == {"a(1)", "a(2)"}
    assert str(qp.program(1).rules[0]) == "{a(1);a(2)}."


@pytest.mark.parametrize(
    "text",
    [
        "a.\n%@constraint\n",
        "%@exists\na :- .\n%@constraint\n",
        "%@exists\na\n%@constraint\n",
        "%@exists\nA.\n%@constraint\n",
        "%@exists\na.\n%@constraint\np :- not p.\n",
        "%@exists\n_na_x.\n%@constraint\n",
        "%@maybe\na.\n%@constraint\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_missing_constraint_section_means_empty():
    assert parse("%@exists\na.\n").constraint.rules == ()


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse("%@exists\na :- b c.\n%@constraint\n")
    assert info.value.line == 2


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6))
def test_round_trip_random(seed):
    qp = random_quantified_program(random.Random(seed))
    text = render(qp)
    assert render(parse(text)) == text
