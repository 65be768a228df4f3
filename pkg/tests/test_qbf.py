import random

import pytest

from quantasp.builder import build_phi, build_phi_k_cnf, Mode
from quantasp.circuit import Block, CircuitBuilder, Gate, QbfCircuit, check_prefix, merge_blocks
from quantasp.evaluator import QbfTooLarge, eval_qbf
from quantasp.gc import cnf_target
from quantasp.model import Quantifier
from quantasp.qbf import FormatError, emit_qcir, emit_qdimacs, parse_qcir, parse_qdimacs, prenex_cnf
from quantasp.random_programs import random_circuit, random_quantified_program

from conftest import load

E, A = Quantifier.EXISTS, Quantifier.FORALL


def naive(circuit: QbfCircuit) -> bool:
    """Expand the prefix over the whole truth table."""
    table = circuit.gate_table()

    def value(lit, assign):
        v = abs(lit)
        if v in table:
            g = table[v]
            vals = [value(l, assign) for l in g.inputs]
            out = all(vals) if g.kind == "and" else any(vals)
        else:
            out = assign.get(v, False)
        return out if lit > 0 else not out

    order = [(b.quantifier, v) for b in circuit.prefix for v in b.variables]

    def rec(k, assign):
        if k == len(order):
            return value(circuit.output, assign)
        q, v = order[k]
        branches = (rec(k + 1, {**assign, v: b}) for b in (False, True))
        return any(branches) if q is E else all(branches)

    return rec(0, {})


def test_small_cnf_cases():
    assert eval_qbf(((Block(E, (1,)),), [(1,)])) is True
    assert eval_qbf(((Block(A, (1,)),), [(1,)])) is False
    assert eval_qbf(((Block(E, (1,)), Block(A, (2,))), [(1, 2), (-1, -2)])) is False
    assert eval_qbf(((Block(A, (2,)), Block(E, (1,))), [(1, 2), (-1, -2)])) is True
    assert eval_qbf(((), [()])) is False
    assert eval_qbf(((), [])) is True


def test_free_variables_are_existential():
    assert eval_qbf(((), [(1,), (-1, 2)])) is True


def test_bound():
    prefix = (Block(A, tuple(range(1, 11))),)
    with pytest.raises(QbfTooLarge):
        eval_qbf((prefix, [tuple(range(1, 11))]), bound=5)


def test_evaluator_matches_truth_table():
    for seed in range(300):
        c = random_circuit(random.Random(seed), max_vars=9, max_gates=14)
        assert eval_qbf(c) == naive(c), seed


def test_constant_circuits():
    cb = CircuitBuilder()
    out = cb.and_(())
    c = QbfCircuit((), tuple(cb.gates), out)
    assert emit_qcir(c) == "#QCIR-G14\noutput(1)\n1 = and()\n"
    assert eval_qbf(c) is True and eval_qbf(parse_qcir(emit_qcir(c))) is True


def test_circuit_validation():
    with pytest.raises(ValueError):
        QbfCircuit((Block(E, (1,)), Block(A, (1,))), (), 1).validate()
    with pytest.raises(ValueError):
        QbfCircuit((Block(E, (1,)),), (Gate(2, "and", (3,)), Gate(3, "or", (2,))), 2).validate()
    with pytest.raises(ValueError):
        check_prefix([Block(E, (1, 1))])


def test_merge_blocks():
    merged = merge_blocks([Block(E, (1,)), Block(E, ()), Block(E, (2,)), Block(A, ()), Block(A, (3,))])
    assert [(b.quantifier, b.variables) for b in merged] == [(E, (1, 2)), (A, (3,))]


def test_two_level_circuit_round_trip():
    c = build_phi(load("exists_forall.aspq"))
    back = parse_qcir(emit_qcir(c))
    assert back.gates == c.gates and back.output == c.output
    assert [b.variables for b in back.prefix] == [b.variables for b in merge_blocks(c.prefix)]
    assert eval_qbf(back) == eval_qbf(c)


def test_qcir_text_shape():
    text = emit_qcir(build_phi(load("exists_forall.aspq")))
    lines = text.splitlines()
    assert lines[0] == "#QCIR-G14"
    assert [l.split("(")[0] for l in lines[1:4]] == ["exists", "forall", "exists"]
    assert lines[4].startswith("output(")


@pytest.mark.parametrize(
    "text",
    [
        "exists(1)\noutput(1)\n",
        "#QCIR-G14\nexists(1)\n",
        "#QCIR-G14\nexists(1)\noutput(2)\n2 = xor(1)\n",
        "#QCIR-G14\nexists(1)\noutput(3)\n2 = and(1)\n",
        "#QCIR-G14\nexists(a)\noutput(1)\n",
    ],
)
def test_qcir_errors(text):
    with pytest.raises(FormatError):
        parse_qcir(text)


def test_prenex_cnf_equisatisfiable_on_programs():
    # the search has no learning, so Tseytin CNFs with wide universal blocks are left out
    checked = 0
    for seed in range(120):
        c = build_phi(random_quantified_program(random.Random(seed)))
        if sum(len(b.variables) for b in c.prefix if b.quantifier is A) > 10:
            continue
        checked += 1
        assert eval_qbf(prenex_cnf(c)) == eval_qbf(c)
    assert checked >= 30


def test_prenex_cnf_sizes():
    cb = CircuitBuilder()
    x, y = cb.var("x"), cb.var("y")
    out = cb.and_((x, y))
    prefix, matrix = prenex_cnf(QbfCircuit((Block(A, (x,)), Block(E, (y,))), tuple(cb.gates), out))
    assert matrix.num_vars == 3 and len(matrix.clauses) == 4
    assert prefix[-1].quantifier is E and out in prefix[-1].variables


def test_qdimacs_round_trip():
    pc = build_phi_k_cnf(cnf_target(load("guess_check.aspq")), Mode.WF)
    text = emit_qdimacs(*pc)
    prefix, matrix = parse_qdimacs(text)
    assert matrix.clauses == pc.matrix.clauses
    assert [b.variables for b in prefix] == [b.variables for b in merge_blocks(pc.prefix)]
    assert emit_qdimacs(prefix, matrix) == text


def test_qdimacs_empty_clause():
    text = emit_qdimacs((Block(E, (1,)),), [()], num_vars=1)
    assert text == "p cnf 1 1\ne 1 0\n0\n"
    assert parse_qdimacs(text)[1].clauses == ((),)


@pytest.mark.parametrize(
    "text",
    [
        "e 1 0\n1 0\n",
        "p cnf 1 1\ne 1 0\ne 1 0\n1 0\n",
        "p cnf 1 2\ne 1 0\n1 0\n",
        "p cnf 1 1\ne 1 0\n2 0\n",
        "p cnf 1 1\ne 1 0\n1\n",
        "p cnf 1 1\n1 0\ne 1 0\n",
        "p cnf x 1\n",
    ],
)
def test_qdimacs_errors(text):
    with pytest.raises(FormatError):
        parse_qdimacs(text)


def test_gate_inputs_may_be_negated_and_shared():
    for seed in range(50):
        c = random_circuit(random.Random(seed))
        c.validate()
        assert all(abs(l) < g.id for g in c.gates for l in g.inputs)
