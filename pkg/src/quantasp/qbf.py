"""QCIR-G14 and QDIMACS emission and parsing, and Tseytin prenexing."""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator

from .circuit import Block, Gate, QbfCircuit, merge_blocks
from .cnf import Clause, CnfFormula, normalize_clause
from .evaluator import DEFAULT_EVAL_BOUND, QbfTooLarge, eval_qbf
from .model import Quantifier

__all__ = [
    "FormatError",
    "emit_qcir",
    "parse_qcir",
    "emit_qdimacs",
    "parse_qdimacs",
    "prenex_cnf",
    "eval_qbf",
    "QbfTooLarge",
    "DEFAULT_EVAL_BOUND",
]


class FormatError(ValueError):
    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


_QUANT_WORD = {Quantifier.EXISTS: "exists", Quantifier.FORALL: "forall"}


def qcir_gate_line(g: Gate) -> str:
    return f"{g.id} = {g.kind}({','.join(str(l) for l in g.inputs)})\n"


def qcir_header(prefix: Iterable[Block], output: int) -> str:
    lines = ["#QCIR-G14\n"]
    for b in merge_blocks(prefix):
        lines.append(f"{_QUANT_WORD[b.quantifier]}({','.join(str(v) for v in b.variables)})\n")
    lines.append(f"output({output})\n")
    return "".join(lines)


def iter_qcir(circuit: QbfCircuit) -> Iterator[str]:
    yield qcir_header(circuit.prefix, circuit.output)
    for g in circuit.gates:
        yield qcir_gate_line(g)


def emit_qcir(circuit: QbfCircuit) -> str:
    """QCIR-G14 text; empty blocks are dropped and equal neighbours merged."""
    return "".join(iter_qcir(circuit))


_QCIR_QUANT = re.compile(r"(exists|forall|free)\s*\(([^)]*)\)")
_QCIR_OUTPUT = re.compile(r"output\s*\(\s*(-?\d+)\s*\)")
_QCIR_GATE = re.compile(r"(\d+)\s*=\s*(and|or)\s*\(([^)]*)\)")


def _int_list(text: str, line: int) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise FormatError(f"bad literal list {text!r}", line) from None


def parse_qcir(text: str) -> QbfCircuit:
    """Parse the numeric QCIR-G14 subset written by :func:`emit_qcir`."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#QCIR-G14"):
        raise FormatError("missing #QCIR-G14 header", 1)
    prefix: list[Block] = []
    gates: list[Gate] = []
    output = None
    for no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if output is None:
            m = _QCIR_QUANT.fullmatch(line)
            if m:
                vars_ = _int_list(m.group(2), no)
                if any(v <= 0 for v in vars_):
                    raise FormatError("quantified variables must be positive", no)
                q = Quantifier.FORALL if m.group(1) == "forall" else Quantifier.EXISTS
                prefix.append(Block(q, tuple(vars_)))
                continue
            m = _QCIR_OUTPUT.fullmatch(line)
            if m:
                output = int(m.group(1))
                continue
            raise FormatError(f"expected a quantifier block or output, found {line!r}", no)
        m = _QCIR_GATE.fullmatch(line)
        if not m:
            raise FormatError(f"expected a gate definition, found {line!r}", no)
        gates.append(Gate(int(m.group(1)), m.group(2), tuple(_int_list(m.group(3), no))))
    if output is None:
        raise FormatError("missing output line", len(lines))
    circuit = QbfCircuit(tuple(prefix), tuple(gates), output)
    try:
        circuit.validate()
    except ValueError as exc:
        raise FormatError(str(exc), len(lines)) from None
    return circuit


# -- QDIMACS -----------------------------------------------------------------


def qdimacs_header(prefix: Iterable[Block], num_vars: int, num_clauses: int) -> str:
    lines = [f"p cnf {num_vars} {num_clauses}\n"]
    for b in merge_blocks(prefix):
        lines.append(f"{b.letter} {' '.join(str(v) for v in b.variables)} 0\n")
    return "".join(lines)


def qdimacs_clause_line(clause: Clause) -> str:
    return " ".join(str(l) for l in clause) + (" 0\n" if clause else "0\n")


def emit_qdimacs(prefix: Iterable[Block], matrix: CnfFormula | Iterable[Clause], num_vars: int | None = None) -> str:
    """QDIMACS text. The prefix is merged so quantifier lines alternate."""
    clauses = list(matrix.clauses if isinstance(matrix, CnfFormula) else matrix)
    prefix = merge_blocks(prefix)
    if num_vars is None:
        if isinstance(matrix, CnfFormula):
            num_vars = matrix.num_vars
        else:
            used = [abs(l) for c in clauses for l in c] + [v for b in prefix for v in b.variables]
            num_vars = max(used, default=0)
    return qdimacs_header(prefix, num_vars, len(clauses)) + "".join(qdimacs_clause_line(c) for c in clauses)


def parse_qdimacs(text: str) -> tuple[tuple[Block, ...], CnfFormula]:
    """Parse QDIMACS; variables are named by their numbers in the result."""
    header = None
    prefix: list[Block] = []
    clauses: list[Clause] = []
    pending: list[int] = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise FormatError(f"bad problem line {line!r}", no)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise FormatError(f"bad problem line {line!r}", no) from None
            continue
        if header is None:
            raise FormatError("content before the problem line", no)
        if line[0] in "ae":
            if clauses or pending:
                raise FormatError("quantifier line after clauses", no)
            nums = _ints(line[1:], no)
            if not nums or nums[-1] != 0 or 0 in nums[:-1]:
                raise FormatError("quantifier line must end with a single 0", no)
            q = Quantifier.EXISTS if line[0] == "e" else Quantifier.FORALL
            if prefix and prefix[-1].quantifier is q:
                raise FormatError("consecutive quantifier lines of the same kind", no)
            prefix.append(Block(q, tuple(nums[:-1])))
            continue
        for l in _ints(line, no):
            if l == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                pending.append(l)
    if header is None:
        raise FormatError("missing problem line", 1)
    if pending:
        raise FormatError("last clause is not terminated by 0", len(text.splitlines()))
    num_vars, num_clauses = header
    if len(clauses) != num_clauses:
        raise FormatError(f"expected {num_clauses} clauses, found {len(clauses)}", 1)
    used = [abs(l) for c in clauses for l in c] + [v for b in prefix for v in b.variables]
    if any(v > num_vars for v in used):
        raise FormatError("variable exceeds the declared count", 1)
    names = tuple(str(v) for v in range(1, num_vars + 1))
    return tuple(prefix), CnfFormula(tuple(clauses), names)


def _ints(text: str, line: int) -> list[int]:
    try:
        return [int(t) for t in text.split()]
    except ValueError:
        raise FormatError(f"bad number in {text.strip()!r}", line) from None


# -- Tseytin -------------------------------------------------------------------


def tseytin_clauses(g: Gate) -> list[Clause]:
    out: list[Clause] = []
    if g.kind == "and":
        raw = [(-g.id, l) for l in g.inputs] + [(g.id,) + tuple(-l for l in g.inputs)]
    else:
        raw = [(g.id, -l) for l in g.inputs] + [(-g.id,) + tuple(g.inputs)]
    for c in raw:
        n = normalize_clause(c)
        if n is not None:
            out.append(n)
    return out


def prenex_cnf(circuit: QbfCircuit) -> tuple[tuple[Block, ...], CnfFormula]:
    """Tseytin conversion: each gate id becomes an innermost existential variable."""
    clauses: list[Clause] = []
    for g in circuit.gates:
        clauses.extend(tseytin_clauses(g))
    clauses.append((circuit.output,))
    prefix = list(merge_blocks(circuit.prefix))
    selectors = tuple(g.id for g in circuit.gates)
    if selectors:
        if prefix and prefix[-1].quantifier is Quantifier.EXISTS:
            prefix[-1] = Block(Quantifier.EXISTS, prefix[-1].variables + selectors)
        else:
            prefix.append(Block(Quantifier.EXISTS, selectors))
    num_vars = circuit.max_id()
    names = tuple(circuit.names.get(v, str(v)) for v in range(1, num_vars + 1))
    return tuple(prefix), CnfFormula(tuple(clauses), names, frozenset(selectors))
