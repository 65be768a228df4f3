from quantasp.model import Program, QuantifiedProgram
from quantasp.textio import parse


def qprog(text: str) -> QuantifiedProgram:
    return parse(text, allow_reserved=True)


def prog(text: str) -> Program:
    """A single existential level with the given rules."""
    return qprog(f"%@exists\n{text}\n%@constraint\n").program(1)


def names(atoms) -> set[str]:
    return {a.name for a in atoms}


def rules_text(program: Program) -> list[str]:
    return [str(r) for r in program.rules]
