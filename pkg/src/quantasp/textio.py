"""Reading and writing the ``.aspq`` surface syntax.

A file is a sequence of sections introduced by ``%@exists``, ``%@forall`` and a
final ``%@constraint``.  Section bodies are plain rules::

    %@exists
    {a;b}.
    :- a, not b.
    %@forall
    c :- not a, not b.
    %@constraint
    :- e, c.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import (
    ChoiceHead,
    Level,
    Literal,
    Program,
    QuantifiedProgram,
    Quantifier,
    Rule,
    SymbolTable,
    is_reserved,
    is_stratified,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<directive>%@[A-Za-z]*)
  | (?P<comment>%[^\n]*)
  | (?P<if>:-)
  | (?P<atom>[a-z_][A-Za-z0-9_()]*)
  | (?P<punct>[.,;{}])
    """,
    re.VERBOSE,
)

_SECTIONS = {
    "%@exists": Quantifier.EXISTS,
    "%@forall": Quantifier.FORALL,
    "%@constraint": None,
}


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        assert kind is not None
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], symbols: SymbolTable, allow_reserved: bool) -> None:
        self.tokens = tokens
        self.pos = 0
        self.symbols = symbols
        self.allow_reserved = allow_reserved

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, what: str) -> Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else Token("eof", "", 1, 1)
            raise ParseError(f"unexpected end of input, expected {what}", last.line, last.column)
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next(repr(text))
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.column)
        return tok

    def atom(self) -> Literal:
        tok = self.next("an atom")
        if tok.kind != "atom" or tok.text == "not":
            raise ParseError(f"expected an atom, found {tok.text!r}", tok.line, tok.column)
        if tok.text.count("(") != tok.text.count(")"):
            raise ParseError(f"unbalanced parentheses in {tok.text!r}", tok.line, tok.column)
        if not self.allow_reserved and is_reserved(tok.text):
            raise ParseError(f"atom {tok.text!r} uses a reserved prefix", tok.line, tok.column)
        return Literal(self.symbols.intern(tok.text))

    def literal(self) -> Literal:
        tok = self.peek()
        if tok is not None and tok.text == "not":
            self.pos += 1
            return self.atom().complement()
        return self.atom()

    def body(self) -> tuple[Literal, ...]:
        lits = [self.literal()]
        while True:
            tok = self.next("',' or '.'")
            if tok.text == ".":
                return tuple(lits)
            if tok.text != ",":
                raise ParseError(f"expected ',' or '.', found {tok.text!r}", tok.line, tok.column)
            lits.append(self.literal())

    def rule(self) -> Rule:
        tok = self.peek()
        assert tok is not None
        if tok.kind == "if":
            self.pos += 1
            return Rule(None, self.body())
        if tok.text == "{":
            self.pos += 1
            atoms = [self.atom().atom]
            while True:
                sep = self.next("';' or '}'")
                if sep.text == "}":
                    break
                if sep.text != ";":
                    raise ParseError(f"expected ';' or '}}', found {sep.text!r}", sep.line, sep.column)
                atoms.append(self.atom().atom)
            head: ChoiceHead | Literal = ChoiceHead(tuple(atoms))
        else:
            head = self.atom()
        tok = self.next("':-' or '.'")
        if tok.text == ".":
            body: tuple[Literal, ...] = ()
        elif tok.kind == "if":
            body = self.body()
        else:
            raise ParseError(f"expected ':-' or '.', found {tok.text!r}", tok.line, tok.column)
        return Rule(head if isinstance(head, ChoiceHead) else head.atom, body)


def parse(text: str, allow_reserved: bool = False) -> QuantifiedProgram:
    """Parse ``.aspq`` text into a :class:`QuantifiedProgram`.

    Reserved-prefix atoms are rejected unless ``allow_reserved`` is set, which
    is how rewritten programs printed by this package are read back.
    """
    if text.startswith("﻿"):
        text = text[1:]
    tokens = tokenize(text)
    symbols = SymbolTable()
    parser = _Parser(tokens, symbols, allow_reserved)
    sections: list[tuple[Quantifier | None, list[Rule], Token]] = []
    while parser.peek() is not None:
        tok = parser.peek()
        assert tok is not None
        if tok.kind == "directive":
            parser.pos += 1
            if tok.text not in _SECTIONS:
                raise ParseError(f"unknown directive {tok.text!r}", tok.line, tok.column)
            if sections and sections[-1][0] is None:
                raise ParseError("no section may follow %@constraint", tok.line, tok.column)
            sections.append((_SECTIONS[tok.text], [], tok))
            continue
        if not sections:
            raise ParseError("rule outside of a section", tok.line, tok.column)
        sections[-1][1].append(parser.rule())

    levels = [Level(q, Program(tuple(rules), symbols)) for q, rules, _ in sections if q is not None]
    if not levels:
        raise ParseError("at least one %@exists or %@forall section is required", 1, 1)
    constraint = Program((), symbols)
    if sections[-1][0] is None:
        _, rules, tok = sections[-1]
        constraint = Program(tuple(rules), symbols)
        if not is_stratified(constraint):
            raise ParseError("constraint section is not stratified", tok.line, tok.column)
    return QuantifiedProgram(tuple(levels), constraint, symbols, strict=False)


def render_program(program: Program) -> str:
    return "".join(f"{r}\n" for r in program.rules)


def render(qp: QuantifiedProgram) -> str:
    parts = []
    for level in qp.levels:
        parts.append(f"%@{level.quantifier.value}\n")
        parts.append(render_program(level.program))
    parts.append("%@constraint\n")
    parts.append(render_program(qp.constraint))
    return "".join(parts)
