"""QBF encodings of quantified programs.

Every encoding is produced level by level: the intermediate program of a
level is built, desugared, optionally simplified by its well-founded model and
turned into CNF, and only then is the next level considered.  The assembled
formula is either a circuit (``phi``, ``phi_wf``, ``phi_k``) or, for programs
whose universal levels are all trivial, a prenex CNF.
"""

from __future__ import annotations

import enum
from collections.abc import Callable, Iterator
from dataclasses import dataclass

from .circuit import Block, CircuitBuilder, Gate, QbfCircuit
from .cnf import (
    DEFAULT_INCOHERENCE_LIMIT,
    DEFAULT_SCC_BOUND,
    Clause,
    CnfFormula,
    bounded_incoherence_check,
    cnf_encode,
)
from .gc import check_trivial, trivial_levels
from .model import (
    Atom,
    ChoiceHead,
    FreshAtoms,
    Literal,
    PartialInterpretation,
    Program,
    QuantifiedProgram,
    Quantifier,
    Rule,
    by_id,
    desugar,
    heads,
    herbrand_base,
)
from .wellfounded import well_founded_model


class Mode(enum.Enum):
    BASE = "base"
    WF = "wf"


@dataclass(frozen=True)
class LevelEncoding:
    index: int
    quantifier: Quantifier
    program: Program
    cnf: CnfFormula | None
    ext: frozenset[Atom] = frozenset()
    wf: PartialInterpretation | None = None
    incoherent: bool = False

    @property
    def skipped(self) -> bool:
        return self.cnf is None and not self.incoherent


@dataclass(frozen=True)
class LevelStats:
    index: int
    clauses: int
    variables: int


@dataclass(frozen=True)
class EncodingReport:
    mode: Mode
    levels: tuple[LevelStats, ...]
    pruned_at: int | None = None
    constant_result: bool | None = None
    trivial: frozenset[int] = frozenset()

    @property
    def clauses(self) -> int:
        return sum(s.clauses for s in self.levels)

    def clause_counts(self, n_levels: int) -> list[int]:
        """Clause count per level ``1..n_levels``; absent levels count 0."""
        by_level = {s.index: s.clauses for s in self.levels}
        return [by_level.get(i, 0) for i in range(1, n_levels + 1)]


def _all_names(qp: QuantifiedProgram) -> set[str]:
    return {a.name for p in qp.programs() for a in herbrand_base(p)}


def _interface_rules(
    lower_base: set[Atom], upper: Program, w: PartialInterpretation | None
) -> list[Rule]:
    shared = by_id(lower_base & herbrand_base(upper))
    if w is None:
        return [Rule(ChoiceHead((a,))) for a in shared]
    defined = heads(upper)
    rules = [Rule(ChoiceHead((a,))) for a in shared if a not in w.true and a not in w.false]
    for a in shared:
        if a in w.true:
            rules.append(Rule(a))
        elif a in w.false and a in defined:
            rules.append(Rule(None, (Literal(a),)))
    return rules


def _level_cnf(program: Program, level: int, scc_bound: int) -> CnfFormula:
    cnf = cnf_encode(program, scc_bound)
    names = tuple(
        f"{name}_l{level}" if v in cnf.aux else name for v, name in enumerate(cnf.names, start=1)
    )
    return CnfFormula(cnf.clauses, names, cnf.aux)


def iter_levels(
    qp: QuantifiedProgram,
    mode: Mode = Mode.BASE,
    skip: frozenset[int] = frozenset(),
    scc_bound: int = DEFAULT_SCC_BOUND,
    incoherence_limit: int = DEFAULT_INCOHERENCE_LIMIT,
) -> Iterator[LevelEncoding]:
    """Encode levels ``1..n+1`` one at a time.

    Levels in ``skip`` are not encoded (their well-founded model is still
    computed in WF mode).  In WF mode the iteration stops after the first
    level found incoherent.
    """
    fresh = FreshAtoms(qp.symbols, _all_names(qp))
    lower_base: set[Atom] = set()
    w_true: set[Atom] = set()
    w_false: set[Atom] = set()
    for i in range(1, qp.n + 2):
        p = qp.program(i)
        q = qp.quantifier(i)
        w = None
        if mode is Mode.WF:
            w = PartialInterpretation(frozenset(lower_base), frozenset(w_true), frozenset(w_false))
        g = desugar(p.with_rules(p.rules + tuple(_interface_rules(lower_base, p, w))), fresh)
        lower_base |= herbrand_base(p)
        model = None
        if mode is Mode.WF:
            res = well_founded_model(g)
            model = res.model
            clash = (model.true & frozenset(w_false)) | (model.false & frozenset(w_true))
            w_true |= model.true
            w_false |= model.false
            if res.trivially_incoherent or clash:
                yield LevelEncoding(i, q, res.residual, None, wf=model, incoherent=True)
                return
            g = res.residual
        if i in skip:
            ext = check_trivial(qp, i).ext_atoms
            yield LevelEncoding(i, q, g, None, ext=ext, wf=model)
            continue
        cnf = _level_cnf(g, i, scc_bound)
        if mode is Mode.WF and bounded_incoherence_check(cnf, incoherence_limit) is True:
            yield LevelEncoding(i, q, g, cnf, wf=model, incoherent=True)
            return
        yield LevelEncoding(i, q, g, cnf, wf=model)


def build_intermediate(qp: QuantifiedProgram, i: int, mode: Mode = Mode.BASE) -> Program:
    """``G_i`` (BASE, before desugaring) or the residual ``G^WF_i`` (WF).

    ``i == n + 1`` stands for the constraint program.
    """
    if not 1 <= i <= qp.n + 1:
        raise IndexError(f"level {i} out of range 1..{qp.n + 1}")
    if mode is Mode.BASE:
        lower: set[Atom] = set()
        for j in range(1, i):
            lower |= herbrand_base(qp.program(j))
        p = qp.program(i)
        return p.with_rules(p.rules + tuple(_interface_rules(lower, p, None)))
    for enc in iter_levels(qp, Mode.WF):
        if enc.index == i:
            return enc.program
    raise ValueError(f"level {i} lies beyond the incoherent level where the encoding stops")


def _fold(quantifier: Quantifier, phi: int, inner: int | bool, cb: CircuitBuilder) -> int | bool:
    if quantifier is Quantifier.FORALL:
        if inner is True:
            return True
        if inner is False:
            return -phi
        return cb.or_((-phi, inner))
    if inner is False:
        return False
    if inner is True:
        return phi
    return cb.and_((phi, inner))


class _CircuitAssembler:
    def __init__(self, sink: Callable[[Gate], None] | None) -> None:
        self.cb = CircuitBuilder(sink)
        self.ids: dict[str, int] = {}
        self.blocks: list[Block] = []
        self.phis: list[tuple[Quantifier, int]] = []
        self.equivalences: list[int] = []
        self.stats: list[LevelStats] = []
        self.pruned: tuple[int, Quantifier] | None = None

    def quantify(self, names: list[str], q: Quantifier, level: int) -> None:
        new = []
        for name in names:
            if name not in self.ids:
                self.ids[name] = self.cb.var(name)
                new.append(self.ids[name])
        self.blocks.append(Block(q, tuple(new), level))

    def add(self, enc: LevelEncoding) -> None:
        if enc.incoherent:
            self.pruned = (enc.index, enc.quantifier)
            return
        if enc.cnf is None:
            self.quantify([a.name for a in by_id(enc.ext)], enc.quantifier, enc.index)
            return
        cnf = enc.cnf
        self.quantify(list(cnf.names), enc.quantifier, enc.index)
        phi = self.cb.var(f"_phi_{enc.index}")
        self.phis.append((enc.quantifier, phi))
        ids = [self.ids[name] for name in cnf.names]

        def lit(l: int) -> int:
            return ids[l - 1] if l > 0 else -ids[-l - 1]

        clauses = []
        for clause in cnf.clauses:
            if len(clause) == 1:
                clauses.append(lit(clause[0]))
            else:
                clauses.append(self.cb.or_([lit(l) for l in clause]))
        matrix = self.cb.and_(clauses)
        self.equivalences.append(self.cb.and_((self.cb.or_((-phi, matrix)), self.cb.or_((phi, -matrix)))))
        self.stats.append(LevelStats(enc.index, len(cnf.clauses), cnf.num_vars))

    def finish(self, mode: Mode, trivial: frozenset[int]) -> tuple[QbfCircuit, EncodingReport]:
        inner: int | bool
        phis = list(self.phis)
        if self.pruned is None:
            _, inner = phis.pop()
        else:
            inner = self.pruned[1] is Quantifier.FORALL
        for q, phi in reversed(phis):
            inner = _fold(q, phi, inner, self.cb)
        gate_vars = tuple(phi for _, phi in self.phis)
        prefix = self.blocks + [Block(Quantifier.EXISTS, gate_vars, None)]
        if inner is False:
            output = self.cb.or_(())
        elif inner is True:
            output = self.cb.and_(self.equivalences)
        else:
            output = self.cb.and_(self.equivalences + [inner])
        constant = None
        if self.pruned is not None and self.pruned[0] == 1:
            constant = self.pruned[1] is Quantifier.FORALL
        circuit = QbfCircuit(tuple(prefix), tuple(self.cb.gates), output, dict(self.cb.names), gate_vars)
        report = EncodingReport(
            mode,
            tuple(self.stats),
            self.pruned[0] if self.pruned else None,
            constant,
            trivial,
        )
        return circuit, report


def _build_circuit(
    qp: QuantifiedProgram,
    mode: Mode,
    skip: frozenset[int],
    sink: Callable[[Gate], None] | None,
    scc_bound: int,
) -> tuple[QbfCircuit, EncodingReport]:
    asm = _CircuitAssembler(sink)
    for enc in iter_levels(qp, mode, skip, scc_bound):
        asm.add(enc)
    return asm.finish(mode, skip)


def build_phi(
    qp: QuantifiedProgram,
    sink: Callable[[Gate], None] | None = None,
    scc_bound: int = DEFAULT_SCC_BOUND,
) -> QbfCircuit:
    return _build_circuit(qp, Mode.BASE, frozenset(), sink, scc_bound)[0]


def build_phi_report(
    qp: QuantifiedProgram,
    sink: Callable[[Gate], None] | None = None,
    scc_bound: int = DEFAULT_SCC_BOUND,
) -> tuple[QbfCircuit, EncodingReport]:
    return _build_circuit(qp, Mode.BASE, frozenset(), sink, scc_bound)


def build_phi_wf(
    qp: QuantifiedProgram,
    sink: Callable[[Gate], None] | None = None,
    scc_bound: int = DEFAULT_SCC_BOUND,
) -> tuple[QbfCircuit, EncodingReport]:
    """Well-founded encoding; stops at the first level shown incoherent."""
    return _build_circuit(qp, Mode.WF, frozenset(), sink, scc_bound)


def build_phi_k(
    qp: QuantifiedProgram,
    mode: Mode = Mode.BASE,
    sink: Callable[[Gate], None] | None = None,
    scc_bound: int = DEFAULT_SCC_BOUND,
) -> tuple[QbfCircuit, EncodingReport]:
    """Encoding that leaves trivial levels out of the matrix."""
    return _build_circuit(qp, mode, trivial_levels(qp), sink, scc_bound)


@dataclass(frozen=True)
class PrenexCnf:
    prefix: tuple[Block, ...]
    matrix: CnfFormula
    report: EncodingReport | None = None

    def __iter__(self):
        return iter((self.prefix, self.matrix))


class NotCnfEncodable(ValueError):
    """Some universal level is not trivial, so no direct CNF encoding applies."""


def build_phi_k_cnf(
    qp: QuantifiedProgram,
    mode: Mode = Mode.BASE,
    clause_sink: Callable[[Clause], None] | None = None,
    scc_bound: int = DEFAULT_SCC_BOUND,
) -> PrenexCnf:
    """Direct prenex CNF: the conjunction of the non-trivial level encodings.

    Requires every universal level to be trivial.  With ``clause_sink`` the
    clauses are handed over level by level and the returned matrix is empty.
    """
    k = trivial_levels(qp)
    for i in range(1, qp.n + 1):
        if qp.quantifier(i) is Quantifier.FORALL and i not in k:
            raise NotCnfEncodable(f"universal level {i} is not trivial")
    names: list[str] = []
    ids: dict[str, int] = {}
    aux: set[int] = set()
    blocks: list[Block] = []
    clauses: list[Clause] = []
    stats: list[LevelStats] = []
    pruned = None

    def emit(clause: Clause) -> None:
        if clause_sink is None:
            clauses.append(clause)
        else:
            clause_sink(clause)

    def quantify(level_names: list[str], level_aux: set[str], q: Quantifier, level: int) -> None:
        new = []
        for name in level_names:
            if name not in ids:
                names.append(name)
                ids[name] = len(names)
                new.append(ids[name])
                if name in level_aux:
                    aux.add(ids[name])
        blocks.append(Block(q, tuple(new), level))

    for enc in iter_levels(qp, mode, k, scc_bound):
        if enc.incoherent:
            pruned = enc.index
            if enc.quantifier is Quantifier.EXISTS:
                emit(())
            break
        if enc.cnf is None:
            quantify([a.name for a in by_id(enc.ext)], set(), enc.quantifier, enc.index)
            continue
        cnf = enc.cnf
        quantify(list(cnf.names), {cnf.name(v) for v in cnf.aux}, enc.quantifier, enc.index)
        local = [ids[name] for name in cnf.names]
        for clause in cnf.clauses:
            emit(tuple(local[l - 1] if l > 0 else -local[-l - 1] for l in clause))
        stats.append(LevelStats(enc.index, len(cnf.clauses), cnf.num_vars))
    constant = None
    if pruned == 1:
        constant = qp.quantifier(1) is Quantifier.FORALL
    report = EncodingReport(mode, tuple(stats), pruned, constant, k)
    return PrenexCnf(tuple(blocks), CnfFormula(tuple(clauses), tuple(names), frozenset(aux)), report)
