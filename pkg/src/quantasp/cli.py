"""Command line: ``quantasp compile|solve|check|wf|features``."""

from __future__ import annotations

import argparse
import shutil
import sys
import tempfile
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import IO

from . import __version__
from .builder import (
    EncodingReport,
    Mode,
    PrenexCnf,
    build_phi_k,
    build_phi_k_cnf,
    build_phi_report,
    build_phi_wf,
    iter_levels,
)
from .circuit import CircuitBuilder, QbfCircuit
from .cnf import Clause, NonTightTooLarge
from .evaluator import QbfTooLarge, eval_qbf
from .features import SelectionError, extract_features, load_table, select_backend
from .gc import NotGC, cnf_target
from .model import QuantifiedProgram
from .oracle import OracleLimitExceeded, coherence_bruteforce
from .qbf import emit_qcir, emit_qdimacs, prenex_cnf, qcir_gate_line, qcir_header, qdimacs_clause_line, qdimacs_header
from .solvers import Result, SolverConfigError, load_config, run_external, run_portfolio
from .textio import ParseError, parse, render_program

EXIT_COHERENT = 10
EXIT_INCOHERENT = 20
EXIT_UNKNOWN = 30
EXIT_MISMATCH = 3
EXIT_FILE = 1
EXIT_USAGE = 2

ENCODINGS = ("base", "wf", "k", "wf+gc")


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_FILE) -> None:
        super().__init__(message)
        self.code = code


def _warn(message: str) -> None:
    print(f"quantasp: warning: {message}", file=sys.stderr)


def _read_program(path: str) -> QuantifiedProgram:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    try:
        return parse(text)
    except ParseError as exc:
        raise CliError(f"{path}:{exc}") from None


@dataclass
class Encoded:
    """A compiled formula: a circuit or a prenex CNF, plus its report."""

    encoding: str
    report: EncodingReport
    circuit: QbfCircuit | None = None
    cnf: PrenexCnf | None = None

    @property
    def formula(self) -> QbfCircuit | PrenexCnf:
        return self.circuit if self.circuit is not None else self.cnf  # type: ignore[return-value]


def _gc_target(qp: QuantifiedProgram, use_gc: bool) -> QuantifiedProgram | None:
    """The rewritten program when the direct CNF encoding applies, else None."""
    if not use_gc:
        return None
    try:
        return cnf_target(qp)
    except NotGC as exc:
        _warn(f"not encodable as CNF ({exc}); using the wf encoding")
        return None


def encode(qp: QuantifiedProgram, encoding: str, use_gc: bool = True, sink=None, clause_sink=None) -> Encoded:
    if encoding == "base":
        circuit, report = build_phi_report(qp, sink)
        return Encoded("base", report, circuit=circuit)
    if encoding == "k":
        circuit, report = build_phi_k(qp, Mode.BASE, sink)
        return Encoded("k", report, circuit=circuit)
    if encoding == "wf+gc":
        target = _gc_target(qp, use_gc)
        if target is not None:
            pc = build_phi_k_cnf(target, Mode.WF, clause_sink)
            assert pc.report is not None
            return Encoded("wf+gc", pc.report, cnf=pc)
    circuit, report = build_phi_wf(qp, sink)
    return Encoded("wf", report, circuit=circuit)


def _report_line(enc: Encoded, num_vars: int, num_clauses: int | None) -> str:
    r = enc.report
    parts = [f"encoding={enc.encoding}", f"vars={num_vars}"]
    if num_clauses is not None:
        parts.append(f"clauses={num_clauses}")
    parts.append(f"level_clauses={r.clauses}")
    parts.append(f"pruned_at={r.pruned_at if r.pruned_at is not None else '-'}")
    const = "-" if r.constant_result is None else ("TRUE" if r.constant_result else "FALSE")
    parts.append(f"constant={const}")
    if r.trivial:
        parts.append("trivial=" + ",".join(str(i) for i in sorted(r.trivial)))
    return " ".join(parts)


def _cnf_as_circuit(pc: PrenexCnf) -> QbfCircuit:
    cb = CircuitBuilder()
    n = pc.matrix.num_vars
    for k in range(n):
        cb.var(pc.matrix.names[k])
    clauses = [c[0] if len(c) == 1 else cb.or_(c) for c in pc.matrix.clauses]
    out = cb.and_(clauses)
    return QbfCircuit(pc.prefix, tuple(cb.gates), out, dict(cb.names))


def _compile_streaming(qp: QuantifiedProgram, args: argparse.Namespace, out: IO[str]) -> str:
    """Write the formula to ``out``; gates or clauses are spooled to disk level by level."""
    with tempfile.TemporaryFile("w+", encoding="utf-8") as spool:
        count = 0

        def gate_sink(g) -> None:
            spool.write(qcir_gate_line(g))

        def clause_sink(c: Clause) -> None:
            nonlocal count
            count += 1
            spool.write(qdimacs_clause_line(c))

        streaming_qcir = args.format == "qcir"
        enc = encode(
            qp,
            args.encoding,
            use_gc=not args.no_gc,
            sink=gate_sink if streaming_qcir else None,
            clause_sink=clause_sink if args.format == "qdimacs" else None,
        )
        if enc.circuit is not None and streaming_qcir:
            out.write(qcir_header(enc.circuit.prefix, enc.circuit.output))
            spool.seek(0)
            shutil.copyfileobj(spool, out)
            return _report_line(enc, enc.circuit.num_vars, None)
        if enc.cnf is not None and args.format == "qdimacs":
            prefix, matrix = enc.cnf
            out.write(qdimacs_header(prefix, matrix.num_vars, count))
            spool.seek(0)
            shutil.copyfileobj(spool, out)
            return _report_line(enc, matrix.num_vars, count)
    # the remaining combinations are converted in memory
    if enc.cnf is not None:
        if args.format == "qcir":
            out.write(emit_qcir(_cnf_as_circuit(enc.cnf)))
            return _report_line(enc, enc.cnf.matrix.num_vars, len(enc.cnf.matrix.clauses))
    assert enc.circuit is not None
    prefix, matrix = prenex_cnf(enc.circuit)
    out.write(emit_qdimacs(prefix, matrix))
    return _report_line(enc, matrix.num_vars, len(matrix.clauses))


def cmd_compile(args: argparse.Namespace) -> int:
    qp = _read_program(args.input)
    try:
        if args.output and args.output != "-":
            try:
                with open(args.output, "w", encoding="utf-8") as fh:
                    line = _compile_streaming(qp, args, fh)
            except OSError as exc:
                raise CliError(f"cannot write {args.output}: {exc}") from None
        else:
            line = _compile_streaming(qp, args, sys.stdout)
    except NonTightTooLarge as exc:
        raise CliError(str(exc)) from None
    print(line, file=sys.stderr)
    return 0


def _internal(enc: Encoded, bound: int) -> Result:
    if enc.report.constant_result is not None:
        return Result.SAT if enc.report.constant_result else Result.UNSAT
    formula = enc.circuit if enc.circuit is not None else tuple(enc.cnf)  # type: ignore[arg-type]
    try:
        return Result.SAT if eval_qbf(formula, bound) else Result.UNSAT
    except QbfTooLarge as exc:
        _warn(str(exc))
        return Result.UNKNOWN


def _external_formula(enc: Encoded):
    return enc.circuit if enc.circuit is not None else tuple(enc.cnf)  # type: ignore[arg-type]


def cmd_solve(args: argparse.Namespace) -> int:
    qp = _read_program(args.input)
    try:
        enc = encode(qp, args.encoding, use_gc=not args.no_gc)
    except NonTightTooLarge as exc:
        raise CliError(str(exc)) from None
    backend = args.backend
    try:
        specs = load_config(args.solvers)
    except (OSError, SolverConfigError) as exc:
        raise CliError(f"solver configuration: {exc}") from None
    by_name = {s.name: s for s in specs}
    if backend == "auto":
        try:
            choice = select_backend(extract_features(qp), load_table(args.table))
        except (OSError, SelectionError, ValueError) as exc:
            raise CliError(f"selection table: {exc}") from None
        if choice in by_name:
            backend = choice
        elif specs:
            _warn(f"selected back-end {choice!r} is not configured; running the portfolio")
            backend = "portfolio"
        else:
            _warn(f"selected back-end {choice!r} is not configured; using the internal evaluator")
            backend = "internal"
    if enc.report.constant_result is not None and backend != "internal":
        result = Result.SAT if enc.report.constant_result else Result.UNSAT
    elif backend == "internal":
        result = _internal(enc, args.bound)
    elif backend == "portfolio":
        if not specs:
            raise CliError("no solvers configured for the portfolio", EXIT_USAGE)
        result = run_portfolio(specs, _external_formula(enc)).result
    else:
        if backend not in by_name:
            raise CliError(f"unknown back-end {backend!r}", EXIT_USAGE)
        if enc.cnf is not None and by_name[backend].input_format.value == "qcir":
            enc = Encoded(enc.encoding, enc.report, circuit=_cnf_as_circuit(enc.cnf))
        outcome = run_external(by_name[backend], _external_formula(enc))
        if outcome.diagnostic:
            _warn(f"{backend}: {outcome.diagnostic}")
        result = outcome.result
    label = {Result.SAT: "COHERENT", Result.UNSAT: "INCOHERENT", Result.UNKNOWN: "UNKNOWN"}[result]
    print(label)
    return {Result.SAT: EXIT_COHERENT, Result.UNSAT: EXIT_INCOHERENT, Result.UNKNOWN: EXIT_UNKNOWN}[result]


def _check_one(path: str, bound: int) -> tuple[bool, list[str]]:
    qp = _read_program(path)
    lines = []
    try:
        expected = coherence_bruteforce(qp)
    except OracleLimitExceeded as exc:
        raise CliError(f"{path}: {exc}", EXIT_UNKNOWN) from None
    ok = True
    results = {}
    for name in ("base", "wf", "k"):
        results[name] = _internal(encode(qp, name), bound)
    target = _gc_target_quiet(qp)
    if target is not None:
        pc = build_phi_k_cnf(target, Mode.WF)
        results["wf+gc"] = _internal(Encoded("wf+gc", pc.report, cnf=pc), bound)  # type: ignore[arg-type]
    for name, result in results.items():
        good = result is (Result.SAT if expected else Result.UNSAT)
        ok = ok and good
        lines.append(f"{path}: {name}={result.value} oracle={'SAT' if expected else 'UNSAT'} {'ok' if good else 'MISMATCH'}")
    return ok, lines


def _gc_target_quiet(qp: QuantifiedProgram) -> QuantifiedProgram | None:
    try:
        return cnf_target(qp)
    except NotGC:
        return None


def _expand_inputs(paths: Sequence[str]) -> list[str]:
    out = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            out.extend(str(f) for f in sorted(path.glob("*.aspq")))
        else:
            out.append(p)
    return out


def cmd_check(args: argparse.Namespace) -> int:
    files = _expand_inputs(args.inputs)
    if not files:
        raise CliError("no .aspq files found")
    all_ok = True
    for f in files:
        ok, lines = _check_one(f, args.bound)
        all_ok = all_ok and ok
        for line in lines:
            print(line)
    print("all encodings agree with the oracle" if all_ok else "MISMATCH found")
    return 0 if all_ok else EXIT_MISMATCH


def cmd_wf(args: argparse.Namespace) -> int:
    qp = _read_program(args.input)
    for enc in iter_levels(qp, Mode.WF):
        label = "constraint" if enc.index == qp.n + 1 else enc.quantifier.value
        print(f"% level {enc.index} ({label})")
        print(f"% W = {enc.wf}")
        text = render_program(enc.program)
        if text:
            print(text, end="")
        if enc.incoherent:
            print(f"% level {enc.index} is incoherent")
    return 0


def cmd_features(args: argparse.Namespace) -> int:
    qp = _read_program(args.input)
    fv = extract_features(qp)
    if args.json:
        print(fv.to_json())
    else:
        for k, v in fv.as_dict().items():
            print(f"{k}={v}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quantasp", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def encoding_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--encoding", choices=ENCODINGS, default="wf")
        p.add_argument("--no-gc", action="store_true", help="never apply the Guess&Check rewriting")

    p = sub.add_parser("compile", help="write the QBF encoding of a program")
    p.add_argument("input")
    encoding_flags(p)
    p.add_argument("--format", choices=("qcir", "qdimacs"), default="qcir")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("solve", help="decide coherence")
    p.add_argument("input")
    encoding_flags(p)
    p.add_argument("--backend", default="internal", help="NAME, auto, portfolio or internal")
    p.add_argument("--solvers", help="solver configuration (JSON); $QUANTASP_SOLVERS takes precedence")
    p.add_argument("--table", help="selection table for --backend auto")
    p.add_argument("--bound", type=int, default=256, help="variable bound of the internal evaluator")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="compare every encoding with the brute-force oracle")
    p.add_argument("inputs", nargs="+", help="files or directories of .aspq files")
    p.add_argument("--bound", type=int, default=256)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("wf", help="well-founded models and residual programs per level")
    p.add_argument("input")
    p.set_defaults(func=cmd_wf)

    p = sub.add_parser("features", help="syntactic features")
    p.add_argument("input")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_features)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"quantasp: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
