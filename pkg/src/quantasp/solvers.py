"""External QBF solver processes: configuration, single runs and portfolios."""

from __future__ import annotations

import enum
import json
import os
import shlex
import subprocess
import tempfile
import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .circuit import QbfCircuit
from .qbf import emit_qcir, emit_qdimacs, prenex_cnf

ENV_CONFIG = "QUANTASP_SOLVERS"
DEFAULT_TIMEOUT = 800.0


class Result(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


class InputFormat(enum.Enum):
    QCIR = "qcir"
    QDIMACS = "qdimacs"


class SolverConfigError(ValueError):
    pass


class PortfolioDisagreement(RuntimeError):
    """Two solvers returned opposite conclusive answers."""


@dataclass(frozen=True)
class SolverSpec:
    name: str
    command: str
    input_format: InputFormat = InputFormat.QDIMACS
    sat_exitcodes: frozenset[int] = frozenset({10})
    unsat_exitcodes: frozenset[int] = frozenset({20})
    timeout: float = DEFAULT_TIMEOUT

    def __post_init__(self) -> None:
        if self.command.count("{input}") != 1:
            raise SolverConfigError(f"{self.name}: command must contain {{input}} exactly once")
        object.__setattr__(self, "sat_exitcodes", frozenset(self.sat_exitcodes))
        object.__setattr__(self, "unsat_exitcodes", frozenset(self.unsat_exitcodes))
        if self.sat_exitcodes & self.unsat_exitcodes:
            raise SolverConfigError(f"{self.name}: sat and unsat exit codes overlap")
        if self.timeout <= 0:
            raise SolverConfigError(f"{self.name}: timeout must be positive")

    def argv(self, path: str) -> list[str]:
        return [part.replace("{input}", path) for part in shlex.split(self.command)]

    def classify(self, code: int) -> Result:
        if code in self.sat_exitcodes:
            return Result.SAT
        if code in self.unsat_exitcodes:
            return Result.UNSAT
        return Result.UNKNOWN


@dataclass(frozen=True)
class SolveOutcome:
    result: Result
    backend: str
    wall_time: float
    diagnostic: str = field(default="", compare=False)


def spec_from_dict(entry: dict) -> SolverSpec:
    try:
        return SolverSpec(
            name=str(entry["name"]),
            command=str(entry["command"]),
            input_format=InputFormat(entry.get("format", "qdimacs")),
            sat_exitcodes=frozenset(int(c) for c in entry.get("sat_exit", [10])),
            unsat_exitcodes=frozenset(int(c) for c in entry.get("unsat_exit", [20])),
            timeout=float(entry.get("timeout_s", DEFAULT_TIMEOUT)),
        )
    except KeyError as exc:
        raise SolverConfigError(f"solver entry lacks {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        raise SolverConfigError(str(exc)) from None


def load_config(path: str | os.PathLike | None = None) -> list[SolverSpec]:
    """Solver specs from JSON; ``$QUANTASP_SOLVERS`` overrides ``path``."""
    env = os.environ.get(ENV_CONFIG)
    if env:
        path = env
    if path is None:
        return []
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SolverConfigError(f"{path}: {exc}") from None
    if not isinstance(data, dict) or not isinstance(data.get("solvers"), list):
        raise SolverConfigError(f'{path}: expected {{"solvers": [...]}}')
    specs = [spec_from_dict(e) for e in data["solvers"]]
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise SolverConfigError(f"{path}: duplicate solver names")
    return specs


def formula_text(circuit: QbfCircuit | tuple, fmt: InputFormat) -> str:
    """Render a circuit or a ``(prefix, CnfFormula)`` pair in ``fmt``."""
    if isinstance(circuit, QbfCircuit):
        if fmt is InputFormat.QCIR:
            return emit_qcir(circuit)
        return emit_qdimacs(*prenex_cnf(circuit))
    if fmt is InputFormat.QCIR:
        raise SolverConfigError("a prenex CNF can only be given to QDIMACS solvers")
    prefix, matrix = circuit
    return emit_qdimacs(prefix, matrix)


def _write_input(spec: SolverSpec, circuit: QbfCircuit | tuple, tmpdir: str) -> str:
    suffix = ".qcir" if spec.input_format is InputFormat.QCIR else ".qdimacs"
    path = os.path.join(tmpdir, f"{spec.name}{suffix}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(formula_text(circuit, spec.input_format))
    return path


def _spawn(spec: SolverSpec, path: str, capture: bool = False) -> subprocess.Popen:
    return subprocess.Popen(
        spec.argv(path),
        stdout=subprocess.DEVNULL,
        stderr=subprocess.PIPE if capture else subprocess.DEVNULL,
        start_new_session=True,
    )


def _kill(proc: subprocess.Popen) -> None:
    if proc.poll() is None:
        try:
            os.killpg(proc.pid, 9)
        except (ProcessLookupError, PermissionError):
            proc.kill()
    proc.wait()


def run_external(spec: SolverSpec, circuit: QbfCircuit | tuple) -> SolveOutcome:
    start = time.monotonic()
    with tempfile.TemporaryDirectory(prefix="quantasp-") as tmpdir:
        path = _write_input(spec, circuit, tmpdir)
        try:
            proc = _spawn(spec, path, capture=True)
        except OSError as exc:
            return SolveOutcome(Result.UNKNOWN, spec.name, time.monotonic() - start, f"spawn failed: {exc}")
        try:
            _, err = proc.communicate(timeout=spec.timeout)
        except subprocess.TimeoutExpired:
            _kill(proc)
            return SolveOutcome(Result.UNKNOWN, spec.name, time.monotonic() - start, "timeout")
    result = spec.classify(proc.returncode)
    diagnostic = ""
    if result is Result.UNKNOWN:
        detail = err.decode(errors="replace").strip()[:200]
        diagnostic = f"unmapped exit code {proc.returncode}: {detail}"
    return SolveOutcome(result, spec.name, time.monotonic() - start, diagnostic)


def run_portfolio(specs: Sequence[SolverSpec], circuit: QbfCircuit | tuple, poll: float = 0.01) -> SolveOutcome:
    """Run all solvers at once; the first conclusive answer wins, the rest are killed.

    Answers that arrive in the same polling round must agree, otherwise
    :class:`PortfolioDisagreement` is raised.
    """
    if not specs:
        raise SolverConfigError("empty portfolio")
    start = time.monotonic()
    with tempfile.TemporaryDirectory(prefix="quantasp-") as tmpdir:
        running: dict[str, tuple[SolverSpec, subprocess.Popen, float]] = {}
        notes = []
        for spec in specs:
            path = _write_input(spec, circuit, tmpdir)
            try:
                running[spec.name] = (spec, _spawn(spec, path), time.monotonic())
            except OSError as exc:
                notes.append(f"{spec.name}: spawn failed: {exc}")
        try:
            while running:
                finished = []
                for name, (spec, proc, t0) in list(running.items()):
                    code = proc.poll()
                    if code is None:
                        if time.monotonic() - t0 > spec.timeout:
                            _kill(proc)
                            notes.append(f"{name}: timeout")
                            del running[name]
                        continue
                    del running[name]
                    result = spec.classify(code)
                    if result is Result.UNKNOWN:
                        notes.append(f"{name}: unmapped exit code {code}")
                    else:
                        finished.append(SolveOutcome(result, name, time.monotonic() - start))
                if finished:
                    if len({o.result for o in finished}) > 1:
                        raise PortfolioDisagreement(
                            ", ".join(f"{o.backend}={o.result.value}" for o in finished)
                        )
                    return finished[0]
                time.sleep(poll)
        finally:
            for _, proc, _ in running.values():
                _kill(proc)
    return SolveOutcome(Result.UNKNOWN, "portfolio", time.monotonic() - start, "; ".join(notes))
