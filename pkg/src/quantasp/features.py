"""Syntactic instance features and static back-end selection."""

from __future__ import annotations

import ast
import json
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass
from importlib import resources

from .model import FreshAtoms, QuantifiedProgram, Quantifier, desugar, herbrand_base

FEATURE_NAMES = (
    "R", "A", "R_A", "R_A_2", "R_A_3", "A_R", "A_R_2", "A_R_3",
    "R1", "R2", "R3", "PR", "F", "DF", "NR", "NC", "VF", "VE", "QF", "QE", "QL",
)  # fmt: skip


@dataclass(frozen=True)
class FeatureVector:
    R: int
    A: int
    R_A: float
    R_A_2: float
    R_A_3: float
    A_R: float
    A_R_2: float
    A_R_3: float
    R1: int
    R2: int
    R3: int
    PR: int
    F: int
    DF: int
    NR: int
    NC: int
    VF: int
    VE: int
    QF: int
    QE: int
    QL: int

    def as_dict(self) -> dict[str, float]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def extract_features(qp: QuantifiedProgram) -> FeatureVector:
    """Counts over the desugared levels and C; VF and VE use the level bases as written."""
    fresh = FreshAtoms(qp.symbols, {a.name for p in qp.programs() for a in herbrand_base(p)})
    rules = []
    native_constraints = 0
    for p in qp.programs():
        native_constraints += sum(1 for r in p.rules if r.is_constraint)
        rules.extend(desugar(p, fresh).rules)
    atoms = {a for r in rules for a in r.atoms()}
    r_count, a_count = len(rules), len(atoms)
    body_len = [len(r.body) for r in rules]
    vf: set = set()
    ve: set = set()
    for lv in qp.levels:
        (vf if lv.quantifier is Quantifier.FORALL else ve).update(herbrand_base(lv.program))
    qf = sum(1 for lv in qp.levels if lv.quantifier is Quantifier.FORALL)
    qe = qp.n - qf
    ra, ar = _ratio(r_count, a_count), _ratio(a_count, r_count)
    return FeatureVector(
        R=r_count,
        A=a_count,
        R_A=ra,
        R_A_2=ra**2,
        R_A_3=ra**3,
        A_R=ar,
        A_R_2=ar**2,
        A_R_3=ar**3,
        R1=body_len.count(1),
        R2=body_len.count(2),
        R3=body_len.count(3),
        PR=sum(1 for r in rules if not r.negative_body()),
        F=sum(1 for r in rules if r.is_fact),
        DF=0,
        NR=r_count - native_constraints,
        NC=native_constraints,
        VF=len(vf),
        VE=len(ve),
        QF=qf,
        QE=qe,
        QL=qf + qe,
    )


class SelectionError(ValueError):
    pass


_ALLOWED = (
    ast.Expression, ast.BoolOp, ast.And, ast.Or, ast.UnaryOp, ast.Not, ast.USub, ast.UAdd,
    ast.BinOp, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.Compare, ast.Eq, ast.NotEq,
    ast.Lt, ast.LtE, ast.Gt, ast.GtE, ast.Name, ast.Load, ast.Constant,
)  # fmt: skip


def compile_predicate(text: str) -> ast.Expression:
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise SelectionError(f"bad predicate {text!r}: {exc.msg}") from None
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED):
            raise SelectionError(f"predicate {text!r} uses unsupported {type(node).__name__}")
        if isinstance(node, ast.Name) and node.id not in FEATURE_NAMES:
            raise SelectionError(f"predicate {text!r} names unknown feature {node.id!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise SelectionError(f"predicate {text!r} has a non-numeric constant")
    return tree


def evaluate_predicate(text: str, features: Mapping[str, float]) -> bool:
    code = compile(compile_predicate(text), "<predicate>", "eval")
    return bool(eval(code, {"__builtins__": {}}, dict(features)))


def validate_table(table: Sequence[Mapping]) -> None:
    if not table:
        raise SelectionError("empty selection table")
    for row in table:
        if "default" in row:
            continue
        if "when" not in row or "use" not in row:
            raise SelectionError(f"row {dict(row)} needs 'when' and 'use', or 'default'")
        compile_predicate(str(row["when"]))


def select_backend(features: FeatureVector | Mapping[str, float], table: Sequence[Mapping]) -> str:
    """First row whose predicate holds; the first ``default`` row otherwise."""
    validate_table(table)
    values = features.as_dict() if isinstance(features, FeatureVector) else dict(features)
    default = None
    for row in table:
        if "default" in row:
            if default is None:
                default = str(row["default"])
            continue
        if evaluate_predicate(str(row["when"]), values):
            return str(row["use"])
    if default is None:
        raise SelectionError("no row matched and the table has no default")
    return default


def load_table(path: str | None = None) -> list[dict]:
    if path is None:
        text = resources.files("quantasp").joinpath("data/selection.json").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    data = json.loads(text)
    rows = data["rules"] if isinstance(data, dict) else data
    validate_table(rows)
    return rows
