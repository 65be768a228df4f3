"""Exact QBF evaluation for small formulas.

The matrix is put in negation normal form and searched over the prefix.  At
every node the formula is simplified under the assignment so far; existential
units, universal reduction on top-level clauses and pure literals fix values
without branching.  Branching always takes a variable of the outermost block
that still occurs.
"""

from __future__ import annotations

import sys
from collections.abc import Iterable

from .circuit import Block, QbfCircuit, merge_blocks
from .cnf import CnfFormula
from .model import Quantifier

DEFAULT_EVAL_BOUND = 256


class QbfTooLarge(ValueError):
    pass


class _Node:
    __slots__ = ("conj", "kids")

    def __init__(self, conj: bool, kids: list) -> None:
        self.conj = conj  # True: AND, False: OR
        self.kids = kids


_MISSING = object()


def _from_circuit(circuit: QbfCircuit) -> object:
    table = circuit.gate_table()
    memo: dict[int, object] = {}

    def conv(lit: int) -> object:
        v = abs(lit)
        if v not in table:
            return lit
        if lit in memo:
            return memo[lit]
        g = table[v]
        conj = (g.kind == "and") == (lit > 0)
        kids = [conv(l if lit > 0 else -l) for l in g.inputs]
        node = _Node(conj, kids)
        memo[lit] = node
        return node

    depth = sys.getrecursionlimit()
    sys.setrecursionlimit(max(depth, 10 * len(table) + 1000))
    try:
        return conv(circuit.output)
    finally:
        sys.setrecursionlimit(depth)


def _from_cnf(clauses: Iterable[Iterable[int]]) -> object:
    return _Node(True, [_Node(False, list(c)) for c in clauses])


def _simplify(root: object, assign: dict[int, bool]) -> object:
    memo: dict[int, object] = {}

    def simp(x: object) -> object:
        if x is True or x is False:
            return x
        if type(x) is int:
            v = assign.get(abs(x))  # type: ignore[arg-type]
            if v is None:
                return x
            return v == (x > 0)  # type: ignore[operator]
        r = memo.get(id(x), _MISSING)
        if r is not _MISSING:
            return r
        node: _Node = x  # type: ignore[assignment]
        conj = node.conj
        lits: dict[int, None] = {}
        others: dict[int, _Node] = {}
        result: object = _MISSING

        def absorb(s: object) -> bool:
            """Add a simplified child; True when it decides the node."""
            if type(s) is int:
                if -s in lits:  # type: ignore[operator]
                    return True
                lits[s] = None  # type: ignore[index]
            else:
                others[id(s)] = s  # type: ignore[assignment]
            return False

        for k in node.kids:
            s = simp(k)
            if s is True or s is False:
                if s is conj:
                    continue
                result = s
                break
            if type(s) is not int and s.conj is conj:  # type: ignore[union-attr]
                if any(absorb(kk) for kk in s.kids):  # type: ignore[union-attr]
                    result = not conj
                    break
            elif absorb(s):
                result = not conj
                break
        if result is _MISSING:
            kids = sorted(lits, key=lambda l: (abs(l), l < 0)) + list(others.values())
            if not kids:
                result = conj
            elif len(kids) == 1:
                result = kids[0]
            else:
                result = _Node(conj, kids)
        memo[id(x)] = result
        return result

    return simp(root)


class _Search:
    def __init__(self, prefix: Iterable[Block], free: Iterable[int], late: frozenset[int] = frozenset()) -> None:
        # ``late`` variables are branched on after the rest of their block
        self.depth: dict[int, float] = {}
        self.exists: dict[int, bool] = {}
        for v in free:
            self.depth[v] = -1
            self.exists[v] = True
        for d, b in enumerate(prefix):
            for v in b.variables:
                self.depth[v] = d + 0.5 if v in late else d
                self.exists[v] = b.quantifier is Quantifier.EXISTS
        self.nodes = 0

    def occurrences(self, f: object) -> dict[int, list[int]]:
        """Per variable: [positive count, negative count] over the DAG."""
        occ: dict[int, list[int]] = {}
        seen: set[int] = set()
        stack = [f]
        while stack:
            x = stack.pop()
            if type(x) is int:
                c = occ.setdefault(abs(x), [0, 0])  # type: ignore[arg-type]
                c[0 if x > 0 else 1] += 1  # type: ignore[operator]
                continue
            if id(x) in seen:
                continue
            seen.add(id(x))
            stack.extend(x.kids)  # type: ignore[union-attr]
        return occ

    def forced(self, f: object, occ: dict[int, list[int]]) -> dict[int, bool] | bool:
        """Values implied without branching, or the value of the whole formula."""
        ex = self.exists
        if type(f) is int:
            return ex[abs(f)]  # type: ignore[arg-type]
        node: _Node = f  # type: ignore[assignment]
        out: dict[int, bool] = {}
        if not node.conj:
            for k in node.kids:
                if type(k) is int:
                    if ex[abs(k)]:
                        return True
                    out[abs(k)] = k < 0
            if out:
                return out
        else:
            for k in node.kids:
                if type(k) is int:
                    if not ex[abs(k)]:
                        return False
                    out[abs(k)] = k > 0
                elif not k.conj and all(type(l) is int for l in k.kids):
                    unit = self.clause_unit(k.kids)
                    if unit is False:
                        return False
                    if unit is not None:
                        out[abs(unit)] = unit > 0
            if out:
                return out
        for v, (pos, neg) in occ.items():
            if pos and neg:
                continue
            out[v] = bool(pos) == ex[v]
        return out

    def clause_unit(self, lits: list[int]) -> int | None | bool:
        ex, depth = self.exists, self.depth
        e_lits = [l for l in lits if ex[abs(l)]]
        if not e_lits:
            return False
        if len(e_lits) > 1:
            return None
        inner = depth[abs(e_lits[0])]
        if any(depth[abs(l)] < inner for l in lits if not ex[abs(l)]):
            return None
        return e_lits[0]

    def solve(self, f: object) -> bool:
        self.nodes += 1
        while True:
            if f is True or f is False:
                return f  # type: ignore[return-value]
            occ = self.occurrences(f)
            forced = self.forced(f, occ)
            if forced is True or forced is False:
                return forced  # type: ignore[return-value]
            if not forced:
                break
            f = _simplify(f, forced)  # type: ignore[arg-type]
        var = min(occ, key=lambda v: (self.depth[v], -sum(occ[v]), v))
        first = occ[var][0] >= occ[var][1]
        if not self.exists[var]:
            first = not first
        for value in (first, not first):
            r = self.solve(_simplify(f, {var: value}))
            if r is self.exists[var]:
                return r
        return not self.exists[var]


def _collect_vars(f: object) -> set[int]:
    out: set[int] = set()
    seen: set[int] = set()
    stack = [f]
    while stack:
        x = stack.pop()
        if type(x) is int:
            out.add(abs(x))  # type: ignore[arg-type]
        elif isinstance(x, _Node) and id(x) not in seen:
            seen.add(id(x))
            stack.extend(x.kids)
    return out


def _evaluate(prefix: Iterable[Block], matrix: object, bound: int, late: frozenset[int] = frozenset()) -> bool:
    prefix = merge_blocks(prefix)
    quantified = {v for b in prefix for v in b.variables}
    free = _collect_vars(matrix) - quantified
    total = len(quantified) + len(free)
    if total > bound:
        raise QbfTooLarge(f"{total} variables exceed the evaluation bound {bound}")
    search = _Search(prefix, sorted(free), late)
    depth = sys.getrecursionlimit()
    sys.setrecursionlimit(max(depth, 4 * total + 1000))
    try:
        return search.solve(_simplify(matrix, {}))
    finally:
        sys.setrecursionlimit(depth)


def eval_qbf(formula: object, bound: int = DEFAULT_EVAL_BOUND) -> bool:
    """Truth value of a :class:`QbfCircuit` or a ``(prefix, CnfFormula)`` pair.

    Variables of the matrix missing from the prefix are treated as outermost
    existential. Auxiliary variables of a CnfFormula are branched on last
    within their block, since they are usually fixed by propagation.
    """
    if isinstance(formula, QbfCircuit):
        return _evaluate(formula.prefix, _from_circuit(formula), bound)
    prefix, matrix = formula  # type: ignore[misc]
    if isinstance(matrix, CnfFormula):
        return _evaluate(prefix, _from_cnf(matrix.clauses), bound, matrix.aux)
    return _evaluate(prefix, _from_cnf(matrix), bound)
