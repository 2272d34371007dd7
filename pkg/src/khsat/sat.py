"""Propositional satisfiability for modality-free formulas.

Clausification introduces fresh definition symbols (namespaced ``_d<N>``)
for compound subformulas, keeping the clause set linear in the formula
size; DPLL with unit propagation and a most-frequent-literal branching
rule does the search.  Branching ties break on the fixed first-occurrence
variable order, so results are reproducible.  Returned assignments cover
exactly the propositions of the query (definition symbols are stripped)
and are re-checked by evaluation before being handed back.
"""
from __future__ import annotations

from .errors import ContractError, InternalSoundnessError
from . import syntax
from .syntax import And, Bot, Formula, Iff, Implies, Kh, Not, Or, Prop, Top

Assignment = dict[str, bool]


def eval_prop(f: Formula, assignment: Assignment) -> bool:
    """Truth-functional evaluation; every proposition of f must be assigned."""
    if isinstance(f, Prop):
        try:
            return assignment[f.name]
        except KeyError:
            raise ContractError(f"proposition {f.name!r} not assigned") from None
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Not):
        return not eval_prop(f.child, assignment)
    if isinstance(f, Or):
        return eval_prop(f.left, assignment) or eval_prop(f.right, assignment)
    if isinstance(f, And):
        return eval_prop(f.left, assignment) and eval_prop(f.right, assignment)
    if isinstance(f, Implies):
        return (not eval_prop(f.left, assignment)) or eval_prop(f.right, assignment)
    if isinstance(f, Iff):
        return eval_prop(f.left, assignment) == eval_prop(f.right, assignment)
    raise ContractError(f"modality in propositional context: {f}")


def _ordered_props(f: Formula) -> list[str]:
    """Propositions in first-occurrence order (fixes the variable order)."""
    seen: list[str] = []

    def walk(g: Formula):
        if isinstance(g, Prop):
            if g.name not in seen:
                seen.append(g.name)
        elif isinstance(g, (Not,)):
            walk(g.child)
        elif isinstance(g, (Or, And, Implies, Iff)):
            walk(g.left)
            walk(g.right)
        elif not isinstance(g, (Top, Bot)):
            raise ContractError(f"modality in propositional context: {g}")

    walk(f)
    return seen


def _simplify(f: Formula) -> Formula:
    """Fold true/false constants; result is constant-free or a constant."""
    if isinstance(f, Not):
        c = _simplify(f.child)
        if isinstance(c, Top):
            return syntax.BOT
        if isinstance(c, Bot):
            return syntax.TOP
        return Not(c)
    if isinstance(f, Or):
        l, r = _simplify(f.left), _simplify(f.right)
        if isinstance(l, Top) or isinstance(r, Top):
            return syntax.TOP
        if isinstance(l, Bot):
            return r
        if isinstance(r, Bot):
            return l
        return Or(l, r)
    if isinstance(f, And):
        l, r = _simplify(f.left), _simplify(f.right)
        if isinstance(l, Bot) or isinstance(r, Bot):
            return syntax.BOT
        if isinstance(l, Top):
            return r
        if isinstance(r, Top):
            return l
        return And(l, r)
    if isinstance(f, (Implies, Iff)):
        return _simplify(syntax.desugar(f))
    if isinstance(f, Kh):
        raise ContractError(f"modality in propositional context: {f}")
    return f


def _clausify(f: Formula, var_of: dict[str, int]) -> list[list[int]]:
    """Definitional CNF: one definition variable per compound subformula."""
    defs: dict[Formula, int] = {}
    clauses: list[list[int]] = []
    counter = [len(var_of)]

    def lit(g: Formula) -> int:
        if isinstance(g, Prop):
            return var_of[g.name]
        if isinstance(g, Not):
            return -lit(g.child)
        if g in defs:
            return defs[g]
        counter[0] += 1
        v = counter[0]
        defs[g] = v
        if isinstance(g, Or):
            a, b = lit(g.left), lit(g.right)
            clauses.append([-v, a, b])
            clauses.append([v, -a])
            clauses.append([v, -b])
        elif isinstance(g, And):
            a, b = lit(g.left), lit(g.right)
            clauses.append([-v, a])
            clauses.append([-v, b])
            clauses.append([v, -a, -b])
        else:  # pragma: no cover - _simplify leaves only Or/And/Not/Prop
            raise AssertionError(g)
        return v

    clauses.append([lit(f)])
    return clauses


def _dpll(clauses: list[list[int]]) -> dict[int, bool] | None:
    assign: dict[int, bool] = {}

    def value(l: int) -> bool | None:
        v = assign.get(abs(l))
        if v is None:
            return None
        return v if l > 0 else not v

    def solve(clauses: list[list[int]]) -> bool:
        # unit propagation
        trail: list[int] = []
        while True:
            unit = None
            live: list[list[int]] = []
            for cl in clauses:
                unassigned = []
                sat = False
                for l in cl:
                    v = value(l)
                    if v is True:
                        sat = True
                        break
                    if v is None:
                        unassigned.append(l)
                if sat:
                    continue
                if not unassigned:
                    for t in trail:
                        del assign[abs(t)]
                    return False
                if len(unassigned) == 1 and unit is None:
                    unit = unassigned[0]
                live.append(cl)
            if unit is None:
                clauses = live
                break
            assign[abs(unit)] = unit > 0
            trail.append(unit)
        if not clauses:
            return True
        # branch: most frequent literal, ties on variable order then polarity
        counts: dict[int, int] = {}
        for cl in clauses:
            for l in cl:
                if value(l) is None:
                    counts[l] = counts.get(l, 0) + 1
        branch = max(counts, key=lambda l: (counts[l], -abs(l), l > 0))
        for choice in (branch, -branch):
            assign[abs(choice)] = choice > 0
            if solve(clauses):
                return True
            del assign[abs(choice)]
        for t in trail:
            del assign[abs(t)]
        return False

    return assign if solve(clauses) else None


def prop_sat(f: Formula) -> Assignment | None:
    """A satisfying assignment over f's propositions, or None.

    The assignment is total for the query (propositions the search left
    unconstrained default to False) and is verified by re-evaluation.
    """
    names = _ordered_props(f)
    g = _simplify(f)
    if isinstance(g, Bot):
        return None
    if isinstance(g, Top):
        result: Assignment = {p: False for p in names}
    else:
        var_of = {p: i + 1 for i, p in enumerate(names)}
        model = _dpll(_clausify(g, var_of))
        if model is None:
            return None
        result = {p: model.get(var_of[p], False) for p in names}
    if not eval_prop(f, result):  # pragma: no cover - soundness guard
        raise InternalSoundnessError(f"assignment fails re-evaluation: {f}")
    return result


def dimacs(f: Formula) -> str:
    """DIMACS dump of the definitional CNF (debugging aid for external
    cross-checks); comments record the variable naming."""
    names = _ordered_props(f)
    g = _simplify(syntax.desugar(f))
    if isinstance(g, Top):
        return "p cnf 0 0\n"
    if isinstance(g, Bot):
        return "p cnf 1 2\n1 0\n-1 0\n"
    var_of = {p: i + 1 for i, p in enumerate(names)}
    clauses = _clausify(g, var_of)
    n_vars = max(abs(l) for cl in clauses for l in cl)
    lines = [f"c {v} = {p}" for p, v in var_of.items()]
    lines += [f"c {v} = _d{v}" for v in range(len(var_of) + 1, n_vars + 1)]
    lines.append(f"p cnf {n_vars} {len(clauses)}")
    lines += [" ".join(map(str, cl)) + " 0" for cl in clauses]
    return "\n".join(lines) + "\n"
