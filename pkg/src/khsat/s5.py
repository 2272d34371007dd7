"""Satisfiability for flat conjunctions of global-modality atoms.

A conjunction of A- and E-atoms with propositional bodies is satisfiable
iff each E body is propositionally consistent with all A bodies taken
together (and the A bodies alone are consistent when there is no E atom).
The witnessing model carries one state per E atom, so it never has more
than #E + 1 states — the bound the solver's extracted models inherit.
Every constructed model is re-audited with :func:`eval_global` before
being returned.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import sat
from .errors import ContractError, InternalSoundnessError
from .lts import LtsModel
from .syntax import Formula, conj, is_kh_free, props, to_text


@dataclass(frozen=True)
class GlobalAtom:
    """An "everywhere" (A) or "somewhere" (E) constraint on a
    propositional body."""
    kind: str  # "A" or "E"
    body: Formula

    def __post_init__(self):
        if self.kind not in ("A", "E"):
            raise ContractError(f"kind must be 'A' or 'E', got {self.kind!r}")
        if not is_kh_free(self.body):
            raise ContractError(f"modality inside a global atom body: {self.body}")

    def __str__(self) -> str:
        return f"{self.kind} ({to_text(self.body)})"


class S5Model:
    """States plus valuation, no relations."""

    __slots__ = ("states", "valuation", "_assignments")

    def __init__(self, states: Sequence[str], valuation: dict[str, Iterable[str]]):
        self.states = tuple(states)
        if not self.states:
            raise ContractError("model needs a non-empty state set")
        self.valuation = {p: frozenset(v) for p, v in valuation.items()}
        for p, v in self.valuation.items():
            if not v <= set(self.states):
                raise ContractError(f"valuation of {p!r} mentions unknown states")
        self._assignments = {
            s: {p: s in v for p, v in self.valuation.items()} for s in self.states
        }

    def holds_at(self, state: str, body: Formula) -> bool:
        base = self._assignments[state]
        a = {p: base.get(p, False) for p in props(body)}
        return sat.eval_prop(body, a)

    def extent(self, body: Formula) -> frozenset[str]:
        return frozenset(s for s in self.states if self.holds_at(s, body))

    def to_lts(self) -> LtsModel:
        """The same states and valuation as an LTS with no relations."""
        return LtsModel(self.states, {}, self.valuation)

    def to_dict(self) -> dict:
        return self.to_lts().to_dict()


def eval_global(m: S5Model, atom: GlobalAtom) -> bool:
    """A: the body holds at every state; E: at some state."""
    if atom.kind == "A":
        return all(m.holds_at(s, atom.body) for s in m.states)
    return any(m.holds_at(s, atom.body) for s in m.states)


def s5_sat(atoms: Iterable[GlobalAtom]) -> S5Model | None:
    """A model of the conjunction of `atoms`, or None if unsatisfiable.

    Decided by per-E propositional checks against the conjoined A bodies;
    the constructed model is verified with eval_global as an internal
    audit.  States are named w1, w2, ... in E-atom order.
    """
    seen: list[GlobalAtom] = []
    for atom in atoms:
        if atom not in seen:
            seen.append(atom)
    a_bodies = [atom.body for atom in seen if atom.kind == "A"]
    e_bodies = [atom.body for atom in seen if atom.kind == "E"]
    alpha = conj(a_bodies)

    assignments: list[sat.Assignment] = []
    if e_bodies:
        for body in e_bodies:
            found = sat.prop_sat(conj([body, *a_bodies]))
            if found is None:
                return None
            assignments.append(found)
    else:
        found = sat.prop_sat(alpha)
        if found is None:
            return None
        assignments.append(found)

    states = [f"w{i + 1}" for i in range(len(assignments))]
    mentioned = sorted({p for a in assignments for p in a})
    valuation = {p: frozenset(s for s, a in zip(states, assignments) if a.get(p, False))
                 for p in mentioned}
    model = S5Model(states, valuation)
    for atom in seen:  # pragma: no branch - audit loop
        if not eval_global(model, atom):  # pragma: no cover - soundness guard
            raise InternalSoundnessError(f"constructed model violates {atom}")
    return model
