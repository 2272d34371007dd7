"""Labelled transition systems, plans, and the exact Kh model checker.

States are strings at the API boundary and dense bit positions internally;
truth sets cross the boundary as frozensets of state names.  Actions used
in a plan but absent from the relation map denote the empty relation.

``check_kh`` searches the subset space: from the set of precondition
states it follows an action only when every current state can take it
(the running-union condition, equivalent to per-start strong
executability because images distribute over unions), accepting any
reached subset of the postcondition states.  It therefore always
terminates within 2^|S| nodes and returns a shortest witness, breaking
length ties by lexicographic action order.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .syntax import And, A, Bot, E, Formula, Iff, Implies, Kh, Not, Or, Prop, Top


class ModelFormatError(ValueError):
    """Malformed model description (schema violation)."""


@dataclass(frozen=True)
class Plan:
    """A finite, possibly empty sequence of action symbols."""
    actions: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.actions)

    def __iter__(self):
        return iter(self.actions)

    def at(self, i: int) -> str:
        """1-based access: at(1) is the first action."""
        if not 1 <= i <= len(self.actions):
            raise IndexError(f"plan index {i} out of range 1..{len(self.actions)}")
        return self.actions[i - 1]

    def slice(self, i: int, j: int) -> "Plan":
        """1-based inclusive slice; slice(1, 0) is the empty plan."""
        if i < 1 or j > len(self.actions) or j < i - 1:
            raise IndexError(f"plan slice [{i}:{j}] out of range")
        return Plan(self.actions[i - 1:j])

    def __add__(self, other: "Plan") -> "Plan":
        return Plan(self.actions + other.actions)

    def __str__(self) -> str:
        return " ".join(self.actions) if self.actions else "ε"


EMPTY_PLAN = Plan(())


class LtsModel:
    """Finite LTS: states, one binary relation per action, a valuation.

    Immutable after construction; the internal bitset tables make plan
    images and executability checks cheap."""

    __slots__ = ("states", "relations", "valuation",
                 "_index", "_rows", "_has", "_val", "_full")

    def __init__(self,
                 states: Iterable[str],
                 relations: dict[str, Iterable[tuple[str, str]]],
                 valuation: dict[str, Iterable[str]]):
        states = tuple(states)
        if not states:
            raise ModelFormatError("model needs a non-empty state set")
        if len(set(states)) != len(states):
            raise ModelFormatError("duplicate state names")
        index = {s: i for i, s in enumerate(states)}
        rel_out: dict[str, frozenset[tuple[str, str]]] = {}
        rows: dict[str, tuple[int, ...]] = {}
        has: dict[str, int] = {}
        for act, pairs in relations.items():
            pairs = frozenset((str(a), str(b)) for a, b in pairs)
            row = [0] * len(states)
            for src, dst in pairs:
                if src not in index or dst not in index:
                    raise ModelFormatError(
                        f"relation {act!r} mentions undeclared state "
                        f"{src if src not in index else dst!r}")
                row[index[src]] |= 1 << index[dst]
            rel_out[act] = pairs
            rows[act] = tuple(row)
            has[act] = sum(1 << i for i, r in enumerate(row) if r)
        val_out: dict[str, frozenset[str]] = {}
        val_masks: dict[str, int] = {}
        for p, members in valuation.items():
            members = frozenset(str(s) for s in members)
            bad = members - set(states)
            if bad:
                raise ModelFormatError(f"valuation of {p!r} mentions undeclared "
                                       f"state {sorted(bad)[0]!r}")
            val_out[p] = members
            val_masks[p] = sum(1 << index[s] for s in members)
        self.states = states
        self.relations = rel_out
        self.valuation = val_out
        self._index = index
        self._rows = rows
        self._has = has
        self._val = val_masks
        self._full = (1 << len(states)) - 1

    # -- bitset/state-name conversions -------------------------------------

    def mask_of(self, names: Iterable[str]) -> int:
        m = 0
        for s in names:
            try:
                m |= 1 << self._index[s]
            except KeyError:
                raise ModelFormatError(f"unknown state {s!r}") from None
        return m

    def set_of(self, mask: int) -> frozenset[str]:
        return frozenset(s for s, i in self._index.items() if mask >> i & 1)

    @property
    def full_mask(self) -> int:
        return self._full

    def image_mask(self, action: str, mask: int) -> int:
        rows = self._rows.get(action)
        if rows is None:
            return 0
        out = 0
        i = 0
        while mask >> i:
            if mask >> i & 1:
                out |= rows[i]
            i += 1
        return out

    def can_all_take(self, action: str, mask: int) -> bool:
        """Every state in mask has at least one `action` successor."""
        return mask & ~self._has.get(action, 0) == 0

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "states": list(self.states),
            "relations": {a: sorted([s, t] for s, t in pairs)
                          for a, pairs in sorted(self.relations.items())},
            "valuation": {p: sorted(v, key=self.states.index)
                          for p, v in sorted(self.valuation.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "LtsModel":
        if not isinstance(data, dict):
            raise ModelFormatError("model document must be a JSON object")
        extra = set(data) - {"states", "relations", "valuation"}
        if extra:
            raise ModelFormatError(f"unknown key {sorted(extra)[0]!r} in model")
        missing = {"states", "relations", "valuation"} - set(data)
        if missing:
            raise ModelFormatError(f"missing key {sorted(missing)[0]!r} in model")
        if not isinstance(data["states"], list):
            raise ModelFormatError("'states' must be a list of names")
        if not isinstance(data["relations"], dict):
            raise ModelFormatError("'relations' must be an object")
        if not isinstance(data["valuation"], dict):
            raise ModelFormatError("'valuation' must be an object")
        rels = {}
        for act, pairs in data["relations"].items():
            if not isinstance(pairs, list) or any(
                    not isinstance(p, list) or len(p) != 2 for p in pairs):
                raise ModelFormatError(f"relation {act!r} must be a list of "
                                       "[src, dst] pairs")
            rels[act] = [(p[0], p[1]) for p in pairs]
        return cls(data["states"], rels, data["valuation"])

    @classmethod
    def from_json(cls, text: str) -> "LtsModel":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dot(self) -> str:
        """Graphviz rendering: nodes carry their true propositions."""
        lines = ["digraph lts {", "  rankdir=LR;"]
        for s in self.states:
            trues = sorted(p for p, v in self.valuation.items() if s in v)
            label = s + ("\\n" + ",".join(trues) if trues else "")
            lines.append(f'  "{s}" [label="{label}"];')
        for act in sorted(self.relations):
            for src, dst in sorted(self.relations[act]):
                lines.append(f'  "{src}" -> "{dst}" [label="{act}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Plan semantics


def apply_plan(m: LtsModel, plan: Plan, from_states: Iterable[str]) -> frozenset[str]:
    """The image of `from_states` under the plan's composed relation."""
    mask = m.mask_of(from_states)
    for act in plan:
        mask = m.image_mask(act, mask)
    return m.set_of(mask)


def strongly_executable(m: LtsModel, plan: Plan) -> frozenset[str]:
    """States from which every partial execution of the plan can always
    take the next action.  The empty plan is executable everywhere."""
    out = []
    for s in m.states:
        cur = m.mask_of([s])
        ok = True
        for act in plan:
            if not m.can_all_take(act, cur):
                ok = False
                break
            cur = m.image_mask(act, cur)
        if ok:
            out.append(s)
    return frozenset(out)


def check_kh(m: LtsModel,
             pre: Iterable[str],
             post: Iterable[str],
             max_len: int | None = None) -> Plan | None:
    """A shortest witness plan for (pre, post), or None if there is none.

    Breadth-first search over subsets of states starting at the full
    precondition set; exact unless `max_len` bounds the search, in which
    case a None merely means no witness of that length exists.
    """
    pre_mask = m.mask_of(pre)
    post_mask = m.mask_of(post)
    if pre_mask & ~post_mask == 0:
        return EMPTY_PLAN
    actions = sorted(m.relations)
    visited = {pre_mask}
    queue: deque[tuple[int, tuple[str, ...]]] = deque([(pre_mask, ())])
    while queue:
        mask, path = queue.popleft()
        if max_len is not None and len(path) >= max_len:
            continue
        for act in actions:
            if not m.can_all_take(act, mask):
                continue
            nxt = m.image_mask(act, mask)
            if nxt & ~post_mask == 0:
                return Plan(path + (act,))
            if nxt not in visited:
                visited.add(nxt)
                queue.append((nxt, path + (act,)))
    return None


def model_check(m: LtsModel, f: Formula, max_len: int | None = None) -> frozenset[str]:
    """The truth set of f in m.

    Handles the full surface syntax; Kh/A/E subformulas evaluate to the
    whole state set or the empty set and fold like constants, which is
    sound because their truth is global.
    """
    return m.set_of(_truth(m, f, max_len))


def _truth(m: LtsModel, f: Formula, max_len: int | None) -> int:
    if isinstance(f, Prop):
        return m._val.get(f.name, 0)
    if isinstance(f, Top):
        return m.full_mask
    if isinstance(f, Bot):
        return 0
    if isinstance(f, Not):
        return m.full_mask & ~_truth(m, f.child, max_len)
    if isinstance(f, Or):
        return _truth(m, f.left, max_len) | _truth(m, f.right, max_len)
    if isinstance(f, And):
        return _truth(m, f.left, max_len) & _truth(m, f.right, max_len)
    if isinstance(f, Implies):
        return (m.full_mask & ~_truth(m, f.left, max_len)) | _truth(m, f.right, max_len)
    if isinstance(f, Iff):
        l, r = _truth(m, f.left, max_len), _truth(m, f.right, max_len)
        return m.full_mask & ~(l ^ r)
    if isinstance(f, Kh):
        pre = m.set_of(_truth(m, f.pre, max_len))
        post = m.set_of(_truth(m, f.post, max_len))
        return m.full_mask if check_kh(m, pre, post, max_len) is not None else 0
    if isinstance(f, A):
        return m.full_mask if _truth(m, f.child, max_len) == m.full_mask else 0
    if isinstance(f, E):
        return m.full_mask if _truth(m, f.child, max_len) != 0 else 0
    raise TypeError(f"not a formula: {f!r}")


def witnesses_ok(m: LtsModel, pre: Iterable[str], post: Iterable[str], plan: Plan) -> bool:
    """Check the two witness inclusions for a concrete plan."""
    pre = frozenset(pre)
    return (pre <= strongly_executable(m, plan)
            and apply_plan(m, plan, pre) <= frozenset(post))
