"""Bounded brute-force satisfiability oracle and differential fuzzer.

The oracle answers "does any model within the bounds satisfy f?" by
exhaustive enumeration and is completely independent of the translation
pipeline, which makes it the ground truth for differential tests.  A
"not found" answer refutes satisfiability only within the bounds.

Two implementations share the semantics:

* ``enumerate_models`` + ``oracle_sat(fast=False)`` — the literal
  reference: every relation assignment and every valuation, smallest
  state counts first.
* ``oracle_sat`` (default) — an exact accelerated sweep.  A model's
  verdict depends on the valuation and on which (precondition set,
  postcondition set) pairs admit a witness plan; that witness table is
  computed for every relation structure at once (vectorized subset
  reachability + transitive closure), structures with identical tables
  are collapsed, and formulas are evaluated over the surviving table ×
  valuation grid.  Any model the fast path reports is re-checked with
  the exact model checker before being returned.

Enumerated action alphabets are fixed per arity: a model with fewer
useful actions is covered by one with empty extra relations.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import solver as solver_mod
from .errors import BudgetExceededError, InternalSoundnessError
from .lts import LtsModel, model_check
from .syntax import (And, Bot, Formula, Kh, Not, Or, Prop, Top, TOP, BOT,
                     conj, desugar, props, to_text)

_ACTIONS = "abcdefghij"


@dataclass(frozen=True)
class OracleBounds:
    """Search space: up to max_states states, a fixed action alphabet of
    max_actions symbols, and an explicit proposition list."""
    max_states: int
    max_actions: int
    propositions: tuple[str, ...]

    def __post_init__(self):
        if self.max_states < 1:
            raise ValueError("max_states must be at least 1")
        if not 0 <= self.max_actions <= len(_ACTIONS):
            raise ValueError(f"max_actions must be in 0..{len(_ACTIONS)}")
        object.__setattr__(self, "propositions", tuple(self.propositions))


# ---------------------------------------------------------------------------
# Raw reference enumeration


def enumerate_models(bounds: OracleBounds) -> Iterator[LtsModel]:
    """Every model within the bounds: by state count, then relation
    bitmaps, then valuation bitmaps (all lexicographic)."""
    prop_list = sorted(bounds.propositions)
    actions = list(_ACTIONS[: bounds.max_actions])
    for n in range(1, bounds.max_states + 1):
        states = [f"s{i}" for i in range(n)]
        bpa = n * n
        for rel_code in range(1 << (bpa * len(actions))):
            relations = {}
            for k, act in enumerate(actions):
                rel = (rel_code >> (bpa * k)) & ((1 << bpa) - 1)
                relations[act] = [(states[i], states[j])
                                  for i in range(n) for j in range(n)
                                  if rel >> (i * n + j) & 1]
            for val_code in range(1 << (n * len(prop_list))):
                valuation = {}
                for pi, p in enumerate(prop_list):
                    ext = (val_code >> (pi * n)) & ((1 << n) - 1)
                    valuation[p] = [states[i] for i in range(n) if ext >> i & 1]
                yield LtsModel(states, relations, valuation)


def count_models(bounds: OracleBounds) -> int:
    """Closed-form size of the raw enumeration."""
    total = 0
    for n in range(1, bounds.max_states + 1):
        total += (1 << (n * n * bounds.max_actions)) * (1 << (n * len(bounds.propositions)))
    return total


# ---------------------------------------------------------------------------
# Fast exact sweep

_SIG_CACHE: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}


def _down_masks(n: int) -> np.ndarray:
    """down[post] = bitmask over subset indices V with V ⊆ post."""
    size = 1 << n
    down = np.zeros(size, dtype=np.uint32)
    for post in range(size):
        m = 0
        for v in range(size):
            if v & ~post == 0:
                m |= 1 << v
        down[post] = m
    return down


def _signatures(n: int, n_actions: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct witness tables for all relation structures on n states.

    Returns (tables, codes): tables[t, pre, post] says whether some plan
    is strongly executable on all of `pre` with image inside `post`;
    codes[t] is the smallest relation bitmap realizing table t.  Order is
    first occurrence in the bitmap enumeration.
    """
    key = (n, n_actions)
    if key in _SIG_CACHE:
        return _SIG_CACHE[key]
    nodes = 1 << n
    bpa = n * n
    n_structs = 1 << (bpa * n_actions)

    # one-step move table per single-action relation bitmap
    move = np.zeros((1 << bpa, nodes), dtype=np.uint32)
    for rel in range(1 << bpa):
        rows = [(rel >> (s * n)) & (nodes - 1) for s in range(n)]
        has = 0
        for s in range(n):
            if rows[s]:
                has |= 1 << s
        for u_set in range(nodes):
            if u_set & ~has:
                continue  # some state in the set cannot take the action
            img = 0
            rest = u_set
            s = 0
            while rest:
                if rest & 1:
                    img |= rows[s]
                rest >>= 1
                s += 1
            move[rel, u_set] = np.uint32(1 << img)

    codes = np.arange(n_structs, dtype=np.int64)
    adj = np.zeros((n_structs, nodes), dtype=np.uint32)
    for k in range(n_actions):
        rel_k = (codes >> (bpa * k)) & ((1 << bpa) - 1)
        adj |= move[rel_k]
    reach = adj | (np.uint32(1) << np.arange(nodes, dtype=np.uint32))[None, :]
    for k in range(nodes):  # bitset transitive closure
        has_k = ((reach >> np.uint32(k)) & np.uint32(1)).astype(np.uint32)
        reach |= has_k * reach[:, k][:, None]

    down = _down_masks(n)
    tables = (reach[:, :, None] & down[None, None, :]) != 0
    flat = np.packbits(tables.reshape(n_structs, -1), axis=1)
    _, first = np.unique(flat, axis=0, return_index=True)
    first.sort()
    result = (tables[first], codes[first])
    _SIG_CACHE[key] = result
    return result


def _eval_grid(f: Formula, env: dict[str, int], tables: np.ndarray, full: int):
    """Truth sets over the table axis: python int for purely
    propositional subformulas, (S,)-vector once a Kh node is involved."""
    if isinstance(f, Prop):
        return env.get(f.name, 0)
    if isinstance(f, Top):
        return full
    if isinstance(f, Bot):
        return 0
    if isinstance(f, Not):
        return full & ~_eval_grid(f.child, env, tables, full)
    if isinstance(f, Or):
        return _eval_grid(f.left, env, tables, full) | _eval_grid(f.right, env, tables, full)
    if isinstance(f, And):
        return _eval_grid(f.left, env, tables, full) & _eval_grid(f.right, env, tables, full)
    if isinstance(f, Kh):
        pre = _eval_grid(f.pre, env, tables, full)
        post = _eval_grid(f.post, env, tables, full)
        if isinstance(pre, int) and isinstance(post, int):
            bit = tables[:, pre, post]
        else:
            idx = np.arange(tables.shape[0])
            bit = tables[idx, pre, post]
        return np.where(bit, full, 0)
    raise TypeError(f"not a kernel formula: {f!r}")


def _decode_model(code: int, n: int, n_actions: int,
                  prop_list: Sequence[str], extents: Sequence[int]) -> LtsModel:
    states = [f"s{i}" for i in range(n)]
    bpa = n * n
    relations = {}
    for k in range(n_actions):
        rel = (int(code) >> (bpa * k)) & ((1 << bpa) - 1)
        relations[_ACTIONS[k]] = [(states[i], states[j])
                                  for i in range(n) for j in range(n)
                                  if rel >> (i * n + j) & 1]
    valuation = {p: [states[i] for i in range(n) if ext >> i & 1]
                 for p, ext in zip(prop_list, extents)}
    return LtsModel(states, relations, valuation)


DEFAULT_BITS_BUDGET = 18
DEFAULT_VAL_BUDGET = 1 << 16


def oracle_sat(f: Formula,
               bounds: OracleBounds,
               *,
               fast: bool = True,
               bits_budget: int = DEFAULT_BITS_BUDGET,
               val_budget: int = DEFAULT_VAL_BUDGET) -> LtsModel | None:
    """First model within the bounds satisfying f, or None.

    Exact within the bounds either way; the fast path collapses relation
    structures with equal witness tables and re-validates any hit with
    the exact checker.  Raises BudgetExceededError when the bounds imply
    more work than the configured budget allows.
    """
    g = desugar(f)
    used = sorted(props(g) & set(bounds.propositions))
    bits = bounds.max_states ** 2 * bounds.max_actions
    if bits > bits_budget:
        raise BudgetExceededError(
            f"{bounds.max_states} states x {bounds.max_actions} actions needs "
            f"2^{bits} relation structures (budget 2^{bits_budget})")
    n_vals = (1 << bounds.max_states) ** len(used)
    if n_vals > val_budget:
        raise BudgetExceededError(
            f"{len(used)} propositions over {bounds.max_states} states need "
            f"{n_vals} valuations (budget {val_budget})")
    for n in range(1, bounds.max_states + 1):
        if not fast:
            hit = _sweep_slow(f, n, bounds)
        else:
            hit = _sweep_fast(f, g, n, bounds, used)
        if hit is not None:
            return hit
    return None


def _sweep_fast(f: Formula, g: Formula, n: int, bounds: OracleBounds,
                used: list[str]) -> LtsModel | None:
    tables, codes = _signatures(n, bounds.max_actions)
    full = (1 << n) - 1
    extent_axes = [range(1 << n)] * len(used)
    for extents in itertools.product(*extent_axes):
        env = dict(zip(used, extents))
        res = _eval_grid(g, env, tables, full)
        if isinstance(res, int):
            if res:
                model = _decode_model(int(codes[0]), n, bounds.max_actions,
                                      used, extents)
                return _validated(model, f)
            continue
        hits = np.flatnonzero(res)
        if hits.size:
            model = _decode_model(int(codes[hits[0]]), n, bounds.max_actions,
                                  used, extents)
            return _validated(model, f)
    return None


def _sweep_slow(f: Formula, n: int, bounds: OracleBounds) -> LtsModel | None:
    sub = OracleBounds(n, bounds.max_actions, bounds.propositions)
    for m in enumerate_models(sub):
        if len(m.states) == n and model_check(m, f):
            return m
    return None


def _validated(model: LtsModel, f: Formula) -> LtsModel:
    if not model_check(model, f):  # pragma: no cover - soundness guard
        raise InternalSoundnessError(
            f"fast oracle hit fails model checking: {to_text(f)}")
    return model


# ---------------------------------------------------------------------------
# Random generators


def random_prop_formula(rng: random.Random, symbols: Sequence[str],
                        depth: int) -> Formula:
    """Random modality-free formula of bounded depth."""
    if depth <= 0 or rng.random() < 0.35:
        r = rng.random()
        if r < 0.85:
            return Prop(rng.choice(symbols))
        return TOP if r < 0.93 else BOT
    op = rng.choice(("not", "and", "or"))
    if op == "not":
        return Not(random_prop_formula(rng, symbols, depth - 1))
    left = random_prop_formula(rng, symbols, depth - 1)
    right = random_prop_formula(rng, symbols, depth - 1)
    return And(left, right) if op == "and" else Or(left, right)


def random_formula(rng: random.Random, symbols: Sequence[str],
                   depth: int = 3, kh_weight: float = 0.4,
                   nest_weight: float = 0.1) -> Formula:
    """Random formula; Kh nodes appear near the root (depth <= 2) with
    configurable weight so branch counts stay desk-scale."""

    def gen(d: int, root_distance: int) -> Formula:
        if root_distance <= 2 and d > 0 and rng.random() < kh_weight:
            if rng.random() < nest_weight:
                pre = gen(d - 1, root_distance + 1)
            else:
                pre = random_prop_formula(rng, symbols, 2)
            post = random_prop_formula(rng, symbols, 2)
            return Kh(pre, post)
        if d <= 0 or rng.random() < 0.3:
            return random_prop_formula(rng, symbols, 1)
        op = rng.choice(("not", "and", "or"))
        if op == "not":
            return Not(gen(d - 1, root_distance + 1))
        return (And if op == "and" else Or)(
            gen(d - 1, root_distance + 1), gen(d - 1, root_distance + 1))

    return gen(depth, 0)


def random_conjunction(rng: random.Random, symbols: Sequence[str],
                       n_pos: int, n_neg: int, body_depth: int = 2) -> Formula:
    """Random conjunction of Kh literals (the flat fragment)."""
    lits: list[Formula] = []
    for _ in range(n_pos):
        lits.append(Kh(random_prop_formula(rng, symbols, body_depth),
                       random_prop_formula(rng, symbols, body_depth)))
    for _ in range(n_neg):
        lits.append(Not(Kh(random_prop_formula(rng, symbols, body_depth),
                           random_prop_formula(rng, symbols, body_depth))))
    return conj(lits)


def random_model(rng: random.Random, max_states: int, actions: Sequence[str],
                 symbols: Sequence[str], edge_prob: float = 0.3) -> LtsModel:
    """Random LTS for invariant tests."""
    n = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(n)]
    relations = {a: [(s, t) for s in states for t in states
                     if rng.random() < edge_prob] for a in actions}
    valuation = {p: [s for s in states if rng.random() < 0.5] for p in symbols}
    return LtsModel(states, relations, valuation)


# ---------------------------------------------------------------------------
# Differential fuzzing


@dataclass
class TrialRecord:
    index: int
    formula: str
    solver_verdict: str          # SAT / UNSAT / ERROR
    oracle_found: bool
    model_states: int | None
    state_bound: int
    disagreement: bool
    reason: str = ""

    def to_row(self) -> dict:
        return {
            "trial": self.index,
            "formula": self.formula,
            "solver": self.solver_verdict,
            "oracle_found": self.oracle_found,
            "model_states": self.model_states if self.model_states is not None else "",
            "state_bound": self.state_bound,
            "disagreement": self.disagreement,
            "reason": self.reason,
        }


@dataclass
class FuzzReport:
    seed: int
    shape: str
    bounds: OracleBounds
    records: list[TrialRecord] = field(default_factory=list)

    @property
    def disagreements(self) -> list[TrialRecord]:
        return [r for r in self.records if r.disagreement]

    def summary(self) -> dict:
        sat = sum(1 for r in self.records if r.solver_verdict == "SAT")
        return {
            "seed": self.seed,
            "shape": self.shape,
            "trials": len(self.records),
            "solver_sat": sat,
            "solver_unsat": sum(1 for r in self.records
                                if r.solver_verdict == "UNSAT"),
            "oracle_found": sum(1 for r in self.records if r.oracle_found),
            "disagreements": len(self.disagreements),
        }


def generate_trial_formula(rng: random.Random, shape: str,
                           symbols: Sequence[str]) -> Formula:
    if shape == "positive":
        return random_conjunction(rng, symbols, rng.randint(1, 2), 0)
    if shape == "negative":
        return random_conjunction(rng, symbols, 0, rng.randint(1, 2))
    if shape == "mixed":
        return random_conjunction(rng, symbols, rng.randint(1, 2), 1)
    if shape == "any":
        return random_formula(rng, symbols)
    raise ValueError(f"unknown shape {shape!r}")


def fuzz(seed: int, trials: int, bounds: OracleBounds,
         shape: str = "any") -> FuzzReport:
    """Compare decide() against the bounded oracle on random formulas.

    Disagreement criteria (either direction of the agreement contract):
    the oracle finds a model while the solver answers UNSAT; the solver's
    own soundness audit rejects its answer; or a SAT model exceeds the
    cubic state bound.  Identical seeds replay identical formula
    sequences.
    """
    rng = random.Random(seed)
    symbols = sorted(bounds.propositions)
    report = FuzzReport(seed=seed, shape=shape, bounds=bounds)
    for i in range(trials):
        formula = generate_trial_formula(rng, shape, symbols)
        bound = solver_mod.state_bound(formula)
        verdict_name = "ERROR"
        model_states = None
        reason = ""
        try:
            verdict = solver_mod.decide(formula)
            verdict_name = verdict.verdict
            if verdict_name == "SAT":
                model_states = len(verdict.model.states)
        except InternalSoundnessError as exc:
            reason = f"internal soundness: {exc}"
        found = oracle_sat(formula, bounds) is not None
        disagreement = False
        if verdict_name == "ERROR":
            disagreement = True
        elif found and verdict_name != "SAT":
            disagreement = True
            reason = "oracle found a model but solver reported UNSAT"
        elif model_states is not None and model_states > bound:
            disagreement = True
            reason = f"extracted model has {model_states} states, bound {bound}"
        report.records.append(TrialRecord(
            index=i,
            formula=to_text(formula),
            solver_verdict=verdict_name,
            oracle_found=found,
            model_states=model_states,
            state_bound=bound,
            disagreement=disagreement,
            reason=reason,
        ))
    return report
