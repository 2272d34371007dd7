"""Equisatisfiable global-modality translations of ability-atom conjunctions.

A conjunction of positive atoms Kh(ψ_i, χ_i) (i in I) and negative atoms
~Kh(ψ_j, χ_j) (j in J) is satisfiable exactly when some choice of a pair
set D ⊆ I×I makes the following conjunction of global atoms satisfiable:

* for each i in I:       A(~ψ_i)  or  E(χ_i)             (`theta_plus`)
* for each j in J:       E(ψ_j & ~χ_j)                   (`theta_minus`)
* for each (t,s) in D:   E(χ_t & ~ψ_s)                   (`theta_d`)
* for each j in J and (s,t) in the reflexive-transitive closure of the
  complement of D:       E(ψ_j & ~ψ_s)  or  E(χ_t & ~χ_j)

D records which postcondition-to-precondition inclusions fail; the
closure of its complement describes exactly the composite plans a witness
model ends up making strongly executable, and those plans must not
accidentally witness a negated atom.

The translation is never materialized as a single formula (its DNF is
exponential); :func:`enumerate_disjuncts` streams pure conjunctions of
global atoms instead, one per (D, choices) combination.  Enumeration is
pruned: choices propositionally inconsistent with the accumulated
A-bodies are dropped, which is sound because the per-E decomposition of
flat S5 satisfiability is monotone in added atoms.  Before exhaustive
enumeration the stream tries a single seeded D read off a model of the
positive/negative constraints alone; exhaustive enumeration (D by
increasing size, then lexicographic) remains the completeness backstop.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from . import sat
from .s5 import GlobalAtom, S5Model, s5_sat
from .syntax import A, And, AtomConjunction, E, Formula, Not, Or, conj

Pair = tuple[int, int]


@dataclass(frozen=True)
class DRelation:
    """A guessed pair set over indices 1..n together with the
    reflexive-transitive closure of its complement."""
    n: int
    pairs: frozenset[Pair]
    complement_closure: frozenset[Pair]

    def sorted_pairs(self) -> list[Pair]:
        return sorted(self.pairs)

    def sorted_closure(self) -> list[Pair]:
        return sorted(self.complement_closure)


def closure_complement(n: int, pairs) -> DRelation:
    """Build the DRelation for a pair set D ⊆ {1..n}²: complement D,
    then close reflexively and transitively (Floyd-Warshall)."""
    d = frozenset((int(s), int(t)) for s, t in pairs)
    for s, t in d:
        if not (1 <= s <= n and 1 <= t <= n):
            raise ValueError(f"pair ({s},{t}) outside 1..{n}")
    reach = [[False] * (n + 1) for _ in range(n + 1)]
    for s in range(1, n + 1):
        reach[s][s] = True
        for t in range(1, n + 1):
            if (s, t) not in d:
                reach[s][t] = True
    for k in range(1, n + 1):
        for i in range(1, n + 1):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(1, n + 1):
                    if row_k[j]:
                        row_i[j] = True
    closure = frozenset((s, t) for s in range(1, n + 1)
                        for t in range(1, n + 1) if reach[s][t])
    return DRelation(n, d, closure)


def theta_plus(positives: Sequence[tuple[Formula, Formula]]) -> Formula:
    """For each positive atom: its precondition holds nowhere or its
    postcondition holds somewhere.  Empty input gives true."""
    return conj(Or(A(Not(pre)), E(post)) for pre, post in positives)


def theta_minus(negatives: Sequence[tuple[Formula, Formula]]) -> Formula:
    """For each negative atom: a state satisfying the precondition but
    not the postcondition exists.  Empty input gives true."""
    return conj(E(And(pre, Not(post))) for pre, post in negatives)


Constraint = tuple[GlobalAtom, ...]  # length 1 (mandatory) or 2 (choice)


def theta_d(conjunction: AtomConjunction, d: DRelation) -> tuple[Constraint, ...]:
    """The constraint set tying positives to negatives under a given D.

    Emits, in order: for every negative j and every (s,t) in the closure
    of the complement, the two-way choice E(ψ_j & ~ψ_s) | E(χ_t & ~χ_j);
    then for every (t,s) in D the mandatory E(χ_t & ~ψ_s).
    """
    if d.n != conjunction.n_pos:
        raise ValueError(f"D is over 1..{d.n} but there are "
                         f"{conjunction.n_pos} positive atoms")
    out: list[Constraint] = []
    for psi_j, chi_j in conjunction.negatives:
        for s, t in d.sorted_closure():
            psi_s = conjunction.positives[s - 1][0]
            chi_t = conjunction.positives[t - 1][1]
            out.append((GlobalAtom("E", And(psi_j, Not(psi_s))),
                        GlobalAtom("E", And(chi_t, Not(chi_j)))))
    for t, s in d.sorted_pairs():
        chi_t = conjunction.positives[t - 1][1]
        psi_s = conjunction.positives[s - 1][0]
        out.append((GlobalAtom("E", And(chi_t, Not(psi_s))),))
    return tuple(out)


@dataclass(frozen=True)
class ThetaDisjunct:
    """One pure conjunction of global atoms from the translation's DNF."""
    a_atoms: tuple[GlobalAtom, ...]
    e_atoms: tuple[GlobalAtom, ...]
    d: DRelation
    choice_log: tuple[tuple[str, ...], tuple[int, ...]]  # per-i kinds, per-pair sides

    @property
    def atoms(self) -> tuple[GlobalAtom, ...]:
        return self.a_atoms + self.e_atoms


@lru_cache(maxsize=1 << 16)
def _consistent(body: Formula, alpha: tuple[Formula, ...]) -> bool:
    """Is `body` propositionally satisfiable jointly with the A-bodies?"""
    return sat.prop_sat(conj((body, *alpha))) is not None


def _base_constraints(conjunction: AtomConjunction) -> tuple[list[Constraint], list[GlobalAtom]]:
    """Per-positive two-way choices (E side first) and the mandatory
    negative-atom witnesses."""
    choices: list[Constraint] = [
        (GlobalAtom("E", post), GlobalAtom("A", Not(pre)))
        for pre, post in conjunction.positives
    ]
    mandatory = [GlobalAtom("E", And(pre, Not(post)))
                 for pre, post in conjunction.negatives]
    return choices, mandatory


def _choice_combos(choices: list[Constraint],
                   mandatory: list[GlobalAtom],
                   prune: bool) -> Iterator[tuple[tuple[Formula, ...],
                                                  list[GlobalAtom],
                                                  tuple[str, ...]]]:
    """All assignments to the per-positive choices.

    Yields (alpha, picked E atoms, per-index kinds).  With pruning, an A
    branch is discarded as soon as the joint A-bodies or any mandatory
    witness becomes propositionally inconsistent.
    """

    def rec(idx: int, alpha: tuple[Formula, ...], es: list[GlobalAtom],
            kinds: tuple[str, ...]):
        if idx == len(choices):
            yield alpha, es, kinds
            return
        e_atom, a_atom = choices[idx]
        yield from rec(idx + 1, alpha, es + [e_atom], kinds + ("E",))
        new_alpha = alpha + (a_atom.body,)
        if prune:
            if not _consistent(a_atom.body, alpha):
                return
            if any(not _consistent(m.body, new_alpha) for m in mandatory):
                return
        yield from rec(idx + 1, new_alpha, es, kinds + ("A",))

    yield from rec(0, (), [], ())


def _resolve(pairs: tuple[Constraint, ...],
             alpha: tuple[Formula, ...],
             prune: bool) -> Iterator[tuple[list[GlobalAtom], tuple[int, ...]]]:
    """Assignments to the two-way E constraints.

    Choices do not interact (each E atom only adds its own state), so in
    pruned mode the first consistent side is taken and inconsistent sides
    are dropped; a constraint with no consistent side kills the branch.
    """

    def rec(idx: int, picked: list[GlobalAtom], sides: tuple[int, ...]):
        if idx == len(pairs):
            yield picked, sides
            return
        options = pairs[idx]
        if len(options) == 1:
            if prune and not _consistent(options[0].body, alpha):
                return
            yield from rec(idx + 1, picked + [options[0]], sides)
            return
        if prune:
            for side, atom in enumerate(options):
                if _consistent(atom.body, alpha):
                    yield from rec(idx + 1, picked + [atom], sides + (side,))
                    return
            return
        for side, atom in enumerate(options):
            yield from rec(idx + 1, picked + [atom], sides + (side,))

    yield from rec(0, [], ())


def all_d_sets(n: int) -> Iterator[frozenset[Pair]]:
    """Subsets of {1..n}² by increasing size, lexicographic within size."""
    universe = [(s, t) for s in range(1, n + 1) for t in range(1, n + 1)]
    for k in range(len(universe) + 1):
        for combo in itertools.combinations(universe, k):
            yield frozenset(combo)


def seed_d(conjunction: AtomConjunction) -> DRelation | None:
    """A candidate D read off a model of theta_plus and theta_minus alone:
    D collects the pairs (t,s) whose postcondition extent is not included
    in the precondition extent.  None if even that base is unsatisfiable,
    in which case no disjunct can be either.
    """
    base = _solve_base(conjunction)
    if base is None:
        return None
    model = base
    pairs = set()
    n = conjunction.n_pos
    for t in range(1, n + 1):
        chi_ext = model.extent(conjunction.positives[t - 1][1])
        for s in range(1, n + 1):
            psi_ext = model.extent(conjunction.positives[s - 1][0])
            if not chi_ext <= psi_ext:
                pairs.add((t, s))
    return closure_complement(n, pairs)


def _solve_base(conjunction: AtomConjunction) -> S5Model | None:
    choices, mandatory = _base_constraints(conjunction)
    for alpha, es, _kinds in _choice_combos(choices, mandatory, prune=True):
        atoms = [GlobalAtom("A", b) for b in alpha] + es + mandatory
        model = s5_sat(atoms)
        if model is not None:
            return model
    return None


def enumerate_disjuncts(conjunction: AtomConjunction,
                        *,
                        prune: bool = True,
                        heuristic: bool = True,
                        counters: dict | None = None) -> Iterator[ThetaDisjunct]:
    """Stream the translation's DNF disjuncts for all candidate D sets.

    With `prune` every yielded disjunct is propositionally consistent per
    the flat-S5 decomposition (so s5_sat accepts it); without pruning the
    full cartesian product of choices is produced, which the counting
    tests rely on.  With `heuristic` a seeded D is tried before the
    exhaustive ordering.  `counters`, when given, accumulates how many
    pair sets and choice combinations were examined (pruned ones
    included).
    """
    n = conjunction.n_pos
    choices, mandatory = _base_constraints(conjunction)
    if counters is None:
        counters = {}
    counters.setdefault("d_sets", 0)
    counters.setdefault("combos", 0)

    d_candidates: list[frozenset[Pair]] = []
    if prune and heuristic:
        seeded = seed_d(conjunction)
        if seeded is None:
            return  # theta_plus & theta_minus alone unsatisfiable
        d_candidates.append(seeded.pairs)

    def candidates() -> Iterator[frozenset[Pair]]:
        yield from d_candidates
        for d in all_d_sets(n):
            if d not in d_candidates:
                yield d

    for d_pairs in candidates():
        counters["d_sets"] += 1
        d = closure_complement(n, d_pairs)
        extra = theta_d(conjunction, d)
        for alpha, es, kinds in _choice_combos(choices, mandatory, prune):
            counters["combos"] += 1
            base_es = es + mandatory
            if prune and not all(_consistent(x.body, alpha) for x in base_es):
                continue
            if prune and not base_es and not extra and not _consistent(conj(alpha), ()):
                continue
            for picked, sides in _resolve(extra, alpha, prune):
                yield ThetaDisjunct(
                    a_atoms=tuple(GlobalAtom("A", b) for b in alpha),
                    e_atoms=tuple(base_es + picked),
                    d=d,
                    choice_log=(kinds, sides),
                )
