"""Top-level decision procedure with witness extraction and self-checks.

``decide`` runs three deterministic stages:

1. Branch: assign truth values to the positive Kh atoms of the input,
   innermost first, replacing each occurrence by true/false.  Every leaf
   is a conjunction of atoms plus a residue atom ~Kh(leftover, false)
   demanding that the fully reduced propositional part hold somewhere.
   Leaves are explored cheapest first (fewest atoms set to true), with
   the true-branch preferred among equals.
2. Translate and solve: each leaf's atom conjunction is streamed through
   the global-modality translation; the first satisfiable disjunct gives
   a small state/valuation model.
3. Extract and verify: the model grows one action per positive atom
   (precondition extent × postcondition extent, empty if the
   precondition is empty) plus witness plans; the original formula is
   then re-checked on the result with the exact model checker.  A SAT
   answer failing that audit raises InternalSoundnessError instead of
   being returned.

UNSAT answers come from exhausting every branch and disjunct; the verdict
carries exploration counters rather than a certificate.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import InternalSoundnessError
from .lts import EMPTY_PLAN, LtsModel, Plan, apply_plan, model_check, strongly_executable
from .s5 import S5Model, s5_sat
from .syntax import (AtomConjunction, BOT, TOP, Formula, desugar,
                     find_positive_atom, size, substitute_atom, to_text)
from .translate import ThetaDisjunct, enumerate_disjuncts, seed_d


@dataclass(frozen=True)
class Branch:
    """One leaf of the atom-assignment tree."""
    decisions: tuple[tuple[Formula, Formula, bool], ...]
    positives: tuple[tuple[Formula, Formula], ...]
    negatives: tuple[tuple[Formula, Formula], ...]
    phi_cur: Formula

    @property
    def residue(self) -> tuple[Formula, Formula]:
        """The leaf's existential demand: ~Kh(phi_cur, false), i.e. the
        reduced propositional part must hold somewhere."""
        return (self.phi_cur, BOT)

    def conjunction(self) -> AtomConjunction:
        return AtomConjunction(self.positives, self.negatives + (self.residue,))

    def key(self) -> tuple:
        return (tuple(sorted(map(str, self.positives))),
                tuple(sorted(map(str, self.negatives))),
                str(self.phi_cur))


def branch_atoms(f: Formula) -> Iterator[Branch]:
    """All leaves of the two-way atom splits, cheapest first.

    Ordering: ascending number of atoms assigned true, then tree order
    with the true child first.  Cheap leaves keep the pair-set
    enumeration small, and the ordering fixes which witness a satisfiable
    formula gets.
    """
    f = desugar(f)
    leaves: list[tuple[tuple[int, tuple[int, ...]], Branch]] = []

    def walk(cur: Formula,
             decisions: tuple[tuple[Formula, Formula, bool], ...],
             positives, negatives, codes: tuple[int, ...]):
        atom = find_positive_atom(cur)
        if atom is None:
            leaf = Branch(decisions, positives, negatives, cur)
            pops = sum(1 for *_x, v in decisions if v)
            leaves.append(((pops, codes), leaf))
            return
        pre, post = atom
        walk(substitute_atom(cur, atom, TOP), decisions + ((pre, post, True),),
             positives + (atom,), negatives, codes + (0,))
        walk(substitute_atom(cur, atom, BOT), decisions + ((pre, post, False),),
             positives, negatives + (atom,), codes + (1,))

    walk(f, (), (), (), ())
    leaves.sort(key=lambda item: item[0])
    for _key, leaf in leaves:
        yield leaf


@dataclass(frozen=True)
class SatVerdict:
    model: LtsModel
    atom_witnesses: dict[int, Plan]
    branch: Branch
    disjunct: ThetaDisjunct
    stats: dict

    verdict = "SAT"


@dataclass(frozen=True)
class UnsatVerdict:
    branches_explored: int
    disjuncts_explored: int
    stats: dict

    verdict = "UNSAT"


Verdict = SatVerdict | UnsatVerdict


def extract_lts(disjunct: ThetaDisjunct,
                s5_model: S5Model,
                conjunction: AtomConjunction) -> tuple[LtsModel, dict[int, Plan]]:
    """Turn a model of a disjunct into an LTS satisfying the conjunction.

    States and valuation are copied; positive atom ℓ gets action act<ℓ>
    interpreted as precondition-extent × postcondition-extent, or the
    empty relation when the precondition holds nowhere (then the empty
    plan is the witness)."""
    relations: dict[str, list[tuple[str, str]]] = {}
    witnesses: dict[int, Plan] = {}
    for idx, (pre, post) in enumerate(conjunction.positives, start=1):
        action = f"act{idx}"
        pre_ext = s5_model.extent(pre)
        if not pre_ext:
            relations[action] = []
            witnesses[idx] = EMPTY_PLAN
        else:
            post_ext = s5_model.extent(post)
            relations[action] = [(s, t) for s in sorted(pre_ext)
                                 for t in sorted(post_ext)]
            witnesses[idx] = Plan((action,))
    model = LtsModel(s5_model.states, relations, s5_model.valuation)
    return model, witnesses


def verify(verdict: SatVerdict, f: Formula) -> bool:
    """Audit a SAT answer: the model must satisfy the original formula
    under the exact checker and every witness plan must satisfy the two
    witness inclusions for its atom."""
    m = verdict.model
    if not model_check(m, f):
        return False
    for idx, (pre, post) in enumerate(verdict.branch.positives, start=1):
        plan = verdict.atom_witnesses[idx]
        pre_ext = model_check(m, pre)
        post_ext = model_check(m, post)
        if not pre_ext <= strongly_executable(m, plan):
            return False
        if not apply_plan(m, plan, pre_ext) <= post_ext:
            return False
    return True


def decide(f: Formula) -> Verdict:
    """Decide satisfiability of f; SAT verdicts carry a verified model."""
    desugared = desugar(f)
    branches = 0
    disjuncts = 0
    counters: dict = {}
    seen_unsat: set[tuple] = set()
    cached = 0
    for leaf in branch_atoms(desugared):
        branches += 1
        key = leaf.key()
        if key in seen_unsat:
            cached += 1
            continue
        conjunction = leaf.conjunction()
        for disjunct in enumerate_disjuncts(conjunction, counters=counters):
            disjuncts += 1
            n5 = s5_sat(disjunct.atoms)
            if n5 is None:
                continue
            model, witnesses = extract_lts(disjunct, n5, conjunction)
            seeded = seed_d(conjunction)
            stats = {
                "branches_explored": branches,
                "branches_cached": cached,
                "disjuncts_explored": disjuncts,
                "d_sets_examined": counters.get("d_sets", 0),
                "combos_examined": counters.get("combos", 0),
                "formula_size": size(desugared),
                "seeded_d_used": bool(seeded is not None
                                      and seeded.pairs == disjunct.d.pairs),
            }
            verdict = SatVerdict(model, witnesses, leaf, disjunct, stats)
            if not verify(verdict, f):
                raise InternalSoundnessError(
                    f"extracted model fails verification for {to_text(f)}")
            return verdict
        seen_unsat.add(key)
    return UnsatVerdict(branches, disjuncts, {
        "branches_explored": branches,
        "branches_cached": cached,
        "disjuncts_explored": disjuncts,
        "d_sets_examined": counters.get("d_sets", 0),
        "combos_examined": counters.get("combos", 0),
        "formula_size": size(desugared),
    })


def state_bound(f: Formula) -> int:
    """The cubic certificate-size bound for extracted models."""
    n = size(desugar(f))
    return 3 * n ** 3 + 1


def verdict_to_dict(verdict: Verdict) -> dict:
    """JSON-ready rendering; deterministic for fixed inputs."""
    if isinstance(verdict, UnsatVerdict):
        return {
            "verdict": "UNSAT",
            "branches_explored": verdict.branches_explored,
            "disjuncts_explored": verdict.disjuncts_explored,
            "stats": verdict.stats,
        }
    br = verdict.branch
    dj = verdict.disjunct
    return {
        "verdict": "SAT",
        "model": verdict.model.to_dict(),
        "witnesses": {str(i): list(p.actions)
                      for i, p in sorted(verdict.atom_witnesses.items())},
        "branch": {
            "decisions": [{"pre": to_text(p), "post": to_text(q), "value": v}
                          for p, q, v in br.decisions],
            "positives": [f"Kh({to_text(p)}, {to_text(q)})" for p, q in br.positives],
            "negatives": [f"~Kh({to_text(p)}, {to_text(q)})" for p, q in br.negatives],
            "phi_cur": to_text(br.phi_cur),
            "residue": f"~Kh({to_text(br.phi_cur)}, false)",
        },
        "disjunct": {
            "d": [list(p) for p in dj.d.sorted_pairs()],
            "complement_closure": [list(p) for p in dj.d.sorted_closure()],
            "a_atoms": [str(a) for a in dj.a_atoms],
            "e_atoms": [str(a) for a in dj.e_atoms],
            "choices": {"positive_kinds": list(dj.choice_log[0]),
                        "pair_sides": list(dj.choice_log[1])},
        },
        "stats": verdict.stats,
    }
