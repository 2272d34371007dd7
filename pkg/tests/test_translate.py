import itertools
import random

from khsat.lts import model_check
from khsat.oracle import OracleBounds, oracle_sat, random_prop_formula
from khsat.s5 import GlobalAtom, s5_sat
from khsat.solver import extract_lts
from khsat.syntax import (A, And, AtomConjunction, BOT, E, Not, Or, Prop, TOP,
                          to_text)
from khsat.translate import (all_d_sets, closure_complement,
                             enumerate_disjuncts, seed_d, theta_d,
                             theta_minus, theta_plus)

p, q, r, t = Prop("p"), Prop("q"), Prop("r"), Prop("t")


# ---------------------------------------------------------------------------
# formula shapes


def test_theta_plus_single():
    assert theta_plus([(p, q)]) == Or(A(Not(p)), E(q))


def test_theta_plus_empty():
    assert theta_plus([]) == TOP


def test_theta_plus_compound():
    assert theta_plus([(And(p, q), And(r, t))]) == Or(A(Not(And(p, q))),
                                                      E(And(r, t)))


def test_theta_minus_single():
    assert theta_minus([(p, r)]) == E(And(p, Not(r)))


def test_theta_minus_empty():
    assert theta_minus([]) == TOP


def test_theta_minus_keeps_literal_negation_of_false():
    f = theta_minus([(p, BOT)])
    assert f == E(And(p, Not(BOT)))
    assert to_text(f) == "E (p & ~false)"


# ---------------------------------------------------------------------------
# closure of the complement


def test_closure_one_index_full_d():
    d = closure_complement(1, {(1, 1)})
    assert d.pairs == frozenset({(1, 1)})
    assert d.complement_closure == frozenset({(1, 1)})  # reflexive floor


def test_closure_empty_d_is_total():
    d = closure_complement(2, set())
    assert d.complement_closure == frozenset(itertools.product((1, 2), (1, 2)))


def test_closure_adds_transitive_pair():
    complement = {(1, 2), (2, 3)}
    d = frozenset(itertools.product((1, 2, 3), repeat=2)) - complement
    rel = closure_complement(3, d)
    assert (1, 3) in rel.complement_closure
    for i in (1, 2, 3):
        assert (i, i) in rel.complement_closure


def _closure_by_paths(n, d_pairs):
    """Oracle: pairwise path enumeration over the complement graph."""
    comp = {(s, u) for s in range(1, n + 1) for u in range(1, n + 1)
            if (s, u) not in d_pairs}
    reach = set()
    for s in range(1, n + 1):
        frontier = {s}
        seen = {s}
        while frontier:
            nxt = {v for u in frontier for (a, v) in comp if a == u} - seen
            seen |= nxt
            frontier = nxt
        reach |= {(s, u) for u in seen}
    return frozenset(reach)


def test_closure_matches_path_enumeration():
    rng = random.Random(51)
    for _ in range(120):
        n = rng.randint(1, 4)
        universe = [(s, u) for s in range(1, n + 1) for u in range(1, n + 1)]
        d_pairs = frozenset(pr for pr in universe if rng.random() < 0.5)
        rel = closure_complement(n, d_pairs)
        want = _closure_by_paths(n, d_pairs)
        assert rel.complement_closure == want
        # reflexive and transitive by construction
        for i in range(1, n + 1):
            assert (i, i) in rel.complement_closure
        cc = rel.complement_closure
        for (a, b) in cc:
            for (c, d2) in cc:
                if b == c:
                    assert (a, d2) in cc


# ---------------------------------------------------------------------------
# the combined constraint set


def _branch_conjunction() -> AtomConjunction:
    """One positive Kh(p & q, r & t); negatives ~Kh(p, r) and the
    residue ~Kh(true | false, false)."""
    return AtomConjunction(
        ((And(p, q), And(r, t)),),
        (((p), (r)), ((Or(TOP, BOT)), BOT)),
    )


def test_theta_d_branch_example():
    conjunction = _branch_conjunction()
    d = closure_complement(1, {(1, 1)})
    constraints = theta_d(conjunction, d)
    # one two-way constraint per negative (closure has a single pair),
    # plus the mandatory witness for the D pair
    assert len(constraints) == 3
    mand = [c for c in constraints if len(c) == 1]
    assert mand == [(GlobalAtom("E", And(And(r, t), Not(And(p, q)))),)]
    two_way = [c for c in constraints if len(c) == 2]
    assert two_way[0][0] == GlobalAtom("E", And(p, Not(And(p, q))))
    assert two_way[0][1] == GlobalAtom("E", And(And(r, t), Not(r)))


def test_theta_d_trivial_when_everything_empty():
    conjunction = AtomConjunction((), ())
    d = closure_complement(0, set())
    assert theta_d(conjunction, d) == ()


def test_theta_d_constraint_count():
    rng = random.Random(52)
    names = ["p", "q"]
    for _ in range(60):
        positives = tuple((random_prop_formula(rng, names, 1),
                           random_prop_formula(rng, names, 1))
                          for _ in range(2))
        negatives = ((random_prop_formula(rng, names, 1),
                      random_prop_formula(rng, names, 1)),)
        conjunction = AtomConjunction(positives, negatives)
        universe = [(s, u) for s in (1, 2) for u in (1, 2)]
        d_pairs = frozenset(pr for pr in universe if rng.random() < 0.5)
        d = closure_complement(2, d_pairs)
        constraints = theta_d(conjunction, d)
        want = len(d.pairs) + len(negatives) * len(d.complement_closure)
        assert len(constraints) == want


# ---------------------------------------------------------------------------
# disjunct enumeration


def test_empty_conjunction_yields_single_disjunct():
    conjunction = AtomConjunction((), ())
    pruned = list(enumerate_disjuncts(conjunction))
    raw = list(enumerate_disjuncts(conjunction, prune=False, heuristic=False))
    assert len(pruned) == 1 and len(raw) == 1
    assert pruned[0].atoms == ()


def _unpruned_count_formula(conjunction: AtomConjunction) -> int:
    total = 0
    n = conjunction.n_pos
    for d_pairs in all_d_sets(n):
        d = closure_complement(n, d_pairs)
        two_way = conjunction.n_neg * len(d.complement_closure)
        total += (1 << n) * (1 << two_way)
    return total


def test_unpruned_count_matches_combinatorial_oracle():
    conjunction = AtomConjunction(((p, q), (q, r)), ((p, r),))
    got = sum(1 for _ in enumerate_disjuncts(conjunction, prune=False,
                                             heuristic=False))
    assert got == _unpruned_count_formula(conjunction)
    single = AtomConjunction(((p, q),), ((q, r), (p, r)))
    got = sum(1 for _ in enumerate_disjuncts(single, prune=False,
                                             heuristic=False))
    assert got == _unpruned_count_formula(single)


def test_pruned_disjuncts_are_all_satisfiable():
    rng = random.Random(53)
    names = ["p", "q"]
    for _ in range(40):
        conjunction = AtomConjunction(
            tuple((random_prop_formula(rng, names, 1),
                   random_prop_formula(rng, names, 1))
                  for _ in range(rng.randint(0, 2))),
            tuple((random_prop_formula(rng, names, 1),
                   random_prop_formula(rng, names, 1))
                  for _ in range(rng.randint(0, 1))),
        )
        for dj in itertools.islice(enumerate_disjuncts(conjunction), 20):
            assert s5_sat(dj.atoms) is not None


def test_pruned_complete_wrt_unpruned():
    rng = random.Random(54)
    names = ["p", "q"]
    for _ in range(30):
        conjunction = AtomConjunction(
            ((random_prop_formula(rng, names, 1),
              random_prop_formula(rng, names, 1)),),
            ((random_prop_formula(rng, names, 1),
              random_prop_formula(rng, names, 1)),),
        )
        raw_sat = any(s5_sat(dj.atoms) is not None
                      for dj in enumerate_disjuncts(conjunction, prune=False,
                                                    heuristic=False))
        pruned_sat = next(enumerate_disjuncts(conjunction), None) is not None
        assert raw_sat == pruned_sat


def test_seeded_d_for_branch_example():
    seeded = seed_d(_branch_conjunction())
    assert seeded is not None
    assert seeded.pairs == frozenset({(1, 1)})
    assert seeded.complement_closure == frozenset({(1, 1)})


# ---------------------------------------------------------------------------
# equisatisfiability against the bounded brute-force oracle


def _solver_side_sat(conjunction: AtomConjunction):
    for dj in enumerate_disjuncts(conjunction):
        model = s5_sat(dj.atoms)
        if model is not None:
            return dj, model
    return None


def test_positive_conjunctions_equisatisfiable():
    rng = random.Random(55)
    names = ["p", "q", "r"]
    for _ in range(50):
        n_pos = rng.randint(1, 2)
        conjunction = AtomConjunction(
            tuple((random_prop_formula(rng, names, 2),
                   random_prop_formula(rng, names, 2))
                  for _ in range(n_pos)), ())
        phi = conjunction.formula()
        bounds = OracleBounds(n_pos + 1, n_pos, ("p", "q", "r"))
        oracle_hit = oracle_sat(phi, bounds)
        solved = _solver_side_sat(conjunction)
        assert (oracle_hit is not None) == (solved is not None)
        if solved is not None:
            dj, s5m = solved
            m, _w = extract_lts(dj, s5m, conjunction)
            assert model_check(m, phi) == frozenset(m.states)


def test_negative_conjunctions_equisatisfiable():
    rng = random.Random(56)
    names = ["p", "q", "r"]
    for _ in range(50):
        n_neg = rng.randint(1, 3)
        conjunction = AtomConjunction(
            (), tuple((random_prop_formula(rng, names, 2),
                       random_prop_formula(rng, names, 2))
                      for _ in range(n_neg)))
        phi = conjunction.formula()
        bounds = OracleBounds(3, 1, ("p", "q", "r"))
        oracle_hit = oracle_sat(phi, bounds)
        solved = _solver_side_sat(conjunction)
        assert (oracle_hit is not None) == (solved is not None)
        if solved is not None:
            dj, s5m = solved
            m, _w = extract_lts(dj, s5m, conjunction)
            assert model_check(m, phi) == frozenset(m.states)
            assert all(not pairs for pairs in m.relations.values())


def test_mixed_conjunctions_equisatisfiable():
    rng = random.Random(57)
    names = ["p", "q"]
    for _ in range(40):
        conjunction = AtomConjunction(
            ((random_prop_formula(rng, names, 2),
              random_prop_formula(rng, names, 2)),),
            ((random_prop_formula(rng, names, 2),
              random_prop_formula(rng, names, 2)),),
        )
        phi = conjunction.formula()
        # the witness construction needs at most 4 states here
        bounds = OracleBounds(4, 1, ("p", "q"))
        oracle_hit = oracle_sat(phi, bounds)
        solved = _solver_side_sat(conjunction)
        assert (oracle_hit is not None) == (solved is not None)
        if solved is not None:
            dj, s5m = solved
            m, _w = extract_lts(dj, s5m, conjunction)
            assert model_check(m, phi) == frozenset(m.states)
