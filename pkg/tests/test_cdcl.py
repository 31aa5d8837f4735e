import random

import pytest

from oracles import brute_force_sat, resolve_on
from clausekit.cdcl import (
    TrailEntry,
    CdclState,
    PropClause,
    SatResult,
    TrailOrdering,
    UnsatResult,
    analyze_conflict,
    backjump_and_learn,
    clause_status,
    decide,
    forget,
    is_redundant,
    lowest_index_negative,
    propagate,
    solve,
    trace_lines,
)
from clausekit.errors import ResourceLimitError

# P=1 Q=2 R=3 S=4
DEMO = [PropClause(1, (1, 2, 3)), PropClause(2, (-3, 4)), PropClause(3, (-4, 1, 2))]


def demo_state():
    return CdclState.from_clauses(DEMO)


def drive_to_conflict(state):
    propagate(state)
    decide(state, -1)
    propagate(state)
    decide(state, -2)
    propagate(state)
    return state


class TestPropagate:
    def test_backjump_demo(self):
        state = drive_to_conflict(demo_state())
        assert [(e.lit, e.level, e.reason) for e in state.trail] == [
            (-1, 1, None),
            (-2, 2, None),
            (3, 2, 1),
            (4, 2, 2),
        ]
        assert state.conflict_id == 3 and state.level == 2

    def test_no_unit_no_change(self):
        state = demo_state()
        propagate(state)
        assert state.trail == [] and state.conflict_id is None

    def test_contradictory_units(self):
        state = CdclState.from_clauses([PropClause(1, (1,)), PropClause(2, (-1,))])
        propagate(state)
        assert [e.lit for e in state.trail] == [1]
        assert state.conflict_id == 2

    def test_pending_conflict_rejected(self):
        state = drive_to_conflict(demo_state())
        with pytest.raises(ValueError):
            propagate(state)


class TestDecide:
    def test_levels(self):
        state = demo_state()
        propagate(state)
        decide(state, -1)
        assert state.level == 1
        propagate(state)
        decide(state, -2)
        assert state.level == 2

    def test_assigned_atom_rejected(self):
        state = demo_state()
        propagate(state)
        decide(state, -1)
        with pytest.raises(ValueError):
            decide(state, 1)

    def test_fixpoint_required(self):
        state = demo_state()
        propagate(state)
        decide(state, -1)
        decide(state, -2)  # clause 1 is now unit: exhaustive propagation violated
        # the violation is caught at the next decide
        with pytest.raises(ValueError):
            decide(state, -3)


class TestAnalyzeConflict:
    def test_backjump_demo(self):
        state = drive_to_conflict(demo_state())
        learned, level = analyze_conflict(state)
        assert learned == (1, 2) and level == 1
        # resolution chain: first with -R|S, then with P|Q|R
        assert [cid for _, cid in state.last_analysis_steps] == [2, 1]

    def test_single_current_level_literal_unchanged(self):
        # exhaustive propagation never produces this state, so assemble it:
        # the conflict clause holds one literal per level, one of them current
        state = CdclState.from_clauses([PropClause(1, (1, 4))])
        for lit, level in ((-1, 1), (-4, 2)):
            state.level = level
            state.trail.append(TrailEntry(lit, level, None))
            state.value[abs(lit)] = lit > 0
            state.var_level[abs(lit)] = level
            state.var_reason[abs(lit)] = None
        state.conflict_id = 1
        learned, level = analyze_conflict(state)
        assert learned == (1, 4) and level == 1
        assert state.last_analysis_steps == []  # returned unchanged

    def test_level_zero_yields_bottom(self):
        state = CdclState.from_clauses([PropClause(1, (1,)), PropClause(2, (-1,))])
        propagate(state)
        learned, level = analyze_conflict(state)
        assert learned == () and level == -1

    def test_requires_conflict(self):
        with pytest.raises(ValueError):
            analyze_conflict(demo_state())


class TestBackjump:
    def test_backjump_demo(self):
        state = drive_to_conflict(demo_state())
        learned, level = analyze_conflict(state)
        backjump_and_learn(state, learned, level)
        assert [(e.lit, e.level) for e in state.trail] == [(-1, 1), (2, 1)]
        assert state.trail[1].reason == 4  # the learned clause propagates Q
        assert [c.lits for c in state.learned] == [(1, 2)]
        assert state.level == 1 and state.conflict_id is None

    def test_unit_learned_at_level_zero(self):
        state = CdclState.from_clauses([PropClause(1, (1, 2)), PropClause(2, (-2, 1))])
        propagate(state)
        decide(state, -1)
        propagate(state)  # 2 via clause 1, then clause 2 is false
        learned, level = analyze_conflict(state)
        assert learned == (1,) and level == 0
        backjump_and_learn(state, learned, level)
        assert state.level == 0
        assert [(e.lit, e.level) for e in state.trail] == [(1, 0)]

    def test_non_asserting_rejected(self):
        state = drive_to_conflict(demo_state())
        with pytest.raises(ValueError):
            backjump_and_learn(state, (3, 4), 1)

    def test_empty_clause_rejected(self):
        state = drive_to_conflict(demo_state())
        with pytest.raises(ValueError):
            backjump_and_learn(state, (), 0)


class TestSolve:
    def test_backjump_demo(self):
        result = solve(DEMO)
        assert isinstance(result, SatResult)
        assert brute_force_sat(DEMO_LITS := [c.lits for c in DEMO], 4)
        assert all(any(l in result.model for l in c) for c in DEMO_LITS)
        lines = trace_lines(result.state.events)
        assert "learn 1 2 backjump 1" in lines

    def test_empty_problem(self):
        result = solve([])
        assert isinstance(result, SatResult) and result.model == ()

    def test_unit_contradiction(self):
        result = solve([PropClause(1, (1,)), PropClause(2, (-1,))])
        assert isinstance(result, UnsatResult)
        assert result.learned_sequence[-1] == ()

    def test_empty_input_clause(self):
        result = solve([PropClause(1, ())])
        assert isinstance(result, UnsatResult)


class TestForget:
    def _state_with_idle_learned(self):
        state = CdclState.from_clauses(DEMO)
        cid = state.next_clause_id
        state.clauses[cid] = PropClause(cid, (1, 2))
        state.learned_ids.append(cid)
        state.next_clause_id += 1
        return state, cid

    def test_removal(self):
        state, cid = self._state_with_idle_learned()
        forget(state, cid)
        assert state.learned_ids == [] and cid not in state.clauses

    def test_justifying_clause_locked(self):
        state = drive_to_conflict(demo_state())
        learned, level = analyze_conflict(state)
        backjump_and_learn(state, learned, level)
        with pytest.raises(ValueError):
            forget(state, state.learned_ids[0])

    def test_input_clause_not_forgettable(self):
        state = demo_state()
        with pytest.raises(ValueError):
            forget(state, 1)

    def test_relearned_after_forgetting(self):
        # the same conflict on a fresh run of the same problem relearns the clause
        first = solve(DEMO)
        forgotten = first.state.learned[0].lits
        second = solve(DEMO)
        assert forgotten in [c.lits for c in second.state.learned]


class TestIsRedundant:
    ORD = TrailOrdering.from_trail([-1, -2, 3, 4])

    def test_learned_clause_not_redundant(self):
        assert not is_redundant((1, 2), DEMO, self.ORD)

    def test_subset_clause_redundant(self):
        assert is_redundant((1, 2), [PropClause(9, (1,))], self.ORD)

    def test_empty_set(self):
        assert not is_redundant((1, 2), [], self.ORD)

    def test_tautology_redundant_vacuously(self):
        assert is_redundant((1, -1), [], self.ORD)

    def test_atom_cap(self):
        clause = tuple(range(1, 22))
        with pytest.raises(ResourceLimitError):
            is_redundant(clause, [], self.ORD)

    def test_ordering_matters(self):
        # P|Q is implied by unit P, but only when P ranks below the clause
        assert is_redundant((1, 2), [PropClause(5, (1,))], TrailOrdering.from_trail([1, 2]))


def random_3cnf(rng, num_vars, num_clauses):
    clauses = []
    for i in range(num_clauses):
        atoms = rng.sample(range(1, num_vars + 1), 3)
        lits = tuple(a if rng.random() < 0.5 else -a for a in atoms)
        clauses.append(PropClause(i + 1, lits))
    return clauses


def replay_proof(clauses, result: UnsatResult):
    """Independent check of the resolution proof: replays to the empty clause."""
    by_id = {c.id: c.lits for c in clauses}
    for step in result.proof:
        current = by_id[step.conflict_id]
        for atom, reason in step.steps:
            current = resolve_on(current, by_id[reason], atom)
        assert current == step.learned
        if step.learned:
            new_id = max(by_id) + 1
            assert result.state.clauses[new_id].lits == step.learned
            by_id[new_id] = step.learned
    assert result.proof[-1].learned == ()


class TestRandomCorpus:
    def test_oracle_equivalence_and_invariants(self):
        rng = random.Random(20240817)
        checked_learn = 0
        for _ in range(150):
            num_vars = rng.randint(4, 10)
            clauses = random_3cnf(rng, num_vars, rng.randint(num_vars, 36))
            result = solve(clauses, num_vars)
            expected = brute_force_sat([c.lits for c in clauses], num_vars)
            if isinstance(result, SatResult):
                assert expected
                assert all(
                    any(l in result.model for l in c.lits) for c in clauses
                )
            else:
                assert not expected
                replay_proof(clauses, result)
            # non-redundancy of every learned clause, at learning time
            known = {c.id: c for c in clauses}
            for ev in result.state.events:
                if ev[0] != "learn":
                    continue
                lits, _level, cid, ranks, u_before = ev[1], ev[2], ev[3], ev[4], ev[5]
                pool = list(known.values())
                assert not is_redundant(lits, pool, TrailOrdering.from_ranks(ranks))
                known[cid] = PropClause(cid, lits)
                checked_learn += 1
        assert checked_learn > 100

    def test_trail_discipline(self):
        rng = random.Random(7)
        for _ in range(40):
            num_vars = rng.randint(4, 8)
            clauses = random_3cnf(rng, num_vars, rng.randint(num_vars, 24))
            result = solve(clauses, num_vars)
            seen = set()
            level = 0
            for e in result.state.trail:
                assert abs(e.lit) not in seen  # consistent prefixes
                seen.add(abs(e.lit))
                if e.reason is None:
                    assert e.level == level + 1  # decisions increase the level
                level = e.level


def test_clause_status():
    value = {1: True, 2: False}
    assert clause_status((1, 3), value) == ("sat", None)
    assert clause_status((-1, 2), value) == ("false", None)
    assert clause_status((-1, 2, 3), value) == ("unit", 3)
    assert clause_status((3, 4), value) == ("open", None)


def test_heuristic_default():
    state = demo_state()
    assert lowest_index_negative(state) == -1
