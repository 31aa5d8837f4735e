"""Ground trail engine for the Bernays-Schoenfinkel fragment (SCL style).

Clauses are grounded eagerly over a finite constant domain; the trail holds
ground literals justified by a clause id plus grounding substitution.
Propagation picks the smallest propagatable ground literal (lexicographic
constant order, positive before negative on the same atom).  Conflicts above
level 0 are analyzed by the propositional 1UIP engine over the ground
abstraction; a level-0 conflict means the input is unsatisfiable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .cdcl import clause_status, resolve_1uip
from .errors import ResourceLimitError
from .logic import Atom, Clause, Constant, Literal, Substitution, Variable

DEFAULT_INSTANCE_CAP = 1_000_000
DEFAULT_TRAIL_CAP = 1_000_000


@dataclass(frozen=True)
class CounterProblem:
    """The n-bit counter clause family: n + 2 clauses that walk every value.

    A unit start clause, one carry clause per bit position, and a negated
    final value.  Behaves as a clause sequence; slicing drops into plain
    tuples (the satisfiable variant is simply problem[:-1]).
    """

    n: int
    clauses: tuple[Clause, ...]

    def __iter__(self):
        return iter(self.clauses)

    def __len__(self) -> int:
        return len(self.clauses)

    def __getitem__(self, index):
        return self.clauses[index]


def counter_problem(n: int) -> CounterProblem:
    """Generate the n-bit counter family; unsatisfiable, 2**n propagations deep."""
    if n < 1:
        raise ValueError("counter_problem needs n >= 1")
    zero, one = Constant("0"), Constant("1")
    clauses = [Clause(1, (Literal(True, Atom("P", (zero,) * n)),))]
    for i in range(1, n + 1):
        prefix = tuple(Variable(f"x{j}") for j in range(1, n - i + 1))
        neg = Atom("P", prefix + (zero,) + (one,) * (i - 1))
        pos = Atom("P", prefix + (one,) + (zero,) * (i - 1))
        clauses.append(Clause(i + 1, (Literal(False, neg), Literal(True, pos))))
    clauses.append(Clause(n + 2, (Literal(False, Atom("P", (one,) * n)),)))
    return CounterProblem(n, tuple(clauses))


@dataclass(frozen=True, slots=True)
class GroundInstance:
    clause_id: int
    subst: tuple[tuple[str, str], ...]  # (variable name, constant name), sorted
    lits: tuple[int, ...]  # signed 1-based indices into the atom table

    def subst_str(self) -> str:
        return "{" + ",".join(f"{v}->{c}" for v, c in self.subst) + "}"


@dataclass
class GroundProblem:
    """Eagerly grounded problem: Herbrand base, instances, occurrence index."""

    clauses: dict[int, Clause]
    domain: tuple[Constant, ...]
    atoms: list[Atom]  # sorted; propositional atom i is atoms[i-1]
    atom_index: dict[Atom, int]
    instances: list[GroundInstance]
    occurrences: dict[int, list[int]]  # atom -> instance positions

    def add_instance(self, inst: GroundInstance) -> int:
        pos = len(self.instances)
        self.instances.append(inst)
        for lit in set(abs(l) for l in inst.lits):
            self.occurrences.setdefault(lit, []).append(pos)
        return pos


def ground_problem(
    clauses: Iterable[Clause],
    domain: Iterable[Constant] | None = None,
    instance_cap: int = DEFAULT_INSTANCE_CAP,
) -> GroundProblem:
    by_id: dict[int, Clause] = {}
    for c in clauses:
        if c.id in by_id:
            raise ValueError(f"duplicate clause id {c.id}")
        by_id[c.id] = c
    constants = {
        a for c in by_id.values() for l in c.literals for a in l.atom.args if isinstance(a, Constant)
    }
    if domain is not None:
        dom = sorted(set(domain), key=lambda c: c.name)
        missing = constants - set(dom)
        if missing:
            raise ValueError(f"domain misses constants: {sorted(c.name for c in missing)}")
    else:
        dom = sorted(constants, key=lambda c: c.name)
    if not dom:
        raise ValueError("empty Herbrand domain; provide at least one constant")

    # Herbrand base: every predicate/arity pair over the domain, sorted
    signatures = {
        (l.atom.predicate, l.atom.arity) for c in by_id.values() for l in c.literals
    }
    base_size = sum(len(dom) ** arity for _, arity in signatures)
    if base_size > instance_cap:
        raise ResourceLimitError(f"Herbrand base of {base_size} atoms exceeds the cap")
    atoms: list[Atom] = []
    for pred, arity in sorted(signatures):
        for combo in itertools.product(dom, repeat=arity):
            atoms.append(Atom(pred, combo))
    atoms.sort(key=lambda a: (a.predicate, tuple(t.name for t in a.args)))
    atom_index = {a: i + 1 for i, a in enumerate(atoms)}

    total = sum(len(dom) ** len(c.variables()) for c in by_id.values())
    if total > instance_cap:
        raise ResourceLimitError(f"{total} ground instances exceed the cap of {instance_cap}")

    problem = GroundProblem(by_id, tuple(dom), atoms, atom_index, [], {})
    for cid in sorted(by_id):
        clause = by_id[cid]
        variables = clause.variables()
        seen: set[tuple[int, ...]] = set()
        for combo in itertools.product(dom, repeat=len(variables)):
            sub = Substitution(dict(zip(variables, combo)))
            lits = tuple(
                atom_index[sub.apply_atom(l.atom)] * (1 if l.positive else -1)
                for l in clause.literals
            )
            key = tuple(sorted(lits))
            if key in seen:
                continue
            seen.add(key)
            problem.add_instance(
                GroundInstance(
                    cid,
                    tuple(sorted((v.name, c.name) for v, c in zip(variables, combo))),
                    lits,
                )
            )
    return problem


@dataclass
class SclStats:
    propagations: int = 0
    decisions: int = 0
    conflicts: int = 0
    trail: int = 0
    instances: int = 0


@dataclass
class SclState:
    """Five-tuple analog over ground literals, with instance classification caches."""

    problem: GroundProblem
    trail: list[tuple[int, int, int | None]] = field(default_factory=list)  # lit, level, reason pos
    level: int = 0
    conflict: int | None = None  # instance position
    value: dict[int, bool] = field(default_factory=dict)
    learned: list[Clause] = field(default_factory=list)
    stats: SclStats = field(default_factory=SclStats)
    events: list[tuple] = field(default_factory=list)
    units: dict[int, int] = field(default_factory=dict)  # instance pos -> forced lit
    falses: set[int] = field(default_factory=set)

    @classmethod
    def from_problem(cls, problem: GroundProblem) -> "SclState":
        state = cls(problem=problem)
        state.stats.instances = len(problem.instances)
        state.reclassify(range(len(problem.instances)))
        return state

    def reclassify(self, positions: Iterable[int]) -> None:
        for pos in positions:
            st, forced = clause_status(self.problem.instances[pos].lits, self.value)
            if st == "unit":
                self.units[pos] = forced
                self.falses.discard(pos)
            elif st == "false":
                self.falses.add(pos)
                self.units.pop(pos, None)
            else:
                self.units.pop(pos, None)
                self.falses.discard(pos)

    def touched(self, atom: int) -> list[int]:
        return self.problem.occurrences.get(atom, [])

    def assign(self, lit: int, reason: int | None) -> None:
        self.trail.append((lit, self.level, reason))
        self.value[abs(lit)] = lit > 0
        self.reclassify(self.touched(abs(lit)))

    def unassign_to(self, level: int) -> None:
        touched: set[int] = set()
        while self.trail and self.trail[-1][1] > level:
            lit, _, _ = self.trail.pop()
            del self.value[abs(lit)]
            touched.update(self.touched(abs(lit)))
        self.reclassify(touched)

    def literal_str(self, lit: int) -> str:
        atom = self.problem.atoms[abs(lit) - 1]
        return str(atom) if lit > 0 else "-" + str(atom)


def _candidate_key(state: SclState, pos: int, forced: int) -> tuple:
    # smallest ground atom first; positive before negative; then clause id
    inst = state.problem.instances[pos]
    return (abs(forced), forced < 0, inst.clause_id, inst.subst)


def scl_propagate(state: SclState, trail_cap: int = DEFAULT_TRAIL_CAP) -> SclState:
    """Exhaustive ground propagation, smallest ground literal first; eager conflicts."""
    if state.conflict is not None:
        raise ValueError("cannot propagate with a pending conflict")
    while True:
        if state.falses:
            pos = min(
                state.falses,
                key=lambda p: (state.problem.instances[p].clause_id, state.problem.instances[p].subst),
            )
            state.conflict = pos
            state.stats.conflicts += 1
            inst = state.problem.instances[pos]
            state.events.append(("conflict", inst.clause_id, inst.subst_str()))
            break
        if not state.units:
            break
        if len(state.trail) >= trail_cap:
            raise ResourceLimitError(f"trail length exceeds the cap of {trail_cap}")
        pos, forced = min(state.units.items(), key=lambda kv: _candidate_key(state, kv[0], kv[1]))
        inst = state.problem.instances[pos]
        state.assign(forced, pos)
        state.stats.propagations += 1
        state.stats.trail = max(state.stats.trail, len(state.trail))
        state.events.append(("propagate", state.literal_str(forced), inst.clause_id, inst.subst_str()))
    return state


@dataclass
class SclSat:
    model: tuple[Atom, ...]
    stats: SclStats
    state: SclState


@dataclass
class SclUnsat:
    conflict_clause_id: int
    conflict_subst: str
    stats: SclStats
    state: SclState


@dataclass
class SclResourceExceeded:
    stats: SclStats
    state: SclState | None


def _learn_ground(state: SclState, learned_lits: tuple[int, ...]) -> int:
    """Add a learned ground clause (as clause and instance); return instance pos."""
    problem = state.problem
    new_id = max(problem.clauses) + 1
    lits = tuple(
        Literal(l > 0, problem.atoms[abs(l) - 1]) for l in learned_lits
    )
    clause = Clause(new_id, lits)
    problem.clauses[new_id] = clause
    state.learned.append(clause)
    pos = problem.add_instance(GroundInstance(new_id, (), learned_lits))
    state.stats.instances = len(problem.instances)
    state.reclassify([pos])
    return pos


def scl_run(
    clauses: Iterable[Clause],
    domain: Iterable[Constant] | None = None,
    instance_cap: int = DEFAULT_INSTANCE_CAP,
    trail_cap: int = DEFAULT_TRAIL_CAP,
) -> SclSat | SclUnsat | SclResourceExceeded:
    """Propagate/decide until a total Herbrand model or a level-0 conflict.

    Decisions take the smallest undefined ground atom, positive polarity.
    Conflicts above level 0 go through ground 1UIP analysis and backjumping.
    """
    try:
        problem = ground_problem(clauses, domain, instance_cap)
    except ResourceLimitError:
        return SclResourceExceeded(stats=SclStats(), state=None)
    state = SclState.from_problem(problem)
    while True:
        try:
            scl_propagate(state, trail_cap)
        except ResourceLimitError:
            state.events.append(("resource",))
            return SclResourceExceeded(stats=state.stats, state=state)
        if state.conflict is not None:
            inst = problem.instances[state.conflict]
            if state.level == 0:
                state.events.append(("unsat",))
                return SclUnsat(
                    conflict_clause_id=inst.clause_id,
                    conflict_subst=inst.subst_str(),
                    stats=state.stats,
                    state=state,
                )
            learned, blevel, _steps = resolve_1uip(
                state.trail,
                inst.lits,
                state.level,
                lambda pos: problem.instances[pos].lits,
            )
            state.conflict = None
            pos = _learn_ground(state, learned)
            state.unassign_to(blevel)
            state.level = blevel
            asserting = next(l for l in learned if abs(l) not in state.value)
            state.assign(asserting, pos)
            state.events.append(
                ("learn", " | ".join(state.literal_str(l) for l in learned), blevel)
            )
        elif len(state.value) == len(problem.atoms):
            model = tuple(
                problem.atoms[i] for i in range(len(problem.atoms)) if state.value[i + 1]
            )
            state.events.append(("sat",))
            return SclSat(model=model, stats=state.stats, state=state)
        else:
            atom = next(i for i in range(1, len(problem.atoms) + 1) if i not in state.value)
            state.level += 1
            state.assign(atom, None)
            state.stats.decisions += 1
            state.events.append(("decide", state.literal_str(atom), state.level))


def trace_lines(state: SclState) -> list[str]:
    lines = []
    for ev in state.events:
        kind = ev[0]
        if kind == "propagate":
            lines.append(f"propagate {ev[1]} <- clause {ev[2]} σ={ev[3]}")
        elif kind == "conflict":
            lines.append(f"conflict clause {ev[1]} σ={ev[2]}")
        elif kind == "decide":
            lines.append(f"decide {ev[1]} @{ev[2]}")
        elif kind == "learn":
            lines.append(f"learn {ev[1]} backjump {ev[2]}")
    s = state.stats
    lines.append(f"stats propagations={s.propagations} decisions={s.decisions} trail={len(state.trail)}")
    return lines
