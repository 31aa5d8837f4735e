"""Simple-bound propagation for systems of linear integer inequations.

Inequations are kept in the normal form sum(a_i * x_i) + c <= 0 with exact
integer arithmetic throughout.  Bound propagation is round-robin over the
(inequation, variable) pairs in input order and only ever tightens; it can
diverge, which the a-priori solvability box makes detectable and the bounded
exhaustive decision procedure makes complete.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .errors import ResourceLimitError

DEFAULT_BOX_CAP = 10_000_000


@dataclass(frozen=True, slots=True)
class LinIneq:
    id: int
    coeffs: tuple[tuple[str, int], ...]  # (variable, coefficient), input order
    const: int

    def __post_init__(self):
        if not self.coeffs or any(a == 0 for _, a in self.coeffs):
            raise ValueError("an inequation needs at least one nonzero coefficient")
        if len({v for v, _ in self.coeffs}) != len(self.coeffs):
            raise ValueError("duplicate variable in inequation")

    def coeff_of(self, var: str) -> int:
        for v, a in self.coeffs:
            if v == var:
                return a
        return 0

    def __str__(self) -> str:
        parts = []
        if self.const != 0:
            parts.append(str(self.const))
        for v, a in self.coeffs:
            sign = "-" if a < 0 else "+"
            term = f"{abs(a)}*{v}"
            if not parts:
                parts.append(term if a > 0 else f"-{term}")
            else:
                parts.append(f"{sign} {term}")
        if not parts:
            parts.append("0")
        return " ".join(parts) + " <= 0"


@dataclass
class LiaSystem:
    inequations: list[LinIneq]

    @property
    def m(self) -> int:
        return len(self.inequations)

    @property
    def variables(self) -> list[str]:
        seen: dict[str, None] = {}
        for ineq in self.inequations:
            for v, _ in ineq.coeffs:
                seen.setdefault(v)
        return list(seen)

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def a(self) -> int:
        """Maximal absolute coefficient, constants included; at least 1."""
        values = [abs(a) for ineq in self.inequations for _, a in ineq.coeffs]
        values += [abs(ineq.const) for ineq in self.inequations]
        return max(values) if values else 1


@dataclass(frozen=True, slots=True)
class Bound:
    var: str
    lower: bool  # True: var >= value, False: var <= value
    value: int
    level: int = 0
    reason: int | None = None  # inequation id; None marks a decision

    @classmethod
    def make(
        cls, var: str, kind: str, value: int, level: int = 0, reason: int | None = None
    ) -> "Bound":
        """Normalize strict comparisons over the integers: x < c becomes x <= c-1."""
        if kind == "<":
            return cls(var, False, value - 1, level, reason)
        if kind == "<=":
            return cls(var, False, value, level, reason)
        if kind == ">":
            return cls(var, True, value + 1, level, reason)
        if kind == ">=":
            return cls(var, True, value, level, reason)
        raise ValueError(f"unknown bound kind {kind!r}")

    @property
    def kind(self) -> str:
        return ">=" if self.lower else "<="

    def __str__(self) -> str:
        return f"{self.var} {self.kind} {self.value}"


BoundMap = Mapping[tuple[str, bool], Bound]


def implied_bound(ineq: LinIneq, current: BoundMap, var: str) -> Bound | None:
    """Tightest bound on var entailed by the inequation under the current bounds.

    None when a required opposite bound is missing or nothing gets tighter.
    Integer rounding: floor for upper bounds, ceiling for lower bounds.
    """
    a_var = ineq.coeff_of(var)
    if a_var == 0:
        raise ValueError(f"{var} has no coefficient in inequation {ineq.id}")
    s_min = 0
    for v, a in ineq.coeffs:
        if v == var:
            continue
        bound = current.get((v, a > 0))  # a > 0 needs a lower bound, a < 0 an upper
        if bound is None:
            return None
        s_min += a * bound.value
    rhs = -ineq.const - s_min
    if a_var > 0:
        candidate = Bound(var, False, rhs // a_var, reason=ineq.id)
    else:
        candidate = Bound(var, True, -(rhs // -a_var), reason=ineq.id)
    existing = current.get((var, candidate.lower))
    if existing is not None:
        if candidate.lower and candidate.value <= existing.value:
            return None
        if not candidate.lower and candidate.value >= existing.value:
            return None
    return candidate


def _min_value(ineq: LinIneq, current: BoundMap) -> int | None:
    """Minimum of the left side over the bound box; None when unbounded below."""
    total = ineq.const
    for v, a in ineq.coeffs:
        bound = current.get((v, a > 0))
        if bound is None:
            return None
        total += a * bound.value
    return total


def conflicting_inequation(system: LiaSystem, current: BoundMap) -> int | None:
    for ineq in system.inequations:
        m = _min_value(ineq, current)
        if m is not None and m > 0:
            return ineq.id
    return None


@dataclass
class LiaFixpoint:
    bounds: dict[tuple[str, bool], Bound]
    trail: list[Bound]
    steps: int


@dataclass
class LiaConflict:
    inequation_id: int
    bounds: dict[tuple[str, bool], Bound]
    trail: list[Bound]
    steps: int


@dataclass
class LiaDiverged:
    steps: int
    bounds: dict[tuple[str, bool], Bound]
    trail: list[Bound]


def propagate_bounds(
    system: LiaSystem, decisions: Iterable[Bound], max_steps: int
) -> LiaFixpoint | LiaConflict | LiaDiverged:
    """Round-robin bound tightening until fixpoint, conflict, or budget exhaustion."""
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    current: dict[tuple[str, bool], Bound] = {}
    trail: list[Bound] = []
    for b in decisions:
        key = (b.var, b.lower)
        old = current.get(key)
        if old is not None and (
            (b.lower and b.value <= old.value) or (not b.lower and b.value >= old.value)
        ):
            continue
        current[key] = b
        trail.append(b)
    steps = 0
    cid = conflicting_inequation(system, current)
    if cid is not None:
        return LiaConflict(cid, current, trail, steps)
    while True:
        changed = False
        for ineq in system.inequations:
            for v, _a in ineq.coeffs:
                bound = implied_bound(ineq, current, v)
                if bound is None:
                    continue
                if steps >= max_steps:
                    return LiaDiverged(steps, current, trail)
                level = max((b.level for b in trail), default=0)
                bound = replace(bound, level=level)
                current[(bound.var, bound.lower)] = bound
                trail.append(bound)
                steps += 1
                changed = True
                cid = conflicting_inequation(system, current)
                if cid is not None:
                    return LiaConflict(cid, current, trail, steps)
        if not changed:
            return LiaFixpoint(current, trail, steps)


def apriori_bounds(system: LiaSystem) -> dict[str, tuple[int, int]]:
    """The solvability box: every variable within plus/minus n*(m*a)**(2m+1)."""
    m, n, a = system.m, system.n, system.a
    if m < 1:
        raise ValueError("the system must contain at least one inequation")
    radius = n * (m * a) ** (2 * m + 1)
    return {v: (-radius, radius) for v in system.variables}


@dataclass
class LiaSat:
    assignment: dict[str, int]


@dataclass
class LiaUnsat:
    pass


def decide_bounded(system: LiaSystem, box_cap: int = DEFAULT_BOX_CAP) -> LiaSat | LiaUnsat:
    """Exhaustive search over the a-priori box; Unsat there means unsatisfiable.

    Depth-first over the variables with partial-evaluation pruning; raises
    ResourceLimitError when the box volume exceeds the cap.
    """
    box = apriori_bounds(system)
    variables = system.variables
    volume = 1
    for v in variables:
        lo, hi = box[v]
        volume *= hi - lo + 1
        if volume > box_cap:
            raise ResourceLimitError(f"search box exceeds the cap of {box_cap} points")

    assignment: dict[str, int] = {}

    def ineq_min(ineq: LinIneq) -> int:
        total = ineq.const
        for v, a in ineq.coeffs:
            if v in assignment:
                total += a * assignment[v]
            else:
                lo, hi = box[v]
                total += a * lo if a > 0 else a * hi
        return total

    def search(i: int) -> dict[str, int] | None:
        if any(ineq_min(ineq) > 0 for ineq in system.inequations):
            return None
        if i == len(variables):
            return dict(assignment)
        v = variables[i]
        lo, hi = box[v]
        for value in range(lo, hi + 1):
            assignment[v] = value
            found = search(i + 1)
            if found is not None:
                return found
            del assignment[v]
        return None

    found = search(0)
    return LiaSat(found) if found is not None else LiaUnsat()


def trace_lines(result: LiaFixpoint | LiaConflict | LiaDiverged) -> list[str]:
    lines = []
    for b in result.trail:
        source = "decision" if b.reason is None else f"ineq {b.reason}"
        lines.append(f"bound {b.var} {b.kind} {b.value} <- {source}")
    if isinstance(result, LiaFixpoint):
        lines.append("fixpoint")
    elif isinstance(result, LiaConflict):
        lines.append(f"conflict {result.inequation_id}")
    else:
        lines.append(f"diverged steps={result.steps}")
    return lines
