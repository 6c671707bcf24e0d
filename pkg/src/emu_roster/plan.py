"""Circulation plans as a single closed loop over all trains.

A plan is an ordering of every train into one cycle plus a maintenance flag
per cycle arc. Cutting the cycle at maintenance arcs yields the rotations
(one EMU's work between two depot visits). The last position always carries
a maintenance flag, so the loop closes through the depot and position 1
starts a fresh rotation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .connection import ConnectionMatrices
from .timetable import TimetableInstance, Train


class InvalidPlanError(ValueError):
    """Operation that requires a constraint-satisfying plan got a broken one."""


class PlanFormatError(ValueError):
    """Malformed plan file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class CirculationPlan:
    """order[d] is the train at cycle position d+1; maint_after[d] flags the
    arc leaving that position as a maintenance arc (the arc from the last
    position wraps back to the first).

    The class itself accepts any content; validate() reports what is wrong
    with a structurally broken plan instead of refusing to build it.
    """

    order: tuple[int, ...]
    maint_after: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.order)

    @property
    def n_rotations(self) -> int:
        return sum(self.maint_after)


@dataclass(frozen=True)
class AccumState:
    """Mileage (km) and elapsed time (min) racked up since the last maintenance."""

    mileage: float
    time: int


def accumulate(
    prev: AccumState, conn_minutes: int, next_train: Train, maintenance_before: int
) -> AccumState:
    """Advance the running totals across one arc onto next_train.

    A maintenance arc resets both counters to the new train's own mileage and
    travel time; an ordinary connection adds mileage, waiting time, and travel
    time on top of the previous state.
    """
    if maintenance_before:
        return AccumState(next_train.mileage, next_train.travel_time)
    return AccumState(
        prev.mileage + next_train.mileage,
        prev.time + conn_minutes + next_train.travel_time,
    )


@dataclass(frozen=True)
class Rotation:
    """One EMU circulation: the trains served between two maintenances."""

    trains: tuple[int, ...]
    total_mileage: float
    total_time: int


def decode_rotations(
    plan: CirculationPlan, instance: TimetableInstance, matrices: ConnectionMatrices
) -> list[Rotation]:
    """Cut the cycle at maintenance arcs and total up each piece.

    Requires the plan to be structurally sound (permutation, closing
    maintenance flag set, all internal arcs connectable); raises
    InvalidPlanError otherwise. Concatenating the result reproduces `order`.
    """
    if not plan.maint_after or plan.maint_after[-1] != 1:
        raise InvalidPlanError("cycle does not close with a maintenance arc")
    if len(plan.order) != len(plan.maint_after):
        raise InvalidPlanError("order and maint_after lengths differ")
    for tid in plan.order:
        if not 1 <= tid <= instance.n:
            raise InvalidPlanError(f"train id {tid!r} outside 1..{instance.n}")

    conn_rows = matrices.conn_rows()
    trains = instance.trains
    rotations: list[Rotation] = []
    segment: list[int] = []
    acc_l, acc_t = 0.0, 0
    for d, tid in enumerate(plan.order):
        train = trains[tid - 1]
        if not segment:
            acc_l, acc_t = train.mileage, train.travel_time
        else:
            conn = conn_rows[segment[-1] - 1][tid - 1]
            if conn is None:
                raise InvalidPlanError(
                    f"trains {segment[-1]} and {tid} cannot connect (position {d + 1})"
                )
            acc_l += train.mileage
            acc_t += conn + train.travel_time
        segment.append(tid)
        if plan.maint_after[d]:
            rotations.append(Rotation(tuple(segment), acc_l, acc_t))
            segment = []
    return rotations


@dataclass(frozen=True)
class Violation:
    tag: str
    message: str
    position: int | None = None

    def __str__(self) -> str:
        return f"{self.tag} {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def tags(self) -> set[str]:
        return {v.tag for v in self.violations}


def validate(
    plan: CirculationPlan, instance: TimetableInstance, matrices: ConnectionMatrices
) -> ValidationReport:
    """Check every constraint family; collect all violations, never raise.

    Families: SHAPE (vector shape/domain, closing flag), EQ8/EQ9 (each train
    used exactly once), CYCLE (induced successor graph is one n-cycle), CONN
    (ordinary arcs connectable), EQ10 (maintenance only at eligible arcs),
    EQ11 / EQ12 (mileage / time since maintenance within the allowance at
    every position). Accumulation past a CONN violation treats the unknown
    waiting time as zero so later positions still get checked.
    """
    v: list[Violation] = []
    n = instance.n

    if len(plan.order) != n:
        v.append(Violation("SHAPE", f"plan covers {len(plan.order)} positions, instance has {n} trains"))
    if len(plan.maint_after) != len(plan.order):
        v.append(Violation("SHAPE", "order and maint_after lengths differ"))
        return ValidationReport(tuple(v))
    for d, flag in enumerate(plan.maint_after):
        if flag not in (0, 1):
            v.append(Violation("SHAPE", f"maintenance flag {flag!r} is not 0/1", d + 1))
    bad_ids = [t for t in plan.order if not (isinstance(t, int) and 1 <= t <= n)]
    if bad_ids:
        v.append(Violation("SHAPE", f"train ids outside 1..{n}: {sorted(set(bad_ids))}"))
    if plan.maint_after and plan.maint_after[-1] != 1:
        v.append(Violation("SHAPE", "last position must be followed by a maintenance arc"))

    known = [t for t in plan.order if isinstance(t, int) and 1 <= t <= n]
    counts: dict[int, int] = {}
    for t in known:
        counts[t] = counts.get(t, 0) + 1
    dups = sorted(t for t, c in counts.items() if c > 1)
    missing = sorted(set(range(1, n + 1)) - set(counts))
    if dups:
        v.append(Violation("EQ8/EQ9", f"trains used more than once: {dups}"))
    if missing and len(plan.order) == n:
        v.append(Violation("EQ8/EQ9", f"trains never used: {missing}"))

    # single-cycle check on the induced successor graph
    if not dups and not missing and len(plan.order) == n and not bad_ids:
        succ = {plan.order[d]: plan.order[(d + 1) % n] for d in range(n)}
        seen, cur = 0, plan.order[0]
        while seen < n:
            cur = succ[cur]
            seen += 1
            if cur == plan.order[0]:
                break
        if seen != n:
            v.append(Violation("CYCLE", f"successor graph closes after {seen} arcs, expected {n}"))

    if len(plan.order) != n or bad_ids:
        return ValidationReport(tuple(v))

    max_l, max_t = instance.params.max_mileage, instance.params.max_time
    state = AccumState(0.0, 0)
    for d, tid in enumerate(plan.order):
        train = instance.train(tid)
        maint_before = 1 if d == 0 else plan.maint_after[d - 1]
        if maint_before:
            state = accumulate(state, 0, train, 1)
        else:
            prev = plan.order[d - 1]
            conn = matrices.conn_time[prev - 1, tid - 1]
            if conn != conn:  # NaN: not connectable
                v.append(
                    Violation("CONN", f"trains {prev} and {tid} cannot connect", d + 1)
                )
                conn = 0.0
            state = accumulate(state, int(conn), train, 0)
        if state.mileage > max_l:
            v.append(
                Violation("EQ11", f"{state.mileage:.1f} km since maintenance exceeds {max_l:.1f}", d + 1)
            )
        if state.time > max_t:
            v.append(
                Violation("EQ12", f"{state.time} min since maintenance exceeds {max_t:.0f}", d + 1)
            )
        if plan.maint_after[d]:
            nxt = plan.order[(d + 1) % n]
            if matrices.theta[tid - 1, nxt - 1] != 1:
                v.append(
                    Violation("EQ10", f"maintenance between {tid} and {nxt} is not at the depot", d + 1)
                )
    return ValidationReport(tuple(v))


def _connection_total(
    plan: CirculationPlan, matrices: ConnectionMatrices
) -> int:
    """Sum of waiting minutes over ordinary (non-maintenance) arcs."""
    n = plan.n
    conn_rows = matrices.conn_rows()
    total = 0
    for d in range(n):
        if plan.maint_after[d]:
            continue
        i, j = plan.order[d], plan.order[(d + 1) % n]
        if not (1 <= i <= matrices.n and 1 <= j <= matrices.n):
            raise InvalidPlanError(f"train id outside 1..{matrices.n} on arc {i} -> {j}")
        conn = conn_rows[i - 1][j - 1]
        if conn is None:
            raise InvalidPlanError(f"trains {i} and {j} cannot connect")
        total += conn
    return total


def objective_value(
    plan: CirculationPlan, instance: TimetableInstance, matrices: ConnectionMatrices
) -> float:
    """Weighted sum of total waiting time and per-rotation mileage slack.

    The slack term rewards rotations that run close to the mileage allowance.
    Only defined for fully valid plans; raises InvalidPlanError otherwise.
    Shares its arithmetic with fitness_value, so the two agree bit for bit on
    any valid plan (where the penalty branch is unreachable).
    """
    report = validate(plan, instance, matrices)
    if not report.ok:
        raise InvalidPlanError(
            f"plan violates {len(report.violations)} constraint(s): {sorted(report.tags())}"
        )
    return fitness_from_parts(
        _connection_total(plan, matrices),
        decode_rotations(plan, instance, matrices),
        instance.params,
    )


def fitness_from_parts(connection_total: int, rotations, params) -> float:
    """Penalized score from precomputed pieces (see fitness_value)."""
    total = float(params.omega1 * connection_total)
    for r in rotations:
        if r.total_mileage > params.max_mileage:
            total += params.omega2 * params.beta * (r.total_mileage - params.max_mileage)
        else:
            total += params.omega2 * (params.max_mileage - r.total_mileage)
    return total


def fitness_value(
    plan: CirculationPlan, instance: TimetableInstance, matrices: ConnectionMatrices
) -> float:
    """Objective with the mileage bound relaxed into a penalty.

    Rotations within the allowance contribute their slack; rotations over it
    contribute beta times the overrun instead. Equals objective_value exactly
    whenever every rotation respects the allowance. Requires structural
    soundness only (the mileage bound may be broken).
    """
    return fitness_from_parts(
        _connection_total(plan, matrices),
        decode_rotations(plan, instance, matrices),
        instance.params,
    )


@dataclass(frozen=True)
class PlanSummary:
    n_rotations: int
    total_connection_time: int
    min_rotation_mileage: float
    max_rotation_mileage: float
    min_rotation_time: int
    max_rotation_time: int
    fitness: float
    objective: float | None  # None when the plan fails validation


def plan_summary(
    plan: CirculationPlan, instance: TimetableInstance, matrices: ConnectionMatrices
) -> PlanSummary:
    rotations = decode_rotations(plan, instance, matrices)
    report = validate(plan, instance, matrices)
    return PlanSummary(
        n_rotations=len(rotations),
        total_connection_time=_connection_total(plan, matrices),
        min_rotation_mileage=min(r.total_mileage for r in rotations),
        max_rotation_mileage=max(r.total_mileage for r in rotations),
        min_rotation_time=min(r.total_time for r in rotations),
        max_rotation_time=max(r.total_time for r in rotations),
        fitness=fitness_value(plan, instance, matrices),
        objective=objective_value(plan, instance, matrices) if report.ok else None,
    )


def render_plan(
    plan: CirculationPlan, instance: TimetableInstance, matrices: ConnectionMatrices
) -> str:
    """Plan file form: one line per position with running totals, then the
    rotation breakdown. Deterministic formatting (km to 0.1, minutes whole).
    """
    rotations = decode_rotations(plan, instance, matrices)
    lines = ["cycle"]
    state = AccumState(0.0, 0)
    for d, tid in enumerate(plan.order):
        train = instance.train(tid)
        maint_before = 1 if d == 0 else plan.maint_after[d - 1]
        conn = 0 if maint_before else matrices.time(plan.order[d - 1] - 1, tid - 1)
        state = accumulate(state, conn, train, maint_before)
        lines.append(
            f"pos {d + 1} train {tid} maint {plan.maint_after[d]} "
            f"accum_km {state.mileage:.1f} accum_min {state.time}"
        )
    lines.append(f"rotations {len(rotations)}")
    for r, rot in enumerate(rotations, start=1):
        ids = ",".join(str(t) for t in rot.trains)
        lines.append(f"rotation {r}: {ids} km {rot.total_mileage:.1f} min {rot.total_time}")
    return "\n".join(lines) + "\n"


def parse_plan(text: str) -> CirculationPlan:
    """Read a plan file back; only order and maintenance flags are taken,
    running totals and the rotation section are derived output.
    """
    entries: dict[int, tuple[int, int]] = {}
    saw_cycle = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "cycle":
            saw_cycle = True
            continue
        if tokens[0] in ("rotations", "rotation"):
            continue
        if tokens[0] != "pos":
            raise PlanFormatError(f"unknown directive {tokens[0]!r}", lineno)
        if len(tokens) < 6 or tokens[2] != "train" or tokens[4] != "maint":
            raise PlanFormatError("expected: pos <d> train <id> maint <0|1> ...", lineno)
        try:
            d, tid, flag = int(tokens[1]), int(tokens[3]), int(tokens[5])
        except ValueError:
            raise PlanFormatError("position, train id and flag must be integers", lineno) from None
        if flag not in (0, 1):
            raise PlanFormatError(f"maintenance flag must be 0 or 1, got {flag}", lineno)
        if d in entries:
            raise PlanFormatError(f"duplicate position {d}", lineno)
        entries[d] = (tid, flag)

    if not saw_cycle:
        raise PlanFormatError("missing 'cycle' header")
    if not entries:
        raise PlanFormatError("no positions")
    if sorted(entries) != list(range(1, len(entries) + 1)):
        raise PlanFormatError(f"positions must form 1..{len(entries)}")
    order = tuple(entries[d][0] for d in sorted(entries))
    maint = tuple(entries[d][1] for d in sorted(entries))
    return CirculationPlan(order=order, maint_after=maint)
