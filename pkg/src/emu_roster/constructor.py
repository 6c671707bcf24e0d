"""Randomized construction of feasible circulation cycles.

Builds the single closed loop position by position: start from a train
leaving the depot, keep chaining connectable trains, and whenever the chain
returns to the depot decide (randomly, or compulsorily when a cycle limit
would be hit) whether to cut a maintenance arc there. Dead ends restart the
whole attempt with fresh randomness.

The same stepping engine also serves the swarm decoder: a caller may supply
a proposed train per position, which is taken whenever it is legal at that
step and repaired by the normal step logic otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .connection import ConnectionMatrices
from .plan import AccumState, CirculationPlan
from .timetable import TimetableInstance


class InfeasibleError(RuntimeError):
    """No circulation plan can exist (or none was found within the restart budget)."""


class DeadEnd(Exception):
    """Internal: the current attempt painted itself into a corner."""


@dataclass
class ConstructorState:
    """Snapshot of one construction attempt's bookkeeping."""

    remaining: set[int]
    depot_departures: set[int]  # remaining trains that depart the depot station
    position: int
    accum: AccumState
    partial: list[int] = field(default_factory=list)
    maint_flags: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.depot_departures <= self.remaining:
            raise ValueError("depot departures must be a subset of the remaining trains")


def _candidates(
    prev_id: int,
    acc_l: float,
    acc_t: float,
    remaining: set[int],
    arr_at_depot: list[bool],
    mileage: list[float],
    travel: list[int],
    conn_row: list[int | None],
    max_l: float,
    max_t: float,
) -> tuple[list[int], list[int]]:
    away: list[int] = []
    to_depot: list[int] = []
    for j in sorted(remaining):
        conn = conn_row[j - 1]
        if conn is None:
            continue
        if arr_at_depot[j]:
            to_depot.append(j)
        elif acc_l + mileage[j] <= max_l and acc_t + conn + travel[j] <= max_t:
            away.append(j)
    return away, to_depot


def step_candidates(
    state: ConstructorState, instance: TimetableInstance, matrices: ConnectionMatrices
) -> tuple[list[int], list[int]]:
    """Candidate successors when the chain sits away from the depot.

    First list: connectable trains that keep the EMU away from the depot and
    respect both cycle limits after the connection. Second list: connectable
    trains heading to the depot, deliberately unfiltered; the depot step
    afterwards can force maintenance.
    """
    depot = instance.maint_stations
    arr_at_depot = [False] + [t.arr_station in depot for t in instance.trains]
    mileage = [0.0] + [t.mileage for t in instance.trains]
    travel = [0] + [t.travel_time for t in instance.trains]
    prev = state.partial[-1]
    return _candidates(
        prev,
        state.accum.mileage,
        state.accum.time,
        state.remaining,
        arr_at_depot,
        mileage,
        travel,
        matrices.conn_rows()[prev - 1],
        instance.params.max_mileage,
        instance.params.max_time,
    )


def _pick(candidates: list[int], rng: np.random.Generator) -> int:
    return candidates[int(rng.random() * len(candidates))]


def build_cycle(
    instance: TimetableInstance,
    matrices: ConnectionMatrices,
    rng: np.random.Generator,
    maint_prob: float = 0.5,
    proposal=None,
    overrun_ok: bool = False,
) -> CirculationPlan:
    """One construction attempt; raises DeadEnd when it cannot continue.

    With a proposal (one train id per position), each proposed train is taken
    when it is unassigned and legal under the current step's rules; illegal
    proposals fall back to the normal random step. overrun_ok additionally
    lets a *proposed* depot-bound train through on a mileage overrun (the
    relaxed, penalty-scored regime); time overruns are never admitted.
    """
    n = instance.n
    params = instance.params
    max_l, max_t = params.max_mileage, params.max_time
    depot = instance.maint_stations

    mileage = [0.0] + [t.mileage for t in instance.trains]
    travel = [0] + [t.travel_time for t in instance.trains]
    arr_at_depot = [False] + [t.arr_station in depot for t in instance.trains]
    conn_rows = matrices.conn_rows()

    for t in instance.trains:
        if t.mileage > max_l or t.travel_time > max_t:
            raise InfeasibleError(
                f"train {t.id} alone exceeds a maintenance cycle allowance; no plan exists"
            )

    remaining = set(range(1, n + 1))
    depot_departures = {t.id for t in instance.trains if t.dep_station in depot}
    if not depot_departures:
        raise InfeasibleError("no train departs the depot station; no plan exists")

    order: list[int] = []
    flags: list[int] = []

    first = None
    if proposal is not None and int(proposal[0]) in depot_departures:
        first = int(proposal[0])
    if first is None:
        first = _pick(sorted(depot_departures), rng)
    order.append(first)
    flags.append(0)
    remaining.discard(first)
    depot_departures.discard(first)
    acc_l, acc_t = mileage[first], travel[first]

    while remaining:
        d = len(order) + 1
        prev = order[-1]
        conn_row = conn_rows[prev - 1]
        proposed = int(proposal[d - 1]) if proposal is not None else None

        if arr_at_depot[prev]:
            if not depot_departures:
                raise DeadEnd(f"no depot departure left at position {d}")
            if proposed is not None and proposed in depot_departures:
                j = proposed
            else:
                j = _pick(sorted(depot_departures), rng)
            conn = conn_row[j - 1]
            fits = acc_l + mileage[j] <= max_l and acc_t + conn + travel[j] <= max_t
            maintain = 1 if not fits or rng.random() < maint_prob else 0
            if maintain:
                acc_l, acc_t = mileage[j], travel[j]
            else:
                acc_l += mileage[j]
                acc_t += conn + travel[j]
            flags[-1] = maintain
        else:
            j = None
            if proposed is not None and proposed in remaining:
                conn = conn_row[proposed - 1]
                if conn is not None:
                    new_l = acc_l + mileage[proposed]
                    new_t = acc_t + conn + travel[proposed]
                    if arr_at_depot[proposed]:
                        if new_t <= max_t and (overrun_ok or new_l <= max_l):
                            j = proposed
                    elif new_l <= max_l and new_t <= max_t:
                        j = proposed
            if j is None:
                away, to_depot = _candidates(
                    prev, acc_l, acc_t, remaining, arr_at_depot,
                    mileage, travel, conn_row, max_l, max_t,
                )
                if away:
                    j = _pick(away, rng)
                elif to_depot:
                    # the depot-bound fallback may run the windows tight (the
                    # following depot step can force maintenance), but a train
                    # that breaks one outright is unusable
                    usable = [
                        j2 for j2 in to_depot
                        if acc_l + mileage[j2] <= max_l
                        and acc_t + conn_row[j2 - 1] + travel[j2] <= max_t
                    ]
                    if not usable:
                        raise DeadEnd(f"every depot-bound successor overruns at position {d}")
                    j = _pick(usable, rng)
                else:
                    raise DeadEnd(f"no successor from train {prev} at position {d}")
            conn = conn_row[j - 1]
            acc_l += mileage[j]
            acc_t += conn + travel[j]
            flags[-1] = 0

        order.append(j)
        flags.append(0)
        remaining.discard(j)
        depot_departures.discard(j)

    if not arr_at_depot[order[-1]]:
        # cannot happen on a flow-balanced instance; guard for odd inputs
        raise DeadEnd("cycle does not end at the depot")
    flags[-1] = 1
    return CirculationPlan(order=tuple(order), maint_after=tuple(flags))


def construct_with_stats(
    instance: TimetableInstance,
    matrices: ConnectionMatrices,
    rng: np.random.Generator,
    max_restarts: int = 100,
    maint_prob: float = 0.5,
) -> tuple[CirculationPlan, int]:
    """Run build_cycle until it succeeds; returns (plan, failed attempts)."""
    failed = 0
    while True:
        try:
            return build_cycle(instance, matrices, rng, maint_prob), failed
        except DeadEnd:
            failed += 1
            if failed > max_restarts:
                raise InfeasibleError(
                    f"construction dead-ended in {failed} consecutive attempts; on large "
                    f"or tightly timed instances a higher maint_prob usually helps"
                ) from None


def construct(
    instance: TimetableInstance,
    matrices: ConnectionMatrices,
    rng: np.random.Generator,
    max_restarts: int = 100,
    maint_prob: float = 0.5,
) -> CirculationPlan:
    """Build a feasible circulation plan, restarting on dead ends."""
    plan, _ = construct_with_stats(instance, matrices, rng, max_restarts, maint_prob)
    return plan
