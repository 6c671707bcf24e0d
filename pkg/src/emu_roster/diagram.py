"""DOT rendering of a circulation plan's connection network."""

from __future__ import annotations

from .connection import ConnectionMatrices
from .plan import CirculationPlan, InvalidPlanError, validate
from .timetable import TimetableInstance


def render_dot(
    plan: CirculationPlan, instance: TimetableInstance, matrices: ConnectionMatrices
) -> str:
    """One node per train, one edge per cycle arc.

    Ordinary connections are solid edges labelled with the waiting minutes;
    maintenance arcs are dashed. Node order follows train ids, edge order the
    cycle, so output is deterministic.
    """
    report = validate(plan, instance, matrices)
    if not report.ok:
        raise InvalidPlanError(
            f"cannot draw an invalid plan: {sorted(report.tags())}"
        )
    lines = ["digraph circulation {", "  rankdir=LR;"]
    for t in instance.trains:
        lines.append(f'  t{t.id} [label="{t.id}: {t.dep_station}→{t.arr_station}"];')
    n = plan.n
    for d in range(n):
        i, j = plan.order[d], plan.order[(d + 1) % n]
        if plan.maint_after[d]:
            lines.append(f"  t{i} -> t{j} [style=dashed];")
        else:
            lines.append(f'  t{i} -> t{j} [label="{matrices.time(i - 1, j - 1)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
