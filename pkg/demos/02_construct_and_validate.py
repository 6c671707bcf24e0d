"""Random constructive plans: build, decompose into rotations, validate.

Run from the repository root:  python3 demos/02_construct_and_validate.py
"""

import numpy as np

from emu_roster import (
    CirculationPlan,
    build_matrices,
    construct,
    decode_rotations,
    generate_instance,
    objective_value,
    validate,
)

instance = generate_instance(n_pairs=4, n_turnback_stations=2, seed=7)
matrices = build_matrices(instance)
rng = np.random.default_rng(1)

# The constructor chains connectable trains from the depot outward and cuts
# maintenance arcs at depot returns; every returned plan is fully feasible.
for attempt in range(3):
    plan = construct(instance, matrices, rng)
    rotations = decode_rotations(plan, instance, matrices)
    print(f"plan {attempt}: order {plan.order}")
    for i, r in enumerate(rotations, start=1):
        print(f"  rotation {i}: trains {r.trains}, {r.total_mileage:.0f} km, {r.total_time} min")
    print(f"  objective {objective_value(plan, instance, matrices):.2f}")

# The validator reports violations as data, one line per broken constraint.
broken = CirculationPlan(order=plan.order, maint_after=(1,) * instance.n)
report = validate(broken, instance, matrices)
print(f"\nforcing maintenance after every train -> {len(report.violations)} violations:")
for v in report.violations:
    print(" ", v)
