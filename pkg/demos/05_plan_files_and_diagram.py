"""Plan files and DOT diagrams: the exchange formats around the solver.

Run from the repository root:  python3 demos/05_plan_files_and_diagram.py
"""

from emu_roster import (
    SwarmConfig,
    build_matrices,
    generate_instance,
    parse_plan,
    render_dot,
    render_plan,
    solve,
)

instance = generate_instance(n_pairs=3, n_turnback_stations=1, seed=12)
matrices = build_matrices(instance)
result = solve(instance, matrices, SwarmConfig(n_particles=15, k_max=80, seed=9))

# The plan file carries the cycle with running totals plus the rotation
# breakdown; parsing it back recovers the same plan object.
text = render_plan(result.best_plan, instance, matrices)
print("--- plan file ---")
print(text)
assert parse_plan(text) == result.best_plan

# DOT output: solid edges are timed connections, dashed edges maintenance.
# Render with, e.g.:  dot -Tsvg plan.dot -o plan.svg
print("--- DOT ---")
print(render_dot(result.best_plan, instance, matrices))
