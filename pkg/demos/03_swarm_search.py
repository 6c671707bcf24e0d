"""Swarm search over circulation plans, with its convergence trace.

Run from the repository root:  python3 demos/03_swarm_search.py
"""

from emu_roster import SwarmConfig, build_matrices, generate_instance, plan_summary, solve

instance = generate_instance(n_pairs=10, n_turnback_stations=3, seed=31)
matrices = build_matrices(instance)

# Positions are train-id vectors; the inertia-weighted updates propose new
# assignments that the constructive step logic legalizes. Identical seeds
# give identical runs, bit for bit.
result = solve(instance, matrices, SwarmConfig(n_particles=20, k_max=120, seed=5))

print(f"best fitness {result.best_fitness:.3f} after {len(result.trace) - 1} iterations "
      f"({result.restarts} construction restarts, {result.wall_time:.2f}s)")

summary = plan_summary(result.best_plan, instance, matrices)
print(f"rotations: {summary.n_rotations}, total waiting: {summary.total_connection_time} min")
print(f"rotation mileage range: {summary.min_rotation_mileage:.0f}"
      f" .. {summary.max_rotation_mileage:.0f} km")

print("\niter  global best  feasible share")
for point in result.trace[:: max(1, len(result.trace) // 12)]:
    print(f"{point.iteration:4d}  {point.global_best_fitness:11.3f}"
          f"  {point.feasible_fraction:14.2f}")
