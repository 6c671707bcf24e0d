"""Cross-check the heuristic against exhaustive enumeration on small cases.

Run from the repository root:  python3 demos/04_exact_comparison.py
"""

from emu_roster import SwarmConfig, brute_force, build_matrices, compare, generate_instance, solve

print("seed  n  oracle opt   swarm best   gap     enumerated  feasible")
for seed in (3, 8, 15, 21, 34):
    instance = generate_instance(n_pairs=2 + seed % 3, n_turnback_stations=2, seed=seed)
    matrices = build_matrices(instance)

    exact = brute_force(instance, matrices)
    heuristic = solve(instance, matrices, SwarmConfig(n_particles=20, k_max=150, seed=seed))
    report = compare(instance, matrices, exact, heuristic)

    print(f"{seed:4d} {instance.n:2d}  {report.oracle_objective:10.3f}"
          f"  {report.heuristic_objective:11.3f}  {report.relative_gap:6.2%}"
          f"  {exact.plans_enumerated:10d}  {exact.feasible_count:8d}")
