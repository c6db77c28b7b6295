"""The population-based solver, one phase at a time.

Every trial plan starts as seeded growth: centers claim their units, then
territories absorb random unassigned frontier units until the map is covered.
Growth ignores quality, so two improvement operators carry the search: flip
moves (reassign one boundary unit, keep if better) and guided swaps against a
fitter plan from the population, with repair restoring contiguity.
"""

import numpy as np

from districter import (MemeticConfig, SearchConfig, balance_score,
                        compactness_score, evaluate, generate_grid_instance,
                        guided_growth, init_population,
                        local_improvement_pass, objective_value, recombine,
                        seed_plan, spatial_run)

instance = generate_grid_instance(10, 10, 4, seed=42,
                                  balance_profile="clustered")
rng = np.random.default_rng(0)

# phase 1: seeding + guided growth
partial = seed_plan(instance)
print("seeded units:", int((partial >= 0).sum()), "of", instance.node_count)
plan = guided_growth(partial, instance, rng)
print("grown plan J =", round(objective_value(plan, instance), 4))

# phase 2: one accepted flip per member per pass
population = init_population(instance, 6, np.random.default_rng(1))
config = SearchConfig(worse_accept_prob=0.01)
for step in range(3):
    outcome = local_improvement_pass(population, instance, config,
                                     np.random.default_rng(2 + step))
    population = outcome.population
    js = [objective_value(p, instance) for p in population.members]
    print(f"pass {step + 1}: {outcome.accepted_flips} flips accepted, "
          f"best J {min(js):.4f}, mean J {np.mean(js):.4f}")

# phase 3: recombination pulls a plan toward a fitter mate
child, move = recombine(population.members[0], population.members[1],
                        instance, np.random.default_rng(9))
if move:
    print(f"swap in territory {move.territory}: unit {move.incoming} in, "
          f"unit {move.outgoing} out")

# the full loop alternates both phases and keeps the best plan ever seen
result = spatial_run(instance,
                     MemeticConfig(population_size=10, iterations=80),
                     np.random.default_rng(3))
print("\nfull run:", len(result.trace), "iterations,",
      result.accepted_flips, "flips,",
      result.accepted_recombinations, "recombinations")
best = result.best_plan
print("best J =", round(result.best_j, 4),
      "| balance", round(balance_score(best, instance), 2),
      "| compactness", round(compactness_score(best, instance), 2))
sizes = best.sizes()
report = evaluate(best, instance)
for i, row in enumerate(report.per_territory):
    print(f"  territory {i}: {sizes[i]:3d} units, "
          f"{row['population']:6.0f}/{row['capacity']:6.0f} students, "
          f"shape score {row['polsby_popper']:.3f}")
