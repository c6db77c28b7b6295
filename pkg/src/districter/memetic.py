"""Spatially-aware recombination, the repair operator and the full
population-based solver loop.

Recombination steers one plan toward a fitter mate by swapping a single node
into and out of a shared territory.  The swap may break contiguity; repair
then re-feasibilizes the plan, which can land it several flips away from
the parent: the controlled exploration that pure local search lacks.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, InternalError
from .graph import Plan, connected_components, is_connected
from .growth import Population, init_population
from .local_search import SearchConfig, _assert_hard_feasible, \
    local_improvement_pass
from .objective import fitness, objective_terms


@dataclass
class MemeticConfig:
    """Solver-level settings; per-move behavior lives in ``search``."""

    population_size: int = 10
    iterations: int = 1000
    search: SearchConfig = field(default_factory=SearchConfig)
    local_search: bool = True       # ablation switches
    recombination: bool = True

    def __post_init__(self):
        if self.population_size < 1 or self.iterations < 0:
            raise ConfigError("population size must be >= 1 and iterations >= 0")
        if self.recombination and self.population_size < 2:
            raise ConfigError("recombination needs a population of at least 2")


class SwapMove(NamedTuple):
    territory: int
    incoming: int
    outgoing: int


def select_mate(fitnesses, rng: np.random.Generator) -> int:
    """Roulette-wheel index proportional to fitness.  The selected mate may
    equal the child itself, in which case recombination degenerates to a
    no-op rather than distorting the selection pressure."""
    weights = np.asarray(fitnesses, dtype=float)
    if len(weights) < 2:
        raise ConfigError("mate selection needs at least two members")
    return int(rng.choice(len(weights), p=weights / weights.sum()))


def recombine(child_from: Plan, guide: Plan, instance,
              rng: np.random.Generator) -> tuple[Plan, SwapMove | None]:
    """Swap one node into and one out of a territory the child shares with
    the guide, repairing any broken territory afterward.

    Eligible territories differ between the two plans in both directions
    (they always share at least the center).  The incoming node comes from
    the guide's version and must touch the child's; the outgoing node leaves
    the child's version and is adopted by an adjacent territory so the
    assignment stays total.  Returns the new hard-feasible plan and the swap,
    or ``(child unchanged, None)`` when no applicable swap exists.
    """
    if not np.array_equal(child_from.centers, guide.centers):
        raise ConfigError("parents must share the same centers")
    graph = instance.graph
    a_child = child_from.assignment
    a_guide = guide.assignment
    k = child_from.territory_count

    both = a_child == a_guide
    inter = np.bincount(a_child[both], minlength=k)
    size_child = np.bincount(a_child, minlength=k)
    size_guide = np.bincount(a_guide, minlength=k)
    eligible = np.flatnonzero((inter > 0)
                              & (inter < np.minimum(size_child, size_guide)))
    if eligible.size == 0:
        return child_from, None

    eu, ev = graph.edges[:, 0], graph.edges[:, 1]
    for t in rng.permutation(eligible):
        t = int(t)
        in_child = a_child == t
        in_guide = a_guide == t
        # guide-only nodes touching the child's territory
        touches_child = _touching(eu, ev, in_guide & ~in_child, in_child)
        # child-only nodes touching the guide's territory
        touches_guide = _touching(eu, ev, in_child & ~in_guide, in_guide)
        # centers never move (guaranteed for hard-feasible parents)
        touches_child = touches_child[~np.isin(touches_child, child_from.centers)]
        touches_guide = touches_guide[~np.isin(touches_guide, child_from.centers)]
        if not touches_child.size or not touches_guide.size:
            continue
        incoming = int(rng.choice(touches_child))
        a_new = a_child.copy()
        a_new[incoming] = t
        outgoing = None
        for u in rng.permutation(touches_guide):
            u = int(u)
            destinations = np.unique(a_new[graph.neighbors(u)])
            destinations = destinations[destinations != t]
            if destinations.size:
                outgoing = u
                a_new[u] = int(rng.choice(destinations))
                break
        if outgoing is None:
            continue
        plan = Plan(a_new, child_from.centers.copy())
        touched = {t, int(a_child[incoming]), int(a_new[outgoing])}
        if any(not is_connected(graph, plan.territory(i)) for i in touched):
            plan = repair(plan, instance, rng)
        return plan, SwapMove(t, incoming, outgoing)
    return child_from, None


def _touching(eu, ev, source_mask, target_mask) -> np.ndarray:
    """Nodes in ``source_mask`` adjacent to at least one ``target_mask`` node."""
    out = np.concatenate([eu[source_mask[eu] & target_mask[ev]],
                          ev[source_mask[ev] & target_mask[eu]]])
    return np.unique(out)


def repair(plan: Plan, instance, rng: np.random.Generator) -> Plan:
    """Make every territory connected again.

    Each disconnected territory keeps the component containing its center;
    the other components are dismantled node by node from their frontier
    inward, each node joining a uniformly chosen adjacent territory (which
    stays connected, since the node is adjacent to it).  Repairing a feasible
    plan returns it unchanged.
    """
    graph = instance.graph
    a = plan.assignment.copy()
    changed = False
    for t in range(plan.territory_count):
        members = np.flatnonzero(a == t)
        if members.size == 0:
            raise InternalError(f"territory {t} lost its center")
        comps = connected_components(graph, members)
        if len(comps) == 1:
            continue
        changed = True
        center = int(plan.centers[t])
        for comp in comps:
            if center in comp:
                continue
            remaining = set(int(v) for v in comp)
            while remaining:
                frontier = sorted(
                    v for v in remaining
                    if any(a[w] != t for w in graph.neighbors(v)
                           if int(w) not in remaining))
                if not frontier:
                    raise InternalError(
                        "orphan component with no external neighbor")
                v = int(rng.choice(frontier))
                options = np.unique(
                    [a[w] for w in graph.neighbors(v)
                     if int(w) not in remaining and a[w] != t])
                a[v] = int(rng.choice(options))
                remaining.remove(v)
    if not changed:
        return plan.copy()
    return Plan(a, plan.centers.copy())


# ---------------------------------------------------------------------------
# The full solver loop
# ---------------------------------------------------------------------------

SPATIAL_TRACE_HEADER = ("iteration", "best_j", "mean_j", "best_balance",
                        "best_compactness", "wall_ms")


@dataclass
class SpatialResult:
    best_plan: Plan
    best_j: float
    trace: list = field(default_factory=list)
    accepted_flips: int = 0
    accepted_recombinations: int = 0


def spatial_run(instance, config: MemeticConfig, rng: np.random.Generator,
                warm_start: Plan | None = None) -> SpatialResult:
    """Alternate local improvement and recombination over a population.

    Each outer iteration first gives every member one accepted flip (when one
    exists), then builds one recombination candidate per member against a
    snapshot of the population, replacing the member only when the candidate
    is at least as good.  The returned best plan is the best ever seen, so
    its objective trace is non-increasing even when the inferior-acceptance
    probability lets individual members worsen.
    """
    population = init_population(instance, config.population_size, rng,
                                 warm_start)
    terms = [objective_terms(p, instance) for p in population.members]
    best_idx = int(np.argmin([t[0] for t in terms]))
    best_plan = population.members[best_idx].copy()
    best_terms = terms[best_idx]

    result = SpatialResult(best_plan=best_plan, best_j=best_terms[0])
    t0 = time.perf_counter()

    for iteration in range(1, config.iterations + 1):
        if config.local_search:
            outcome = local_improvement_pass(population, instance,
                                             config.search, rng)
            population = outcome.population
            result.accepted_flips += outcome.accepted_flips
            for rec in outcome.records:
                if rec is not None:
                    terms[rec.member] = objective_terms(
                        population.members[rec.member], instance)

        if config.recombination and len(population) >= 2:
            snapshot = population.members
            weights = [fitness(t[0]) for t in terms]
            new_members = list(snapshot)
            for i in range(len(snapshot)):
                mate = select_mate(weights, rng)
                candidate, move = recombine(snapshot[i], snapshot[mate],
                                            instance, rng)
                if move is None:
                    continue
                cand_terms = objective_terms(candidate, instance)
                if cand_terms[0] <= terms[i][0]:
                    if config.search.debug_validate:
                        _assert_hard_feasible(candidate, instance)
                    new_members[i] = candidate
                    terms[i] = cand_terms
                    result.accepted_recombinations += 1
            population = Population(members=new_members, rng=population.rng)

        idx = int(np.argmin([t[0] for t in terms]))
        if terms[idx][0] < best_terms[0]:
            best_terms = terms[idx]
            result.best_plan = population.members[idx].copy()
            result.best_j = best_terms[0]
        wall_ms = (time.perf_counter() - t0) * 1000.0
        mean_j = float(np.mean([t[0] for t in terms]))
        result.trace.append((iteration, best_terms[0], mean_j,
                             best_terms[1], best_terms[2], wall_ms))
    return result
