"""The optimization objective and plan-evaluation metrics.

The objective combines two per-territory deviations, weighted by
``balance_weight``:

* balance: ``|1 - population_i / capacity_i|`` summed over territories, and
* compactness: ``|1 - PP_i|`` where ``PP_i`` is the Polsby-Popper score of the
  territory's dissolved footprint (or a cut-edge surrogate in proxy mode).

Lower is better; 0 means every territory exactly fills its capacity and is
perfectly circular.  Evaluation is defined on any total assignment, contiguous
or not: feasibility is owned by the acceptance logic of the search operators,
which lets them score tentative intermediates.  Everything here is a pure
function of immutable inputs and safe to call from parallel workers.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import EvaluationError
from .graph import Plan

COMPACTNESS_MODES = ("polsby_popper", "edge_cut_proxy")


@dataclass
class ObjectiveConfig:
    """Weights and soft-band parameters of the objective.

    ``balance_weight`` trades balance against compactness; school planners
    weigh balance at least twice as heavily, so a ratio below 2 triggers a
    warning.  ``balance_band`` is the soft validation band reported by
    :func:`districter.graph.validate_plan`.
    """

    balance_weight: float = 0.7
    balance_band: float = 0.1
    compactness_mode: str = "polsby_popper"

    def __post_init__(self):
        if not 0.0 <= self.balance_weight <= 1.0:
            raise ValueError("balance_weight must lie in [0, 1]")
        if self.balance_band < 0.0:
            raise ValueError("balance_band must be non-negative")
        if self.compactness_mode not in COMPACTNESS_MODES:
            raise ValueError(f"unknown compactness mode {self.compactness_mode!r}")
        w = self.balance_weight
        if w < 1.0 and w / (1.0 - w) < 2.0:
            warnings.warn(
                "balance_weight gives balance less than twice the weight of "
                "compactness", stacklevel=2)


@dataclass
class ObjectiveReport:
    """Objective value with its decomposition and per-territory diagnostics."""

    j: float
    balance_term: float
    compactness_term: float
    per_territory: list = field(default_factory=list)


def _territory_pp(plan: Plan, instance) -> np.ndarray:
    """Polsby-Popper score per territory from cached unit geometry.

    Perimeter of a territory equals the sum of unit perimeters minus twice the
    boundary length shared by internal adjacencies, which for edge-matched
    tilings is exactly the dissolved perimeter.  Empty territories score 0.
    """
    if instance.unit_area is None:
        raise EvaluationError("instance has no geometry; polsby_popper "
                              "compactness unavailable")
    k = plan.territory_count
    a = plan.assignment
    area = np.bincount(a, weights=instance.unit_area, minlength=k)
    peri = np.bincount(a, weights=instance.unit_perimeter, minlength=k)
    edges = instance.graph.edges
    if len(edges):
        same = a[edges[:, 0]] == a[edges[:, 1]]
        if same.any():
            peri -= 2.0 * np.bincount(a[edges[:, 0]][same],
                                      weights=instance.shared_length[same],
                                      minlength=k)
    pp = np.zeros(k)
    nz = peri > 0
    pp[nz] = 4.0 * math.pi * area[nz] / (peri[nz] * peri[nz])
    return pp


def _max_internal_edges(sizes: np.ndarray) -> np.ndarray:
    """Internal edge count of the most compact grid block of each size
    (2n - ceil(2*sqrt(n)) for a polyomino of n cells)."""
    n = sizes.astype(float)
    d = 2.0 * n - np.ceil(2.0 * np.sqrt(n))
    return np.maximum(d, 0.0)


def _proxy_terms(plan: Plan, instance) -> np.ndarray:
    """Per-territory surrogate ``1 - retained/maximum`` internal edges,
    clamped to [0, 1]; dimensionless like ``|1 - PP|``."""
    k = plan.territory_count
    a = plan.assignment
    edges = instance.graph.edges
    internal = np.zeros(k)
    if len(edges):
        same = a[edges[:, 0]] == a[edges[:, 1]]
        internal = np.bincount(a[edges[:, 0]][same], minlength=k).astype(float)
    sizes = np.bincount(a, minlength=k)
    dmax = _max_internal_edges(sizes)
    terms = np.ones(k)
    nz = dmax > 0
    terms[nz] = np.clip(1.0 - internal[nz] / dmax[nz], 0.0, 1.0)
    terms[dmax == 0] = 0.0  # single cells and empty territories
    return terms


def territory_balance(plan: Plan, instance) -> tuple[np.ndarray, np.ndarray]:
    """(population, capacity) per territory at the instance's school level."""
    k = plan.territory_count
    a = plan.assignment
    pop = np.bincount(a, weights=instance.graph.population[instance.level],
                      minlength=k)
    cap = np.bincount(a, weights=instance.graph.capacity[instance.level],
                      minlength=k)
    return pop, cap


def evaluate(plan: Plan, instance) -> ObjectiveReport:
    """Score a plan, returning the weighted total and its decomposition."""
    config = instance.objective_config
    pop, cap = territory_balance(plan, instance)
    if np.any(cap == 0):
        bad = int(np.flatnonzero(cap == 0)[0])
        raise EvaluationError(f"territory {bad} has zero total capacity")
    ratio = pop / cap
    balance_terms = np.abs(1.0 - ratio)

    if config.compactness_mode == "polsby_popper":
        pp = _territory_pp(plan, instance)
        compactness_terms = np.abs(1.0 - pp)
    else:
        pp = (_territory_pp(plan, instance)
              if instance.unit_area is not None else None)
        compactness_terms = _proxy_terms(plan, instance)

    balance_term = float(balance_terms.sum())
    compactness_term = float(compactness_terms.sum())
    w = config.balance_weight
    j = w * balance_term + (1.0 - w) * compactness_term

    per_territory = [
        {
            "population": float(pop[i]),
            "capacity": float(cap[i]),
            "ratio": float(ratio[i]),
            "polsby_popper": float(pp[i]) if pp is not None else None,
        }
        for i in range(plan.territory_count)
    ]
    return ObjectiveReport(j=j, balance_term=balance_term,
                           compactness_term=compactness_term,
                           per_territory=per_territory)


def objective_terms(plan: Plan, instance) -> tuple[float, float, float]:
    """(J, balance_term, compactness_term); the hot path for search loops."""
    config = instance.objective_config
    pop, cap = territory_balance(plan, instance)
    if np.any(cap == 0):
        bad = int(np.flatnonzero(cap == 0)[0])
        raise EvaluationError(f"territory {bad} has zero total capacity")
    balance_term = float(np.abs(1.0 - pop / cap).sum())
    if config.compactness_mode == "polsby_popper":
        compactness_term = float(np.abs(1.0 - _territory_pp(plan, instance)).sum())
    else:
        compactness_term = float(_proxy_terms(plan, instance).sum())
    w = config.balance_weight
    return (w * balance_term + (1.0 - w) * compactness_term,
            balance_term, compactness_term)


def objective_value(plan: Plan, instance) -> float:
    """J only."""
    return objective_terms(plan, instance)[0]


def fitness(j: float) -> float:
    """Selection weight 1/(1+|J|): strictly decreasing in |J|, 1 at the ideal."""
    return 1.0 / (1.0 + abs(j))


def balance_score(plan: Plan, instance) -> float:
    """Percentage balance 100*|1 - mean(|1 - pop_i/cap_i|)|.

    The outer absolute value is applied as defined, so a mean deviation above
    1 folds back into a positive score; such plans are flagged in
    :func:`planning_report`.
    """
    pop, cap = territory_balance(plan, instance)
    if np.any(cap == 0):
        raise EvaluationError("zero-capacity territory")
    mean_dev = float(np.abs(1.0 - pop / cap).mean())
    return 100.0 * abs(1.0 - mean_dev)


def compactness_score(plan: Plan, instance) -> float:
    """Mean Polsby-Popper score across territories, scaled to [0, 100]."""
    pp = _territory_pp(plan, instance)
    return float(100.0 * np.abs(pp).mean())


@dataclass
class PlanningReport:
    """Planner-facing metrics for comparing a plan against a baseline."""

    territory_count: int
    compactness: float
    mean_distance: float
    max_distance: float
    balance: float
    balance_flagged: bool
    balanced_count: int
    under_count: int
    over_count: int
    total_population: int
    displaced: int | None = None

    @property
    def displaced_pct(self) -> float | None:
        if self.displaced is None or self.total_population == 0:
            return None
        return 100.0 * self.displaced / self.total_population

    def to_dict(self) -> dict:
        k = self.territory_count
        return {
            "compactness_score": self.compactness,
            "mean_distance": self.mean_distance,
            "max_distance": self.max_distance,
            "balance_score": self.balance,
            "balance_flagged": self.balance_flagged,
            "balanced_schools": {"count": self.balanced_count, "of": k,
                                 "pct": 100.0 * self.balanced_count / k},
            "under_enrolled_schools": {"count": self.under_count, "of": k,
                                       "pct": 100.0 * self.under_count / k},
            "overcrowded_schools": {"count": self.over_count, "of": k,
                                    "pct": 100.0 * self.over_count / k},
            "students_displaced": (
                None if self.displaced is None
                else {"count": self.displaced, "of": self.total_population,
                      "pct": self.displaced_pct}),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        k = self.territory_count
        rows = [
            ("Compactness score", f"{self.compactness:.2f}"),
            ("Mean distance traveled", f"{self.mean_distance:.2f}"),
            ("Max distance traveled", f"{self.max_distance:.2f}"),
            ("Balance score", f"{self.balance:.2f}"
             + (" (mean deviation > 1)" if self.balance_flagged else "")),
            ("Number of balanced schools", f"{self.balanced_count}/{k}"),
            ("(in %)", f"{100.0 * self.balanced_count / k:.2f}"),
            ("Number of under-enrolled schools", f"{self.under_count}/{k}"),
            ("(in %)", f"{100.0 * self.under_count / k:.2f}"),
            ("Number of overcrowded schools", f"{self.over_count}/{k}"),
            ("(in %)", f"{100.0 * self.over_count / k:.2f}"),
        ]
        if self.displaced is None:
            rows += [("Students displaced", "-"), ("(in %)", "-")]
        else:
            rows += [("Students displaced",
                      f"{self.displaced}/{self.total_population}"),
                     ("(in %)", f"{self.displaced_pct:.2f}")]
        width = max(len(label) for label, _ in rows) + 2
        return "\n".join(f"{label:<{width}}{value}" for label, value in rows)


def planning_report(plan: Plan, instance, baseline: Plan | None = None
                    ) -> PlanningReport:
    """Distance, balance-band counts and displacement for a plan.

    Mean distance weights each unit's centroid-to-school distance by its
    student population; max distance ranges over units with population > 0.
    A school is balanced when its attending population lies within 80-120% of
    its capacity.  Displacement needs a baseline plan and is otherwise
    reported as absent.
    """
    pop_v = instance.graph.population[instance.level]
    dist_v = instance.distance[np.arange(instance.graph.node_count),
                               plan.assignment]
    total_pop = int(pop_v.sum())
    mean_distance = float((pop_v * dist_v).sum() / total_pop) if total_pop else 0.0
    inhabited = pop_v > 0
    max_distance = float(dist_v[inhabited].max()) if inhabited.any() else 0.0

    pop, cap = territory_balance(plan, instance)
    if np.any(cap == 0):
        raise EvaluationError("zero-capacity territory")
    ratio = pop / cap
    balanced = int(np.count_nonzero((ratio >= 0.8) & (ratio <= 1.2)))
    under = int(np.count_nonzero(ratio < 0.8))
    over = int(np.count_nonzero(ratio > 1.2))
    mean_dev = float(np.abs(1.0 - ratio).mean())

    displaced = None
    if baseline is not None:
        moved = plan.assignment != baseline.assignment
        displaced = int(pop_v[moved].sum())

    return PlanningReport(
        territory_count=plan.territory_count,
        compactness=compactness_score(plan, instance),
        mean_distance=mean_distance,
        max_distance=max_distance,
        balance=balance_score(plan, instance),
        balance_flagged=mean_dev > 1.0,
        balanced_count=balanced,
        under_count=under,
        over_count=over,
        total_population=total_pop,
        displaced=displaced,
    )
