"""Flip-based local improvement, single-solution baselines and flip-chain
samplers.

A *flip* reassigns one boundary node to an adjacent territory; it is both the
atomic local-search move and the Markov-chain proposal.  All searches share
the same hard-feasibility filter (a flip may never disconnect a territory,
empty one, or move a center), so they differ only in their acceptance rules.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, InternalError, NoFeasibleFlip
from .graph import Plan, is_connected, validate_plan
from .objective import objective_terms, territory_balance


@dataclass
class SearchConfig:
    """Knobs shared by the local search, the baselines and the samplers."""

    worse_accept_prob: float = 0.01     # chance of keeping an inferior flip
    max_iters: int = 1000               # proposal budget for SHC/SA/TS
    sa_initial_temp: float = 1.0
    sa_cooling: float = 0.995           # geometric, applied per accepted move
    tabu_tenure: int = 25
    chain_steps: int = 10_000
    acceptance_band: float = 0.15       # balance/compactness band for BAA/BCAA
    debug_validate: bool = False        # re-validate after every accepted move

    def __post_init__(self):
        if not 0.0 <= self.worse_accept_prob < 1.0:
            raise ConfigError("worse_accept_prob must lie in [0, 1)")
        if not 0.0 < self.sa_cooling < 1.0:
            raise ConfigError("sa_cooling must lie in (0, 1)")
        if min(self.max_iters, self.chain_steps, self.tabu_tenure) < 0:
            raise ConfigError("iteration budgets must be non-negative")
        if self.sa_initial_temp <= 0 or self.acceptance_band < 0:
            raise ConfigError("temperature must be positive and band non-negative")


class FlipProposal(NamedTuple):
    node: int
    from_territory: int
    to_territory: int

    def inverse(self) -> "FlipProposal":
        return FlipProposal(self.node, self.to_territory, self.from_territory)


def adjacent_territory_pairs(plan: Plan, graph) -> np.ndarray:
    """Ordered (donor, recipient) pairs of territories joined by a cut edge,
    sorted lexicographically."""
    a = plan.assignment
    tu, tv = a[graph.edges[:, 0]], a[graph.edges[:, 1]]
    diff = tu != tv
    if not diff.any():
        return np.empty((0, 2), dtype=np.int64)
    ordered = np.concatenate([
        np.stack([tu[diff], tv[diff]], axis=1),
        np.stack([tv[diff], tu[diff]], axis=1),
    ])
    return np.unique(ordered, axis=0)


def flip_candidates(plan: Plan, graph, donor: int, recipient: int) -> np.ndarray:
    """Non-center nodes of ``donor`` adjacent to ``recipient``, sorted."""
    a = plan.assignment
    eu, ev = graph.edges[:, 0], graph.edges[:, 1]
    tu, tv = a[eu], a[ev]
    nodes = np.concatenate([eu[(tu == donor) & (tv == recipient)],
                            ev[(tv == donor) & (tu == recipient)]])
    nodes = np.unique(nodes)
    return nodes[~np.isin(nodes, plan.centers)]


def propose_flip(plan: Plan, graph, rng: np.random.Generator) -> FlipProposal:
    """Uniformly pick an ordered adjacent territory pair, then a uniform
    movable boundary node of the donor.  Pairs whose boundary consists only
    of centers are resampled; if no pair has a movable node the search space
    offers no flip at all."""
    if plan.territory_count < 2:
        raise ConfigError("flips need at least two territories")
    pairs = adjacent_territory_pairs(plan, graph)
    if len(pairs) == 0:
        raise InternalError("no adjacent territory pair on a connected graph")
    for _ in range(max(32, 4 * len(pairs))):
        donor, recipient = pairs[int(rng.integers(len(pairs)))]
        nodes = flip_candidates(plan, graph, int(donor), int(recipient))
        if nodes.size:
            return FlipProposal(int(rng.choice(nodes)), int(donor), int(recipient))
    # rare fallback: sweep all pairs before concluding nothing can move
    movable = [(int(d), int(r)) for d, r in pairs
               if flip_candidates(plan, graph, int(d), int(r)).size]
    if not movable:
        raise NoFeasibleFlip("every boundary node is a center")
    donor, recipient = movable[int(rng.integers(len(movable)))]
    nodes = flip_candidates(plan, graph, donor, recipient)
    return FlipProposal(int(rng.choice(nodes)), donor, recipient)


def flip_is_feasible(plan: Plan, graph, proposal: FlipProposal) -> bool:
    """A flip is feasible when the node really sits on the donor/recipient
    boundary, is not a center, and the donor stays connected without it."""
    node, donor, recipient = proposal
    a = plan.assignment
    if a[node] != donor or node in plan.centers:
        return False
    if not np.any(a[graph.neighbors(node)] == recipient):
        return False
    members = np.flatnonzero(a == donor)
    members = members[members != node]
    if members.size == 0:
        return False
    return is_connected(graph, members)


def apply_flip(plan: Plan, proposal: FlipProposal) -> Plan:
    out = plan.copy()
    out.assignment[proposal.node] = proposal.to_territory
    return out


# ---------------------------------------------------------------------------
# Acceptance rules
# ---------------------------------------------------------------------------

class FlipContext:
    """Lazily evaluated view of a tentative flip for acceptance rules."""

    def __init__(self, plan, candidate, proposal, instance, rng,
                 current_terms=None):
        self.plan = plan
        self.candidate = candidate
        self.proposal = proposal
        self.instance = instance
        self.rng = rng
        self._current = current_terms
        self._cand = None

    @property
    def current_terms(self):
        if self._current is None:
            self._current = objective_terms(self.plan, self.instance)
        return self._current

    @property
    def candidate_terms(self):
        if self._cand is None:
            self._cand = objective_terms(self.candidate, self.instance)
        return self._cand

    @property
    def j_current(self) -> float:
        return self.current_terms[0]

    @property
    def j_candidate(self) -> float:
        return self.candidate_terms[0]

    def candidate_deviation(self, territory: int) -> float:
        """|1 - population/capacity| of a territory under the candidate."""
        pop, cap = territory_balance(self.candidate, self.instance)
        if cap[territory] == 0:
            return math.inf
        return abs(1.0 - pop[territory] / cap[territory])


class ImproveOrChance:
    """Greedy rule: keep a strictly better plan, or an inferior one with a
    small probability so the search can leave local optima."""

    def __init__(self, worse_accept_prob: float = 0.01):
        self.worse_accept_prob = worse_accept_prob

    def __call__(self, ctx: FlipContext) -> bool:
        if ctx.j_candidate < ctx.j_current:
            return True
        p = self.worse_accept_prob
        return p > 0.0 and ctx.rng.random() <= p


class NonWorsening:
    """Keep any equally good or better plan (SHC and AIO)."""

    def __call__(self, ctx: FlipContext) -> bool:
        return ctx.j_candidate <= ctx.j_current


class BalancedBand:
    """Accept every move that keeps both involved territories' balance
    deviation within the band; objective-blind otherwise."""

    def __init__(self, band: float):
        self.band = band

    def __call__(self, ctx: FlipContext) -> bool:
        if math.isinf(self.band):
            return True
        return (ctx.candidate_deviation(ctx.proposal.from_territory) <= self.band
                and ctx.candidate_deviation(ctx.proposal.to_territory) <= self.band)


class BalancedCompactBand(BalancedBand):
    """BalancedBand plus: the move may not worsen the compactness term by
    more than the band."""

    def __call__(self, ctx: FlipContext) -> bool:
        if not super().__call__(ctx):
            return False
        if math.isinf(self.band):
            return True
        return ctx.candidate_terms[2] <= ctx.current_terms[2] + self.band


def apply_flip_if_accepted(plan: Plan, proposal: FlipProposal, instance,
                           acceptance, rng: np.random.Generator
                           ) -> tuple[Plan, bool]:
    """Tentatively move the node; hard-reject contiguity breaks regardless of
    the rule, otherwise let the acceptance rule decide."""
    if not flip_is_feasible(plan, instance.graph, proposal):
        return plan, False
    candidate = apply_flip(plan, proposal)
    ctx = FlipContext(plan, candidate, proposal, instance, rng)
    if acceptance(ctx):
        return candidate, True
    return plan, False


# ---------------------------------------------------------------------------
# Population-wide local improvement (one accepted flip per member)
# ---------------------------------------------------------------------------

@dataclass
class FlipRecord:
    member: int
    proposal: FlipProposal
    j_before: float
    j_after: float


@dataclass
class PassResult:
    population: object
    records: list = field(default_factory=list)  # FlipRecord or None per member

    @property
    def accepted_flips(self) -> int:
        return sum(1 for r in self.records if r is not None)


def local_improvement_pass(population, instance, config: SearchConfig,
                           rng: np.random.Generator) -> PassResult:
    """Attempt flips on every member independently until one is accepted or
    all (pair, node) candidates are exhausted.

    Pairs are visited in a randomized order and, within a pair, candidate
    nodes likewise, so repeated proposals never retry a rejected candidate.
    Members with no acceptable flip are returned unchanged (locally
    converged).  Each member runs on its own random substream, so the pass
    can fan out across workers without changing its result.
    """
    from .growth import Population

    graph = instance.graph
    members = list(population.members)
    streams = rng.spawn(len(members))
    rule = ImproveOrChance(config.worse_accept_prob)
    records: list = []
    for m, plan in enumerate(members):
        mrng = streams[m]
        current = objective_terms(plan, instance)
        record = None
        pairs = adjacent_territory_pairs(plan, graph)
        for pi in mrng.permutation(len(pairs)):
            donor, recipient = (int(x) for x in pairs[pi])
            nodes = flip_candidates(plan, graph, donor, recipient)
            if not nodes.size:
                continue
            for v in mrng.permutation(nodes):
                proposal = FlipProposal(int(v), donor, recipient)
                if not flip_is_feasible(plan, graph, proposal):
                    continue
                candidate = apply_flip(plan, proposal)
                ctx = FlipContext(plan, candidate, proposal, instance, mrng,
                                  current_terms=current)
                if rule(ctx):
                    if config.debug_validate:
                        _assert_hard_feasible(candidate, instance)
                    record = FlipRecord(m, proposal, current[0], ctx.j_candidate)
                    members[m] = candidate
                    break
            if record is not None:
                break
        records.append(record)
    return PassResult(Population(members=members, rng=population.rng), records)


def _assert_hard_feasible(plan: Plan, instance) -> None:
    result = validate_plan(plan, instance.graph,
                           instance.objective_config.balance_band,
                           instance.level)
    if not result.hard_ok:
        raise InternalError("accepted move broke feasibility: "
                            + "; ".join(result.hard_violations))


# ---------------------------------------------------------------------------
# Single-solution baselines: SHC / SA / TS
# ---------------------------------------------------------------------------

TRACE_HEADER = ("iteration", "j", "balance_term", "compactness_term", "accepted")


def run_baseline(instance, algorithm: str, config: SearchConfig,
                 rng: np.random.Generator, start: Plan) -> tuple[Plan, list]:
    """Run one of the single-solution metaheuristics over the flip
    neighborhood and return (best plan, per-iteration trace).

    * SHC keeps any equally good or better neighbor.
    * SA keeps worse neighbors with probability exp(-dJ/T), cooling T
      geometrically after each accepted move.
    * TS is SHC plus a tabu list: a move returning a node to a territory it
      recently left is refused for ``tabu_tenure`` accepted moves, unless it
      beats the best plan seen so far (aspiration).  With tenure 0 it
      degenerates to SHC.
    """
    algorithm = algorithm.lower()
    if algorithm not in ("shc", "sa", "ts"):
        raise ConfigError(f"unknown baseline {algorithm!r}")
    graph = instance.graph
    plan = start.copy()
    current = objective_terms(plan, instance)
    best_plan, best_j = plan, current[0]
    temp = config.sa_initial_temp
    tabu: deque = deque(maxlen=config.tabu_tenure) if config.tabu_tenure else None
    trace = []

    for it in range(1, config.max_iters + 1):
        accepted = False
        try:
            proposal = propose_flip(plan, graph, rng)
        except NoFeasibleFlip:
            break
        if flip_is_feasible(plan, graph, proposal):
            candidate = apply_flip(plan, proposal)
            cand_terms = objective_terms(candidate, instance)
            delta = cand_terms[0] - current[0]
            if algorithm == "sa":
                accepted = delta <= 0.0 or rng.random() < math.exp(-delta / temp)
                if accepted:
                    temp *= config.sa_cooling
            else:
                accepted = delta <= 0.0
                if algorithm == "ts" and accepted and tabu is not None:
                    is_tabu = any(rec.node == proposal.node
                                  and rec.from_territory == proposal.to_territory
                                  for rec in tabu)
                    if is_tabu and not cand_terms[0] < best_j:
                        accepted = False
            if accepted:
                plan, current = candidate, cand_terms
                if algorithm == "ts" and tabu is not None:
                    tabu.append(proposal)
        if accepted:
            if config.debug_validate:
                _assert_hard_feasible(plan, instance)
            if current[0] < best_j:
                best_plan, best_j = plan, current[0]
        trace.append((it, current[0], current[1], current[2], int(accepted)))
    return best_plan, trace


# ---------------------------------------------------------------------------
# Flip-chain samplers: BAA / BCAA / AIO
# ---------------------------------------------------------------------------

@dataclass
class ChainSummary:
    """Ensemble statistics of a flip-chain run."""

    steps: int
    accepted: int
    distinct_states: int
    best_j: float
    balance_hist: tuple
    compactness_hist: tuple
    j_samples: np.ndarray = field(repr=False, default=None)
    balance_samples: np.ndarray = field(repr=False, default=None)
    compactness_samples: np.ndarray = field(repr=False, default=None)
    accepted_flags: np.ndarray = field(repr=False, default=None)
    visited: set = field(repr=False, default_factory=set)

    def trace_rows(self) -> list:
        """Per-step rows in the shared trace schema (index 0 is the start)."""
        return [(it + 1, float(self.j_samples[it + 1]),
                 float(self.balance_samples[it + 1]),
                 float(self.compactness_samples[it + 1]),
                 int(self.accepted_flags[it]))
                for it in range(self.steps)]


def run_chain(instance, sampler: str, config: SearchConfig,
              rng: np.random.Generator, start: Plan) -> tuple[ChainSummary, Plan]:
    """Random walk over feasible plans, collecting every visited state.

    Acceptance rules: BAA keeps any contiguity-preserving move whose involved
    territories stay balance-deviated at most the band; BCAA additionally
    refuses moves worsening the compactness term by more than the band; AIO
    keeps only non-worsening moves.  Returns the ensemble summary and the
    best plan encountered by objective value.
    """
    sampler = sampler.lower()
    if sampler not in ("baa", "bcaa", "aio"):
        raise ConfigError(f"unknown sampler {sampler!r}")
    rule = {"baa": BalancedBand(config.acceptance_band),
            "bcaa": BalancedCompactBand(config.acceptance_band),
            "aio": NonWorsening()}[sampler]
    graph = instance.graph
    plan = start.copy()
    current = objective_terms(plan, instance)
    best_plan, best_j = plan, current[0]
    visited = {plan.key()}
    accepted = 0
    j_samples = [current[0]]
    bal_samples = [current[1]]
    comp_samples = [current[2]]
    flags = []
    steps = 0

    for _ in range(config.chain_steps):
        steps += 1
        step_accepted = False
        try:
            proposal = propose_flip(plan, graph, rng)
        except NoFeasibleFlip:
            steps -= 1
            break
        if flip_is_feasible(plan, graph, proposal):
            candidate = apply_flip(plan, proposal)
            ctx = FlipContext(plan, candidate, proposal, instance, rng,
                              current_terms=current)
            if rule(ctx):
                plan = candidate
                current = ctx.candidate_terms
                accepted += 1
                step_accepted = True
                visited.add(plan.key())
                if config.debug_validate:
                    _assert_hard_feasible(plan, instance)
                if current[0] < best_j:
                    best_plan, best_j = plan, current[0]
        j_samples.append(current[0])
        bal_samples.append(current[1])
        comp_samples.append(current[2])
        flags.append(step_accepted)

    summary = ChainSummary(
        steps=steps,
        accepted=accepted,
        distinct_states=len(visited),
        best_j=best_j,
        balance_hist=np.histogram(bal_samples, bins=20),
        compactness_hist=np.histogram(comp_samples, bins=20),
        j_samples=np.asarray(j_samples),
        balance_samples=np.asarray(bal_samples),
        compactness_samples=np.asarray(comp_samples),
        accepted_flags=np.asarray(flags, dtype=np.int64),
        visited=visited,
    )
    return summary, best_plan
