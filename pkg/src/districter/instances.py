"""Instance loading, adjacency derivation, synthetic grid generation and
plan serialization.

The instance wire format is a JSON document::

    {
      "units": [{"id": 0, "polygon": [[[x, y], ...]],
                 "population": {"ES": 10, "MS": 4, "HS": 5},
                 "capacity":   {"ES": 0,  "MS": 0, "HS": 0}}, ...],
      "adjacency": [[0, 1], ...],          # optional; derived if absent
      "schools":   [{"level": "ES", "location": [x, y], "capacity": 600}, ...]
    }

Plans are saved as ``{"assignment": [...], "centers": [...]}``.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InstanceError
from .geometry import (MATCH_TOL, Polygon, _segment_key, iter_segments,
                       point_in_polygon, polygon_area, polygon_perimeter,
                       ring_centroid, unit_square)
from .graph import LEVELS, ContiguityGraph, Plan, connected_components
from .objective import ObjectiveConfig

log = logging.getLogger(__name__)


@dataclass
class Instance:
    """A full problem statement: contiguity graph, school level, fixed
    centers, objective configuration and the derived unit-to-center distance
    matrix.  Geometry sums needed by the compactness term are cached per unit
    so plan evaluation never re-touches polygons."""

    graph: ContiguityGraph
    level: str
    centers: np.ndarray
    objective_config: ObjectiveConfig
    distance: np.ndarray          # (N, K) centroid-to-center distances
    unit_area: np.ndarray | None
    unit_perimeter: np.ndarray | None
    shared_length: np.ndarray | None  # per graph edge, dissolved boundary length

    @property
    def node_count(self) -> int:
        return self.graph.node_count

    @property
    def territory_count(self) -> int:
        return len(self.centers)


def normalize_level(level: str) -> str:
    lv = str(level).upper()
    if lv not in LEVELS:
        raise ConfigError(f"unknown school level {level!r}; expected one of "
                          f"{', '.join(LEVELS)}")
    return lv


def build_instance(graph: ContiguityGraph, level: str, centers,
                   objective_config: ObjectiveConfig | None = None) -> Instance:
    """Assemble an Instance from parts, deriving distances and geometry sums."""
    level = normalize_level(level)
    centers = np.asarray(sorted(int(c) for c in centers), dtype=np.int64)
    if centers.size == 0:
        raise InstanceError(f"no centers at level {level}")
    if len(np.unique(centers)) != len(centers):
        raise InstanceError("duplicate center nodes")
    if centers.min() < 0 or centers.max() >= graph.node_count:
        raise InstanceError("center index out of range")
    cap = graph.capacity[level]
    for c in centers:
        if cap[c] <= 0:
            raise InstanceError(f"center node {int(c)} has no capacity at "
                                f"level {level}")

    diffs = graph.centroids[:, None, :] - graph.centroids[centers][None, :, :]
    distance = np.sqrt((diffs ** 2).sum(axis=2))

    unit_area = unit_perimeter = shared_length = None
    if graph.polygons is not None:
        unit_area = np.array([polygon_area(p) for p in graph.polygons])
        unit_perimeter = np.array([polygon_perimeter(p) for p in graph.polygons])
        shared_length = _shared_boundary_lengths(graph)

    return Instance(graph=graph, level=level, centers=centers,
                    objective_config=objective_config or ObjectiveConfig(),
                    distance=distance, unit_area=unit_area,
                    unit_perimeter=unit_perimeter, shared_length=shared_length)


def _unit_segment_index(polygons) -> dict:
    """Map canonical segment key -> list of (unit, length) owning it."""
    index: dict = {}
    for u, poly in enumerate(polygons):
        for p, q in iter_segments(poly):
            key = _segment_key(p, q)
            length = float(np.hypot(q[0] - p[0], q[1] - p[1]))
            index.setdefault(key, []).append((u, length))
    return index


def _shared_boundary_lengths(graph: ContiguityGraph) -> np.ndarray:
    """Boundary length each pair of adjacent units shares (exact segment
    matching); zero when adjacency was declared without matching geometry."""
    index = _unit_segment_index(graph.polygons)
    pair_length: dict = {}
    for owners in index.values():
        if len(owners) == 2:
            (u, lu), (v, _) = owners
            if u != v:
                key = (min(u, v), max(u, v))
                pair_length[key] = pair_length.get(key, 0.0) + lu
    shared = np.zeros(graph.edge_count)
    for e, (u, v) in enumerate(graph.edges):
        shared[e] = pair_length.get((int(u), int(v)), 0.0)
    return shared


def derive_adjacency(polygons) -> list[list[int]]:
    """Rook contiguity: units are adjacent when they share a boundary segment
    of positive length.  Corner-touching units (a single shared point) are
    not adjacent.  Requires edge-matched tilings (grid cells, typical GIS
    planning units)."""
    n = len(polygons)
    neighbors: list[set] = [set() for _ in range(n)]
    index = _unit_segment_index(polygons)
    for owners in index.values():
        if len(owners) > 2:
            raise InstanceError("more than two units share a boundary segment")
        if len(owners) == 2:
            (u, lu), (v, _) = owners
            if u != v and lu > MATCH_TOL:
                neighbors[u].add(v)
                neighbors[v].add(u)
    return [sorted(s) for s in neighbors]


# ---------------------------------------------------------------------------
# Instance files
# ---------------------------------------------------------------------------

def load_instance(path, level: str = "ES",
                  objective_config: ObjectiveConfig | None = None) -> Instance:
    """Load an instance file, deriving adjacency and centers as needed.

    Centers come from the ``schools`` array when present (point-in-polygon,
    first containing unit by index wins on boundary ties); otherwise every
    unit with capacity > 0 at ``level`` is a center.
    """
    level = normalize_level(level)
    try:
        with open(path) as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise InstanceError(f"cannot read instance file {path}: {exc}") from exc

    units = doc.get("units")
    if not units:
        raise InstanceError("instance file has no units")
    n = len(units)
    ids = sorted(int(u["id"]) for u in units)
    if ids != list(range(n)):
        raise InstanceError("unit ids must be dense 0..N-1")
    units = sorted(units, key=lambda u: int(u["id"]))

    polygons = [Polygon(u["polygon"]) for u in units]
    population = {lv: np.array([int(u.get("population", {}).get(lv, 0))
                                for u in units], dtype=np.int64)
                  for lv in LEVELS}
    capacity = {lv: np.array([int(u.get("capacity", {}).get(lv, 0))
                              for u in units], dtype=np.int64)
                for lv in LEVELS}
    centroids = np.array([ring_centroid(p.outer) for p in polygons])

    if "adjacency" in doc and doc["adjacency"] is not None:
        neighbors: list[set] = [set() for _ in range(n)]
        for u, v in doc["adjacency"]:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise InstanceError(f"bad adjacency pair [{u}, {v}]")
            neighbors[u].add(v)
            neighbors[v].add(u)
        adjacency = [sorted(s) for s in neighbors]
    else:
        adjacency = derive_adjacency(polygons)

    if "schools" in doc and doc["schools"] is not None:
        centers = []
        for s in doc["schools"]:
            if normalize_level(s["level"]) != level:
                continue
            location = s["location"]
            unit = next((i for i, p in enumerate(polygons)
                         if point_in_polygon(location, p)), None)
            if unit is None:
                raise InstanceError(
                    f"school at {tuple(location)} (level {level}) lies in no unit")
            if unit in centers:
                raise InstanceError(
                    f"two {level} schools fall in unit {unit}; one school per "
                    "unit and level is supported")
            centers.append(unit)
            capacity[level][unit] = int(s["capacity"])
        if not centers:
            raise InstanceError(f"no {level} school in the schools array")
    else:
        centers = np.flatnonzero(capacity[level] > 0)
        if centers.size == 0:
            raise InstanceError(f"no unit has capacity at level {level}")

    graph = ContiguityGraph(adjacency, population=population, capacity=capacity,
                            centroids=centroids, polygons=polygons)
    return build_instance(graph, level, centers, objective_config)


def save_instance(instance: Instance, path) -> None:
    """Write the instance back out as an instance file (adjacency included)."""
    graph = instance.graph
    units = []
    for v in range(graph.node_count):
        units.append({
            "id": v,
            "polygon": graph.polygons[v].to_lists(),
            "population": {lv: int(graph.population[lv][v]) for lv in LEVELS},
            "capacity": {lv: int(graph.capacity[lv][v]) for lv in LEVELS},
        })
    doc = {
        "units": units,
        "adjacency": [[int(u), int(v)] for u, v in graph.edges],
    }
    with open(path, "w") as f:
        json.dump(doc, f, sort_keys=True, separators=(",", ":"))
        f.write("\n")


# ---------------------------------------------------------------------------
# Synthetic grid instances
# ---------------------------------------------------------------------------

def generate_grid_instance(rows: int, cols: int, k: int, seed: int,
                           balance_profile: str = "uniform",
                           centers=None,
                           objective_config: ObjectiveConfig | None = None,
                           ) -> Instance:
    """Desk-scale synthetic instance: a rows x cols rook grid of unit squares.

    Populations are drawn per unit from ``balance_profile`` ("uniform" or
    "clustered" growth hotspots).  K centers are sampled without replacement
    (or pinned via ``centers``).  Total capacity equals total population,
    split across centers with +/-20% jitter, so an exactly balanced plan is
    attainable in principle.  Deterministic under a fixed seed; the three
    school levels carry identical data.
    """
    if rows < 1 or cols < 1:
        raise ConfigError("grid must have at least one row and column")
    n = rows * cols
    if not 1 <= k <= n:
        raise ConfigError(f"need 1 <= K <= {n}, got K={k}")
    if balance_profile not in ("uniform", "clustered"):
        raise ConfigError(f"unknown balance profile {balance_profile!r}")

    ss = np.random.SeedSequence(seed)
    pop_rng, center_rng, cap_rng = (np.random.default_rng(s) for s in ss.spawn(3))

    if balance_profile == "uniform":
        pop = pop_rng.integers(50, 151, size=n)
    else:
        # a few growth hotspots on a quiet base, mimicking uneven enrollment
        cells = np.indices((rows, cols)).reshape(2, n).T.astype(float)
        pop = pop_rng.integers(20, 61, size=n).astype(float)
        hotspots = max(1, (rows * cols) // 30)
        sigma = max(rows, cols) / 4.0
        for _ in range(hotspots):
            hx = pop_rng.uniform(0, rows)
            hy = pop_rng.uniform(0, cols)
            d2 = (cells[:, 0] - hx) ** 2 + (cells[:, 1] - hy) ** 2
            pop += pop_rng.uniform(150, 300) * np.exp(-d2 / (2 * sigma ** 2))
        pop = np.round(pop).astype(np.int64)

    if centers is None:
        centers = np.sort(center_rng.choice(n, size=k, replace=False))
    else:
        centers = np.asarray(sorted(int(c) for c in centers), dtype=np.int64)
        if len(centers) != k or len(np.unique(centers)) != k:
            raise ConfigError("centers must be K distinct node indices")
        if centers.min() < 0 or centers.max() >= n:
            raise ConfigError("center index out of range")

    total = int(pop.sum())
    shares = 1.0 + cap_rng.uniform(-0.2, 0.2, size=k)
    caps = _split_total(total, shares / shares.sum())
    capacity = np.zeros(n, dtype=np.int64)
    capacity[centers] = caps

    adjacency = []
    for r in range(rows):
        for c in range(cols):
            nb = []
            if r > 0:
                nb.append((r - 1) * cols + c)
            if r < rows - 1:
                nb.append((r + 1) * cols + c)
            if c > 0:
                nb.append(r * cols + c - 1)
            if c < cols - 1:
                nb.append(r * cols + c + 1)
            adjacency.append(nb)

    polygons = [unit_square(v % cols, v // cols) for v in range(n)]
    centroids = np.array([[v % cols + 0.5, v // cols + 0.5] for v in range(n)])
    pop = pop.astype(np.int64)
    graph = ContiguityGraph(
        adjacency,
        population={lv: pop for lv in LEVELS},
        capacity={lv: capacity for lv in LEVELS},
        centroids=centroids,
        polygons=polygons,
    )
    return build_instance(graph, "ES", centers, objective_config)


def _split_total(total: int, weights: np.ndarray) -> np.ndarray:
    """Integer split of ``total`` proportional to ``weights`` (largest
    remainder), guaranteeing every share is at least 1."""
    k = len(weights)
    if total < k:
        raise ConfigError("total population too small to give every center "
                          "a positive capacity")
    raw = weights * total
    base = np.floor(raw).astype(np.int64)
    remainder = total - int(base.sum())
    order = np.argsort(-(raw - base), kind="stable")
    base[order[:remainder]] += 1
    # keep each center usable
    while np.any(base < 1):
        i = int(np.argmin(base))
        j = int(np.argmax(base))
        base[i] += 1
        base[j] -= 1
    return base


# ---------------------------------------------------------------------------
# Plan files
# ---------------------------------------------------------------------------

def save_plan(plan: Plan, path) -> None:
    doc = {
        "assignment": [int(x) for x in plan.assignment],
        "centers": [int(c) for c in plan.centers],
    }
    with open(path, "w") as f:
        json.dump(doc, f, sort_keys=True, separators=(",", ":"))
        f.write("\n")


def load_plan(path, instance: Instance, rng=None) -> Plan:
    """Read a plan file and make it feasible for ``instance``.

    Disconnected territories are repaired (orphan components reassigned to
    adjacent territories); the moved nodes are logged.  A center missing from
    its own territory or a node-count mismatch is an error, not repairable.
    """
    try:
        with open(path) as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise InstanceError(f"cannot read plan file {path}: {exc}") from exc

    assignment = np.asarray(doc.get("assignment", []), dtype=np.int64)
    centers = np.asarray(doc.get("centers", []), dtype=np.int64)
    if len(assignment) != instance.node_count:
        raise InstanceError(
            f"plan covers {len(assignment)} nodes, instance has "
            f"{instance.node_count}")
    if not np.array_equal(centers, instance.centers):
        raise InstanceError("plan centers do not match the instance")
    k = len(centers)
    if len(assignment) and (assignment.min() < 0 or assignment.max() >= k):
        raise InstanceError("plan assigns a node to a nonexistent territory")
    for i, c in enumerate(centers):
        if assignment[c] != i:
            raise InstanceError(f"center {int(c)} missing from its territory {i}")

    plan = Plan(assignment, centers)
    broken = [i for i in range(k)
              if len(connected_components(instance.graph, plan.territory(i))) != 1]
    if broken:
        from .memetic import repair  # local import to avoid a module cycle
        repaired = repair(plan, instance,
                          rng if rng is not None else np.random.default_rng(0))
        moved = np.flatnonzero(repaired.assignment != plan.assignment)
        log.info("repaired territories %s; reassigned nodes %s",
                 broken, [int(v) for v in moved])
        return repaired
    return plan
