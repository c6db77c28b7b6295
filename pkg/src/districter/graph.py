"""Contiguity graph and plan representation, plus the connectivity queries
every search operator relies on.

The graph is immutable after construction and safe to share across workers.
A :class:`Plan` is a value object: algorithms copy it before mutating.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InstanceError

LEVELS = ("ES", "MS", "HS")


def _zero_features():
    return {}


class ContiguityGraph:
    """Planar adjacency structure over N spatial units.

    Parameters
    ----------
    adjacency:
        Sequence of neighbor lists; must be symmetric and without self-loops.
        The graph must be connected.
    population, capacity:
        Optional dicts mapping a school level ("ES"/"MS"/"HS") to a length-N
        non-negative integer array.  Missing levels default to zeros.
    centroids:
        Optional (N, 2) coordinates of unit centroids.
    polygons:
        Optional list of N boundary :class:`~districter.geometry.Polygon`.
    edge_weights:
        Optional per-edge weight (default 1.0).  Stored for the cut-edge
        compactness proxy; search moves treat edges as unit weight.
    """

    def __init__(self, adjacency, *, population=None, capacity=None,
                 centroids=None, polygons=None, edge_weights=None):
        n = len(adjacency)
        if n < 1:
            raise InstanceError("graph needs at least one node")
        neigh = [np.unique(np.asarray(list(a), dtype=np.int64)) for a in adjacency]
        for u, nb in enumerate(neigh):
            if nb.size and (nb.min() < 0 or nb.max() >= n):
                raise InstanceError(f"neighbor index out of range at node {u}")
            if np.any(nb == u):
                raise InstanceError(f"self-loop at node {u}")
        pairs = set()
        for u, nb in enumerate(neigh):
            for v in nb:
                pairs.add((u, int(v)))
        for u, v in pairs:
            if (v, u) not in pairs:
                raise InstanceError(f"adjacency not symmetric: {u}->{v}")

        self.node_count = n
        counts = np.array([nb.size for nb in neigh], dtype=np.int64)
        self.indptr = np.concatenate([[0], np.cumsum(counts)])
        self.indices = (np.concatenate(neigh) if counts.sum() else
                        np.empty(0, dtype=np.int64))
        edges = [(u, int(v)) for u, nb in enumerate(neigh) for v in nb if u < v]
        self.edges = (np.array(edges, dtype=np.int64) if edges else
                      np.empty((0, 2), dtype=np.int64))

        if edge_weights is None:
            self.edge_weight = np.ones(len(self.edges))
        else:
            self.edge_weight = np.asarray(edge_weights, dtype=float)
            if self.edge_weight.shape != (len(self.edges),):
                raise InstanceError("edge_weights must match the number of edges")
            if np.any(self.edge_weight < 0):
                raise InstanceError("edge weights must be non-negative")

        self.population = self._feature_dict(population, n, "population")
        self.capacity = self._feature_dict(capacity, n, "capacity")
        self.centroids = (np.zeros((n, 2)) if centroids is None
                          else np.asarray(centroids, dtype=float).reshape(n, 2))
        self.polygons = list(polygons) if polygons is not None else None
        if self.polygons is not None and len(self.polygons) != n:
            raise InstanceError("polygons must have one entry per node")

        if not bool(is_connected(self, np.arange(n))):
            raise InstanceError("contiguity graph is disconnected")

    @staticmethod
    def _feature_dict(values, n, name):
        out = {}
        values = values or {}
        for level in LEVELS:
            arr = np.asarray(values.get(level, np.zeros(n, dtype=np.int64)),
                             dtype=np.int64)
            if arr.shape != (n,):
                raise InstanceError(f"{name}[{level}] must have length {n}")
            if np.any(arr < 0):
                raise InstanceError(f"{name}[{level}] must be non-negative")
            out[level] = arr
        return out

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def feature(self, v: int) -> "FeatureRecord":
        return FeatureRecord(
            population={lv: int(self.population[lv][v]) for lv in LEVELS},
            capacity={lv: int(self.capacity[lv][v]) for lv in LEVELS},
            centroid=(float(self.centroids[v, 0]), float(self.centroids[v, 1])),
            polygon=self.polygons[v] if self.polygons is not None else None,
        )


@dataclass(frozen=True)
class FeatureRecord:
    """Per-unit attributes: per-level student population and program capacity,
    plus the unit's centroid and boundary polygon."""

    population: dict
    capacity: dict
    centroid: tuple
    polygon: object


@dataclass
class Plan:
    """Assignment of every node to one of K territories, each anchored by a
    fixed center node (territory i always contains ``centers[i]``)."""

    assignment: np.ndarray
    centers: np.ndarray

    def __post_init__(self):
        self.assignment = np.asarray(self.assignment, dtype=np.int64)
        self.centers = np.asarray(self.centers, dtype=np.int64)
        if self.assignment.ndim != 1 or self.centers.ndim != 1:
            raise InstanceError("assignment and centers must be 1-D")
        if len(np.unique(self.centers)) != len(self.centers):
            raise InstanceError("centers must be distinct")

    @property
    def territory_count(self) -> int:
        return len(self.centers)

    def territory(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == i)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.territory_count)

    def copy(self) -> "Plan":
        return Plan(self.assignment.copy(), self.centers.copy())

    def key(self) -> bytes:
        """Hashable state identifier (centers are fixed per instance)."""
        return self.assignment.tobytes()


def plans_equal(a: Plan, b: Plan) -> bool:
    return (np.array_equal(a.assignment, b.assignment)
            and np.array_equal(a.centers, b.centers))


# ---------------------------------------------------------------------------
# Connectivity queries
# ---------------------------------------------------------------------------

def is_connected(graph: ContiguityGraph, nodes) -> bool:
    """BFS connectivity of the induced subgraph.

    The empty set is NOT connected (an emptied territory is a hard violation);
    a singleton is.
    """
    nodes = np.asarray(list(nodes) if not isinstance(nodes, np.ndarray) else nodes,
                       dtype=np.int64)
    if nodes.size == 0:
        return False
    member = np.zeros(graph.node_count, dtype=bool)
    member[nodes] = True
    target = int(member.sum())
    visited = np.zeros(graph.node_count, dtype=bool)
    start = int(nodes.min())
    visited[start] = True
    frontier = [start]
    seen = 1
    indptr, indices = graph.indptr, graph.indices
    while frontier:
        nxt = []
        for u in frontier:
            for v in indices[indptr[u]:indptr[u + 1]]:
                if member[v] and not visited[v]:
                    visited[v] = True
                    nxt.append(int(v))
        seen += len(nxt)
        frontier = nxt
    return seen == target


def connected_components(graph: ContiguityGraph, nodes) -> list[np.ndarray]:
    """Maximal connected components of the induced subgraph, ordered by their
    smallest member for reproducibility.  Each component array is sorted."""
    nodes = np.unique(np.asarray(list(nodes) if not isinstance(nodes, np.ndarray)
                                 else nodes, dtype=np.int64))
    if nodes.size == 0:
        return []
    member = np.zeros(graph.node_count, dtype=bool)
    member[nodes] = True
    assigned = np.zeros(graph.node_count, dtype=bool)
    indptr, indices = graph.indptr, graph.indices
    components = []
    for s in nodes:  # ascending, so components come out ordered by smallest member
        s = int(s)
        if assigned[s]:
            continue
        comp = [s]
        assigned[s] = True
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for v in indices[indptr[u]:indptr[u + 1]]:
                    if member[v] and not assigned[v]:
                        assigned[v] = True
                        nxt.append(int(v))
            comp.extend(nxt)
            frontier = nxt
        components.append(np.array(sorted(comp), dtype=np.int64))
    return components


def neighbors_of_territory(plan: Plan, graph: ContiguityGraph, i: int) -> np.ndarray:
    """All nodes outside territory ``i`` adjacent to at least one of its nodes."""
    if not 0 <= i < plan.territory_count:
        raise IndexError(f"territory index {i} out of range")
    a = plan.assignment
    eu, ev = graph.edges[:, 0], graph.edges[:, 1]
    in_u, in_v = a[eu] == i, a[ev] == i
    out = np.concatenate([ev[in_u & ~in_v], eu[in_v & ~in_u]])
    return np.unique(out)


def cut_edges(plan: Plan, graph: ContiguityGraph) -> int:
    """Number of edges whose endpoints lie in different territories."""
    a = plan.assignment
    return int(np.count_nonzero(a[graph.edges[:, 0]] != a[graph.edges[:, 1]]))


# ---------------------------------------------------------------------------
# Plan validation
# ---------------------------------------------------------------------------

@dataclass
class ValidationResult:
    """Per-constraint report.  Center and contiguity breaches are hard
    (feasibility); balance-band breaches are soft (they feed the objective)."""

    unique_assignment: bool
    centers_ok: bool
    contiguity_ok: bool
    band_ok: bool
    hard_violations: list = field(default_factory=list)
    soft_violations: list = field(default_factory=list)

    @property
    def hard_ok(self) -> bool:
        return self.unique_assignment and self.centers_ok and self.contiguity_ok

    @property
    def ok(self) -> bool:
        return self.hard_ok and self.band_ok


def validate_plan(plan: Plan, graph: ContiguityGraph, tau: float,
                  level: str = "ES") -> ValidationResult:
    """Check unique assignment, center fixity, per-territory contiguity and
    the soft balance band ``(1-tau)*cap_i <= pop_i <= (1+tau)*cap_i``."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    k = plan.territory_count
    if k == 0:
        raise InstanceError("plan has no territories")
    hard, soft = [], []

    a = plan.assignment
    unique_ok = True
    if len(a) != graph.node_count:
        unique_ok = False
        hard.append("assignment length does not match node count")
    elif a.min() < 0 or a.max() >= k:
        unique_ok = False
        hard.append("assignment refers to a nonexistent territory")

    centers_ok = True
    if unique_ok:
        for i, c in enumerate(plan.centers):
            if a[c] != i:
                centers_ok = False
                hard.append(f"center moved: node {int(c)} not in territory {i}")

    contiguity_ok = True
    if unique_ok:
        for i in range(k):
            members = plan.territory(i)
            if members.size == 0:
                contiguity_ok = False
                hard.append(f"territory {i} is empty")
            elif not is_connected(graph, members):
                contiguity_ok = False
                hard.append(f"territory {i} is disconnected")

    band_ok = True
    if unique_ok:
        pop = np.bincount(a, weights=graph.population[level], minlength=k)
        cap = np.bincount(a, weights=graph.capacity[level], minlength=k)
        lo, hi = (1.0 - tau) * cap, (1.0 + tau) * cap
        for i in range(k):
            if not lo[i] <= pop[i] <= hi[i]:
                band_ok = False
                soft.append(
                    f"territory {i}: population {pop[i]:.0f} outside "
                    f"[{lo[i]:.1f}, {hi[i]:.1f}]")

    return ValidationResult(unique_ok, centers_ok, contiguity_ok, band_ok,
                            hard, soft)
