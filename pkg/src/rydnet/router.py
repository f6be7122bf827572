"""Lattice connectivity, Rydberg-level selection and loss-weighted swap routing."""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .physics import AtomicModel, PhysicsContext, UnreachableRadiusError, r_max as _r_max

# slack for radius comparisons like a*sqrt(2) <= r_max
_RTOL = 1e-9


class EmptyConnectivityError(ValueError):
    pass


class RoutingError(ValueError):
    pass


Coord = tuple[int, int]


@dataclass(frozen=True)
class LatticeSpec:
    width: int = 10
    height: int = 10
    spacing: float = 4.0

    def __post_init__(self):
        if self.width < 1 or self.height < 1 or self.width * self.height < 2:
            raise ValueError("lattice needs at least two sites")
        if not self.spacing > 0:
            raise ValueError("lattice spacing must be positive")

    @property
    def size(self) -> int:
        return self.width * self.height

    def index(self, xy: Coord) -> int:
        x, y = xy
        return y * self.width + x

    def coord(self, i: int) -> Coord:
        return (i % self.width, i // self.width)

    def contains(self, xy: Coord) -> bool:
        return 0 <= xy[0] < self.width and 0 <= xy[1] < self.height

    def distance(self, u: int, v: int) -> float:
        (x1, y1), (x2, y2) = self.coord(u), self.coord(v)
        return self.spacing * math.hypot(x2 - x1, y2 - y1)

    @classmethod
    def fitting(cls, q: int, spacing: float = 4.0) -> "LatticeSpec":
        """Smallest near-square lattice holding ``q`` qubits."""
        w = max(2, math.ceil(math.sqrt(q)))
        return cls(w, max(1, math.ceil(q / w)), spacing)


@dataclass(frozen=True)
class NeighborSet:
    offsets: tuple[Coord, ...]
    r_max_over_a: float

    def __len__(self):
        return len(self.offsets)

    @property
    def radii_over_a(self) -> list[float]:
        return sorted({math.hypot(*k) for k in self.offsets})


def neighbor_set(spacing: float, r_max: float) -> NeighborSet:
    """All nonzero integer offsets within ``r_max`` on a lattice of pitch ``spacing``."""
    if r_max < spacing * (1 - _RTOL):
        raise EmptyConnectivityError(
            f"r_max={r_max:.6g} um is shorter than the lattice spacing {spacing:.6g} um"
        )
    ratio = r_max / spacing
    lim = int(math.floor(ratio * (1 + _RTOL)))
    cut = (ratio * (1 + _RTOL)) ** 2
    offs = [
        (kx, ky)
        for kx in range(-lim, lim + 1)
        for ky in range(-lim, lim + 1)
        if (kx, ky) != (0, 0) and kx * kx + ky * ky <= cut
    ]
    offs.sort(key=lambda k: (k[0] ** 2 + k[1] ** 2, k))
    return NeighborSet(tuple(offs), ratio)


# --------------------------------------------------------------------------
# level selection
# --------------------------------------------------------------------------


def n_graded(model: AtomicModel, r: float, omega: float, k_margin: float) -> int:
    """Smallest available principal number whose r_max reaches ``r``."""
    best = -math.inf
    for n in model.available_n:
        rm = _r_max(model.c6(n), omega, k_margin)
        if r <= rm * (1 + _RTOL):
            return n
        best = max(best, rm)
    raise UnreachableRadiusError(r, best)


def n_fixed(model: AtomicModel, radius_set: Iterable[float], omega: float, k_margin: float) -> int:
    radii = list(radius_set)
    if not radii:
        raise ValueError("fixed strategy needs a nonempty radius set")
    return n_graded(model, max(radii), omega, k_margin)


@dataclass(frozen=True)
class Graded:
    name = "graded"

    def level_fn(self, ctx: PhysicsContext, radii: Sequence[float]):
        levels = {r: n_graded(ctx.model, r, ctx.drive.omega, ctx.noise.k_margin) for r in radii}
        return levels.__getitem__


@dataclass(frozen=True)
class Fixed:
    """One level for every gate; ``radii`` defaults to the graph's edge radii."""

    radii: tuple[float, ...] | None = None
    name = "fixed"

    def level_fn(self, ctx: PhysicsContext, radii: Sequence[float]):
        n = n_fixed(ctx.model, self.radii or radii, ctx.drive.omega, ctx.noise.k_margin)
        return lambda r: n


LevelStrategy = Graded | Fixed


def strategy_from_name(name: str) -> LevelStrategy:
    if name == "graded":
        return Graded()
    if name == "fixed":
        return Fixed()
    raise ValueError(f"unknown level strategy {name!r}")


# --------------------------------------------------------------------------
# interaction graph
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    radius: float
    n: int
    weight: float  # -log survival of a swap (3 CZs)
    cz_weight: float  # -log survival of a single CZ


@dataclass
class InteractionGraph:
    lattice: LatticeSpec
    neighbors: NeighborSet
    adjacency: list[list[Edge]] = field(repr=False)

    @property
    def nodes(self) -> list[Coord]:
        return [self.lattice.coord(i) for i in range(self.lattice.size)]

    def edges(self) -> list[Edge]:
        return [e for adj in self.adjacency for e in adj]

    def edge(self, u: int, v: int) -> Edge:
        for e in self.adjacency[u]:
            if e.v == v:
                return e
        raise RoutingError(f"sites {u} and {v} are not directly connected")

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def to_json(self) -> str:
        return json.dumps(
            {
                "nodes": [list(c) for c in self.nodes],
                "edges": [
                    {"u": e.u, "v": e.v, "r_um": e.radius, "n": e.n, "weight": e.weight}
                    for e in self.edges()
                ],
            },
            indent=1,
        )


def _neglog(s: float) -> float:
    return -math.log(s) if s > 0 else math.inf


def build_graph(
    lattice: LatticeSpec, r_max: float, strategy: LevelStrategy, ctx: PhysicsContext
) -> InteractionGraph:
    nbrs = neighbor_set(lattice.spacing, r_max)
    radii = [lattice.spacing * r for r in nbrs.radii_over_a]
    level_of = strategy.level_fn(ctx, radii)
    per_offset = {}
    for k in nbrs.offsets:
        r = lattice.spacing * math.hypot(*k)
        # key on the canonical radius so symmetric offsets share one value
        r = min(radii, key=lambda x: abs(x - r))
        n = level_of(r)
        s = ctx.gate_survival(n)
        per_offset[k] = (r, n, 3 * _neglog(s), _neglog(s))
    adjacency: list[list[Edge]] = []
    for u in range(lattice.size):
        x, y = lattice.coord(u)
        adj = []
        for k in nbrs.offsets:
            xy = (x + k[0], y + k[1])
            if lattice.contains(xy):
                r, n, w, wcz = per_offset[k]
                adj.append(Edge(u, lattice.index(xy), r, n, w, wcz))
        adj.sort(key=lambda e: e.v)
        adjacency.append(adj)
    return InteractionGraph(lattice, nbrs, adjacency)


# --------------------------------------------------------------------------
# routing
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SynthesisPlan:
    route: tuple[int, ...]  # q1's site, ..., site adjacent to q2
    target: int
    swap_edges: tuple[Edge, ...]
    cz_edge: Edge

    @property
    def hops(self) -> int:
        return len(self.swap_edges) + 1

    @property
    def swap_radii(self) -> tuple[float, ...]:
        return tuple(e.radius for e in self.swap_edges)

    @property
    def cz_radius(self) -> float:
        return self.cz_edge.radius

    @property
    def cz_level(self) -> int:
        return self.cz_edge.n

    @property
    def weight(self) -> float:
        return sum(e.weight for e in self.swap_edges) + self.cz_edge.cz_weight

    def survival(self, ctx: PhysicsContext) -> float:
        s = ctx.gate_survival(self.cz_edge.n)
        for e in self.swap_edges:
            s *= ctx.gate_survival(e.n) ** 3
        return s

    def p_loss(self, ctx: PhysicsContext) -> float:
        return 1.0 - self.survival(ctx)

    def describe(self) -> str:
        if not self.swap_edges:
            return f"direct CZ {self.route[0]}-{self.target} r={self.cz_radius:.4g}um n={self.cz_level}, D=1"
        steps = " -> ".join(str(u) for u in self.route)
        return (
            f"swap route {steps}, then CZ {self.route[-1]}-{self.target} "
            f"r={self.cz_radius:.4g}um n={self.cz_level}, D={self.hops}"
        )


def _dijkstra(graph: InteractionGraph, src: int, blocked: int):
    """Shortest swap-weight paths from ``src`` avoiding ``blocked``.

    Heap keys are (distance, path) so equal-weight paths resolve to the
    lexicographically smallest node sequence.
    """
    best: dict[int, tuple[float, tuple[int, ...]]] = {}
    heap = [(0.0, (src,))]
    while heap:
        d, path = heapq.heappop(heap)
        u = path[-1]
        if u in best:
            continue
        best[u] = (d, path)
        for e in graph.adjacency[u]:
            if e.v != blocked and e.v not in best and math.isfinite(e.weight):
                heapq.heappush(heap, (d + e.weight, path + (e.v,)))
    return best


def shortest_route(graph: InteractionGraph, q1: int, q2: int) -> tuple[float, tuple[int, ...]]:
    """Minimal total weight (swaps plus final CZ) and the swap route for q1 -> q2."""
    if q1 == q2:
        raise RoutingError("CZ needs two distinct qubits")
    n = graph.lattice.size
    if not (0 <= q1 < n and 0 <= q2 < n):
        raise RoutingError(f"site index out of range: {q1}, {q2}")
    reach = _dijkstra(graph, q1, q2)
    best = None
    for e in graph.adjacency[q2]:
        m = e.v
        if m not in reach:
            continue
        d, path = reach[m]
        cand = (d + graph.edge(m, q2).cz_weight, path)
        if math.isfinite(cand[0]) and (best is None or cand < best):
            best = cand
    if best is None:
        raise RoutingError(f"site {q2} is unreachable from site {q1}")
    return best


def synthesize_cz(graph: InteractionGraph, q1: int, q2: int) -> SynthesisPlan:
    _, route = shortest_route(graph, q1, q2)
    swaps = tuple(graph.edge(a, b) for a, b in zip(route, route[1:]))
    return SynthesisPlan(route, q2, swaps, graph.edge(route[-1], q2))


def loss_heatmap(
    lattice: LatticeSpec,
    r_max: float,
    strategy: LevelStrategy,
    ctx: PhysicsContext,
    q1: Coord = (0, 0),
) -> np.ndarray:
    """Overall synthesized-CZ loss from ``q1`` to every site, shape (height, width)."""
    graph = build_graph(lattice, r_max, strategy, ctx)
    src = lattice.index(q1)
    out = np.zeros((lattice.height, lattice.width))
    for v in range(lattice.size):
        if v == src:
            continue
        x, y = lattice.coord(v)
        out[y, x] = synthesize_cz(graph, src, v).p_loss(ctx)
    return out
