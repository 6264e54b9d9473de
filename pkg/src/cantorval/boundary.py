"""Boundary graph of the windows and the Hausdorff dimension of ∂W.

A node (α, β, x) stands for O_αβ(x) = W_α ∩ (W_β + x*). Intersecting the
window equations piece by piece gives

    O_αβ(x) = ⋃ λ*·O_jk((x + s − t)/λ) + t*,   t ∈ T_αj, s ∈ T_βk,

a graph-directed system whose adjacency spectral radius ρ yields
dim_H ∂W = log ρ / log λ.
"""
from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import log
from typing import Dict, Iterable, List, Optional, Set, Tuple

import networkx as nx
import numpy as np
import sympy
from loguru import logger

from .errors import ClosureExplosion, EmptyGraph
from .geometry import DisplacementMatrix, TileLengths
from .quadratic import QuadField, QuadNum, to_real
from .substitution import LETTERS, Letter
from .windows import ENCLOSURE_EPS, HullBounds, PointCloud, WindowSystem

DEFAULT_BOUND = 3
DEFAULT_MAX_NODES = 10_000
DEFAULT_POWER_TOL = 1e-12
DEFAULT_MAX_ITERATIONS = 200_000
CHARPOLY_MAX_NODES = 24
STABILITY_TOL = 1e-9


@dataclass(frozen=True)
class BoundaryNode:
    alpha: Letter
    beta: Letter
    x: QuadNum

    def __post_init__(self):
        if self.alpha == self.beta and not self.x:
            raise ValueError("O_αα(0) is a whole window, not a boundary piece")

    @property
    def label(self) -> str:
        return f"O_{self.alpha}{self.beta}{self.x}"

    def __str__(self) -> str:
        return self.label

    def sort_key(self) -> Tuple[str, str, Fraction, Fraction]:
        return (self.alpha, self.beta, self.x.a, self.x.b)


@dataclass(frozen=True)
class BoundaryEdge:
    source: BoundaryNode
    target: BoundaryNode
    translate: QuadNum  # internal-space t*
    multiplicity: int = 1


@dataclass
class BoundaryGraph:
    nodes: List[BoundaryNode]
    edges: List[BoundaryEdge]
    bound: int
    canonical: bool = True

    def index(self) -> Dict[BoundaryNode, int]:
        return {node: k for k, node in enumerate(self.nodes)}

    def adjacency(self) -> np.ndarray:
        index = self.index()
        matrix = np.zeros((len(self.nodes), len(self.nodes)), dtype=np.int64)
        for edge in self.edges:
            matrix[index[edge.source], index[edge.target]] += edge.multiplicity
        return matrix

    def out_edges(self, node: BoundaryNode) -> List[BoundaryEdge]:
        return [edge for edge in self.edges if edge.source == node]

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        for edge in self.edges:
            if graph.has_edge(edge.source, edge.target):
                graph[edge.source][edge.target]['weight'] += edge.multiplicity
            else:
                graph.add_edge(edge.source, edge.target, weight=edge.multiplicity)
        return graph

    def __contains__(self, node: BoundaryNode) -> bool:
        return node in set(self.nodes)


@dataclass
class SpectralRadius:
    value: float
    error: float
    validated: Optional[bool] = None
    components: List[Tuple[List[BoundaryNode], float]] = field(default_factory=list)

    @property
    def dominant_component(self) -> List[BoundaryNode]:
        if not self.components:
            return []
        return max(self.components, key=lambda c: c[1])[0]


@dataclass
class DimensionResult:
    spectral_radius: float
    radius_error: float
    dimension: float
    dimension_error: float
    node_count: int = 0
    search_bound_used: Optional[int] = None
    stable: Optional[bool] = None
    spectral_radius_next: Optional[float] = None
    validated: Optional[bool] = None
    witness_missing: List[str] = field(default_factory=list)


def _star_enclosure(x: QuadNum) -> Tuple[Fraction, Fraction]:
    return x.star().enclosure(ENCLOSURE_EPS)


def hull_overlap(hulls: HullBounds, alpha: Letter, beta: Letter, x: QuadNum) -> bool:
    """Necessary condition for O_αβ(x) ≠ ∅: H_α meets H_β + x* (hulls widened by err)."""
    a_lo, a_hi = hulls.widened(alpha)
    b_lo, b_hi = hulls.widened(beta)
    x_lo, x_hi = _star_enclosure(x)
    return a_lo <= b_hi + x_hi and b_lo + x_lo <= a_hi


def is_neighbour(lengths: TileLengths, alpha: Letter, beta: Letter, x: QuadNum) -> bool:
    """Tiles [y, y + len_α) and [y + x, y + x + len_β) of the dual tiling can touch."""
    return -lengths.of(alpha) < x < lengths.of(beta)


def is_canonical(node: BoundaryNode) -> bool:
    direction = node.x.star().sign()
    return direction < 0 or (direction == 0 and node.alpha <= node.beta)


def canonicalize(node: BoundaryNode) -> BoundaryNode:
    """Representative under O_αβ(x) = O_βα(−x) + x*: the one with x* < 0."""
    if is_canonical(node):
        return node
    return BoundaryNode(node.beta, node.alpha, -node.x)


def candidate_nodes(hulls: HullBounds, f: QuadField, beta: QuadNum, B: int,
                    lengths: TileLengths) -> Set[BoundaryNode]:
    nodes = set()
    coefficients = range(-B, B + 1)
    for alpha, gamma in product(LETTERS, LETTERS):
        for m, n in product(coefficients, coefficients):
            x = beta * n + m
            if alpha == gamma and not x:
                continue
            if is_neighbour(lengths, alpha, gamma, x) and hull_overlap(hulls, alpha, gamma, x):
                nodes.add(BoundaryNode(alpha, gamma, x))
    logger.debug(f"{len(nodes)} candidate boundary nodes with B={B}")
    return nodes


def expand_node(node: BoundaryNode, T: DisplacementMatrix, f: QuadField, hulls: HullBounds,
                canonical: bool = True) -> List[BoundaryEdge]:
    lam = f.lam
    inv_lam = lam.inverse()
    counts: Dict[Tuple[BoundaryNode, QuadNum], int] = defaultdict(int)
    for (j, t), (k, s) in product(T.pieces(node.alpha), T.pieces(node.beta)):
        x_child = (node.x + s - t) * inv_lam
        if j == k and not x_child:
            continue
        if not hull_overlap(hulls, j, k, x_child):
            continue
        child = BoundaryNode(j, k, x_child)
        shift = t
        if canonical and not is_canonical(child):
            shift = t + lam * x_child
            child = canonicalize(child)
        counts[(child, shift.star())] += 1
    edges = [BoundaryEdge(node, child, translate, multiplicity)
             for (child, translate), multiplicity in counts.items()]
    edges.sort(key=lambda e: (e.target.sort_key(), e.translate.a, e.translate.b))
    return edges


def prune(nodes: Iterable[BoundaryNode], edges: Iterable[BoundaryEdge]
          ) -> Tuple[List[BoundaryNode], List[BoundaryEdge]]:
    """Drop nodes without outgoing edges until every remaining node has one."""
    alive = set(nodes)
    edges = list(edges)
    rounds = 0
    while True:
        live_edges = [e for e in edges if e.source in alive and e.target in alive]
        has_out = {e.source for e in live_edges}
        dead = alive - has_out
        if not dead:
            break
        alive -= dead
        rounds += 1
    logger.debug(f"Pruning took {rounds} rounds, {len(alive)} nodes remain")
    ordered = sorted(alive, key=BoundaryNode.sort_key)
    return ordered, [e for e in edges if e.source in alive and e.target in alive]


def build_boundary_graph(sys: WindowSystem, T: DisplacementMatrix, hulls: HullBounds,
                         lengths: TileLengths, B: int = DEFAULT_BOUND, canonical: bool = True,
                         max_nodes: int = DEFAULT_MAX_NODES) -> BoundaryGraph:
    f = sys.field
    seeds = candidate_nodes(hulls, f, lengths.beta, B, lengths)
    if canonical:
        seeds = {canonicalize(node) for node in seeds}
    spread = max((abs(s - t) for i in LETTERS for _, s in T.pieces(i)
                  for j in LETTERS for _, t in T.pieces(j)), default=f.num(0))
    x_cap = max([float(abs(n.x)) for n in seeds] + [float(spread) / (to_real(f.lam) - 1)])

    seen: Set[BoundaryNode] = set(seeds)
    queue = deque(sorted(seeds, key=BoundaryNode.sort_key))
    edges: List[BoundaryEdge] = []
    while queue:
        node = queue.popleft()
        for edge in expand_node(node, T, f, hulls, canonical):
            edges.append(edge)
            child = edge.target
            if child in seen:
                continue
            if float(abs(child.x)) > x_cap + 1e-9:
                raise ClosureExplosion(f"Node {child} escapes the direct-space bound {x_cap:.6g}")
            seen.add(child)
            queue.append(child)
            if len(seen) > max_nodes:
                raise ClosureExplosion(f"Boundary closure exceeds {max_nodes} nodes",
                                       {'cap': max_nodes, 'bound': B})
    logger.debug(f"Closure from {len(seeds)} seeds reached {len(seen)} nodes")
    nodes, kept = prune(seen, edges)
    return BoundaryGraph(nodes, kept, bound=B, canonical=canonical)


def _power_iteration(matrix: np.ndarray, tol: float, max_iterations: int) -> Tuple[float, float]:
    """PF root of an irreducible nonnegative matrix with Collatz–Wielandt bounds.

    Iterating with A + I keeps the matrix primitive.
    """
    shifted = matrix.astype(np.float64) + np.eye(matrix.shape[0])
    x = np.ones(matrix.shape[0])
    lower, upper = 0.0, np.inf
    for _ in range(max_iterations):
        y = shifted @ x
        ratios = y / x
        lower, upper = float(ratios.min()), float(ratios.max())
        if upper - lower <= tol * upper:
            break
        x = y / y.max()
    else:
        logger.warning(f"Power iteration stopped after {max_iterations} steps, gap {upper - lower:.3g}")
    return (lower + upper) / 2 - 1, (upper - lower) / 2


def _charpoly_brackets(matrix: np.ndarray, value: float, width: float) -> bool:
    """Exact sign change of det(xI − A) across [value − width, value + width]."""
    x = sympy.Symbol('x')
    poly = sympy.Matrix(matrix.tolist()).charpoly(x)
    ends = [Fraction(end).limit_denominator(10 ** 15) for end in (value - width, value + width)]
    at_lo, at_hi = (poly.eval(sympy.Rational(end.numerator, end.denominator)) for end in ends)
    return at_lo == 0 or at_hi == 0 or bool(at_lo > 0) != bool(at_hi > 0)


def _radius_of(graph: BoundaryGraph, members: Optional[Set[BoundaryNode]], tol: float,
               max_iterations: int, charpoly_max_nodes: int) -> SpectralRadius:
    adjacency = graph.adjacency()
    index = graph.index()
    digraph = graph.to_networkx()
    if members is not None:
        digraph = digraph.subgraph(members)
    result = SpectralRadius(0.0, 0.0)
    dominant_checked: Optional[bool] = None
    for component in nx.strongly_connected_components(digraph):
        ordered = sorted(component, key=BoundaryNode.sort_key)
        idx = [index[node] for node in ordered]
        sub = adjacency[np.ix_(idx, idx)]
        if not sub.any():
            result.components.append((ordered, 0.0))
            continue
        value, error = _power_iteration(sub, tol, max_iterations)
        result.components.append((ordered, value))
        checked = None
        if len(ordered) <= charpoly_max_nodes:
            checked = _charpoly_brackets(sub, value, max(1e-9 * max(1.0, value), 4 * error))
            if not checked:
                logger.warning(f"Characteristic polynomial does not confirm radius {value!r}")
        if value > result.value:
            result.value, result.error, dominant_checked = value, error, checked
    result.components.sort(key=lambda c: (-c[1], [n.sort_key() for n in c[0]]))
    result.validated = dominant_checked
    return result


def spectral_radius(g: BoundaryGraph, tol: float = DEFAULT_POWER_TOL,
                    max_iterations: int = DEFAULT_MAX_ITERATIONS,
                    charpoly_max_nodes: int = CHARPOLY_MAX_NODES) -> SpectralRadius:
    """Largest eigenvalue of the adjacency matrix, taken over strongly connected components."""
    if not g.nodes:
        raise EmptyGraph("Boundary graph is empty after pruning")
    result = _radius_of(g, None, tol, max_iterations, charpoly_max_nodes)
    logger.debug(f"Spectral radius {result.value!r} ± {result.error:.2g} over {len(g.nodes)} nodes")
    return result


def component_radius(g: BoundaryGraph, node: BoundaryNode, tol: float = DEFAULT_POWER_TOL) -> float:
    """Spectral radius of the part of the graph reachable from ``node``."""
    reachable = nx.descendants(g.to_networkx(), node) | {node}
    return _radius_of(g, reachable, tol, DEFAULT_MAX_ITERATIONS, CHARPOLY_MAX_NODES).value


def hausdorff_dimension(rho: float, f: QuadField, rho_error: float = 0.0) -> DimensionResult:
    if rho < 1:
        raise ValueError(f"Spectral radius {rho} < 1 has no boundary dimension")
    log_lam = log(to_real(f.lam))
    dimension = log(rho) / log_lam
    error = rho_error / (rho * log_lam)
    return DimensionResult(
        spectral_radius=rho,
        radius_error=rho_error,
        dimension=min(max(dimension, 0.0), 1.0),
        dimension_error=error,
    )


def witness_missing(g: BoundaryGraph, cloud: PointCloud, tolerance: float = 1e-3) -> List[BoundaryNode]:
    """Nodes for which no sample of W_α lies within ``tolerance`` of a sample of W_β + x*."""
    sorted_clouds = {letter: np.sort(cloud.of(letter)) for letter in LETTERS}
    missing = []
    for node in g.nodes:
        first = sorted_clouds[node.alpha]
        second = sorted_clouds[node.beta] + to_real(node.x.star())
        if first.size == 0 or second.size == 0:
            missing.append(node)
            continue
        pos = np.searchsorted(first, second)
        above = first[np.clip(pos, 0, first.size - 1)]
        below = first[np.clip(pos - 1, 0, first.size - 1)]
        nearest = np.minimum(np.abs(above - second), np.abs(below - second))
        if nearest.min() >= tolerance:
            missing.append(node)
    if missing:
        logger.warning(f"{len(missing)} boundary nodes lack a sampling witness")
    return missing


def reduced_system(g: BoundaryGraph, radius: Optional[SpectralRadius] = None
                   ) -> Dict[BoundaryNode, List[BoundaryEdge]]:
    """Outgoing equations of the nodes in the dominant strongly connected component."""
    radius = radius or spectral_radius(g)
    return {node: g.out_edges(node) for node in radius.dominant_component}


def boundary_dimension(sys: WindowSystem, T: DisplacementMatrix, hulls: HullBounds, lengths: TileLengths,
                       B: int = DEFAULT_BOUND, tol: float = DEFAULT_POWER_TOL,
                       max_nodes: int = DEFAULT_MAX_NODES,
                       max_iterations: int = DEFAULT_MAX_ITERATIONS,
                       charpoly_max_nodes: int = CHARPOLY_MAX_NODES
                       ) -> Tuple[BoundaryGraph, SpectralRadius, DimensionResult]:
    """Graph, radius and dimension at bound B, with the B+1 stability check filled in."""
    graph = build_boundary_graph(sys, T, hulls, lengths, B, max_nodes=max_nodes)
    radius = spectral_radius(graph, tol, max_iterations, charpoly_max_nodes)
    next_graph = build_boundary_graph(sys, T, hulls, lengths, B + 1, max_nodes=max_nodes)
    next_radius = spectral_radius(next_graph, tol, max_iterations, charpoly_max_nodes)
    result = hausdorff_dimension(radius.value, sys.field, radius.error)
    result.node_count = len(graph.nodes)
    result.search_bound_used = B
    result.spectral_radius_next = next_radius.value
    result.stable = (abs(radius.value - next_radius.value) <= STABILITY_TOL
                     and set(graph.nodes) == set(next_graph.nodes))
    result.validated = radius.validated
    if not result.stable:
        logger.warning(f"Boundary graph differs between B={B} and B={B + 1}")
    return graph, radius, result
