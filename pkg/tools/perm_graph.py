"""
Permutation arithmetic, bubble-sort graph construction, structural
decompositions and graph metrics.

Vertex ids of a bubble-sort graph B_n are Lehmer ranks, so B_n lives on the
dense ids 0..n!-1 and the identity permutation is vertex 0. Positions are
1-indexed: generator i swaps positions i and i+1, 1 <= i <= n-1.
"""

import itertools
import logging
import math
from bisect import bisect_left
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
from networkx.algorithms.connectivity import build_auxiliary_node_connectivity, local_node_connectivity
from networkx.algorithms.flow import build_residual_network

from tools.engine_config import get_settings
from tools.errors import BudgetExceededError, ValidationError
from tools.fault_set import FaultSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Permutation:
    """One-line notation u = u[1] u[2] ... u[n] of the symbols 1..n."""

    symbols: Tuple[int, ...]

    def __post_init__(self):
        symbols = tuple(int(s) for s in self.symbols)
        object.__setattr__(self, 'symbols', symbols)
        n = len(symbols)
        if n < 1:
            raise ValidationError("permutation must have at least one symbol")
        if sorted(symbols) != list(range(1, n + 1)):
            raise ValidationError(f"{symbols} is not a permutation of 1..{n}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        """Parse "1234" or "1,2,3,4"."""
        text = text.strip()
        try:
            if ',' in text:
                symbols = tuple(int(part) for part in text.split(','))
            else:
                symbols = tuple(int(ch) for ch in text)
        except ValueError as e:
            raise ValidationError(f"malformed permutation label {text!r}") from e
        return cls(symbols)

    @property
    def n(self) -> int:
        return len(self.symbols)

    def __getitem__(self, position: int) -> int:
        """u[i] with 1-indexed i."""
        if not 1 <= position <= self.n:
            raise IndexError(f"position {position} outside 1..{self.n}")
        return self.symbols[position - 1]

    def swap(self, i: int) -> "Permutation":
        """u^i: exchange positions i and i+1."""
        if not 1 <= i <= self.n - 1:
            raise ValidationError(f"generator {i} outside 1..{self.n - 1}")
        s = list(self.symbols)
        s[i - 1], s[i] = s[i], s[i - 1]
        return Permutation(tuple(s))

    @property
    def label(self) -> str:
        return ''.join(str(s) for s in self.symbols)

    def __str__(self) -> str:
        return self.label


def perm_rank(p: Permutation) -> int:
    """Lehmer rank of p in the factorial number system (identity -> 0)."""
    if not isinstance(p, Permutation):
        p = Permutation(tuple(p))
    n = p.n
    rank = 0
    remaining = list(range(1, n + 1))
    for i, symbol in enumerate(p.symbols):
        digit = remaining.index(symbol)
        rank += digit * math.factorial(n - 1 - i)
        remaining.pop(digit)
    return rank


def perm_unrank(r: int, n: int) -> Permutation:
    """Inverse of perm_rank."""
    if n < 1:
        raise ValidationError(f"dimension must be positive, got {n}")
    if not 0 <= r < math.factorial(n):
        raise ValidationError(f"rank {r} outside 0..{math.factorial(n) - 1}")
    remaining = list(range(1, n + 1))
    symbols = []
    for i in range(n):
        digit, r = divmod(r, math.factorial(n - 1 - i))
        symbols.append(remaining.pop(digit))
    return Permutation(tuple(symbols))


def _rank_rows(rows: np.ndarray) -> np.ndarray:
    """Vectorised Lehmer rank of every row of a permutation table."""
    n = rows.shape[1]
    ranks = np.zeros(rows.shape[0], dtype=np.int64)
    for i in range(n - 1):
        smaller = (rows[:, i + 1:] < rows[:, i:i + 1]).sum(axis=1)
        ranks += smaller * math.factorial(n - 1 - i)
    return ranks


class Graph:
    """Immutable undirected simple graph with optional permutation labels."""

    def __init__(self, adjacency: Sequence[Sequence[int]], permutations: Optional[np.ndarray] = None,
                 dimension: Optional[int] = None, name: Optional[str] = None,
                 vertex_transitive: bool = False, validate: bool = True):
        self.adjacency: Tuple[Tuple[int, ...], ...] = tuple(tuple(int(w) for w in nbrs) for nbrs in adjacency)
        self.vertex_count = len(self.adjacency)
        self.permutations = permutations
        if permutations is not None:
            permutations.setflags(write=False)
        self.dimension = dimension
        self.name = name or f"G{self.vertex_count}"
        self.vertex_transitive = vertex_transitive
        if validate:
            self._validate()
        self.edge_count = sum(len(nbrs) for nbrs in self.adjacency) // 2

    def _validate(self) -> None:
        n = self.vertex_count
        for v, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise ValidationError(f"adjacency of vertex {v} must be sorted without duplicates")
            for w in nbrs:
                if not 0 <= w < n:
                    raise ValidationError(f"vertex id {w} out of range 0..{n - 1}")
                if w == v:
                    raise ValidationError(f"self-loop at vertex {v}")
                if v not in self.adjacency[w]:
                    raise ValidationError(f"edge ({v}, {w}) is not symmetric")

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Tuple[int, int]], name: Optional[str] = None) -> "Graph":
        nbrs: List[set] = [set() for _ in range(vertex_count)]
        for u, v in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise ValidationError(f"edge ({u}, {v}) out of range 0..{vertex_count - 1}")
            if u == v:
                raise ValidationError(f"self-loop at vertex {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls([sorted(s) for s in nbrs], name=name)

    @classmethod
    def from_networkx(cls, graph: nx.Graph, name: Optional[str] = None) -> "Graph":
        relabeled = nx.convert_node_labels_to_integers(graph, ordering='sorted')
        return cls.from_edges(relabeled.number_of_nodes(), relabeled.edges(), name=name)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edges(self) -> List[Tuple[int, int]]:
        return [(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.adjacency[u]
        i = bisect_left(nbrs, v)
        return i < len(nbrs) and nbrs[i] == v

    def label(self, v: int) -> Optional[Permutation]:
        if self.permutations is None:
            return None
        return Permutation(tuple(self.permutations[v]))

    def label_text(self, v: int) -> str:
        if self.permutations is None:
            return str(v)
        return ''.join(str(s) for s in self.permutations[v])

    def vertex_of(self, label: Union[str, Permutation, int]) -> int:
        """Vertex id for a permutation label (or a plain id on unlabeled graphs)."""
        if isinstance(label, (int, np.integer)):
            if not 0 <= label < self.vertex_count:
                raise ValidationError(f"vertex id {label} out of range 0..{self.vertex_count - 1}")
            return int(label)
        if self.permutations is None:
            try:
                return self.vertex_of(int(label))
            except ValueError as e:
                raise ValidationError(f"unlabeled graph has no vertex {label!r}") from e
        p = label if isinstance(label, Permutation) else Permutation.parse(label)
        if p.n != self.dimension:
            raise ValidationError(f"label {p} has {p.n} symbols, expected {self.dimension}")
        return perm_rank(p)

    def vertex_set(self, vertices: Iterable[Union[str, Permutation, int]]) -> FaultSet:
        return FaultSet.of(self.vertex_count, (self.vertex_of(v) for v in vertices))

    def labels_of(self, vertices: FaultSet) -> List[str]:
        return sorted(self.label_text(v) for v in vertices)

    @cached_property
    def neighbor_masks(self) -> Tuple[int, ...]:
        masks = []
        for nbrs in self.adjacency:
            m = 0
            for w in nbrs:
                m |= 1 << w
            masks.append(m)
        return tuple(masks)

    @cached_property
    def arc_offsets(self) -> Tuple[int, ...]:
        """Directed-edge index of the first arc leaving each vertex."""
        return tuple(itertools.accumulate((len(nbrs) for nbrs in self.adjacency), initial=0))

    @property
    def arc_count(self) -> int:
        return 2 * self.edge_count

    def arc_id(self, u: int, v: int) -> int:
        nbrs = self.adjacency[u]
        i = bisect_left(nbrs, v)
        if i == len(nbrs) or nbrs[i] != v:
            raise ValidationError(f"({u}, {v}) is not an edge")
        return self.arc_offsets[u] + i

    @cached_property
    def nx_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.vertex_count))
        graph.add_edges_from(self.edges())
        return nx.freeze(graph)

    def to_networkx(self) -> nx.Graph:
        """Mutable networkx copy, labeled with permutation text when available."""
        graph = nx.Graph(self.nx_graph)
        if self.permutations is not None:
            graph = nx.relabel_nodes(graph, {v: self.label_text(v) for v in range(self.vertex_count)})
        return graph

    def __repr__(self) -> str:
        return f"Graph({self.name}, {self.vertex_count} vertices, {self.edge_count} edges)"


@lru_cache(maxsize=8)
def _bubble_sort(n: int) -> Graph:
    perms = np.array(list(itertools.permutations(range(1, n + 1))), dtype=np.int8)
    neighbors = np.empty((perms.shape[0], n - 1), dtype=np.int64)
    for i in range(n - 1):
        swapped = perms.copy()
        swapped[:, [i, i + 1]] = swapped[:, [i + 1, i]]
        neighbors[:, i] = _rank_rows(swapped)
    neighbors.sort(axis=1)
    logger.debug(f"Built B_{n}: {perms.shape[0]} vertices")
    return Graph(neighbors.tolist(), permutations=perms, dimension=n, name=f"B{n}",
                 vertex_transitive=True, validate=False)


def build_bubble_sort(n: int) -> Graph:
    """Bubble-sort graph B_n: u ~ v iff v = u^i for one adjacent transposition i.

    Raises:
        ValidationError: n < 2
        BudgetExceededError: n! exceeds the configured vertex budget
    """
    if n < 2:
        raise ValidationError(f"B_n needs n >= 2, got {n}")
    max_dimension = get_settings().max_dimension
    if n > max_dimension:
        raise BudgetExceededError(f"B_{n} has {math.factorial(n)} vertices; limit is n <= {max_dimension}")
    return _bubble_sort(n)


def path_graph(k: int) -> Graph:
    return Graph.from_networkx(nx.path_graph(k), name=f"P{k}")


def cycle_graph(k: int) -> Graph:
    return Graph.from_networkx(nx.cycle_graph(k), name=f"C{k}")


def complete_graph(k: int) -> Graph:
    return Graph.from_networkx(nx.complete_graph(k), name=f"K{k}")


def complete_bipartite_graph(a: int, b: int) -> Graph:
    return Graph.from_networkx(nx.complete_bipartite_graph(a, b), name=f"K{a},{b}")


def star_graph(leaves: int) -> Graph:
    """K_{1,leaves}."""
    return Graph.from_networkx(nx.star_graph(leaves), name=f"K1,{leaves}")


def random_graph(k: int, density: float, seed: int) -> Graph:
    return Graph.from_networkx(nx.gnp_random_graph(k, density, seed=seed), name=f"G({k},{density:.2f},{seed})")


def _require_member_set(g: Graph, X: FaultSet) -> None:
    if X.universe != g.vertex_count:
        raise ValidationError(f"vertex set over {X.universe} vertices used with {g.name} ({g.vertex_count} vertices)")


def neighborhood_set(g: Graph, X: FaultSet) -> FaultSet:
    """N_G(X) = {y not in X : y adjacent to some x in X}."""
    _require_member_set(g, X)
    if g.vertex_count <= 4096:
        masks = g.neighbor_masks
        bits = 0
        for v in X:
            bits |= masks[v]
        return FaultSet(bits & ~X.bits, g.vertex_count)
    return FaultSet.of(g.vertex_count, {w for v in X for w in g.adjacency[v]}) - X


@dataclass(frozen=True)
class PartClassification:
    """A1 holds parts with |S_i| >= n-2, A2 the rest."""

    a1: Tuple[int, ...]
    a2: Tuple[int, ...]
    sizes: Dict[int, int] = field(hash=False)


@dataclass(frozen=True, eq=False)
class Decomposition:
    """B_n split into parts B_n^i with fixed last symbol i."""

    graph: Graph
    parts: Dict[int, FaultSet]
    part_of: np.ndarray

    @property
    def dimension(self) -> int:
        return self.graph.dimension

    def part_vertices(self, i: int) -> FaultSet:
        if i not in self.parts:
            raise ValidationError(f"part index {i} outside 1..{self.dimension}")
        return self.parts[i]


def decompose_last_symbol(g: Graph) -> Decomposition:
    if g.permutations is None or g.dimension is None:
        raise ValidationError(f"{g.name} has no permutation labels")
    last = g.permutations[:, -1]
    parts = {i: FaultSet.of(g.vertex_count, np.flatnonzero(last == i)) for i in range(1, g.dimension + 1)}
    part_of = last.astype(np.int64)
    part_of.setflags(write=False)
    return Decomposition(graph=g, parts=parts, part_of=part_of)


def classify_parts(d: Decomposition, S: FaultSet) -> PartClassification:
    _require_member_set(d.graph, S)
    threshold = d.dimension - 2
    sizes = {i: len(S & part) for i, part in d.parts.items()}
    a1 = tuple(i for i, size in sizes.items() if size >= threshold)
    a2 = tuple(i for i, size in sizes.items() if size < threshold)
    return PartClassification(a1=a1, a2=a2, sizes=sizes)


def decomposition_facts(d: Decomposition) -> Dict[str, object]:
    """Internal degrees, per-part edge counts and external degrees of a decomposition."""
    g = d.graph
    internal_degrees = set()
    external_degrees = set()
    part_edges = {}
    for i, part in d.parts.items():
        edges = 0
        for v in part:
            inside = sum(1 for w in g.adjacency[v] if d.part_of[w] == i)
            internal_degrees.add(inside)
            external_degrees.add(g.degree(v) - inside)
            edges += inside
        part_edges[i] = edges // 2
    return {
        'part_sizes': {i: len(part) for i, part in d.parts.items()},
        'internal_degrees': sorted(internal_degrees),
        'external_degrees': sorted(external_degrees),
        'part_edges': part_edges,
    }


@dataclass(frozen=True)
class PairEdgeGadget:
    """Pair-edge xy, its coupled pair-edge x'y' and the couplers xx', yy'."""

    x: int
    y: int
    x_prime: int
    y_prime: int

    @property
    def pair_edges(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        return (self.x, self.y), (self.x_prime, self.y_prime)

    @property
    def couplers(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        return (self.x, self.x_prime), (self.y, self.y_prime)

    def vertices(self, universe: int) -> FaultSet:
        return FaultSet.of(universe, (self.x, self.y, self.x_prime, self.y_prime))


def pair_edge_gadget(g: Graph, x: Union[int, str, Permutation], y: Union[int, str, Permutation]) -> PairEdgeGadget:
    """Coupled pair-edge and couplers of the pair-edge (x, y).

    Raises:
        ValidationError: g is not a labeled B_n with n >= 4, or (x, y) is not a pair-edge
    """
    if g.permutations is None or g.dimension is None:
        raise ValidationError(f"{g.name} has no permutation labels")
    n = g.dimension
    if n < 4:
        raise ValidationError(f"pair-edge gadgets need n >= 4, got n={n}")
    x, y = g.vertex_of(x), g.vertex_of(y)
    if not g.has_edge(x, y):
        raise ValidationError(f"({g.label_text(x)}, {g.label_text(y)}) is not an edge")
    px, py = g.label(x), g.label(y)
    if px[n] != py[n] or px[n - 1] != py[n - 1]:
        raise ValidationError(f"({px}, {py}) is not a pair-edge: positions {n - 1}, {n} differ")
    gadget = PairEdgeGadget(x=x, y=y, x_prime=perm_rank(px.swap(n - 1)), y_prime=perm_rank(py.swap(n - 1)))
    # the four vertices induce a 4-cycle
    assert g.has_edge(gadget.x_prime, gadget.y_prime)
    assert not g.has_edge(x, gadget.y_prime) and not g.has_edge(y, gadget.x_prime)
    return gadget


@dataclass(frozen=True)
class Component:
    vertices: FaultSet
    size: int
    trivial: bool


def components(g: Graph, removed: FaultSet) -> List[Component]:
    """Components of g - removed, ordered by smallest vertex id."""
    _require_member_set(g, removed)
    kept = [v for v in range(g.vertex_count) if v not in removed] if removed else range(g.vertex_count)
    sub = g.nx_graph.subgraph(kept)
    found = []
    for comp in nx.connected_components(sub):
        size = len(comp)
        found.append(Component(vertices=FaultSet.of(g.vertex_count, comp), size=size, trivial=size == 1))
    found.sort(key=lambda c: min(c.vertices))
    return found


def diameter(g: Graph, vertex_transitive: Optional[bool] = None) -> int:
    """Maximum eccentricity; a single BFS from vertex 0 when the graph is vertex-transitive."""
    if g.vertex_count == 0 or not nx.is_connected(g.nx_graph):
        raise ValidationError(f"{g.name} is disconnected; diameter undefined")
    transitive = g.vertex_transitive if vertex_transitive is None else vertex_transitive
    if transitive:
        return nx.eccentricity(g.nx_graph, v=0)
    return nx.diameter(g.nx_graph)


def vertex_connectivity(g: Graph, vertex_transitive: Optional[bool] = None) -> int:
    """Minimum vertex cut size by max-flow between non-adjacent pairs.

    Complete graphs have no vertex cut; they report |V| - 1 by convention.
    On vertex-transitive graphs one endpoint is fixed at vertex 0.
    """
    n = g.vertex_count
    if n < 2:
        raise ValidationError(f"vertex connectivity needs at least 2 vertices, got {n}")
    if all(g.degree(v) == n - 1 for v in range(n)):
        return n - 1
    transitive = g.vertex_transitive if vertex_transitive is None else vertex_transitive
    if not transitive:
        return nx.node_connectivity(g.nx_graph)
    auxiliary = build_auxiliary_node_connectivity(g.nx_graph)
    residual = build_residual_network(auxiliary, 'capacity')
    best = g.degree(0)
    for v in range(1, n):
        if g.has_edge(0, v):
            continue
        best = min(best, local_node_connectivity(g.nx_graph, 0, v, auxiliary=auxiliary, residual=residual,
                                                 cutoff=best))
    return best


def cross_matching_edges(d: Decomposition, i: int, j: int) -> List[Tuple[int, int]]:
    """Edges between parts i and j, as (vertex in i, vertex in j), sorted."""
    if i == j:
        raise ValidationError("cross matching needs two distinct parts")
    part_i = d.part_vertices(i)
    d.part_vertices(j)
    g = d.graph
    edges = []
    for u in part_i:
        for w in g.adjacency[u]:
            if d.part_of[w] == j:
                edges.append((u, w))
    edges.sort()
    return edges


def edge_list_text(g: Graph) -> str:
    """One "LABEL LABEL" line per edge, lexicographically sorted."""
    lines = []
    for u, v in g.edges():
        a, b = sorted((g.label_text(u), g.label_text(v)))
        lines.append(f"{a} {b}")
    lines.sort()
    return '\n'.join(lines) + ('\n' if lines else '')


def dot_text(g: Graph) -> str:
    lines = [f'graph "{g.name}" {{']
    for v in range(g.vertex_count):
        lines.append(f'  "{g.label_text(v)}";')
    edge_lines = []
    for u, v in g.edges():
        a, b = sorted((g.label_text(u), g.label_text(v)))
        edge_lines.append(f'  "{a}" -- "{b}";')
    lines.extend(sorted(edge_lines))
    lines.append('}')
    return '\n'.join(lines) + '\n'
