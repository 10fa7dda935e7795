"""Random graph instances: generation, validation, serialization and analysis.

A ``Graph`` is an immutable simple undirected graph whose edges are stored as
an ordered tuple of ``(u, v)`` pairs with ``u < v``.  The position of an edge
in that tuple is its label; the simulator, the per-edge expectations and the
edge-list file all use the same order.
"""

import enum
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx
import numpy as np

from .errors import (
    GenerationError,
    ParameterError,
    ResourceCapError,
    UndefinedRatioError,
)


DEFAULT_REGULAR_MAX_ATTEMPTS = 10000
DEFAULT_BRUTE_FORCE_CAP = 30

# Basis strings enumerated per numpy pass in the MaxCut search
_CHUNK_BITS = 22


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0 .. n-1``.

    ``edges`` is in label order with ``u < v`` in each pair. When ``degree``
    is set every vertex must have that degree.
    """

    n: int
    edges: tuple
    degree: int = field(default=None, compare=False)
    adjacency: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = int(self.n)
        if n < 0:
            raise ParameterError(f'vertex count must be non-negative, got {self.n!r}')
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        neighbors = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < v < n):
                raise ParameterError(
                    f'edge ({u}, {v}) must satisfy 0 <= u < v < n={n}'
                )
            if v in neighbors[u]:
                raise ParameterError(f'duplicate edge ({u}, {v})')
            neighbors[u].add(v)
            neighbors[v].add(u)
        object.__setattr__(self, 'n', n)
        object.__setattr__(self, 'edges', edges)
        object.__setattr__(self, 'adjacency', tuple(frozenset(s) for s in neighbors))
        if self.degree is not None:
            bad = [x for x in range(n) if len(neighbors[x]) != self.degree]
            if bad:
                raise ParameterError(
                    f'graph tagged {self.degree}-regular but vertex {bad[0]} '
                    f'has degree {len(neighbors[bad[0]])}'
                )

    @classmethod
    def from_pairs(cls, n, pairs, degree=None):
        """Build a graph in canonical form: ``u < v`` and lexicographic order."""
        canon = sorted((min(u, v), max(u, v)) for u, v in pairs)
        return cls(n, tuple(canon), degree)

    @classmethod
    def from_networkx(cls, G, degree=None):
        """Build from a networkx graph whose nodes are ``0 .. n-1``."""
        return cls.from_pairs(G.number_of_nodes(), G.edges(), degree)

    @property
    def m(self):
        return len(self.edges)

    def degrees(self):
        return [len(s) for s in self.adjacency]

    def is_regular(self, d):
        return all(len(s) == d for s in self.adjacency)

    def to_networkx(self):
        G = nx.Graph()
        G.add_nodes_from(range(self.n))
        G.add_edges_from(self.edges)
        return G

    def edge_arrays(self):
        """Return the endpoint arrays ``(u, v)`` as int64 numpy arrays."""
        if not self.edges:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty
        arr = np.asarray(self.edges, dtype=np.int64)
        return arr[:, 0], arr[:, 1]


class EdgeP1Type(enum.Enum):
    """Local picture of an edge seen by a depth-1 circuit on a 3-regular graph.

    The value is the number of neighbors the two endpoints share.
    """

    SHARED_TWO = 2
    SHARED_ONE = 1
    SHARED_ZERO = 0

    @property
    def label(self):
        return {2: 'shared2', 1: 'shared1', 0: 'shared0'}[self.value]


@dataclass(frozen=True)
class CensusP1:
    """Counts and fractions of the three depth-1 edge types."""

    w_shared2: int
    w_shared1: int
    w_shared0: int

    @property
    def m(self):
        return self.w_shared2 + self.w_shared1 + self.w_shared0

    @property
    def f_shared2(self):
        return self.w_shared2 / self.m

    @property
    def f_shared1(self):
        return self.w_shared1 / self.m

    @property
    def f_shared0(self):
        return self.w_shared0 / self.m

    def count(self, edge_type):
        return {
            EdgeP1Type.SHARED_TWO: self.w_shared2,
            EdgeP1Type.SHARED_ONE: self.w_shared1,
            EdgeP1Type.SHARED_ZERO: self.w_shared0,
        }[edge_type]

    def fraction(self, edge_type):
        return self.count(edge_type) / self.m

    def to_dict(self):
        return {
            'w_shared2': self.w_shared2,
            'w_shared1': self.w_shared1,
            'w_shared0': self.w_shared0,
            'f_shared2': self.f_shared2,
            'f_shared1': self.f_shared1,
            'f_shared0': self.f_shared0,
        }


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def gen_regular(n, d, rng, max_attempts=DEFAULT_REGULAR_MAX_ATTEMPTS):
    """Random simple d-regular graph from the configuration model.

    All ``n*d`` half-edges are paired uniformly at random; any pairing that
    produces a self-loop or a repeated edge is thrown away whole and the
    pairing is redrawn, up to ``max_attempts`` times.
    """
    n, d = int(n), int(d)
    if d < 0 or n < d + 1:
        raise ParameterError(f'need 0 <= d < n, got n={n}, d={d}')
    if (n * d) % 2:
        raise ParameterError(f'n*d must be even, got n={n}, d={d}')

    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    for _ in range(int(max_attempts)):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        lo = pairs.min(axis=1)
        hi = pairs.max(axis=1)
        if np.any(lo == hi):
            continue
        if np.unique(lo * n + hi).size != lo.size:
            continue
        return Graph.from_pairs(n, zip(lo.tolist(), hi.tolist()), degree=d)
    raise GenerationError(
        f'no simple {d}-regular pairing on {n} vertices in {max_attempts} attempts'
    )


def gen_erdos_renyi(n, p_edge, rng):
    """G(n, p_edge): each of the C(n,2) pairs included independently."""
    n = int(n)
    if n < 0:
        raise ParameterError(f'vertex count must be non-negative, got {n}')
    if not 0.0 <= p_edge <= 1.0:
        raise ParameterError(f'p_edge must lie in [0, 1], got {p_edge!r}')
    iu, iv = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p_edge
    return Graph(n, tuple(zip(iu[keep].tolist(), iv[keep].tolist())))


def sparse_edge_probability(n, mean_degree=3):
    """Edge probability ``mean_degree/(n-1)`` giving the requested mean degree."""
    if n < 2:
        raise ParameterError(f'need n >= 2 for an edge probability, got {n}')
    return min(1.0, mean_degree / (n - 1))


def gen_regular_with_maxcut(n, d, target_cmax, rng, max_tries,
                            max_attempts=DEFAULT_REGULAR_MAX_ATTEMPTS,
                            brute_force_cap=DEFAULT_BRUTE_FORCE_CAP):
    """Rejection-sample d-regular graphs until the MaxCut equals ``target_cmax``.

    Raises ``GenerationError`` after ``max_tries`` graphs; its ``histogram``
    holds the MaxCut values that were seen.
    """
    m = int(n) * int(d) // 2
    if target_cmax > m:
        raise ParameterError(f'target MaxCut {target_cmax} exceeds edge count {m}')
    seen = Counter()
    for _ in range(int(max_tries)):
        g = gen_regular(n, d, rng, max_attempts=max_attempts)
        cmax, _ = brute_force_maxcut(g, cap=brute_force_cap)
        if cmax == target_cmax:
            return g
        seen[cmax] += 1
    raise GenerationError(
        f'no {d}-regular graph on {n} vertices with MaxCut {target_cmax} in '
        f'{max_tries} tries; observed {dict(sorted(seen.items()))}',
        histogram=dict(sorted(seen.items())),
    )


def permute_edge_labels(g, rng):
    """Same graph with edge labels shuffled by a uniform random permutation."""
    if g.m == 0:
        return g
    order = rng.permutation(g.m)
    return Graph(g.n, tuple(g.edges[i] for i in order), g.degree)


# ---------------------------------------------------------------------------
# Structure
# ---------------------------------------------------------------------------

def _induced(g, vertices):
    """Induced subgraph on ``vertices`` relabelled in increasing order.

    Edges keep their relative label order.  Returns ``(graph, mapping)`` where
    ``mapping[new] == old``.
    """
    mapping = tuple(sorted(vertices))
    index = {old: new for new, old in enumerate(mapping)}
    edges = tuple(
        (index[u], index[v]) for u, v in g.edges if u in index and v in index
    )
    return Graph(len(mapping), edges), mapping


def largest_component(g):
    """Induced subgraph on the largest connected component.

    Ties go to the component holding the lowest vertex index.  The empty
    graph is returned unchanged.
    """
    if g.n == 0:
        return g
    components = nx.connected_components(g.to_networkx())
    best = min(components, key=lambda c: (-len(c), min(c)))
    sub, _ = _induced(g, best)
    if g.degree is not None:
        sub = Graph(sub.n, sub.edges, g.degree)
    return sub


def neighborhood(g, edge_index, p):
    """Induced subgraph on vertices within distance ``p`` of an edge.

    Returns ``(subgraph, mapping)`` with ``mapping[new] == old``.
    """
    _check_edge_index(g, edge_index)
    if p < 0:
        raise ParameterError(f'neighborhood radius must be >= 0, got {p}')
    u, v = g.edges[edge_index]
    dist = nx.multi_source_dijkstra_path_length(g.to_networkx(), {u, v}, cutoff=p)
    return _induced(g, dist.keys())


def qaoa_tree_size(p):
    """Vertex count of the depth-p double tree hanging off an edge (degree 3)."""
    if int(p) < 1:
        raise ParameterError(f'p must be >= 1, got {p}')
    return 2 * (2 ** (int(p) + 1) - 1)


def _check_edge_index(g, edge_index):
    if not 0 <= edge_index < g.m:
        raise ParameterError(f'edge index {edge_index} out of range for m={g.m}')


def _require_cubic(g):
    if not g.is_regular(3):
        degrees = sorted(set(g.degrees()))
        raise ParameterError(f'graph must be 3-regular, found degrees {degrees}')


def _shared_neighbors(g, edge_index):
    u, v = g.edges[edge_index]
    return len((g.adjacency[u] & g.adjacency[v]) - {u, v})


def classify_edge_p1(g, edge_index):
    """Depth-1 edge type of a 3-regular graph by shared-neighbor count."""
    _require_cubic(g)
    _check_edge_index(g, edge_index)
    return EdgeP1Type(_shared_neighbors(g, edge_index))


def census_p1(g):
    """Count the depth-1 edge types of a 3-regular graph."""
    _require_cubic(g)
    if g.m == 0:
        raise UndefinedRatioError('census fractions are undefined for a graph with no edges')
    counts = Counter(_shared_neighbors(g, k) for k in range(g.m))
    return CensusP1(counts[2], counts[1], counts[0])


# ---------------------------------------------------------------------------
# MaxCut
# ---------------------------------------------------------------------------

def cut_counts(g, z):
    """Number of edges cut by each basis index in the integer array ``z``.

    Bit j of an index is the side of vertex j.
    """
    z = np.asarray(z)
    counts = np.zeros(z.shape, dtype=np.int32)
    for u, v in g.edges:
        counts += ((z >> u) ^ (z >> v)) & 1
    return counts


def brute_force_maxcut(g, cap=DEFAULT_BRUTE_FORCE_CAP):
    """Exact MaxCut by enumeration.

    Vertex 0 is held on side 0 (a cut and its complement cut the same edges),
    so ``2**(n-1)`` strings are scored.  The witness is the lowest-index
    optimum, returned as a string whose character j is the side of vertex j.
    """
    if g.n > cap:
        raise ResourceCapError(
            f'brute-force MaxCut limited to n <= {cap}, got n={g.n}'
        )
    if g.n == 0 or g.m == 0:
        return 0, '0' * g.n

    free = g.n - 1
    total = 1 << free
    chunk = 1 << min(free, _CHUNK_BITS)
    best_value, best_z = -1, 0
    for start in range(0, total, chunk):
        z = np.arange(start, min(start + chunk, total), dtype=np.int64) << 1
        counts = cut_counts(g, z)
        i = int(np.argmax(counts))
        if counts[i] > best_value:
            best_value, best_z = int(counts[i]), int(z[i])
    return best_value, format_bits(best_z, g.n)


def format_bits(z, n):
    """Bit string with character j equal to bit j of ``z``."""
    return ''.join('1' if (z >> j) & 1 else '0' for j in range(n))


def parse_bits(bits):
    """Inverse of ``format_bits``."""
    return sum(1 << j for j, ch in enumerate(bits) if ch == '1')


def cut_value(g, bits):
    """Edges cut by one assignment given as a bit string."""
    return int(cut_counts(g, np.array([parse_bits(bits)], dtype=np.int64))[0])


# ---------------------------------------------------------------------------
# Edge-list text format
# ---------------------------------------------------------------------------

def to_edge_list_text(g):
    """First line ``n m``, then one ``u v`` line per edge in label order."""
    lines = [f'{g.n} {g.m}']
    lines.extend(f'{u} {v}' for u, v in g.edges)
    return '\n'.join(lines) + '\n'


def from_edge_list_text(text, degree=None):
    rows = [line.split() for line in text.splitlines() if line.strip()]
    if not rows or len(rows[0]) != 2:
        raise ParameterError('edge-list header must be "n m"')
    try:
        n, m = int(rows[0][0]), int(rows[0][1])
        edges = [(int(a), int(b)) for a, b in rows[1:]]
    except ValueError as exc:
        raise ParameterError(f'malformed edge-list line: {exc}')
    if len(edges) != m:
        raise ParameterError(f'header declares m={m} but {len(edges)} edge lines follow')
    for u, v in edges:
        if u >= v:
            raise ParameterError(f'edge ({u}, {v}) must be written with u < v')
    return Graph(n, tuple(edges), degree)


def write_edge_list(g, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='\n') as f:
        f.write(to_edge_list_text(g))
    return path


def read_edge_list(path, degree=None):
    with open(path) as f:
        return from_edge_list_text(f.read(), degree)
