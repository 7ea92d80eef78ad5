"""Multigraphs, simple projections, and connectivity queries.

Self-loops and multiplicities exist in the sampled multigraph but never
affect connectivity, degrees, or isolation: the simple projection erases
them, and connectivity of the multigraph and its projection coincide.
"""

from dataclasses import dataclass, field


@dataclass
class MultiGraph:
    """n vertices; unordered pair (i, j), 1 <= i <= j <= n, to multiplicity >= 1."""

    n: int
    edges: dict

    def __post_init__(self):
        for (i, j), m in self.edges.items():
            if not (1 <= i <= j <= self.n):
                raise ValueError(f"edge key ({i}, {j}) out of range for n={self.n}")
            if m < 1:
                raise ValueError(f"multiplicity {m} for ({i}, {j}) must be >= 1")

    @property
    def total_points(self):
        return sum(self.edges.values())


@dataclass
class SimpleGraph:
    """Loop-free deduplicated graph: edge set of pairs (i, j), i < j."""

    n: int
    edges: set


@dataclass
class ComponentReport:
    """Connected-component summary of a multigraph (loops ignored)."""

    n_components: int
    labels: list
    sizes: list  # descending
    isolated_count: int

    def to_json(self):
        return {
            "n_components": self.n_components,
            "labels": self.labels,
            "sizes": self.sizes,
            "isolated_count": self.isolated_count,
        }


class DisjointSet:
    """Union-find with path halving and union by rank."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n
        self.n_sets = n

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        self.n_sets -= 1
        return True


def project_simple(G: MultiGraph) -> SimpleGraph:
    """Erase multiplicities and self-loops."""
    return SimpleGraph(
        n=G.n, edges={(i, j) for (i, j) in G.edges if i != j}
    )


def component_summary(n, pairs):
    """(n_components, isolated_count, DisjointSet) over non-loop 1-based pairs."""
    ds = DisjointSet(n)
    touched = [False] * n
    for i, j in pairs:
        if i != j:
            ds.union(i - 1, j - 1)
            touched[i - 1] = True
            touched[j - 1] = True
    isolated = touched.count(False)
    return ds.n_sets, isolated, ds


def components(G: MultiGraph) -> ComponentReport:
    """Union-find component report; loops never join vertices."""
    n_comp, isolated, ds = component_summary(G.n, G.edges.keys())
    labels = [ds.find(v) for v in range(G.n)]
    sizes = {}
    for root in labels:
        sizes[root] = sizes.get(root, 0) + 1
    return ComponentReport(
        n_components=n_comp,
        labels=labels,
        sizes=sorted(sizes.values(), reverse=True),
        isolated_count=isolated,
    )


def is_connected(G: MultiGraph) -> bool:
    """True iff the (multi)graph has a single component; n = 1 is connected."""
    if G.n <= 1:
        return True
    n_comp, _, _ = component_summary(G.n, G.edges.keys())
    return n_comp == 1


def isolated_count(G: MultiGraph) -> int:
    """Vertices with zero non-loop incident multiplicity (loop-only counts)."""
    _, isolated, _ = component_summary(G.n, G.edges.keys())
    return isolated


def is_connected_simple(G: SimpleGraph) -> bool:
    if G.n <= 1:
        return True
    ds = DisjointSet(G.n)
    for i, j in G.edges:
        ds.union(i - 1, j - 1)
    return ds.n_sets == 1


def isolated_count_simple(G: SimpleGraph) -> int:
    touched = [False] * G.n
    for i, j in G.edges:
        touched[i - 1] = True
        touched[j - 1] = True
    return touched.count(False)


def bfs_components(G: MultiGraph) -> ComponentReport:
    """BFS reference implementation over the simple projection (test oracle)."""
    simple = project_simple(G)
    adj = {v: [] for v in range(1, G.n + 1)}
    for i, j in simple.edges:
        adj[i].append(j)
        adj[j].append(i)
    labels = [None] * G.n
    sizes = []
    for start in range(1, G.n + 1):
        if labels[start - 1] is not None:
            continue
        comp_id = len(sizes)
        queue = [start]
        labels[start - 1] = comp_id
        count = 0
        while queue:
            v = queue.pop()
            count += 1
            for w in adj[v]:
                if labels[w - 1] is None:
                    labels[w - 1] = comp_id
                    queue.append(w)
        sizes.append(count)
    isolated = sum(1 for s in sizes if s == 1)
    # size-1 components are exactly the degree-0 vertices of the projection
    return ComponentReport(
        n_components=len(sizes),
        labels=labels,
        sizes=sorted(sizes, reverse=True),
        isolated_count=isolated,
    )
