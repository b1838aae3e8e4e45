"""Sparse weighted graphs, rooted trees, balls and their structural statistics.

The central type is :class:`WeightedGraph`, a CSR adjacency over vertices
0..n-1 with one nonnegative coupling per edge, a field per vertex, and an
optional clamp (+1/-1) per vertex.  Arrays are frozen after construction;
all derived objects (balls, spanning trees) copy what they need.

Vertex sets here use plain sorted numpy arrays; neighbor lists are sorted
ascending, which the tree constructions below rely on for determinism.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetError
from .rng import POISSON_MEAN_CAP, poisson_by_inversion, substream

DEFAULT_VISIT_BUDGET = 10**7


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with couplings, fields and clamps in CSR form."""

    n: int
    indptr: np.ndarray  # int64, length n + 1
    indices: np.ndarray  # int64, neighbor ids, ascending within each row
    weights: np.ndarray  # float64, coupling per directed half-edge
    h: np.ndarray  # float64, field per vertex
    clamp: np.ndarray  # int8, 0 free / +1 / -1

    @property
    def num_edges(self) -> int:
        return self.indices.shape[0] // 2

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        """(neighbor ids, couplings) for v, ids ascending."""
        lo, hi = self.indptr[v], self.indptr[v + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def edge_array(self) -> np.ndarray:
        """Edges as an (m, 2) int64 array with u < v, lexicographically sorted."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def edge_weights(self) -> np.ndarray:
        """Couplings aligned with edge_array()."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        return self.weights[rows < self.indices]

    def beta_max(self) -> float:
        return float(self.weights.max()) if self.weights.size else 0.0

    def free_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.clamp == 0).astype(np.int64)

    def with_vertex_data(self, h=None, clamp=None) -> "WeightedGraph":
        """Same adjacency with replaced fields and/or clamps."""
        new_h = self.h if h is None else np.asarray(h, dtype=np.float64)
        new_c = self.clamp if clamp is None else np.asarray(clamp, dtype=np.int8)
        if new_h.shape != (self.n,) or new_c.shape != (self.n,):
            raise ValueError("vertex data must have shape (n,)")
        if not np.all(np.isin(new_c, (-1, 0, 1))):
            raise ValueError("clamp values must be -1, 0 or +1")
        return WeightedGraph(
            self.n, self.indptr, self.indices, self.weights,
            _freeze(new_h.copy()), _freeze(new_c.copy()),
        )


def graph_from_edges(n, edges, h=None, clamp=None) -> WeightedGraph:
    """Build a WeightedGraph from (u, v, coupling) triples.

    Rejects loops, duplicate edges, endpoints outside range and negative
    couplings (only cooperative interactions are supported).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    edges = list(edges)
    m = len(edges)
    us = np.empty(m, dtype=np.int64)
    vs = np.empty(m, dtype=np.int64)
    ws = np.empty(m, dtype=np.float64)
    for k, (u, v, w) in enumerate(edges):
        us[k], vs[k], ws[k] = u, v, w
    if m:
        if us.min(initial=n) < 0 or vs.min(initial=n) < 0 or us.max(initial=-1) >= n or vs.max(initial=-1) >= n:
            raise ValueError("edge endpoint out of range")
        if np.any(us == vs):
            raise ValueError("self-loops are not allowed")
        if np.any(ws < 0.0) or not np.all(np.isfinite(ws)):
            raise ValueError("couplings must be finite and >= 0")
        lo = np.minimum(us, vs)
        hi = np.maximum(us, vs)
        if len({(int(a), int(b)) for a, b in zip(lo, hi)}) != m:
            raise ValueError("duplicate edge")
    else:
        lo = us
        hi = vs
    src = np.concatenate([lo, hi])
    dst = np.concatenate([hi, lo])
    wgt = np.concatenate([ws, ws])
    order = np.lexsort((dst, src))
    src, dst, wgt = src[order], dst[order], wgt[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    if h is None:
        h = np.zeros(n)
    if clamp is None:
        clamp = np.zeros(n, dtype=np.int8)
    g = WeightedGraph(
        int(n), _freeze(indptr), _freeze(dst.astype(np.int64)),
        _freeze(wgt.astype(np.float64)), np.asarray(h, dtype=np.float64),
        np.asarray(clamp, dtype=np.int8),
    )
    # route through the validating constructor for h/clamp
    return g.with_vertex_data(h=g.h, clamp=g.clamp)


@dataclass(frozen=True)
class RootedTree:
    """Rooted tree stored as a parent array with parent[i] < i and root 0.

    ``label`` carries the original vertex id of each node where one exists
    (-1 otherwise).  The index order makes a single descending loop a valid
    children-before-parents fold, which the marginal kernels exploit.
    """

    parent: np.ndarray  # int64, parent[0] == -1
    depth: np.ndarray  # int64
    label: np.ndarray  # int64, original vertex or -1

    @property
    def size(self) -> int:
        return self.parent.shape[0]

    @property
    def height(self) -> int:
        return int(self.depth.max())

    def num_children(self) -> np.ndarray:
        counts = np.zeros(self.size, dtype=np.int64)
        if self.size > 1:
            np.add.at(counts, self.parent[1:], 1)
        return counts

    def degrees(self) -> np.ndarray:
        """Degree of each node in the tree (children plus parent link)."""
        deg = self.num_children()
        deg[1:] += 1
        return deg

    def children_lists(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.size)]
        for i in range(1, self.size):
            out[self.parent[i]].append(i)
        return out


def make_rooted_tree(parent, depth=None, label=None) -> RootedTree:
    parent = np.asarray(parent, dtype=np.int64)
    nn = parent.shape[0]
    if nn < 1 or parent[0] != -1:
        raise ValueError("root must be node 0 with parent -1")
    if nn > 1 and not np.all((parent[1:] >= 0) & (parent[1:] < np.arange(1, nn))):
        raise ValueError("parent[i] < i required for i >= 1")
    if depth is None:
        depth = np.zeros(nn, dtype=np.int64)
        for i in range(1, nn):
            depth[i] = depth[parent[i]] + 1
    depth = np.asarray(depth, dtype=np.int64)
    if label is None:
        label = np.full(nn, -1, dtype=np.int64)
    label = np.asarray(label, dtype=np.int64)
    return RootedTree(_freeze(parent.copy()), _freeze(depth.copy()), _freeze(label.copy()))


def tree_as_graph(tree: RootedTree, edge_beta=1.0, h=None, clamp=None) -> WeightedGraph:
    """The tree itself as a WeightedGraph on vertex ids = node indices.

    ``edge_beta`` is either a scalar or an array aligned with nodes giving
    the coupling of each node's parent edge (entry 0 unused).
    """
    nn = tree.size
    betas = np.broadcast_to(np.asarray(edge_beta, dtype=np.float64), (nn,))
    edges = [(int(tree.parent[i]), i, float(betas[i])) for i in range(1, nn)]
    return graph_from_edges(nn, edges, h=h, clamp=clamp)


def tree_excess(g: WeightedGraph) -> int:
    """Number of independent cycles assuming the graph is connected."""
    return g.num_edges - g.n + 1


# ---------------------------------------------------------------------------
# balls


@dataclass(frozen=True)
class Ball:
    """Induced subgraph on the vertices within a fixed hop radius of a center.

    ``vertices`` lists original ids in BFS discovery order (center first,
    level by level); ``subgraph`` is the induced graph on local indices
    aligned with that order.  ``dist`` gives the hop distance of each local
    vertex from the center.
    """

    center: int
    radius: int
    vertices: np.ndarray  # original ids, BFS order
    dist: np.ndarray  # per local vertex
    subgraph: WeightedGraph

    @property
    def size(self) -> int:
        return self.vertices.shape[0]

    def sphere(self) -> np.ndarray:
        """Original ids at hop distance exactly ``radius``, ascending."""
        return np.sort(self.vertices[self.dist == self.radius])

    def local_of(self, vertex: int) -> int:
        pos = np.flatnonzero(self.vertices == vertex)
        if pos.size == 0:
            raise ValueError(f"vertex {vertex} not in ball")
        return int(pos[0])


def ball(g: WeightedGraph, v: int, radius: int) -> Ball:
    """Vertices within ``radius`` hops of v with the induced edges."""
    if not 0 <= v < g.n:
        raise ValueError(f"center {v} out of range")
    if radius < 0:
        raise ValueError("radius must be >= 0")
    dist_of = {v: 0}
    order = [v]
    frontier = [v]
    for level in range(1, radius + 1):
        nxt = []
        for u in frontier:
            nbrs, _ = g.neighbors(u)
            for w in nbrs:
                w = int(w)
                if w not in dist_of:
                    dist_of[w] = level
                    order.append(w)
                    nxt.append(w)
        frontier = nxt
    vertices = np.array(order, dtype=np.int64)
    local = {u: i for i, u in enumerate(order)}
    dist = np.array([dist_of[u] for u in order], dtype=np.int64)
    edges = []
    for u in order:
        nbrs, wts = g.neighbors(u)
        for w, b in zip(nbrs, wts):
            w = int(w)
            if w in local and u < w:
                edges.append((local[u], local[w], float(b)))
    sub = graph_from_edges(
        len(order), edges,
        h=g.h[vertices], clamp=g.clamp[vertices],
    )
    return Ball(int(v), int(radius), _freeze(vertices), _freeze(dist), sub)


def bfs_spanning_tree(b: Ball) -> tuple[RootedTree, list[tuple[int, int]]]:
    """Breadth-first spanning tree of a ball plus its non-tree edges.

    Levels are processed in ascending original-vertex order and each
    processed vertex adopts its not-yet-attached neighbors in ascending
    order, so the tree is a deterministic function of the ball.  Returns
    the tree (labels = original ids) and the leftover edges as local index
    pairs; their count equals the cycle excess of the ball.
    """
    sub = b.subgraph
    nn = sub.n
    node_of = np.full(nn, -1, dtype=np.int64)  # local vertex -> tree node
    parent = [-1]
    depth = [0]
    label = [int(b.vertices[0])]
    node_of[0] = 0
    tree_edges = set()
    # collect local ids level by level
    for level in range(0, int(b.dist.max(initial=0))):
        members = np.flatnonzero(b.dist == level)
        members = members[np.argsort(b.vertices[members])]
        for u in members:
            nbrs, _ = sub.neighbors(int(u))
            for w in nbrs:
                w = int(w)
                if node_of[w] < 0:
                    node_of[w] = len(parent)
                    parent.append(int(node_of[u]))
                    depth.append(level + 1)
                    label.append(int(b.vertices[w]))
                    tree_edges.add((min(int(u), w), max(int(u), w)))
    tree = make_rooted_tree(np.array(parent), np.array(depth), np.array(label))
    extra = [
        (int(u), int(w))
        for u, w in sub.edge_array()
        if (int(u), int(w)) not in tree_edges
    ]
    return tree, extra


def path_density(b: Ball, l: int | None = None, budget: int = DEFAULT_VISIT_BUDGET) -> int:
    """Largest degree sum along a self-avoiding path from the ball's center.

    Paths start at the center, stay inside the ball, and use at most ``l``
    edges (default: the ball radius).  Degrees are taken inside the ball.
    Exhaustive depth-first search; raises BudgetError past ``budget`` path
    extensions.
    """
    if l is None:
        l = b.radius
    if l < 0:
        raise ValueError("path length bound must be >= 0")
    sub = b.subgraph
    deg = sub.degrees()
    visited = np.zeros(sub.n, dtype=bool)
    visited[0] = True
    best = total = int(deg[0])
    visits = 0
    # stack of (vertex, iterator position into its neighbor slice)
    stack = [(0, int(sub.indptr[0]))]
    while stack:
        u, ptr = stack[-1]
        end = int(sub.indptr[u + 1])
        advanced = False
        while ptr < end:
            w = int(sub.indices[ptr])
            ptr += 1
            if not visited[w] and len(stack) <= l:
                stack[-1] = (u, ptr)
                visited[w] = True
                total += int(deg[w])
                if total > best:
                    best = total
                visits += 1
                if visits > budget:
                    raise BudgetError(
                        f"path enumeration exceeded {budget} extensions"
                    )
                stack.append((w, int(sub.indptr[w])))
                advanced = True
                break
        if not advanced:
            visited[u] = False
            total -= int(deg[u])
            stack.pop()
    return best


def tree_path_density(tree: RootedTree, max_depth: int | None = None) -> int:
    """Largest degree sum on a root-to-descendant path of a rooted tree.

    With ``max_depth`` set, only nodes at depth <= max_depth contribute and
    degrees are recomputed inside that truncation (children below the cut
    do not count).
    """
    deg = tree.degrees()
    if max_depth is not None:
        kept = tree.depth <= max_depth
        deg = deg.copy()
        boundary = tree.depth == max_depth
        deg[boundary] = np.where(tree.parent[boundary] >= 0, 1, 0)
    else:
        kept = np.ones(tree.size, dtype=bool)
    acc = np.zeros(tree.size, dtype=np.int64)
    acc[0] = deg[0]
    best = int(acc[0]) if kept[0] else 0
    for i in range(1, tree.size):
        if not kept[i]:
            continue
        acc[i] = acc[tree.parent[i]] + deg[i]
        if acc[i] > best:
            best = int(acc[i])
    return best


# ---------------------------------------------------------------------------
# generators


def star_graph(leaves: int, beta: float = 1.0) -> WeightedGraph:
    """Hub vertex 0 joined to ``leaves`` leaf vertices."""
    if leaves < 1:
        raise ValueError("need at least one leaf")
    return graph_from_edges(leaves + 1, [(0, j, beta) for j in range(1, leaves + 1)])


def path_graph(n: int, beta: float = 1.0) -> WeightedGraph:
    if n < 1:
        raise ValueError("n must be >= 1")
    return graph_from_edges(n, [(i, i + 1, beta) for i in range(n - 1)])


def cycle_graph(n: int, beta: float = 1.0) -> WeightedGraph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    edges = [(i, i + 1, beta) for i in range(n - 1)] + [(0, n - 1, beta)]
    return graph_from_edges(n, edges)


def generate_erdos_renyi(n: int, d: float, seed: int, beta: float = 1.0) -> WeightedGraph:
    """Sparse random graph on n vertices with edge probability d/n.

    The edge count is drawn Binomial(n*(n-1)/2, d/n), then that many
    distinct pairs are placed uniformly (by rejection; the complement is
    sampled instead when more than half of all pairs are present).  The
    law matches independent d/n edges and the construction is a
    deterministic function of the seed.  Every edge gets coupling ``beta``
    and every vertex field 0.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= d <= n:
        raise ValueError(f"d must lie in [0, n], got {d}")
    if beta < 0.0:
        raise ValueError("beta must be >= 0")
    rng = substream(seed, "erdos-renyi-graph")
    npairs = n * (n - 1) // 2
    m = int(rng.binomial(npairs, d / n)) if npairs else 0

    def draw_pairs(count: int) -> set[tuple[int, int]]:
        chosen: set[tuple[int, int]] = set()
        while len(chosen) < count:
            k = max(64, 2 * (count - len(chosen)))
            a = rng.integers(0, n, size=k)
            b = rng.integers(0, n, size=k)
            for u, v in zip(a, b):
                if u == v:
                    continue
                pair = (int(min(u, v)), int(max(u, v)))
                chosen.add(pair)
                if len(chosen) == count:
                    break
        return chosen

    if m <= npairs // 2:
        pairs = sorted(draw_pairs(m))
    else:
        excluded = draw_pairs(npairs - m)
        pairs = [
            (u, v)
            for u in range(n)
            for v in range(u + 1, n)
            if (u, v) not in excluded
        ]
    return graph_from_edges(n, [(u, v, beta) for u, v in pairs])


def generate_galton_watson(d: float, depth: int, seed: int,
                           max_nodes: int = DEFAULT_VISIT_BUDGET) -> RootedTree:
    """Branching tree with Poisson(d) offspring, truncated below ``depth``.

    Offspring counts are drawn by one-uniform inversion per node in
    breadth-first order, so the tree is a deterministic function of the
    seed.  Nodes at the truncation depth get no children.
    """
    if not 0.0 < d <= POISSON_MEAN_CAP:
        raise ValueError(f"offspring mean must lie in (0, {POISSON_MEAN_CAP}], got {d}")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    rng = substream(seed, "galton-watson-tree")
    parent = [-1]
    depths = [0]
    level = [0]
    for r in range(depth):
        if not level:
            break
        us = rng.random(len(level))
        nxt = []
        for node, u in zip(level, us):
            kids = poisson_by_inversion(float(u), d)
            for _ in range(kids):
                if len(parent) >= max_nodes:
                    raise BudgetError(f"tree exceeded {max_nodes} nodes")
                nxt.append(len(parent))
                parent.append(node)
                depths.append(r + 1)
        level = nxt
    return make_rooted_tree(np.array(parent), np.array(depths))


# ---------------------------------------------------------------------------
# file format


def write_graph(g: WeightedGraph, path_or_file, comment: str | None = None) -> None:
    """Serialize a graph to the plain-text exchange format.

    Layout: optional '#' comment lines, a header line "n m", then m edge
    lines "u v coupling" with u < v in lexicographic order, then n field
    lines "v h".  Clamps are runtime state and are not stored.
    """
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    f = open(path_or_file, "w") if own else path_or_file
    try:
        if comment:
            for line in comment.splitlines():
                f.write(f"# {line}\n")
        edges = g.edge_array()
        wts = g.edge_weights()
        f.write(f"{g.n} {g.num_edges}\n")
        for (u, v), w in zip(edges, wts):
            f.write(f"{u} {v} {float(w)!r}\n")
        for v in range(g.n):
            f.write(f"{v} {float(g.h[v])!r}\n")
    finally:
        if own:
            f.close()


def read_graph(path_or_file) -> WeightedGraph:
    """Parse the plain-text graph format written by :func:`write_graph`."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    f = open(path_or_file, "r") if own else path_or_file
    try:
        tokens = []
        for line in f:
            line = line.split("#", 1)[0].strip()
            if line:
                tokens.append(line.split())
    finally:
        if own:
            f.close()
    if not tokens:
        raise ValueError("empty graph file")
    if len(tokens[0]) != 2:
        raise ValueError("header must be 'n m'")
    n, m = int(tokens[0][0]), int(tokens[0][1])
    if len(tokens) != 1 + m + n:
        raise ValueError(
            f"expected {1 + m + n} data lines for n={n} m={m}, got {len(tokens)}"
        )
    edges = []
    for row in tokens[1:1 + m]:
        if len(row) != 3:
            raise ValueError(f"bad edge line: {' '.join(row)}")
        edges.append((int(row[0]), int(row[1]), float(row[2])))
    h = np.zeros(n)
    seen = np.zeros(n, dtype=bool)
    for row in tokens[1 + m:]:
        if len(row) != 2:
            raise ValueError(f"bad field line: {' '.join(row)}")
        v = int(row[0])
        if not 0 <= v < n or seen[v]:
            raise ValueError(f"bad or repeated field vertex {v}")
        seen[v] = True
        h[v] = float(row[1])
    return graph_from_edges(n, edges, h=h)


def graph_to_text(g: WeightedGraph, comment: str | None = None) -> str:
    buf = io.StringIO()
    write_graph(g, buf, comment=comment)
    return buf.getvalue()


def graph_from_text(text: str) -> WeightedGraph:
    return read_graph(io.StringIO(text))
