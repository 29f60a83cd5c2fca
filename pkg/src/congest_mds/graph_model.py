"""Simple undirected graphs, arboricity-certified generators and edge-list I/O.

Every generator returns the graph together with a certificate: an explicit
list of edge-disjoint forests whose union is the edge set.  The number of
forests is an upper bound on the arboricity, which is all the distributed
algorithms need.
"""
from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Edge = tuple[int, int]


class ParamError(ValueError):
    """Invalid generator parameters."""


class GraphParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[Edge, ...]
    adjacency: tuple[tuple[int, ...], ...] = field(compare=False, repr=False)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Graph":
        if n < 0:
            raise ValueError("node count must be non-negative")
        seen: set[Edge] = set()
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
            adj[u].append(v)
            adj[v].append(u)
        return cls(n, tuple(sorted(seen)), tuple(tuple(sorted(a)) for a in adj))

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self.adjacency[u]

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def digest(self) -> str:
        """Stable content hash (sha256 of the canonical edge list)."""
        return hashlib.sha256(write_graph(self).encode()).hexdigest()


def max_degree(g: Graph) -> int:
    return max((len(a) for a in g.adjacency), default=0)


# ---------------------------------------------------------------------------
# text edge-list format: header "n m", then m lines "u v"


def write_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def _ints(line: str, lineno: int) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise GraphParseError(lineno, f"expected two integers, got {line.strip()!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise GraphParseError(lineno, f"non-integer field in {line.strip()!r}") from None


def read_graph(text: str) -> Graph:
    """Parse the edge-list format.  Blank lines and ``#`` comments are skipped.

    Edges may be given as ``u v`` in either order; they are normalised so
    that ``write_graph(read_graph(t))`` is the canonical form of ``t``.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line))
    if not rows:
        raise GraphParseError(1, "missing header line 'n m'")
    hline, header = rows[0]
    n, m = _ints(header, hline)
    if n < 0 or m < 0:
        raise GraphParseError(hline, "negative count in header")
    body = rows[1:]
    if len(body) != m:
        where = body[m][0] if len(body) > m else (body[-1][0] + 1 if body else hline + 1)
        raise GraphParseError(where, f"header declares {m} edges, found {len(body)}")
    seen: set[Edge] = set()
    for lineno, line in body:
        u, v = _ints(line, lineno)
        if u == v:
            raise GraphParseError(lineno, f"self-loop at node {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(lineno, f"node id out of range 0..{n - 1}")
        e = (min(u, v), max(u, v))
        if e in seen:
            raise GraphParseError(lineno, f"duplicate edge {e[0]} {e[1]}")
        seen.add(e)
    return Graph.from_edges(n, seen)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Certificate:
    """Edge-disjoint forests whose union is the edge set of a graph."""

    forests: tuple[tuple[Edge, ...], ...]

    @property
    def bound(self) -> int:
        return len(self.forests)


def is_acyclic(n: int, edges: Iterable[Edge]) -> bool:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def verify_certificate(g: Graph, cert: Certificate) -> bool:
    union: set[Edge] = set()
    total = 0
    for forest in cert.forests:
        if not is_acyclic(g.n, forest):
            return False
        union.update(forest)
        total += len(forest)
    return total == len(union) and union == set(g.edges)


def _cert(forests: Iterable[Iterable[Edge]]) -> Certificate:
    out = []
    for forest in forests:
        fs = tuple(sorted((min(u, v), max(u, v)) for u, v in forest))
        if fs:
            out.append(fs)
    return Certificate(tuple(out))


# ---------------------------------------------------------------------------
# generators


@dataclass(frozen=True)
class GraphSpec:
    """Generator request.

    ``n`` is the node count for path/cycle/star/tree/complete/forest-union
    (a star on ``n`` nodes is K(1, n-1) with centre 0).  ``rows``/``cols``
    apply to grids and ``k`` to subdivided cliques.
    """

    kind: str
    n: int | None = None
    k: int | None = None
    rows: int | None = None
    cols: int | None = None
    alpha: int | None = None
    seed: int = 0

    def label(self) -> str:
        parts = [self.kind]
        for name in ("n", "k", "rows", "cols", "alpha"):
            val = getattr(self, name)
            if val is not None:
                parts.append(f"{name}{val}")
        if self.kind in RANDOM_KINDS:
            parts.append(f"s{self.seed}")
        return "-".join(parts)

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> "GraphSpec":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ParamError(f"unknown GraphSpec fields: {sorted(unknown)}")
        return cls(**d)


RANDOM_KINDS = {"tree", "forest-union"}


def _need(value: int | None, name: str, kind: str, minimum: int = 1) -> int:
    if value is None:
        raise ParamError(f"{kind}: parameter '{name}' is required")
    if not isinstance(value, int) or value < minimum:
        raise ParamError(f"{kind}: parameter '{name}' must be an integer >= {minimum}, got {value!r}")
    return value


def path_graph(n: int) -> tuple[Graph, Certificate]:
    edges = [(i, i + 1) for i in range(n - 1)]
    return Graph.from_edges(n, edges), _cert([edges])


def cycle_graph(n: int) -> tuple[Graph, Certificate]:
    edges = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    return Graph.from_edges(n, edges), _cert([edges[:-1], edges[-1:]])


def star_graph(n: int) -> tuple[Graph, Certificate]:
    edges = [(0, i) for i in range(1, n)]
    return Graph.from_edges(n, edges), _cert([edges])


def grid_graph(rows: int, cols: int) -> tuple[Graph, Certificate]:
    idx = lambda r, c: r * cols + c  # noqa: E731
    horiz = [(idx(r, c), idx(r, c + 1)) for r in range(rows) for c in range(cols - 1)]
    vert = [(idx(r, c), idx(r + 1, c)) for r in range(rows - 1) for c in range(cols)]
    return Graph.from_edges(rows * cols, horiz + vert), _cert([horiz, vert])


def subdivided_clique(k: int) -> tuple[Graph, Certificate]:
    """K_k with every edge subdivided once: originals are 0..k-1."""
    left, right = [], []
    s = k
    for i in range(k):
        for j in range(i + 1, k):
            left.append((i, s))
            right.append((j, s))
            s += 1
    return Graph.from_edges(s, left + right), _cert([left, right])


def complete_graph(n: int) -> tuple[Graph, Certificate]:
    # Walecki zig-zag: K_{2h} splits into h Hamiltonian paths; odd n drops a vertex.
    size = n + (n % 2)
    h = size // 2
    forests = []
    for i in range(h):
        order = [i]
        for step in range(1, size):
            off = (step + 1) // 2
            order.append((i + off) % size if step % 2 else (i - off) % size)
        forests.append([(a, b) for a, b in zip(order, order[1:]) if a < n and b < n])
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return Graph.from_edges(n, edges), _cert(forests)


def random_tree(n: int, rng: random.Random) -> list[Edge]:
    order = list(range(n))
    rng.shuffle(order)
    return [(order[i], order[rng.randrange(i)]) for i in range(1, n)]


def forest_union(n: int, alpha: int, seed: int) -> tuple[Graph, Certificate]:
    """Union of ``alpha`` random spanning trees, each over a fresh random node order.

    An edge already drawn by an earlier tree is dropped from later ones, which
    keeps the forests edge-disjoint and still acyclic.
    """
    rng = random.Random(seed)
    seen: set[Edge] = set()
    forests = []
    for _ in range(alpha):
        forest = []
        for u, v in random_tree(n, rng):
            e = (min(u, v), max(u, v))
            if e not in seen:
                seen.add(e)
                forest.append(e)
        forests.append(forest)
    cert = _cert(forests)
    return Graph.from_edges(n, seen), cert


def generate(spec: GraphSpec) -> tuple[Graph, Certificate]:
    kind = spec.kind
    if kind == "path":
        return path_graph(_need(spec.n, "n", kind))
    if kind == "cycle":
        return cycle_graph(_need(spec.n, "n", kind, 3))
    if kind == "star":
        return star_graph(_need(spec.n, "n", kind))
    if kind == "tree":
        n = _need(spec.n, "n", kind)
        edges = random_tree(n, random.Random(spec.seed))
        return Graph.from_edges(n, edges), _cert([edges])
    if kind == "grid":
        return grid_graph(_need(spec.rows, "rows", kind), _need(spec.cols, "cols", kind))
    if kind == "subdivided-clique":
        return subdivided_clique(_need(spec.k, "k", kind, 2))
    if kind == "complete":
        return complete_graph(_need(spec.n, "n", kind))
    if kind == "forest-union":
        return forest_union(_need(spec.n, "n", kind), _need(spec.alpha, "alpha", kind), spec.seed)
    raise ParamError(f"unknown generator kind {kind!r}")


KINDS = ("path", "cycle", "star", "tree", "grid", "subdivided-clique", "complete", "forest-union")


def fixture_specs(count: int = 200, small: int = 60, seed: int = 20201) -> list[GraphSpec]:
    """Deterministic forest-union fixture family used by the acceptance suite.

    The first ``small`` fixtures have 8 <= n <= 22 (in oracle budget); the rest
    are log-uniform in [23, 4096].  Alpha cycles through 1, 2, 3.
    """
    rng = random.Random(seed)
    specs = []
    for i in range(count):
        alpha = 1 + i % 3
        if i < small:
            n = 8 + i % 15
        else:
            n = int(round(math.exp(rng.uniform(math.log(23), math.log(4096)))))
        specs.append(GraphSpec("forest-union", n=n, alpha=alpha, seed=1000 + i))
    return specs
