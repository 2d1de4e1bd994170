"""Simple undirected graphs with optional vertex colorings.

Edge-list text format (one directive per line, ``#`` starts a comment)::

    vertices 4        # optional; default is max vertex index + 1
    0 1               # an edge between vertices 0 and 1
    1 2
    color 0 0         # optional: vertex 0 has color 0
    color 1 1

Vertices are integers ``0..n-1``.  If any ``color`` line is present, every
vertex must be colored.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

MAX_WEIGHT_VERTICES = 20


class GraphError(ValueError):
    pass


class NotTwoColorableError(GraphError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset = field(default_factory=frozenset)
    coloring: tuple | None = None

    def __post_init__(self):
        if self.n < 1:
            raise GraphError("a graph needs at least one vertex")
        norm = set()
        for e in self.edges:
            u, v = (int(x) for x in e)
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))
        if self.coloring is not None:
            classes = tuple(tuple(sorted(int(v) for v in c)) for c in self.coloring)
            flat = sorted(v for c in classes for v in c)
            if flat != list(range(self.n)):
                raise GraphError("coloring must partition the vertex set")
            color_of = {v: i for i, c in enumerate(classes) for v in c}
            for u, v in norm:
                if color_of[u] == color_of[v]:
                    raise GraphError(f"edge ({u}, {v}) inside color class {color_of[u]}")
            object.__setattr__(self, "coloring", classes)

    def neighbors(self, j: int) -> list[int]:
        return sorted({v for u, v in self.edges if u == j} | {u for u, v in self.edges if v == j})

    def degree(self, j: int) -> int:
        return len(self.neighbors(j))

    def neighbor_mask(self, j: int) -> int:
        """Bit mask (bit i <-> vertex i) of the neighborhood of ``j``."""
        m = 0
        for k in self.neighbors(j):
            m |= 1 << k
        return m

    def with_coloring(self, coloring) -> "Graph":
        return Graph(self.n, self.edges, tuple(coloring))

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    # -- constructors -------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges, coloring=None) -> "Graph":
        return cls(n, frozenset(tuple(e) for e in edges), coloring)

    @classmethod
    def line(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def ring(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def star(cls, n: int) -> "Graph":
        """Star with center 0; its graph state is the n-qubit GHZ state (up to local unitaries)."""
        return cls.from_edges(n, [(0, i) for i in range(1, n)])

    ghz = star

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def two_color(g: Graph) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """BFS bipartition ``(V_A, V_B)``; vertex 0 of each component goes to ``V_A``."""
    color = [-1] * g.n
    adj = [g.neighbors(j) for j in range(g.n)]
    for start in range(g.n):
        if color[start] >= 0:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if color[v] < 0:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    raise NotTwoColorableError("graph contains an odd cycle")
    va = tuple(j for j in range(g.n) if color[j] == 0)
    vb = tuple(j for j in range(g.n) if color[j] == 1)
    return va, vb


def two_coloring_of(g: Graph) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The graph's own coloring if it has exactly two classes, else BFS."""
    if g.coloring is not None and len(g.coloring) == 2:
        return g.coloring
    if g.coloring is not None and len(g.coloring) == 1:
        return g.coloring[0], ()
    return two_color(g)


def greedy_coloring(g: Graph) -> tuple[tuple[int, ...], ...]:
    """Largest-degree-first greedy coloring."""
    order = sorted(range(g.n), key=lambda j: (-g.degree(j), j))
    color: dict[int, int] = {}
    for v in order:
        used = {color[u] for u in g.neighbors(v) if u in color}
        c = 0
        while c in used:
            c += 1
        color[v] = c
    k = max(color.values()) + 1
    return tuple(tuple(sorted(v for v in range(g.n) if color[v] == c)) for c in range(k))


def coloring_of(g: Graph) -> tuple[tuple[int, ...], ...]:
    return g.coloring if g.coloring is not None else greedy_coloring(g)


def parse_edge_list(text: str) -> Graph:
    edges = []
    colors: dict[int, int] = {}
    n_decl = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "vertices" and len(parts) == 2:
                n_decl = int(parts[1])
            elif parts[0] == "color" and len(parts) == 3:
                colors[int(parts[1])] = int(parts[2])
            elif len(parts) == 2:
                edges.append((int(parts[0]), int(parts[1])))
            else:
                raise ValueError
        except ValueError:
            raise GraphError(f"line {lineno}: cannot parse {raw!r}") from None
    used = [v for e in edges for v in e] + list(colors)
    n = n_decl if n_decl is not None else (max(used) + 1 if used else 0)
    coloring = None
    if colors:
        missing = [v for v in range(n) if v not in colors]
        if missing:
            raise GraphError(f"vertices {missing} have no color")
        labels = sorted(set(colors.values()))
        coloring = tuple(tuple(v for v in range(n) if colors[v] == c) for c in labels)
    return Graph.from_edges(n, edges, coloring)


def format_edge_list(g: Graph) -> str:
    lines = [f"vertices {g.n}"] + [f"{u} {v}" for u, v in g.sorted_edges()]
    if g.coloring is not None:
        for c, cls in enumerate(g.coloring):
            lines += [f"color {v} {c}" for v in cls]
    return "\n".join(lines) + "\n"
