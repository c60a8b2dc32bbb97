"""Graph input: DOT parsing, importance ranking, fallback layout.

Supported DOT subset: ``graph``/``digraph`` with plain node and edge
statements, quoted or bare identifiers, attribute lists.  ``pos="x,y"``
and ``label`` are interpreted; all other attributes are carried along as
opaque strings.  Directed edges are treated as undirected, self-loops are
dropped (counted), duplicate edges collapse.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .geometry import Rect


class DotSyntaxError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} at line {line}, column {col}")
        self.line = line
        self.col = col


class EmptyGraphError(Exception):
    pass


@dataclass
class RankedGraph:
    """Input graph with positions and an importance ordering."""

    ids: list[str]
    labels: list[str]
    positions: np.ndarray  # (N, 2); rows are NaN while unpositioned
    edges: list[tuple[int, int]]  # u < v, deduplicated
    order: np.ndarray  # permutation of range(N), most important first
    directed: bool = False
    dropped_self_loops: int = 0
    node_attrs: list[dict[str, str]] = field(default_factory=list)

    @property
    def position_incomplete(self) -> bool:
        return bool(np.isnan(self.positions).any())

    @property
    def n(self) -> int:
        return len(self.ids)

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def default_node_radius(self) -> float:
        """Initial node size: 1/40 of the smaller raw extent."""
        raw = Rect.bounding(self.positions)
        base = min(raw.w, raw.h)
        if base == 0.0:
            base = max(raw.w, raw.h)
        if base == 0.0:
            base = 40.0  # single point; any positive size works
        return base / 40.0

    def bbox(self, node_radius: float | None = None) -> Rect:
        """Raw position bounds inflated by the initial node radius."""
        if self.position_incomplete:
            raise ValueError("graph is position-incomplete; run fallback_layout first")
        r = self.default_node_radius() if node_radius is None else node_radius
        return Rect.bounding(self.positions).inflated(r)


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*|\#[^\n]*|/\*.*?\*/)
  | (?P<arrow>->|--)
  | (?P<punct>[{}\[\];,=])
  | (?P<quoted>"(?:[^"\\]|\\.)*")
  | (?P<word>[A-Za-z0-9_.\-+]+)
    """,
    re.VERBOSE | re.DOTALL,
)


def _tokenize(text: str):
    pos = 0
    line, col = 1, 1
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DotSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            if kind == "quoted":
                value = value[1:-1].replace('\\"', '"').replace("\\\\", "\\")
            tokens.append((kind if kind != "quoted" else "word", value, line, col))
        nl = m.group().count("\n")
        if nl:
            line += nl
            col = len(m.group()) - m.group().rfind("\n")
        else:
            col += len(m.group())
        pos = m.end()
    tokens.append(("eof", "", line, col))
    return tokens


def parse_dot(text: str) -> RankedGraph:
    """Parse the supported DOT subset into an unordered RankedGraph."""
    toks = _tokenize(text)
    k = 0

    def peek():
        return toks[k]

    def take(expect_kind=None, expect_val=None):
        nonlocal k
        kind, val, line, col = toks[k]
        if expect_kind and kind != expect_kind:
            raise DotSyntaxError(f"expected {expect_kind}, found {val!r}", line, col)
        if expect_val and val != expect_val:
            raise DotSyntaxError(f"expected {expect_val!r}, found {val!r}", line, col)
        k += 1
        return val, line, col

    kind, val, line, col = peek()
    if val == "strict":
        take()
        kind, val, line, col = peek()
    if val not in ("graph", "digraph"):
        raise DotSyntaxError("expected 'graph' or 'digraph'", line, col)
    directed = val == "digraph"
    take()
    if peek()[0] == "word":
        take()  # graph name
    take("punct", "{")

    ids: list[str] = []
    index: dict[str, int] = {}
    labels: dict[int, str] = {}
    attrs: dict[int, dict[str, str]] = {}
    pos_map: dict[int, tuple[float, float]] = {}
    raw_edges: list[tuple[int, int]] = []
    dropped = 0

    def node_id(name: str) -> int:
        if name not in index:
            index[name] = len(ids)
            ids.append(name)
            attrs[index[name]] = {}
        return index[name]

    def parse_attr_list() -> dict[str, tuple[str, int, int]]:
        out: dict[str, tuple[str, int, int]] = {}
        take("punct", "[")
        while True:
            kind, val, line, col = peek()
            if val == "]":
                take()
                break
            key, _, _ = take("word")
            take("punct", "=")
            value, vline, vcol = take("word")
            out[key] = (value, vline, vcol)
            if peek()[1] in (",", ";"):
                take()
        return out

    while True:
        kind, val, line, col = peek()
        if val == "}":
            take()
            break
        if kind == "eof":
            raise DotSyntaxError("unexpected end of input (missing '}')", line, col)
        if val == ";":
            take()
            continue
        if val in ("graph", "node", "edge") and toks[k + 1][1] == "[":
            take()
            parse_attr_list()  # defaults: accepted, ignored
            continue
        if kind != "word":
            raise DotSyntaxError(f"unexpected token {val!r}", line, col)
        name, line, col = take("word")
        if peek()[1] == "=":  # bare graph attribute assignment
            take()
            take("word")
            continue
        chain = [node_id(name)]
        while peek()[0] == "arrow":
            take()
            nxt, _, _ = take("word")
            chain.append(node_id(nxt))
        stmt_attrs = parse_attr_list() if peek()[1] == "[" else {}
        if len(chain) == 1:
            v = chain[0]
            for key, (value, vline, vcol) in stmt_attrs.items():
                if key == "label":
                    labels[v] = value
                elif key == "pos":
                    pos_map[v] = _parse_pos(value, vline, vcol)
                else:
                    attrs[v][key] = value
        else:
            for u, v in zip(chain, chain[1:]):
                if u == v:
                    dropped += 1
                else:
                    raw_edges.append((min(u, v), max(u, v)))

    if not ids:
        raise EmptyGraphError("graph has no nodes")

    n = len(ids)
    positions = np.full((n, 2), np.nan)
    for v, (x, y) in pos_map.items():
        positions[v] = (x, y)
    edges = sorted(set(raw_edges))
    label_list = [labels.get(i, ids[i]) for i in range(n)]
    return RankedGraph(
        ids=ids,
        labels=label_list,
        positions=positions,
        edges=edges,
        order=np.arange(n),
        directed=directed,
        dropped_self_loops=dropped,
        node_attrs=[attrs[i] for i in range(n)],
    )


def _parse_pos(value: str, line: int, col: int) -> tuple[float, float]:
    value = value.rstrip("!")
    parts = value.split(",")
    if len(parts) != 2:
        raise DotSyntaxError(f"malformed pos attribute {value!r}", line, col)
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise DotSyntaxError(f"malformed pos attribute {value!r}", line, col) from None


def to_dot(graph: RankedGraph) -> str:
    """Serialize back to the supported subset (round-trips structurally)."""
    lines = ["digraph {" if graph.directed else "graph {"]
    sep = "->" if graph.directed else "--"
    for i, name in enumerate(graph.ids):
        parts = []
        if not math.isnan(graph.positions[i, 0]):
            parts.append(f'pos="{graph.positions[i, 0]:.17g},{graph.positions[i, 1]:.17g}"')
        if graph.labels[i] != name:
            parts.append(f'label="{graph.labels[i]}"')
        for key, val in graph.node_attrs[i].items():
            parts.append(f'{key}="{val}"')
        attr = f" [{', '.join(parts)}]" if parts else ""
        lines.append(f'  "{name}"{attr};')
    for u, v in graph.edges:
        lines.append(f'  "{graph.ids[u]}" {sep} "{graph.ids[v]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def rank_nodes(graph: RankedGraph, method: str = "pagerank") -> np.ndarray:
    """Importance permutation: most important node first.

    Ties always break toward the earlier input position, so rankings are
    stable under relabeling that preserves input order.
    """
    n = graph.n
    if n == 0:
        raise EmptyGraphError("cannot rank an empty graph")
    if method == "input":
        return np.arange(n)
    if method == "degree":
        deg = np.zeros(n, dtype=np.int64)
        for u, v in graph.edges:
            deg[u] += 1
            deg[v] += 1
        return np.argsort(-deg, kind="stable")
    if method == "pagerank":
        scores = pagerank_scores(graph)
        return np.argsort(-scores, kind="stable")
    raise ValueError(f"unknown ranking method {method!r}")


def pagerank_scores(graph: RankedGraph, damping: float = 0.85, tol: float = 1e-9) -> np.ndarray:
    """Power iteration on the undirected simple graph; scores sum to 1.

    Nodes without neighbors redistribute their mass uniformly.
    """
    n = graph.n
    deg = np.zeros(n)
    for u, v in graph.edges:
        deg[u] += 1
        deg[v] += 1
    x = np.full(n, 1.0 / n)
    dangling = deg == 0
    inv_deg = np.zeros(n)
    inv_deg[~dangling] = 1.0 / deg[~dangling]
    src = np.array([u for u, v in graph.edges] + [v for u, v in graph.edges], dtype=np.int64)
    dst = np.array([v for u, v in graph.edges] + [u for u, v in graph.edges], dtype=np.int64)
    while True:
        contrib = x * inv_deg
        spread = np.zeros(n)
        if len(src):
            np.add.at(spread, dst, contrib[src])
        nxt = damping * (spread + x[dangling].sum() / n) + (1.0 - damping) / n
        if np.abs(nxt - x).sum() < tol:
            return nxt
        x = nxt


def fallback_layout(graph: RankedGraph, seed: int = 0, iterations: int = 300) -> np.ndarray:
    """Seeded force-directed placement for graphs without positions.

    Deterministic for a fixed seed; never returns coincident points.
    """
    n = graph.n
    rng = np.random.default_rng(seed)
    if n == 1:
        return np.zeros((1, 2))
    span = math.sqrt(n)
    pos = rng.uniform(-span / 2, span / 2, size=(n, 2))
    k = span / math.sqrt(n)  # ideal edge length, ~1 graph unit
    eu = np.array([u for u, v in graph.edges], dtype=np.int64)
    ev = np.array([v for u, v in graph.edges], dtype=np.int64)
    t = 0.1 * span
    for it in range(iterations):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.hypot(delta[..., 0], delta[..., 1])
        np.fill_diagonal(dist, np.inf)
        # Repulsion k^2/d, attraction d^2/k along edges.
        rep = (k * k / (dist * dist))[..., None] * delta / dist[..., None]
        force = rep.sum(axis=1)
        if len(eu):
            dvec = pos[eu] - pos[ev]
            dlen = np.hypot(dvec[:, 0], dvec[:, 1])
            dlen[dlen == 0] = 1e-9
            pull = (dlen / k)[:, None] * dvec / dlen[:, None]
            np.subtract.at(force, eu, pull)
            np.add.at(force, ev, pull)
        flen = np.hypot(force[:, 0], force[:, 1])
        flen[flen == 0] = 1e-12
        step = np.minimum(flen, t) / flen
        pos += force * step[:, None]
        t *= 0.97
    # Deterministic de-coincidence: nudge later duplicates apart.
    seen: dict[tuple[float, float], int] = {}
    for i in range(n):
        key = (round(pos[i, 0], 9), round(pos[i, 1], 9))
        while key in seen:
            pos[i] += (0.01 * k, 0.013 * k)
            key = (round(pos[i, 0], 9), round(pos[i, 1], 9))
        seen[key] = i
    return pos
