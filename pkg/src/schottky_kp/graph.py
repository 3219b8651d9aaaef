"""Stable graphs, moduli parameters and the Schottky groups they define.

An oriented edge is a pair ``(edge_id, sign)``.  For an edge declared with
``from``/``to`` endpoints, ``(e, +1)`` runs from ``from`` to ``to``; the
parameter ``x_e`` lives on the sphere of ``to`` and ``x_{-e}`` on ``from``.
A path ``h(1) ... h(l)`` is sent to ``phi_{h(l)} ... phi_{h(1)}``.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CirclesOverlap,
    CoincidentFixedPoints,
    InputError,
    InvalidGraph,
    InvalidParams,
    InvalidScale,
    NotLoxodromic,
)
from .group import SchottkyGroup
from .moebius import INF, MoebiusMap, apply, as_point, compose, isometric_circle

CONVENTION = "phi-antihom-v1"


@dataclass(frozen=True)
class Edge:
    id: str
    source: object
    target: object

    @property
    def is_loop(self) -> bool:
        return self.source == self.target


@dataclass(frozen=True)
class Tail:
    id: str
    vertex: object
    number: int


@dataclass(frozen=True)
class StableGraph:
    """Connected stable graph ``(V, E, T)``; vertices keep their declared order."""

    vertices: tuple
    edges: tuple
    tails: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "tails", tuple(self.tails))
        self.check()

    @property
    def genus(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    @property
    def base_vertex(self):
        return self.vertices[0]

    def edge(self, eid) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise InvalidGraph(f"unknown edge {eid!r}")

    def head(self, h) -> object:
        """Vertex ``v_h`` carrying ``x_h`` for an oriented edge ``h``."""
        e = self.edge(h[0])
        return e.target if h[1] > 0 else e.source

    def branches(self, v) -> int:
        n = sum((e.source == v) + (e.target == v) for e in self.edges)
        return n + sum(t.vertex == v for t in self.tails)

    def marked_tail(self) -> Tail | None:
        """Tail numbered 1, the marked point of the KP construction."""
        for t in self.tails:
            if t.number == 1:
                return t
        return None

    def check(self):
        vs = set(self.vertices)
        if len(vs) != len(self.vertices) or not self.vertices:
            raise InvalidGraph("vertices must be non-empty and distinct")
        ids = [e.id for e in self.edges] + [t.id for t in self.tails]
        if len(set(ids)) != len(ids):
            raise InvalidGraph("edge and tail ids must be distinct")
        for eid in ids:
            if str(eid).startswith("-"):
                raise InvalidGraph(f"id {eid!r} must not start with '-'")
        for e in self.edges:
            if e.source not in vs or e.target not in vs:
                raise InvalidGraph(f"edge {e.id!r} has an unknown endpoint")
        for t in self.tails:
            if t.vertex not in vs:
                raise InvalidGraph(f"tail {t.id!r} has an unknown vertex")
        numbers = sorted(t.number for t in self.tails)
        if numbers != list(range(1, len(self.tails) + 1)):
            raise InvalidGraph("tail numbers must be 1..n")
        seen = {self.base_vertex}
        stack = [self.base_vertex]
        while stack:
            v = stack.pop()
            for e in self.edges:
                for a, b in ((e.source, e.target), (e.target, e.source)):
                    if a == v and b not in seen:
                        seen.add(b)
                        stack.append(b)
        if seen != vs:
            raise InvalidGraph("graph is not connected")
        for v in self.vertices:
            if self.branches(v) < 3:
                raise InvalidGraph(f"vertex {v!r} has fewer than 3 branches")
        if self.genus < 1:
            raise InvalidGraph("first Betti number must be at least 1")


def oriented_key(h) -> str:
    """Parameter key of an oriented edge: ``"e"`` or ``"-e"``."""
    return str(h[0]) if h[1] > 0 else f"-{h[0]}"


@dataclass(frozen=True)
class SchottkyParams:
    """Moduli parameters ``x_h`` (oriented edges and tails) and ``y_e``."""

    x: dict
    y: dict

    def x_of(self, h):
        return self.x[oriented_key(h)]

    def x_tail(self, tid):
        return self.x[str(tid)]

    def check(self, graph: StableGraph, allow_zero_y: bool = False):
        for e in graph.edges:
            for h in ((e.id, 1), (e.id, -1)):
                if oriented_key(h) not in self.x:
                    raise InvalidParams(f"missing x for oriented edge {oriented_key(h)}")
            if str(e.id) not in self.y:
                raise InvalidParams(f"missing y for edge {e.id!r}")
            if self.x_of((e.id, 1)) == self.x_of((e.id, -1)):
                raise InvalidParams(f"x_e = x_-e for edge {e.id!r}")
        for t in graph.tails:
            if str(t.id) not in self.x:
                raise InvalidParams(f"missing x for tail {t.id!r}")
        for v in graph.vertices:
            pts = []
            for e in graph.edges:
                for h in ((e.id, 1), (e.id, -1)):
                    if graph.head(h) == v:
                        pts.append(self.x_of(h))
            pts += [self.x_tail(t.id) for t in graph.tails if t.vertex == v]
            n_inf = sum(p is INF for p in pts)
            if n_inf > 1:
                raise InvalidParams(f"more than one point at infinity on vertex {v!r}")
            finite = [p for p in pts if p is not INF]
            for a in range(len(finite)):
                for b in range(a):
                    if finite[a] == finite[b]:
                        raise InvalidParams(f"coincident points on vertex {v!r}")
        for eid, yv in self.y.items():
            if not (abs(yv) < 1.0):
                raise NotLoxodromic(f"|y_{eid}| >= 1")
            if yv == 0 and not allow_zero_y:
                raise InvalidParams(f"y_{eid} = 0 outside a degeneration")


def build_phi(x_plus, x_minus, y) -> MoebiusMap:
    """The map with attractive fixed point ``x_plus``, repulsive ``x_minus`` and multiplier ``y``.

    It is ``F diag(1, y) F^{-1}`` for the frame ``F = [[x_plus, x_minus], [1, 1]]``;
    a point at infinity takes the limiting normalized matrix.  ``y = 0`` gives
    the singular matrix of the constant map onto ``x_plus``.
    """
    x_plus = as_point(x_plus)
    x_minus = as_point(x_minus)
    y = complex(y)
    if x_plus is INF and x_minus is INF:
        raise CoincidentFixedPoints("both fixed points at infinity")
    if x_plus is INF:
        entries = (1.0, -x_minus * (1 - y), 0.0, y)
    elif x_minus is INF:
        entries = (y, x_plus * (1 - y), 0.0, 1.0)
    else:
        if x_plus == x_minus:
            raise CoincidentFixedPoints("x_plus equals x_minus")
        s = x_plus - x_minus
        entries = (
            (x_plus - x_minus * y) / s,
            -x_plus * x_minus * (1 - y) / s,
            (1 - y) / s,
            (x_plus * y - x_minus) / s,
        )
    if y == 0:
        return MoebiusMap.singular(*entries)
    return MoebiusMap(*entries)


def phi_of(graph: StableGraph, params: SchottkyParams, h) -> MoebiusMap:
    """``phi_h`` for an oriented edge; ``phi_{-h}`` is its inverse."""
    e = graph.edge(h[0])
    y = params.y[str(e.id)]
    return build_phi(params.x_of(h), params.x_of((h[0], -h[1])), y)


def spanning_tree(graph: StableGraph) -> list:
    """Breadth-first maximal subtree from the base vertex, edges in declaration order."""
    tree, _ = _bfs(graph)
    return tree


def _bfs(graph: StableGraph):
    base = graph.base_vertex
    parent_edge = {base: None}
    tree = []
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for e in graph.edges:
            if e.is_loop:
                continue
            if e.source == v and e.target not in parent_edge:
                parent_edge[e.target] = (e.id, 1)
                tree.append(e.id)
                queue.append(e.target)
            elif e.target == v and e.source not in parent_edge:
                parent_edge[e.source] = (e.id, -1)
                tree.append(e.id)
                queue.append(e.source)
    return tree, parent_edge


def tree_path(graph: StableGraph, v, tree=None) -> list:
    """Oriented edges of the tree path from the base vertex to ``v``."""
    _, parent_edge = _bfs(graph)
    if tree is not None and set(tree) != set(spanning_tree(graph)):
        parent_edge = _parents_for_tree(graph, tree)
    path = []
    while parent_edge[v] is not None:
        h = parent_edge[v]
        path.append(h)
        e = graph.edge(h[0])
        v = e.source if h[1] > 0 else e.target
    return path[::-1]


def _parents_for_tree(graph: StableGraph, tree) -> dict:
    tree = set(tree)
    base = graph.base_vertex
    parent_edge = {base: None}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for e in graph.edges:
            if e.id not in tree:
                continue
            if e.source == v and e.target not in parent_edge:
                parent_edge[e.target] = (e.id, 1)
                queue.append(e.target)
            elif e.target == v and e.source not in parent_edge:
                parent_edge[e.source] = (e.id, -1)
                queue.append(e.source)
    if len(parent_edge) != len(graph.vertices):
        raise InvalidGraph("edge subset is not a spanning tree")
    return parent_edge


def _reverse(path) -> list:
    return [(h[0], -h[1]) for h in reversed(path)]


def pi1_generators(graph: StableGraph, base=None, tree=None) -> list:
    """Closed reduced paths at the base vertex, one per non-tree edge.

    Each path is: tree path to the tail ``v_{-e}`` of ``e``, the edge ``e``,
    then the tree path from ``v_e`` back to the base.
    """
    if base is not None and base != graph.base_vertex:
        raise InvalidGraph("the base vertex is the first declared vertex")
    if tree is None:
        tree = spanning_tree(graph)
    tree = set(tree)
    paths = []
    for e in graph.edges:
        if e.id in tree:
            continue
        out = tree_path(graph, e.source, tree)
        back = _reverse(tree_path(graph, e.target, tree))
        path = out + [(e.id, 1)] + back
        paths.append(_reduce_path(path))
    return paths


def _reduce_path(path) -> list:
    out = []
    for h in path:
        if out and out[-1] == (h[0], -h[1]):
            out.pop()
        else:
            out.append(h)
    return out


def path_map(graph: StableGraph, params: SchottkyParams, path) -> MoebiusMap:
    """``phi_{h(l)} ... phi_{h(1)}`` for the path ``h(1) ... h(l)``."""
    m = MoebiusMap.identity()
    for h in path:
        m = compose(phi_of(graph, params, h), m)
    return m


def vertex_transport(graph: StableGraph, params: SchottkyParams, v, tree=None) -> MoebiusMap:
    """Map carrying the sphere of vertex ``v`` into the base sphere coordinate."""
    return path_map(graph, params, _reverse(tree_path(graph, v, tree)))


def translate_vertex(graph: StableGraph, params: SchottkyParams, v, shift: complex) -> SchottkyParams:
    """Move the coordinate of vertex ``v`` by ``-shift``.

    For the base vertex this conjugates the Schottky group by the
    translation, so periods and Laurent data are unchanged.  At any other
    vertex it changes the plumbing coordinate and hence the group.
    """
    shift = complex(shift)
    x = dict(params.x)
    for e in graph.edges:
        for h in ((e.id, 1), (e.id, -1)):
            if graph.head(h) == v and x[oriented_key(h)] is not INF:
                x[oriented_key(h)] = x[oriented_key(h)] - shift
    for t in graph.tails:
        if t.vertex == v and x[str(t.id)] is not INF:
            x[str(t.id)] = x[str(t.id)] - shift
    return SchottkyParams(x, dict(params.y))


def node_anchor(graph: StableGraph, params: SchottkyParams, eid) -> complex:
    """Base-chart point near which the part of the curve beyond edge ``eid`` clusters.

    This is the base-side point of the first tree edge leading towards
    ``eid``; zero when ``eid`` is a loop at the base vertex.
    """
    e = graph.edge(eid)
    paths = [tree_path(graph, e.source), tree_path(graph, e.target)]
    path = max(paths, key=len)
    if not path:
        return 0j
    h = path[0]
    p = params.x_of((h[0], -h[1]))
    return 0j if p is INF else complex(p)


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    min_gap: float
    circles: tuple
    reason: str = ""

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "min_gap": self.min_gap,
            "reason": self.reason,
            "circles": [
                {"generator": h, "center": [c.real, c.imag], "radius": r}
                for h, c, r in self.circles
            ],
        }


def generator_circles(group: SchottkyGroup) -> list:
    """Isometric circles ``(h, centre, radius)``.

    ``h = k`` is the circle of ``g_k^{-1}`` (around the attractive fixed point),
    ``h = -k`` the circle of ``g_k`` (around the repulsive one).
    """
    out = []
    for k, gen in enumerate(group.generators, start=1):
        for h, m in ((k, gen.inverse()), (-k, gen)):
            circ = isometric_circle(m)
            if circ is None:
                out.append((h, None, None))
            else:
                out.append((h, circ[0], circ[1]))
    return out


def validate_classical(group: SchottkyGroup) -> ValidationReport:
    """Check that the 2g isometric circles of the generators are pairwise disjoint."""
    circles = generator_circles(group)
    if any(c is None for _, c, _ in circles):
        return ValidationReport(False, -math.inf, tuple(circles), "generator fixes infinity")
    gap = math.inf
    for a in range(len(circles)):
        for b in range(a):
            _, c1, r1 = circles[a]
            _, c2, r2 = circles[b]
            gap = min(gap, abs(c1 - c2) - r1 - r2)
    passed = gap > 0
    return ValidationReport(passed, gap, tuple(circles), "" if passed else "CirclesOverlap")


@dataclass(eq=False)
class Curve:
    """A graph, its parameters, the instantiated group and the marked point."""

    graph: StableGraph
    params: SchottkyParams
    group: SchottkyGroup
    paths: list
    marked_point: object = None
    report: ValidationReport | None = None
    extra: dict = field(default_factory=dict)

    @property
    def genus(self) -> int:
        return self.group.rank


def instantiate_group(graph: StableGraph, params: SchottkyParams, validate: bool = True) -> SchottkyGroup:
    """Schottky group of the graph data, generator order = non-tree edge order."""
    return build_curve(graph, params, validate).group


def build_curve(graph: StableGraph, params: SchottkyParams, validate: bool = True) -> Curve:
    params.check(graph)
    paths = pi1_generators(graph)
    non_tree = [e for e in graph.edges if e.id not in set(spanning_tree(graph))]
    # a loop generator is a conjugate T phi_e T^-1, so its fixed points and
    # multiplier are known exactly; building the matrix from them avoids the
    # cancellation of long products through nearly pinched edges
    gens, exact = [], {}
    for k, (e, p) in enumerate(zip(non_tree, paths)):
        if e.is_loop:
            t = vertex_transport(graph, params, e.target)
            a = apply(t, params.x_of((e.id, 1)))
            ar = apply(t, params.x_of((e.id, -1)))
            b = params.y[str(e.id)]
            exact[k] = (a, ar, b)
            gens.append(build_phi(a, ar, b))
        else:
            gens.append(path_map(graph, params, p))
    group = SchottkyGroup(gens)
    alpha, alpha_rep, beta = list(group.alpha), list(group.alpha_rep), list(group.beta)
    for k, (a, ar, b) in exact.items():
        alpha[k], alpha_rep[k], beta[k] = a, ar, b
    group = SchottkyGroup.with_fixed_points(gens, alpha, alpha_rep, beta)
    report = validate_classical(group)
    if validate and not report.passed:
        raise CirclesOverlap(f"isometric circles overlap (min gap {report.min_gap:.3g})")
    marked = None
    tail = graph.marked_tail()
    if tail is not None:
        x_t = params.x_tail(tail.id)
        marked = apply(vertex_transport(graph, params, tail.vertex), x_t)
    return Curve(graph, params, group, paths, marked, report)


def mcurve_params(g: int, n_tails: int = 1, scale: float = 2.0, y_value: float = 0.01):
    """Real one-vertex data with interlaced points ``x_-1 < x_1 < x_-2 < ... < x_g``.

    The k-th point of that ordering sits at ``(k - 1/2) * scale`` and tail ``j``
    at ``-scale/2 - j*scale``.
    """
    if g < 1 or n_tails < 0:
        raise InputError("need g >= 1 and n_tails >= 0")
    if not (scale > 0 and math.isfinite(scale)):
        raise InvalidScale("scale must be positive")
    if not (0 < y_value < 1):
        raise InputError("y_value must lie in (0, 1)")
    pts = [(k - 0.5) * scale for k in range(2 * g)]
    tails = [-scale / 2 - j * scale for j in range(1, n_tails + 1)]
    if len(set(pts + tails)) != len(pts) + len(tails):
        raise InvalidScale("points collide at this scale")
    edges = [Edge(f"e{i}", "v0", "v0") for i in range(1, g + 1)]
    tls = [Tail(f"t{j}", "v0", j) for j in range(1, n_tails + 1)]
    graph = StableGraph(("v0",), tuple(edges), tuple(tls))
    x = {}
    for i in range(1, g + 1):
        x[f"e{i}"] = complex(pts[2 * i - 1])
        x[f"-e{i}"] = complex(pts[2 * i - 2])
    for j, xt in enumerate(tails, start=1):
        x[f"t{j}"] = complex(xt)
    y = {f"e{i}": complex(y_value) for i in range(1, g + 1)}
    params = SchottkyParams(x, y)
    group = build_curve(graph, params, validate=False).group
    report = validate_classical(group)
    if not report.passed:
        raise CirclesOverlap(f"M-curve data fails validation (min gap {report.min_gap:.3g})")
    return graph, params


def one_vertex_graph(g: int, n_tails: int = 1) -> StableGraph:
    edges = [Edge(f"e{i}", "v0", "v0") for i in range(1, g + 1)]
    tls = [Tail(f"t{j}", "v0", j) for j in range(1, n_tails + 1)]
    return StableGraph(("v0",), tuple(edges), tuple(tls))


def one_vertex_params(xs_plus, xs_minus, ys, tails=()) -> SchottkyParams:
    """Parameters on the one-vertex graph from per-loop lists."""
    x = {}
    for i, (p, m) in enumerate(zip(xs_plus, xs_minus), start=1):
        x[f"e{i}"] = as_point(p)
        x[f"-e{i}"] = as_point(m)
    for j, t in enumerate(tails, start=1):
        x[f"t{j}"] = as_point(t)
    y = {f"e{i}": complex(v) for i, v in enumerate(ys, start=1)}
    return SchottkyParams(x, y)


def dumbbell_params(y_loops: float = 0.01, y_edge: float = 0.01):
    """Two one-loop components joined by the separating edge ``e``.

    Vertex ``va`` carries loop ``a`` at ``(1, -1)``, the node at ``0`` and the
    tail at ``-3``; vertex ``vb`` carries loop ``b`` at ``(1, -1)`` and the
    node at ``4``.
    """
    graph = StableGraph(
        ("va", "vb"),
        (Edge("a", "va", "va"), Edge("b", "vb", "vb"), Edge("e", "va", "vb")),
        (Tail("t1", "va", 1),),
    )
    x = {"a": 1 + 0j, "-a": -1 + 0j, "b": 1 + 0j, "-b": -1 + 0j, "e": 4 + 0j, "-e": 0j, "t1": -3 + 0j}
    y = {"a": complex(y_loops), "b": complex(y_loops), "e": complex(y_edge)}
    params = SchottkyParams(x, y)
    params.check(graph)
    return graph, params


# configuration files


def _point_to_json(p):
    if p is INF:
        return "inf"
    return [p.real, p.imag]


def _complex_from_json(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise InputError(f"expected [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(float(v))
    raise InputError(f"expected a number or [re, im], got {v!r}")


def config_to_dict(graph: StableGraph, params: SchottkyParams) -> dict:
    return {
        "graph": {
            "vertices": list(graph.vertices),
            "edges": [{"id": e.id, "from": e.source, "to": e.target} for e in graph.edges],
            "tails": [{"id": t.id, "vertex": t.vertex, "number": t.number} for t in graph.tails],
        },
        "params": {
            "x": {k: _point_to_json(v) for k, v in params.x.items()},
            "y": {k: [v.real, v.imag] for k, v in params.y.items()},
        },
        "convention": CONVENTION,
    }


def config_from_dict(data: dict):
    """Parse a curve configuration; raises :class:`InputError` when malformed."""
    try:
        if not isinstance(data, dict):
            raise InputError("configuration must be a JSON object")
        conv = data.get("convention", CONVENTION)
        if conv != CONVENTION:
            raise InputError(f"unsupported convention {conv!r}")
        gd = data["graph"]
        edges = tuple(Edge(str(e["id"]), e["from"], e["to"]) for e in gd["edges"])
        tails = tuple(
            Tail(str(t["id"]), t["vertex"], int(t["number"])) for t in gd.get("tails", [])
        )
        graph = StableGraph(tuple(gd["vertices"]), edges, tails)
        pd = data["params"]
        x = {str(k): as_point("inf" if v == "inf" else _complex_from_json(v)) for k, v in pd["x"].items()}
        y = {str(k): _complex_from_json(v) for k, v in pd["y"].items()}
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed configuration: missing or invalid {exc}") from exc
    params = SchottkyParams(x, y)
    params.check(graph)
    return graph, params


def dumps_config(graph: StableGraph, params: SchottkyParams) -> str:
    return json.dumps(config_to_dict(graph, params), indent=2) + "\n"


def loads_config(text: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from exc
    return config_from_dict(data)


def abelianization(graph: StableGraph, paths) -> np.ndarray:
    """Edge-incidence vectors of the generator paths (rows)."""
    idx = {e.id: k for k, e in enumerate(graph.edges)}
    mat = np.zeros((len(paths), len(graph.edges)), dtype=int)
    for r, p in enumerate(paths):
        for h in p:
            mat[r, idx[h[0]]] += h[1]
    return mat
