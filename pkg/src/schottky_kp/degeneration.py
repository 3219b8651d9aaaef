"""Degenerating families: limits of differentials, modified and soliton tau functions.

A scenario sends one edge parameter ``y`` of a curve to zero. Pinching a
non-separating edge (irreducible) drops the genus by one and turns the
corresponding first-kind differential into a third-kind one; pinching a
separating edge (reducible) splits the curve in two.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace

import numpy as np

from .differentials import (
    DEFAULT_POLICY,
    DifferentialSpec,
    FirstKind,
    ThirdKind,
    TruncationPolicy,
    b_period_integral,
    eval_density,
    laurent_data,
    laurent_radius,
    third_kind_taylor,
)
from .errors import (
    DegenerateCrossRatio,
    GenericCharacteristic,
    HalfIntegerCharacteristic,
    InputError,
    InvalidParams,
    ThetaZero,
    TauZeroOnGrid,
)
from .graph import (
    Curve,
    SchottkyParams,
    StableGraph,
    build_curve,
    config_from_dict,
    config_to_dict,
    node_anchor,
    path_map,
    translate_vertex,
    vertex_transport,
)
from .group import SchottkyGroup
from .moebius import INF, MoebiusMap, apply
from .periods import period_matrix
from .theta_tau import ExpSum, TauData, kp_residual, tau_data_from_curve, theta

TWO_PI_I = 2j * math.pi
HALF_TOL = 1e-12


# ---------------------------------------------------------------- closed-form limits


def _cyclic_reduce(path) -> list:
    path = list(path)
    while len(path) > 1 and path[0] == (path[-1][0], -path[-1][1]):
        path = path[1:-1]
    return path


def stable_limit_first_kind(graph: StableGraph, params: SchottkyParams, i: int, v, paths=None) -> list:
    """Poles and residues of ``omega_i`` restricted to the component ``v`` at ``y = 0``.

    For every oriented edge ``h`` of the cyclically reduced word of cycle ``i``:
    ``+1`` at ``x_h`` when ``x_h`` lies on ``v`` and ``-1`` at ``x_-h`` when that
    point lies on ``v``. Coinciding poles are merged and cancelled ones dropped.
    """
    from .graph import pi1_generators

    if paths is None:
        paths = pi1_generators(graph)
    if not 1 <= i <= len(paths):
        raise InputError(f"cycle index {i} outside 1..{len(paths)}")
    acc: dict = {}
    order = []
    for h in _cyclic_reduce(paths[i - 1]):
        mh = (h[0], -h[1])
        for pt_h, res in ((h, 1), (mh, -1)):
            if graph.head(pt_h) != v:
                continue
            x = params.x_of(pt_h)
            key = "inf" if x is INF else complex(x)
            if key not in acc:
                order.append(key)
                acc[key] = 0
            acc[key] += res
    return [(INF if k == "inf" else k, acc[k]) for k in order if acc[k] != 0]


def fraction_density(poles, z):
    """Density ``sum res / (z - pole)`` of a list of ``(pole, residue)`` pairs."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    for p, res in poles:
        if p is INF:
            continue
        out = out + res / (z - p)
    return out


# ---------------------------------------------------------------- scenarios


def _is_separating(graph: StableGraph, eid: str) -> bool:
    adj = {v: [] for v in graph.vertices}
    for e in graph.edges:
        if e.id == eid:
            continue
        adj[e.source].append(e.target)
        adj[e.target].append(e.source)
    seen = {graph.vertices[0]}
    queue = deque(seen)
    while queue:
        for w in adj[queue.popleft()]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) != len(graph.vertices)


@dataclass(frozen=True)
class DegenerationScenario:
    """A curve with one edge parameter sent to zero along ``y_sequence``."""

    graph: StableGraph
    params: SchottkyParams
    pinch: str
    y_sequence: tuple = (1e-2, 1e-3, 1e-4)
    alpha: tuple = ()
    beta: tuple = ()
    source_params: SchottkyParams | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.graph.edge(self.pinch)
        # matrices of tiny circles far from the origin lose their determinant
        # to rounding, so the base chart is translated to put the shrinking
        # cluster at the origin; periods and Laurent data are unaffected
        object.__setattr__(self, "source_params", self.params)
        shift = node_anchor(self.graph, self.params, self.pinch)
        if shift != 0:
            moved = translate_vertex(self.graph, self.params, self.graph.base_vertex, shift)
            object.__setattr__(self, "params", moved)
        g = self.graph.genus
        alpha = tuple(complex(a) for a in self.alpha) or (0j,) * g
        beta = tuple(float(b) for b in self.beta) or (0.0,) * g
        if len(alpha) != g or len(beta) != g:
            raise InputError(f"characteristic must have length {g}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        ys = tuple(float(y) for y in self.y_sequence)
        if not ys or any(not 0 < y < 1 for y in ys):
            raise InvalidParams("y_sequence entries must lie in (0, 1)")
        object.__setattr__(self, "y_sequence", ys)
        if self.graph.marked_tail() is None:
            raise InputError("scenario curve needs a tail numbered 1")

    @property
    def kind(self) -> str:
        return "reducible" if _is_separating(self.graph, self.pinch) else "irreducible"

    def curve(self, y: float, validate: bool = True) -> Curve:
        ys = dict(self.params.y)
        ys[self.pinch] = complex(y)
        return build_curve(self.graph, replace(self.params, y=ys), validate)

    def pinched_index(self) -> int:
        """0-based index of the generator whose path crosses the pinched edge."""
        from .graph import pi1_generators

        hits = [k for k, p in enumerate(pi1_generators(self.graph)) if any(h[0] == self.pinch for h in p)]
        if self.kind != "irreducible" or len(hits) != 1:
            raise InputError("pinched edge is not a non-tree edge of a single cycle")
        return hits[0]

    def branch(self) -> str:
        if self.kind == "reducible":
            return "reducible"
        bg = self.beta[self.pinched_index()]
        frac = bg - math.floor(bg)
        return "halfint" if abs(frac - 0.5) <= HALF_TOL else "generic"

    def characteristic_arrays(self):
        return np.array(self.alpha, dtype=complex), np.array(self.beta, dtype=float)

    def to_dict(self) -> dict:
        return {
            "curve": config_to_dict(self.graph, self.source_params),
            "pinch": self.pinch,
            "y_sequence": list(self.y_sequence),
            "alpha": [[complex(a).real, complex(a).imag] for a in self.alpha],
            "beta": list(self.beta),
        }


def _complex_entry(v):
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def scenario_from_dict(data: dict) -> DegenerationScenario:
    """Parse ``{curve config, "pinch", "y_sequence", "beta", "alpha"}``.

    The curve configuration may sit under ``"curve"`` or at the top level.
    """
    try:
        curve = data.get("curve", data)
        graph, params = config_from_dict(curve)
        return DegenerationScenario(
            graph,
            params,
            str(data["pinch"]),
            tuple(data.get("y_sequence", (1e-2, 1e-3, 1e-4))),
            tuple(_complex_entry(a) for a in data.get("alpha", ())),
            tuple(float(b) for b in data.get("beta", ())),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"malformed scenario: {exc}") from exc


# ---------------------------------------------------------------- limit data


@dataclass(frozen=True)
class IrreducibleLimit:
    """Limit of a family pinching cycle ``k``: rank ``g - 1`` group and third-kind data."""

    k: int
    others: tuple
    group: SchottkyGroup
    p1: complex
    p2: complex
    Z: np.ndarray
    Zk: np.ndarray
    r: np.ndarray
    q: np.ndarray
    rk: np.ndarray
    marked_point: complex
    radius: int | None = None

    @property
    def M(self) -> int:
        return self.q.shape[0]


@dataclass(frozen=True)
class ReducibleLimit:
    """Limit of a family pinching a separating edge into components 1 and 2."""

    idx1: tuple
    idx2: tuple
    group1: SchottkyGroup
    group2: SchottkyGroup
    Z1: np.ndarray
    Z2: np.ndarray
    r: np.ndarray
    q: np.ndarray
    marked_point: complex
    radius: int | None = None

    @property
    def M(self) -> int:
        return self.q.shape[0]


LimitData = IrreducibleLimit | ReducibleLimit


def _singular_limit_points(S: MoebiusMap):
    """Image point and kernel point of a rank-one matrix."""
    a, b, c, d = S.a, S.b, S.c, S.d
    col = (a, c) if abs(a) + abs(c) >= abs(b) + abs(d) else (b, d)
    img = INF if col[1] == 0 else col[0] / col[1]
    row = (a, b) if abs(a) + abs(b) >= abs(c) + abs(d) else (c, d)
    ker = INF if row[0] == 0 else -row[1] / row[0]
    return img, ker


def _subgroup(group: SchottkyGroup, idx) -> SchottkyGroup:
    return SchottkyGroup.with_fixed_points(
        [group.generators[i] for i in idx],
        [group.alpha[i] for i in idx],
        [group.alpha_rep[i] for i in idx],
        [group.beta[i] for i in idx],
    )


def _rank0_third_kind_taylor(p1, p2, xt, M):
    m = np.arange(1, M + 1)
    return -(1.0 / (p1 - xt) ** m - 1.0 / (p2 - xt) ** m)


def limit_data_irreducible(scenario: DegenerationScenario, M: int = 3,
                           policy: TruncationPolicy = DEFAULT_POLICY,
                           reference_Z: np.ndarray | None = None,
                           radius: int | None = None) -> IrreducibleLimit:
    """Limit curve data built directly at ``y = 0``.

    ``reference_Z`` (a family period matrix at small ``y``) fixes the integer
    branch of ``Zbar_{i,k}``, which depends on the homotopy class of the b-path.
    """
    if scenario.kind != "irreducible":
        raise InputError("scenario is not irreducible")
    k = scenario.pinched_index()
    curve = scenario.curve(scenario.y_sequence[0])
    g = curve.group.rank
    others = tuple(i for i in range(g) if i != k)
    group = _subgroup(curve.group, others)
    ys = dict(scenario.params.y)
    ys[scenario.pinch] = 0j
    e = scenario.graph.edge(scenario.pinch)
    if e.is_loop:
        t = vertex_transport(scenario.graph, scenario.params, e.target)
        p1 = apply(t, scenario.params.x_of((e.id, 1)))
        p2 = apply(t, scenario.params.x_of((e.id, -1)))
    else:
        S = path_map(scenario.graph, replace(scenario.params, y=ys), curve.paths[k])
        p1, p2 = _singular_limit_points(S)
    if p1 is INF or p2 is INF:
        raise InputError("limit points at infinity are not supported")
    p1, p2 = complex(p1), complex(p2)
    xt = complex(curve.marked_point)
    if group.rank:
        Z = period_matrix(group, policy).Z
        Zk = np.array([b_period_integral(group, i, 0, kind=ThirdKind(p1, p2), policy=policy) / TWO_PI_I
                       for i in range(1, group.rank + 1)])
        ld = laurent_data(group, xt, M, policy)
        r, q = ld.r, ld.q
        rk = third_kind_taylor(group, p1, p2, xt, M, policy)
    else:
        Z = np.zeros((0, 0), dtype=complex)
        Zk = np.zeros(0, dtype=complex)
        r = np.zeros((0, M), dtype=complex)
        q = np.zeros((M, M), dtype=complex)
        rk = _rank0_third_kind_taylor(p1, p2, xt, M)
    if reference_Z is not None and group.rank:
        ref = np.asarray(reference_Z)[list(others), k]
        Zk = Zk + np.round((ref - Zk).real)
    return IrreducibleLimit(k, others, group, p1, p2, Z, Zk, r, q, rk, xt, radius)


def _component_split(scenario: DegenerationScenario, curve: Curve):
    idx1, idx2, inner = [], [], []
    for n, p in enumerate(curve.paths):
        pos = [j for j, h in enumerate(p) if h[0] == scenario.pinch]
        if pos:
            idx2.append(n)
            inner.append(p[pos[0] + 1 : pos[-1]])
        else:
            idx1.append(n)
    return idx1, idx2, inner


def limit_data_reducible(scenario: DegenerationScenario, M: int = 3,
                         policy: TruncationPolicy = DEFAULT_POLICY,
                         radius: int | None = None) -> ReducibleLimit:
    """Two limit groups; the one holding the marked point carries the tau function."""
    if scenario.kind != "reducible":
        raise InputError("scenario is not reducible")
    curve = scenario.curve(scenario.y_sequence[0])
    graph = scenario.graph
    tail = graph.marked_tail()
    side = _vertices_beyond(graph, scenario.pinch)
    if graph.base_vertex in side or tail.vertex in side:
        raise InputError("the base vertex and the marked tail must lie on the same side of the pinch")
    idx1, idx2, inner = _component_split(scenario, curve)
    group1 = _subgroup(curve.group, idx1)
    gens2 = [path_map(graph, scenario.params, p) for p in inner]
    group2 = SchottkyGroup(gens2)
    xt = complex(curve.marked_point)
    Z1 = period_matrix(group1, policy).Z if group1.rank else np.zeros((0, 0), dtype=complex)
    Z2 = period_matrix(group2, policy).Z if group2.rank else np.zeros((0, 0), dtype=complex)
    if group1.rank:
        ld = laurent_data(group1, xt, M, policy)
        r, q = ld.r, ld.q
    else:
        r, q = np.zeros((0, M), dtype=complex), np.zeros((M, M), dtype=complex)
    return ReducibleLimit(tuple(idx1), tuple(idx2), group1, group2, Z1, Z2, r, q, xt, radius)


def _vertices_beyond(graph: StableGraph, eid: str) -> set:
    """Vertices not connected to the base vertex once edge ``eid`` is removed."""
    adj = {v: [] for v in graph.vertices}
    for e in graph.edges:
        if e.id != eid:
            adj[e.source].append(e.target)
            adj[e.target].append(e.source)
    seen = {graph.base_vertex}
    queue = deque(seen)
    while queue:
        for w in adj[queue.popleft()]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return set(graph.vertices) - seen


def limit_data(scenario: DegenerationScenario, M: int = 3, policy: TruncationPolicy = DEFAULT_POLICY,
               reference_Z=None) -> LimitData:
    if scenario.kind == "reducible":
        return limit_data_reducible(scenario, M, policy)
    return limit_data_irreducible(scenario, M, policy, reference_Z)


# ---------------------------------------------------------------- modified tau


def _shifted(es: ExpSum, log_factor: complex, rate: np.ndarray) -> ExpSum:
    return ExpSum(es.logw + log_factor, es.K + rate[None, :], es.Q)


def _concat(parts) -> ExpSum:
    return ExpSum(np.concatenate([p.logw for p in parts]), np.concatenate([p.K for p in parts]), parts[0].Q)


def _limit_term(limit: IrreducibleLimit, scenario, bbar: int, ts) -> ExpSum:
    alpha, beta = scenario.characteristic_arrays()
    k, oth = limit.k, list(limit.others)
    a_o, b_o = alpha[oth], beta[oth]
    if limit.group.rank:
        c = TWO_PI_I * (a_o + limit.Zk * (bbar + beta[k]) + limit.Z @ b_o)
        base = TauData(limit.Z, c, limit.r, limit.q, limit.radius).expsum(ts)
    else:
        base = ExpSum(np.zeros(1, dtype=complex), np.zeros((1, limit.M), dtype=complex), limit.q)
    log_pref = TWO_PI_I * (alpha[k] + np.dot(b_o, limit.Zk))
    return _shifted(base, bbar * log_pref, bbar * limit.rk)


def generic_bbar(beta_g: float) -> int:
    """The integer ``n`` with ``|n + beta_g| < 1/2``."""
    return int(round(-beta_g))


def modified_expsum(limit: LimitData, scenario: DegenerationScenario, ts=None) -> ExpSum:
    """Exponential-sum form of the modified tau function of the scenario."""
    branch = scenario.branch()
    if isinstance(limit, ReducibleLimit):
        alpha, beta = scenario.characteristic_arrays()
        i1, i2 = list(limit.idx1), list(limit.idx2)
        if limit.group1.rank:
            c1 = TWO_PI_I * (alpha[i1] + limit.Z1 @ beta[i1])
            es = TauData(limit.Z1, c1, limit.r, limit.q, limit.radius).expsum(ts)
        else:
            es = ExpSum(np.zeros(1, dtype=complex), np.zeros((1, limit.M), dtype=complex), limit.q)
        th2 = 1.0 + 0j
        if limit.group2.rank:
            c2 = TWO_PI_I * (alpha[i2] + limit.Z2 @ beta[i2])
            th2 = theta(limit.Z2, c2, limit.radius)
        if th2 == 0:
            raise ThetaZero("second-component theta constant vanishes")
        return _shifted(es, np.log(th2), np.zeros(limit.M, dtype=complex))
    bg = scenario.beta[limit.k]
    if branch == "generic":
        return _limit_term(limit, scenario, generic_bbar(bg), ts)
    b1, b2 = int(round(-bg - 0.5)), int(round(-bg + 0.5))
    return _concat([_limit_term(limit, scenario, b1, ts), _limit_term(limit, scenario, b2, ts)])


def modified_tau_generic(limit: IrreducibleLimit, scenario: DegenerationScenario, t):
    """Modified tau for ``beta_g`` off the half-integers (single limiting term)."""
    if scenario.branch() != "generic":
        raise HalfIntegerCharacteristic("beta_g is a half-integer; use the two-term branch")
    t = np.asarray(t, dtype=complex)
    return modified_expsum(limit, scenario, np.atleast_2d(t)).value(t)


def modified_tau_halfint(limit: IrreducibleLimit, scenario: DegenerationScenario, t):
    """Modified tau for ``beta_g`` in ``Z + 1/2`` (two limiting terms)."""
    if scenario.branch() != "halfint":
        raise GenericCharacteristic("beta_g is not a half-integer; use the generic branch")
    t = np.asarray(t, dtype=complex)
    return modified_expsum(limit, scenario, np.atleast_2d(t)).value(t)


def modified_tau_reducible(limit: ReducibleLimit, scenario: DegenerationScenario, t):
    """Tau function of the marked component times the other component's theta constant."""
    t = np.asarray(t, dtype=complex)
    return modified_expsum(limit, scenario, np.atleast_2d(t)).value(t)


def scaling_log(scenario: DegenerationScenario, Z: np.ndarray) -> complex:
    """Logarithm of the factor that keeps the family tau finite as ``y -> 0``."""
    branch = scenario.branch()
    if branch == "reducible":
        return 0j
    k = scenario.pinched_index()
    bg = scenario.beta[k]
    if branch == "generic":
        b = generic_bbar(bg)
        return -1j * math.pi * (b + 2 * bg) * b * Z[k, k]
    return 1j * math.pi * (bg * bg - 0.25) * Z[k, k]


@dataclass
class FamilyPoint:
    y: float
    data: TauData
    scale_log: complex


def family_point(scenario: DegenerationScenario, y: float, M: int = 3,
                 policy: TruncationPolicy = DEFAULT_POLICY) -> FamilyPoint:
    from .theta_tau import Characteristic

    curve = scenario.curve(y)
    alpha, beta = scenario.characteristic_arrays()
    data = tau_data_from_curve(curve, Characteristic(alpha, beta), M, policy)
    return FamilyPoint(y, data, scaling_log(scenario, data.Z))


DEFAULT_TIMES = np.array([[0.0, 0.0, 0.0], [0.5, -0.3, 0.2], [-0.7, 0.4, -0.1],
                          [1.0, 0.5, 0.5], [-1.0, -0.5, 0.3]])


def _family_points(scenario, M, policy, workers):
    ys = scenario.y_sequence
    if workers <= 1 or len(ys) <= 1:
        return [family_point(scenario, y, M, policy) for y in ys]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=min(workers, len(ys))) as pool:
        futures = [pool.submit(family_point, scenario, y, M, policy) for y in ys]
        return [f.result() for f in futures]


def degeneration_report(scenario: DegenerationScenario, ts=None, M: int = 3,
                        policy: TruncationPolicy = DEFAULT_POLICY, workers: int = 1) -> dict:
    """Relative deviation between the scaled family tau and the modified tau per ``y``.

    The family points are independent; ``workers > 1`` evaluates them in
    separate processes (results are identical and kept in input order).
    """
    ts = DEFAULT_TIMES[:, :M] if ts is None else np.atleast_2d(np.asarray(ts, dtype=float))
    points = _family_points(scenario, M, policy, workers)
    ref = points[int(np.argmin(scenario.y_sequence))].data.Z
    limit = limit_data(scenario, M, policy, reference_Z=ref)
    mod = modified_expsum(limit, scenario, ts).value(ts)
    rows = []
    for fp in points:
        scaled = np.exp(fp.data.expsum(ts).log_value(ts) + fp.scale_log)
        dev = float(np.max(np.abs(scaled - mod) / np.abs(mod)))
        rows.append({"y": fp.y, "deviation": dev})
    devs = [r["deviation"] for r in rows]
    order = np.argsort([-r["y"] for r in rows])
    monotone = bool(all(devs[order[i + 1]] < devs[order[i]] for i in range(len(order) - 1)))
    return {
        "kind": scenario.kind,
        "branch": scenario.branch(),
        "rows": rows,
        "monotone": monotone,
        "final_deviation": devs[order[-1]],
    }


# ---------------------------------------------------------------- differential limits


def _ring(center: complex, radius: float, n: int = 8) -> np.ndarray:
    return center + radius * np.exp(2j * math.pi * (np.arange(n) + 0.5) / n)


def _pullback(group: SchottkyGroup, kind, T: MoebiusMap, w, policy):
    z = np.array([apply(T, complex(x)) for x in w], dtype=complex)
    dz = np.array([T.derivative(complex(x)) for x in w], dtype=complex)
    return eval_density(DifferentialSpec(group, kind), z, policy) * dz


def _rel(a, b) -> float:
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def differential_limit_check(scenario: DegenerationScenario, points=None,
                             policy: TruncationPolicy = DEFAULT_POLICY) -> dict:
    """Deviation of the family's differentials from their limits for each ``y``.

    Irreducible: ``omega_i -> omega'_i`` (first kind on the limit curve) and
    ``omega_k ->`` the third-kind differential with poles ``p1, p2``.
    Reducible: on the marked component ``omega_i -> omega'_i``; pulled back to
    the other component the marked-side differentials vanish and the others
    tend to that component's first-kind differentials.
    """
    rows = []
    if scenario.kind == "irreducible":
        lim = limit_data_irreducible(scenario, 1, policy)
        if points is None:
            xt = lim.marked_point
            rad = laurent_radius(lim.group, xt) if lim.group.rank else 0.5 * min(abs(xt - lim.p1), abs(xt - lim.p2))
            points = _ring(xt, rad)
        pts = np.asarray(points, dtype=complex)
        third = DifferentialSpec(lim.group, ThirdKind(lim.p1, lim.p2))
        limit_third = eval_density(third, pts, policy)
        limit_first = [eval_density(DifferentialSpec(lim.group, FirstKind(j + 1)), pts, policy)
                       for j in range(lim.group.rank)]
        for y in scenario.y_sequence:
            grp = scenario.curve(y).group
            wk = eval_density(DifferentialSpec(grp, FirstKind(lim.k + 1)), pts, policy)
            first = [_rel(eval_density(DifferentialSpec(grp, FirstKind(i + 1)), pts, policy), limit_first[j])
                     for j, i in enumerate(lim.others)]
            rows.append({"y": y, "third_kind": _rel(wk, limit_third),
                         "first_kind": max(first) if first else 0.0})
        keys = ["third_kind", "first_kind"]
    else:
        lim = limit_data_reducible(scenario, 1, policy)
        from .differentials import choose_base_point

        if points is None:
            pts1 = _ring(lim.marked_point, laurent_radius(lim.group1, lim.marked_point)) if lim.group1.rank \
                else _ring(lim.marked_point, 0.5)
        else:
            pts1 = np.asarray(points, dtype=complex)
        z2 = choose_base_point(lim.group2)
        pts2 = _ring(z2, 0.25)
        limit1 = [eval_density(DifferentialSpec(lim.group1, FirstKind(j + 1)), pts1, policy)
                  for j in range(lim.group1.rank)]
        limit2 = [eval_density(DifferentialSpec(lim.group2, FirstKind(j + 1)), pts2, policy)
                  for j in range(lim.group2.rank)]
        for y in scenario.y_sequence:
            curve = scenario.curve(y)
            grp = curve.group
            path = curve.paths[lim.idx2[0]]
            pos = [j for j, h in enumerate(path) if h[0] == scenario.pinch]
            T = _transport_from_prefix(scenario, curve, path[: pos[0] + 1])
            first = [_rel(eval_density(DifferentialSpec(grp, FirstKind(i + 1)), pts1, policy), limit1[j])
                     for j, i in enumerate(lim.idx1)]
            scale = max(float(np.max(np.abs(v))) for v in limit1) if limit1 else 1.0
            vanish = [float(np.max(np.abs(_pullback(grp, FirstKind(i + 1), T, pts2, policy)))) / scale
                      for i in lim.idx1]
            second = [_rel(_pullback(grp, FirstKind(i + 1), T, pts2, policy), limit2[j])
                      for j, i in enumerate(lim.idx2)]
            rows.append({"y": y, "first_kind": max(first) if first else 0.0,
                         "vanishing": max(vanish) if vanish else 0.0,
                         "second_component": max(second) if second else 0.0})
        keys = ["first_kind", "vanishing", "second_component"]
    order = np.argsort([-r["y"] for r in rows])
    monotone = {k: bool(all(rows[order[i + 1]][k] <= rows[order[i]][k] for i in range(len(order) - 1)))
                for k in keys}
    return {"kind": scenario.kind, "rows": rows, "monotone": monotone}


def _transport_from_prefix(scenario, curve, prefix) -> MoebiusMap:
    """Map from the far component's coordinate into the base coordinate."""
    from .graph import _reverse

    return path_map(scenario.graph, curve.params, _reverse(prefix))


# ---------------------------------------------------------------- soliton tau


@dataclass(frozen=True)
class SolitonData:
    """Data of a soliton tau function: points ``x_i``, ``x_-i``, ``x_t0``, offsets, phases."""

    x_plus: tuple
    x_minus: tuple
    xt: complex
    n: tuple = ()
    alpha: tuple = ()
    M: int = 3

    def __post_init__(self):
        xp = tuple(complex(x) for x in self.x_plus)
        xm = tuple(complex(x) for x in self.x_minus)
        g = len(xp)
        if len(xm) != g:
            raise InputError("x_plus and x_minus must have the same length")
        n = tuple(int(v) for v in self.n) or (0,) * g
        alpha = tuple(complex(a) for a in self.alpha) or (0j,) * g
        if len(n) != g or len(alpha) != g:
            raise InputError("n and alpha must have length g")
        pts = list(xp) + list(xm) + [complex(self.xt)]
        for a in range(len(pts)):
            for b in range(a):
                if abs(pts[a] - pts[b]) < 1e-14 * (1 + abs(pts[a])):
                    raise InputError("soliton points must be distinct")
        if not 1 <= int(self.M) <= 16:
            raise InputError("M must lie in 1..16")
        object.__setattr__(self, "x_plus", xp)
        object.__setattr__(self, "x_minus", xm)
        object.__setattr__(self, "xt", complex(self.xt))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "M", int(self.M))

    @property
    def g(self) -> int:
        return len(self.x_plus)

    def rates(self) -> np.ndarray:
        """``kappa[i, m-1] = -(1/(x_i - x_t)^m - 1/(x_-i - x_t)^m)``."""
        m = np.arange(1, self.M + 1)
        xp = np.array(self.x_plus)[:, None]
        xm = np.array(self.x_minus)[:, None]
        return -(1.0 / (xp - self.xt) ** m - 1.0 / (xm - self.xt) ** m)

    def cross_ratio(self, i: int, j: int) -> complex:
        xi, xmi = self.x_plus[i], self.x_minus[i]
        xj, xmj = self.x_plus[j], self.x_minus[j]
        den = (xmi - xj) * (xi - xmj)
        num = (xi - xj) * (xmi - xmj)
        if den == 0 or num == 0:
            raise DegenerateCrossRatio(f"cross-ratio of pair ({i + 1}, {j + 1}) degenerates")
        return num / den

    def expsum(self, ts=None) -> ExpSum:
        g = self.g
        us = np.array(list(np.ndindex(*([2] * g))), dtype=float).reshape(-1, g)
        e = us - np.array(self.n, dtype=float)
        logw = e @ np.array(self.alpha)
        for i in range(g):
            for j in range(i + 1, g):
                logw = logw + e[:, i] * e[:, j] * np.log(self.cross_ratio(i, j))
        K = e @ self.rates()
        return ExpSum(logw.astype(complex), K.astype(complex), np.zeros((self.M, self.M), dtype=complex))

    def to_dict(self) -> dict:
        def cx(v):
            return [v.real, v.imag]

        return {"x_plus": [cx(x) for x in self.x_plus], "x_minus": [cx(x) for x in self.x_minus],
                "xt": cx(self.xt), "n": list(self.n), "alpha": [cx(a) for a in self.alpha], "M": self.M}


def soliton_from_dict(data: dict) -> SolitonData:
    try:
        return SolitonData(
            tuple(_complex_entry(x) for x in data["x_plus"]),
            tuple(_complex_entry(x) for x in data["x_minus"]),
            _complex_entry(data["xt"]),
            tuple(data.get("n", ())),
            tuple(_complex_entry(a) for a in data.get("alpha", ())),
            int(data.get("M", 3)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed soliton specification: {exc}") from exc


def soliton_tau(s: SolitonData, t):
    t = np.asarray(t, dtype=complex)
    return s.expsum().value(t)


def soliton_kp_residual(s: SolitonData, points):
    try:
        return kp_residual(s.expsum(), points)
    except ThetaZero as exc:
        raise TauZeroOnGrid(str(exc)) from exc


def soliton_phases(alpha, Zbar, n) -> np.ndarray:
    """Phases ``alpha'_i = 2 pi i alpha_i + 2 pi i sum_{j != i} Zbar_ij (n_j - 1/2)``.

    These make the ``beta = (1/2, ..., 1/2)`` limit of a family tau function
    equal to the soliton tau with offsets ``n`` (``n_i = 1`` reproduces the
    family's lattice terms ``v_i in {0, -1}``).
    """
    alpha = np.asarray(alpha, dtype=complex)
    Zbar = np.asarray(Zbar, dtype=complex)
    n = np.asarray(n, dtype=float)
    off = Zbar - np.diag(np.diag(Zbar))
    return TWO_PI_I * alpha + TWO_PI_I * off @ (n - 0.5)
