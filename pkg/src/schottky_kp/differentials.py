"""Abelian differentials of a Schottky group as truncated group series.

Densities ``f`` of differentials ``f(z) dz``:

* first kind ``omega_i``: sum over left coset representatives ``g`` of
  ``<g_i>`` of ``1/(z - g a_i) - 1/(z - g a_-i)``;
* second kind at ``x_t`` of order ``k``: sum over all words of
  ``g'(z) / (g(z) - x_t)**k``;
* third kind with poles ``p1, p2``: sum over all words of
  ``g'(z) (1/(g z - p1) - 1/(g z - p2))``, evaluated as the equivalent pair
  sum ``1/(z - g p1) - 1/(z - g p2)`` over the (inverse-closed) word set.

Sums run shell by shell (words of equal length) until two consecutive shells
contribute less than ``tail_tol`` relative to the running total.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    FourierNotConverged,
    InputError,
    PathBlocked,
    PoleOnContour,
    PoleProximity,
    TruncationNotConverged,
)
from .group import SchottkyGroup
from .moebius import INF

EPS_POLE = 1e-8
TWO_PI_I = 2j * math.pi
_CHUNK = 1 << 21


@dataclass(frozen=True)
class TruncationPolicy:
    """Truncation of group series.

    Attributes
    ----------
    max_len : longest word length that may be summed
    tail_tol : shell contributions below this (relative) count as converged
    max_terms : cap on the number of words in the table
    strict : raise :class:`TruncationNotConverged` when the cap is hit
    prune : words whose squared isometric radius is below
        ``prune * tail_tol * scale**2`` are dropped with their extensions
        (``scale`` is ``1 + max |fixed point|``); 0 disables pruning
    """

    max_len: int = 30
    tail_tol: float = 1e-12
    max_terms: int = 4_000_000
    strict: bool = True
    prune: float = 1e-3

    def __post_init__(self):
        if self.max_len < 0 or not self.tail_tol > 0 or self.prune < 0:
            raise InputError("need max_len >= 0, tail_tol > 0 and prune >= 0")

    def min_weight(self, group) -> float:
        if self.prune == 0:
            return 0.0
        scale = 1.0 + max([abs(p) for p in group.finite_points()], default=0.0)
        return self.prune * self.tail_tol * scale * scale


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class FirstKind:
    index: int


@dataclass(frozen=True)
class SecondKind:
    point: complex
    order: int
    exclude_identity: bool = False


@dataclass(frozen=True)
class ThirdKind:
    p1: complex
    p2: complex


@dataclass(eq=False)
class DifferentialSpec:
    """A differential of the given kind on the curve of ``group``."""

    group: SchottkyGroup
    kind: object

    def __post_init__(self):
        k = self.kind
        if isinstance(k, FirstKind):
            if not 1 <= k.index <= self.group.rank:
                raise InputError(f"first-kind index {k.index} outside 1..{self.group.rank}")
        elif isinstance(k, SecondKind):
            if k.order <= 1:
                raise InputError("second-kind order must exceed 1")
            if k.point is INF:
                raise InputError("second-kind differential at infinity is not implemented")
        elif isinstance(k, ThirdKind):
            if k.p1 == k.p2:
                raise InputError("third-kind poles must differ")
            if k.p1 is INF or k.p2 is INF:
                raise InputError("third-kind poles must be finite")
        else:
            raise InputError(f"unknown differential kind {k!r}")


@dataclass(frozen=True)
class SeriesResult:
    value: np.ndarray
    length: int
    tail: float


# vectorized Moebius helpers on stacks of matrices


def _image(mats, p):
    a, b, c, d = mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1]
    if p is INF:
        return a / c
    return (a * p + b) / (c * p + d)


def _image_difference(mats, det, p, q):
    """``g(p) - g(q)`` without cancellation."""
    c, d = mats[:, 1, 0], mats[:, 1, 1]
    if q is INF:
        return -det / (c * (c * p + d))
    if p is INF:
        return det / (c * (c * q + d))
    return det * (p - q) / ((c * p + d) * (c * q + d))


def _pole_pairs(group: SchottkyGroup, kind, sl: slice, table):
    """Pole pairs ``(A, B, A - B)`` for the words in ``sl``, masked per kind."""
    mats = table.mats[sl]
    det = table.det[sl]
    if isinstance(kind, FirstKind):
        i = kind.index
        keep = np.abs(table.last[sl]) != i
        mats = mats[keep]
        det = det[keep]
        p, q = group.fixed_point(i), group.fixed_point(-i)
    else:
        p, q = kind.p1, kind.p2
    return _image(mats, p), _image(mats, q), _image_difference(mats, det, p, q)


def _shell_mask_size(group, kind, table, l) -> int:
    sl = table.shell(l)
    if isinstance(kind, FirstKind):
        return int(np.count_nonzero(np.abs(table.last[sl]) != kind.index))
    return sl.stop - sl.start


def accumulate_shells(group: SchottkyGroup, policy: TruncationPolicy, shell_value, shell_size):
    """Sum ``shell_value(table, l)`` over word lengths until converged.

    ``shell_size(table, l)`` gives the number of words the quantity uses at
    length ``l``.  Returns a :class:`SeriesResult`.
    """
    tol = policy.tail_tol
    weight = policy.min_weight(group)
    total = None
    prev_small = False
    prev_empty = False
    tail = math.inf
    table = group.word_table(0, weight)
    for l in range(policy.max_len + 1):
        if l > table.max_len:
            grow = table.shell_size(l - 1) * max(1, 2 * group.rank - 1)
            if table.size + grow > policy.max_terms:
                break
        table = group.word_table(l, weight)
        size = shell_size(table, l)
        c = np.asarray(shell_value(table, l)) if size else None
        if total is None:
            total = np.zeros_like(c) if c is not None else None
        if c is not None:
            total = c if total is None else total + c
        if l == 0:
            continue
        if size == 0:
            if prev_empty:
                return SeriesResult(total, l, 0.0)
            prev_empty = True
            continue
        prev_empty = False
        mag = float(np.max(np.abs(c))) if c.size else 0.0
        scale = max(1.0, float(np.max(np.abs(total))) if total.size else 0.0)
        tail = mag / scale
        small = tail <= tol
        if small and prev_small:
            return SeriesResult(total, l, tail)
        prev_small = small
    if policy.strict:
        raise TruncationNotConverged(
            f"series not converged within word length {policy.max_len} "
            f"(last relative shell {tail:.3g} > {tol:.3g})"
        )
    return SeriesResult(total, policy.max_len, tail)


def _check_poles(z, poles, eps=EPS_POLE):
    if poles.size == 0 or z.size == 0:
        return
    dmin = np.min(np.abs(z[:, None] - poles[None, :]))
    if dmin < eps:
        raise PoleProximity(f"evaluation point within {dmin:.3g} of a pole")


def _pair_density(z, A, B, D):
    out = np.zeros(z.shape, dtype=complex)
    step = max(1, _CHUNK // max(1, z.size))
    for s in range(0, A.size, step):
        a = A[s : s + step]
        b = B[s : s + step]
        d = D[s : s + step]
        out += np.sum(d[None, :] / ((z[:, None] - a[None, :]) * (z[:, None] - b[None, :])), axis=1)
    return out


def _second_kind_density(z, mats, det, xt, k):
    a, b, c, dd = (mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1])
    out = np.zeros(z.shape, dtype=complex)
    step = max(1, _CHUNK // max(1, z.size))
    for s in range(0, a.size, step):
        sl = slice(s, s + step)
        den = c[None, sl] * z[:, None] + dd[None, sl]
        gz = (a[None, sl] * z[:, None] + b[None, sl]) / den
        out += np.sum(det[None, sl] / den**2 / (gz - xt) ** k, axis=1)
    return out


def density_series(spec: DifferentialSpec, z, policy: TruncationPolicy = DEFAULT_POLICY) -> SeriesResult:
    """Evaluate the density at an array of finite points, with truncation data."""
    group, kind = spec.group, spec.kind
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if isinstance(kind, SecondKind):
        xt = complex(kind.point)

        def value(table, l):
            mats = table.mats[table.shell(l)]
            if l == 0 and kind.exclude_identity:
                return np.zeros(z.shape, dtype=complex)
            a, b, c, d = (mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1])
            poles = (d * xt - b) / (a - c * xt)
            if not (l == 0 and kind.exclude_identity):
                _check_poles(z, poles)
            return _second_kind_density(z, mats, table.det[table.shell(l)], xt, kind.order)

        def size(table, l):
            sl = table.shell(l)
            return sl.stop - sl.start

        return accumulate_shells(group, policy, value, size)

    def value(table, l):
        A, B, D = _pole_pairs(group, kind, table.shell(l), table)
        _check_poles(z, np.concatenate([A, B]))
        return _pair_density(z, A, B, D)

    def size(table, l):
        return _shell_mask_size(group, kind, table, l)

    return accumulate_shells(group, policy, value, size)


def eval_density(spec: DifferentialSpec, z, policy: TruncationPolicy = DEFAULT_POLICY):
    """Density ``f(z)`` of the differential ``f(z) dz``; scalar in, scalar out."""
    if z is INF:
        raise InputError("evaluation point must be finite")
    res = density_series(spec, z, policy)
    if np.ndim(z) == 0:
        return complex(res.value[0])
    return res.value


def pole_images(spec: DifferentialSpec, max_len: int) -> np.ndarray:
    """Poles of the truncated series up to word length ``max_len``."""
    group, kind = spec.group, spec.kind
    table = group.word_table(max_len)
    sl = slice(0, table.offsets[max_len + 1])
    if isinstance(kind, SecondKind):
        mats = table.mats[sl]
        if kind.exclude_identity:
            mats = mats[1:]
        a, b, c, d = (mats[:, 0, 0], mats[:, 0, 1], mats[:, 1, 0], mats[:, 1, 1])
        return (d * kind.point - b) / (a - c * kind.point)
    A, B, _ = _pole_pairs(group, kind, sl, table)
    return np.concatenate([A, B])


# contour integrals


def _circle_integral(fn, center, radius, policy, n0=256, n_max=1 << 15):
    """Trapezoid rule for the counterclockwise circle, doubled until stable."""
    tol = policy.tail_tol

    def nodes(n, offset):
        theta = 2 * math.pi * (np.arange(n) + offset) / n
        return center + radius * np.exp(1j * theta), theta

    z, th = nodes(n0, 0.0)
    vals = fn(z)
    w = 1j * radius * np.exp(1j * th)
    est = 2 * math.pi / n0 * np.sum(vals * w)
    n = n0
    while n < n_max:
        # the midpoints refine the rule to 2n nodes
        zm, thm = nodes(n, 0.5)
        vm = fn(zm)
        wm = 1j * radius * np.exp(1j * thm)
        new = 0.5 * est + math.pi / n * np.sum(vm * wm)
        n *= 2
        if abs(new - est) <= tol * max(1.0, abs(new)):
            return new
        est = new
    raise TruncationNotConverged(f"contour quadrature unstable at {n} nodes")


def a_cycle_circle(group: SchottkyGroup, i: int):
    """Centre and radius of the a-cycle about the attractive fixed point of ``g_i``.

    The radius is a quarter of the distance to the nearest other fixed point.
    If that circle fails to enclose the isometric circle around the fixed point,
    or crosses another isometric circle, a circle concentric with the isometric
    circle and midway to its neighbours is used instead.
    """
    from .graph import generator_circles

    a = group.fixed_point(i)
    others = [group.fixed_point(h) for h in range(-group.rank, group.rank + 1) if h not in (0, i)]
    others = [p for p in others if p is not INF]
    dist = min((abs(a - p) for p in others), default=1.0)
    radius = 0.25 * dist
    circles = {h: (c, r) for h, c, r in generator_circles(group)}
    c_i, r_i = circles[i]
    encloses = abs(a - c_i) + r_i < radius
    clear = all(
        abs(abs(c - a) - radius) > r for h, (c, r) in circles.items() if h != i
    )
    if encloses and clear:
        return a, radius
    gap = min((abs(c - c_i) - r - r_i for h, (c, r) in circles.items() if h != i), default=r_i)
    return c_i, r_i + 0.5 * gap


def a_period(spec: DifferentialSpec, i: int, policy: TruncationPolicy = DEFAULT_POLICY,
             circle=None) -> complex:
    """Integral of the differential over the a-cycle about the attractive fixed point of ``g_i``."""
    group = spec.group
    center, radius = circle if circle is not None else a_cycle_circle(group, i)
    lmax = min(policy.max_len, 6)
    poles = pole_images(spec, lmax)
    if poles.size:
        gap = np.min(np.abs(np.abs(poles - center) - radius))
        if gap < EPS_POLE * max(1.0, radius):
            raise PoleOnContour(f"pole within {gap:.3g} of the a-cycle")

    def fn(z):
        return density_series(spec, z, policy).value

    return complex(_circle_integral(fn, center, radius, policy))


def residue(spec: DifferentialSpec, at, policy: TruncationPolicy = DEFAULT_POLICY,
            radius=None) -> complex:
    """Residue of a third-kind differential at one of its poles, by contour integration."""
    kind = spec.kind
    if not isinstance(kind, ThirdKind):
        raise InputError("residue is defined for third-kind differentials")
    at = complex(at)
    if at not in (kind.p1, kind.p2):
        raise InputError("residue point must be one of the two poles")
    if radius is None:
        poles = pole_images(spec, min(policy.max_len, 2))
        others = poles[np.abs(poles - at) > 0]
        fps = np.array(spec.group.finite_points(), dtype=complex)
        cand = np.concatenate([others, fps])
        dist = float(np.min(np.abs(cand - at))) if cand.size else 1.0
        if dist < EPS_POLE:
            raise PoleProximity("another pole coincides with the residue point")
        radius = 0.25 * dist

    def fn(z):
        return density_series(spec, z, policy).value

    return complex(_circle_integral(fn, at, radius, policy) / TWO_PI_I)


# b-periods


def _segment_pair_integral(z0, z1, A, B, D):
    """Exact integral of ``1/(z-A) - 1/(z-B)`` along the segment ``z0 -> z1``."""
    single = np.log((z1 - A) / (z0 - A)) - np.log((z1 - B) / (z0 - B))
    delta = D * (z1 - z0) / ((z0 - A) * (z1 - B))
    fused = np.log1p(delta)
    k = np.round((single.imag - fused.imag) / (2 * math.pi))
    return fused + 2j * math.pi * k


def _segment_distance(p, z0, z1):
    d = z1 - z0
    t = ((p - z0) * np.conj(d)).real / (abs(d) ** 2)
    t = np.clip(t, 0.0, 1.0)
    return np.abs(p - (z0 + t * d))


def _path_ok(group, circles, i, pts, eps):
    """Polyline ``pts`` meets no isometric circle other than the one of ``g_i^{-1}``.

    The clearance is ``eps``, capped at half the radius so tiny circles of
    nearly pinched edges keep a proportionate margin.
    """
    for k in range(len(pts) - 1):
        for h, c, r in circles:
            if h == i:
                continue
            if _segment_distance(np.array([c]), pts[k], pts[k + 1])[0] <= r + min(eps, 0.5 * r):
                return False
    return True


def b_path(group: SchottkyGroup, i: int, z0: complex, eps_path: float | None = None) -> list:
    """Polyline from ``z0`` to ``g_i(z0)`` avoiding all isometric circles except the target one.

    The straight segment is tried first; otherwise the segment is bowed
    sideways through one intermediate vertex.
    """
    from .graph import generator_circles

    circles = generator_circles(group)
    z1 = complex(group.generators[i - 1](z0))
    scale = max([1.0] + [abs(p) for p in group.finite_points()])
    eps = 1e-3 * scale if eps_path is None else eps_path
    pts = [z0, z1]
    if _path_ok(group, circles, i, pts, eps):
        return pts
    mid = 0.5 * (z0 + z1)
    normal = 1j * (z1 - z0) / abs(z1 - z0)
    for k in range(1, 9):
        for sgn in (1, -1):
            w = mid + sgn * normal * k * 0.25 * abs(z1 - z0)
            cand = [z0, w, z1]
            if _path_ok(group, circles, i, cand, eps):
                return cand
    raise PathBlocked(f"no admissible b-path for generator {i}")


def _is_real_data(group: SchottkyGroup) -> bool:
    pts = group.alpha + group.alpha_rep
    if any(p is INF for p in pts):
        return False
    return all(abs(p.imag) <= 1e-14 * max(1.0, abs(p)) for p in pts) and all(
        abs(b.imag) <= 1e-14 for b in group.beta
    )


def choose_base_point(group: SchottkyGroup) -> complex:
    """Base point for the b-cycles, kept away from the limit set."""
    from .graph import generator_circles

    circles = generator_circles(group)
    pts = group.finite_points()
    rad = 1.0 + max([abs(p) for p in pts], default=0.0)
    default = 1j * rad
    candidates = [default] + [rad * cmath.exp(2j * math.pi * k / 16) for k in range(16)]

    def admissible(z0):
        for h, c, r in circles:
            if abs(z0 - c) <= r:
                return False
        try:
            for i in range(1, group.rank + 1):
                b_path(group, i, z0)
        except PathBlocked:
            return False
        return True

    if _is_real_data(group) and admissible(default):
        return default
    if group.rank == 0:
        return default
    table = group.word_table(2)
    mats = table.mats[: table.offsets[3]]
    poles = np.concatenate(
        [_image(mats, group.fixed_point(h)) for h in range(-group.rank, group.rank + 1) if h]
    )
    best, best_score = None, -1.0
    for z0 in candidates:
        if not admissible(z0):
            continue
        score = float(np.min(np.abs(poles - z0)))
        if score > best_score:
            best, best_score = z0, score
    if best is None:
        raise PathBlocked("no admissible base point among the candidates")
    return best


def b_period_integral(group: SchottkyGroup, i: int, j: int, z0: complex | None = None,
                      policy: TruncationPolicy = DEFAULT_POLICY, kind=None) -> complex:
    """Integral of ``omega_j`` (or of ``kind``) along the b-path from ``z0`` to ``g_i(z0)``."""
    if z0 is None:
        z0 = choose_base_point(group)
    if kind is None:
        kind = FirstKind(j)
    spec = DifferentialSpec(group, kind)
    pts = b_path(group, i, complex(z0))
    return sum(path_integral(spec, piece, policy) for piece in fold_b_path(group, i, pts))


def _arc_points(p0: complex, p1: complex, avoid: complex, n: int = 48) -> list:
    """Points on the circular arc from ``p0`` to ``p1`` through neither ``avoid`` nor infinity."""
    a, b, c = p0 - avoid, p1 - avoid, 0j
    den = 2 * (a.real * b.imag - a.imag * b.real)
    if abs(den) <= 1e-14 * abs(a) * abs(b):
        return [p0, p1]
    ux = (abs(a) ** 2 * b.imag - abs(b) ** 2 * a.imag) / den
    uy = (abs(b) ** 2 * a.real - abs(a) ** 2 * b.real) / den
    centre = complex(ux, uy)
    rad = abs(a - centre)
    t0 = cmath.phase(a - centre)
    t1 = cmath.phase(b - centre)
    tq = cmath.phase(c - centre)
    sweep = (t1 - t0) % (2 * math.pi)
    if (tq - t0) % (2 * math.pi) < sweep:
        sweep -= 2 * math.pi
    ts = t0 + sweep * np.linspace(0.0, 1.0, n + 1)
    out = [complex(avoid + centre + rad * cmath.exp(1j * t)) for t in ts]
    out[0], out[-1] = p0, p1
    return out


def fold_b_path(group: SchottkyGroup, i: int, pts) -> list:
    """Split a b-path where it enters the target circle and pull the inner part back.

    The piece inside the circle of ``g_i^{-1}`` is replaced by its preimage
    under ``g_i``, a circular arc ending at ``z0``.  The differentials are
    invariant, so the integral is unchanged, while the new pieces stay on or
    outside the isometric circles where the pole images are well separated.
    """
    from .graph import generator_circles

    circ = [(c, r) for h, c, r in generator_circles(group) if h == i]
    if not circ or circ[0][0] is None:
        return [list(pts)]
    c, r = circ[0]
    for k in range(len(pts) - 1):
        p, q = pts[k], pts[k + 1]
        d = q - p
        # |p + s d - c|^2 = r^2
        f = p - c
        qa = abs(d) ** 2
        qb = 2 * (f.real * d.real + f.imag * d.imag)
        qc = abs(f) ** 2 - r * r
        disc = qb * qb - 4 * qa * qc
        if qc <= 0 or disc < 0:
            continue
        s = (-qb - math.sqrt(disc)) / (2 * qa)
        if 0.0 <= s <= 1.0:
            m = p + s * d
            g = group.generators[i - 1].normalized()
            ginv = g.inverse()
            m_pre = complex(ginv(m))
            pole = -g.d / g.c
            return [list(pts[: k + 1]) + [m], _arc_points(m_pre, pts[0], pole)]
    return [list(pts)]


def path_integral(spec: DifferentialSpec, pts, policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """Exact integral of a first- or third-kind truncated series along a polyline."""
    group, kind = spec.group, spec.kind
    if isinstance(kind, SecondKind):
        raise InputError("path integrals are implemented for first and third kinds")
    pts = [complex(p) for p in pts]

    def value(table, l):
        A, B, D = _pole_pairs(group, kind, table.shell(l), table)
        out = 0j
        for z0, z1 in zip(pts[:-1], pts[1:]):
            dist = np.concatenate([_segment_distance(A, z0, z1), _segment_distance(B, z0, z1)])
            if dist.size and np.min(dist) < EPS_POLE:
                raise PathBlocked("integration path passes through a pole")
            out += np.sum(_segment_pair_integral(z0, z1, A, B, D))
        return np.array([out])

    def size(table, l):
        return _shell_mask_size(group, kind, table, l)

    return complex(accumulate_shells(group, policy, value, size).value[0])


# Laurent data at the marked point


@dataclass(frozen=True)
class LaurentData:
    """Taylor data at the marked point.

    ``r[j, m-1]`` is the coefficient of ``u^(m-1)`` in ``omega_{j+1}`` and
    ``q[n-1, m-1]`` is ``n`` times the coefficient of ``u^(m-1)`` in the
    regular part of the second-kind differential of order ``n + 1``.
    """

    r: np.ndarray
    q: np.ndarray

    @property
    def M(self) -> int:
        return self.q.shape[0]

    @property
    def genus(self) -> int:
        return self.r.shape[0]

    def symmetry_defect(self) -> float:
        nq = float(np.max(np.abs(self.q))) if self.q.size else 0.0
        if nq == 0:
            return 0.0
        return float(np.max(np.abs(self.q - self.q.T))) / nq


def laurent_radius(group: SchottkyGroup, xt: complex) -> float:
    """Half the distance from ``xt`` to the nearest isometric circle or fixed point."""
    from .graph import generator_circles

    d = [abs(xt - p) for p in group.finite_points()]
    d += [abs(xt - c) - r for _, c, r in generator_circles(group) if c is not None]
    if not d:
        return 1.0
    dist = min(d)
    if dist <= 0:
        raise InputError("marked point lies inside an isometric circle")
    return 0.5 * dist


def taylor_coefficients(fn, center, radius, count, n=64, tol=1e-10):
    """Taylor coefficients ``c_0 .. c_{count-1}`` of ``fn`` at ``center`` by FFT on a circle.

    The estimate at ``n`` nodes is compared with ``2n`` nodes; each coefficient
    must agree to ``tol`` relative to ``max|fn|`` on the circle divided by
    ``radius**k``.
    """
    if count == 0:
        return np.zeros((0,), dtype=complex)

    def coeffs(nn):
        theta = 2 * math.pi * np.arange(nn) / nn
        vals = fn(center + radius * np.exp(1j * theta))
        c = np.fft.fft(vals, axis=-1) / nn
        k = np.arange(count)
        return c[..., :count] / radius**k, float(np.max(np.abs(vals)))

    n = max(n, 2 * count)
    c1, vmax = coeffs(n)
    c2, _ = coeffs(2 * n)
    k = np.arange(count)
    bound = tol * max(vmax, 1e-300) / radius**k
    if np.any(np.abs(c1 - c2) > bound):
        raise FourierNotConverged("Taylor coefficients unstable under node doubling")
    return c2


def laurent_data(group: SchottkyGroup, xt: complex, M: int,
                 policy: TruncationPolicy = DEFAULT_POLICY, radius: float | None = None,
                 n: int = 64) -> LaurentData:
    """First- and second-kind Taylor data at the marked point ``xt``."""
    g = group.rank
    if M == 0:
        return LaurentData(np.zeros((g, 0), dtype=complex), np.zeros((0, 0), dtype=complex))
    if radius is None:
        radius = laurent_radius(group, xt)
    tol = max(1e-10, 10 * policy.tail_tol)
    r = np.zeros((g, M), dtype=complex)
    for j in range(1, g + 1):
        spec = DifferentialSpec(group, FirstKind(j))
        r[j - 1] = taylor_coefficients(
            lambda z: density_series(spec, z, policy).value, xt, radius, M, n, tol
        )
    q = np.zeros((M, M), dtype=complex)
    for nn in range(1, M + 1):
        spec = DifferentialSpec(group, SecondKind(xt, nn + 1, exclude_identity=True))
        q[nn - 1] = nn * taylor_coefficients(
            lambda z: density_series(spec, z, policy).value, xt, radius, M, n, tol
        )
    return LaurentData(r, q)


def third_kind_taylor(group: SchottkyGroup, p1, p2, xt, M: int,
                      policy: TruncationPolicy = DEFAULT_POLICY, radius=None, n: int = 64):
    """Taylor coefficients of the third-kind density at ``xt`` (``M`` of them)."""
    if radius is None:
        radius = laurent_radius(group, xt) if group.rank else 0.5
        radius = min(radius, 0.5 * min(abs(xt - p1), abs(xt - p2)))
    spec = DifferentialSpec(group, ThirdKind(complex(p1), complex(p2)))
    tol = max(1e-10, 10 * policy.tail_tol)
    return taylor_coefficients(lambda z: density_series(spec, z, policy).value, xt, radius, M, n, tol)
