"""Riemann theta, tau functions, wave coefficients and KP verification.

Theta convention: ``Theta(z) = sum_v exp(pi i v.Z.v + v.z)``; the argument
enters as ``exp(z_i)**v_i`` (no ``2 pi i`` on ``z``).

Every tau function handled here (theta tau, soliton tau, modified tau) is
represented as an :class:`ExpSum`

    ``tau(t) = exp(t.Q.t / 2) * sum_k exp(logw_k + K_k . t)``

so all derivatives are exact term-by-term moments.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import psido, series
from .differentials import DEFAULT_POLICY, TruncationPolicy, laurent_data
from .errors import (
    FourierNotConverged,
    InputError,
    LatticeNotConverged,
    RatioPoleOnCircle,
    ThetaZero,
    TruncationTooShallow,
)

TWO_PI_I = 2j * math.pi
EPS_TAIL = 1e-16


# ---------------------------------------------------------------- lattice


def default_radius(Z, eps: float = EPS_TAIL) -> int:
    """Half-width of the lattice box from the Gaussian decay rate of the terms."""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    if Z.size == 0:
        return 0
    lam = float(np.min(np.linalg.eigvalsh(0.5 * (Z.imag + Z.imag.T))))
    if not lam > 0:
        raise InputError("Im Z is not positive definite")
    return int(math.ceil(math.sqrt(-math.log(eps) / (math.pi * lam)))) + 2


def lattice_centers(Z, z) -> np.ndarray:
    """Real lattice point where ``|exp(pi i v.Z.v + v.z)|`` peaks, per argument row."""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    return np.linalg.solve(2 * math.pi * Z.imag, z.real.T).T


def lattice_box(Z, z, R: int) -> np.ndarray:
    """Integer vectors covering every argument row of ``z`` with half-width ``R``."""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    g = Z.shape[0]
    if g == 0:
        return np.zeros((1, 0), dtype=int)
    cen = lattice_centers(Z, z)
    lo = np.floor(cen.min(axis=0)).astype(int) - R
    hi = np.ceil(cen.max(axis=0)).astype(int) + R
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([x.ravel() for x in grid], axis=1)


def _lattice_logw(Z, v, c):
    quad = np.einsum("ki,ij,kj->k", v, Z, v)
    return 1j * math.pi * quad + v @ c


def _logsumexp(a, axis=-1):
    m = np.max(a.real, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    s = np.sum(np.exp(a - m), axis=axis)
    return np.log(s) + np.squeeze(m, axis=axis)


def _theta_once(Z, z, R, weights=None):
    v = lattice_box(Z, z, R)
    quad = 1j * math.pi * np.einsum("ki,ij,kj->k", v, Z, v)
    expo = quad[None, :] + np.atleast_2d(z) @ v.T
    m = np.max(expo.real, axis=1, keepdims=True)
    terms = np.exp(expo - m)
    if weights is not None:
        terms = terms * weights(v)[None, :]
    return np.sum(terms, axis=1) * np.exp(m[:, 0])


def theta(Z, z, R: int | None = None, eps_tail: float = 1e-13):
    """Riemann theta function; ``z`` may be a single vector or an array of rows.

    The lattice box is centred on the dominant term and the sum is repeated
    with ``R + 2``; a relative change above ``eps_tail`` raises
    :class:`LatticeNotConverged`.
    """
    return theta_directional_derivatives(Z, z, [], [], R, eps_tail)


def theta_directional_derivatives(Z, z, directions, orders, R: int | None = None,
                                  eps_tail: float = 1e-13):
    """``prod_k (d_k . grad)^{m_k} Theta(z)`` as a lattice sum."""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    z = np.asarray(z, dtype=complex)
    single = z.ndim == 1
    zz = np.atleast_2d(z)
    if Z.shape[0] == 0:
        val = np.ones(zz.shape[0], dtype=complex) if sum(orders) == 0 else np.zeros(zz.shape[0], dtype=complex)
        return val[0] if single else val
    dirs = [np.asarray(d, dtype=complex) for d in directions]

    def weights(v):
        w = np.ones(v.shape[0], dtype=complex)
        for d, m in zip(dirs, orders):
            w = w * (v @ d) ** m
        return w

    if R is None:
        R = default_radius(Z)
    if R < 1:
        raise InputError("lattice radius must be at least 1")
    a = _theta_once(Z, zz, R, weights)
    b = _theta_once(Z, zz, R + 2, weights)
    scale = np.maximum(np.abs(b), np.abs(_theta_once(Z, zz, R + 2)))
    if np.any(np.abs(a - b) > eps_tail * np.maximum(scale, 1e-300)):
        raise LatticeNotConverged(f"lattice sum changed under R={R} -> {R + 2}")
    return b[0] if single else b


# ---------------------------------------------------------------- exponential sums


@dataclass(frozen=True)
class ExpSum:
    """``tau(t) = exp(t.Q.t/2) * sum_k exp(logw[k] + K[k].t)``."""

    logw: np.ndarray
    K: np.ndarray
    Q: np.ndarray

    @property
    def M(self) -> int:
        return self.Q.shape[0]

    def _t(self, t):
        t = np.asarray(t, dtype=complex)
        if t.shape[-1] != self.M:
            raise InputError(f"expected {self.M} times, got {t.shape[-1]}")
        return t

    def log_value(self, t):
        """``log tau(t)`` (branch of the imaginary part unspecified)."""
        t = self._t(t)
        expo = self.logw + t[..., None, :] @ self.K.T
        expo = expo[..., 0, :] if t.ndim == 1 else expo.reshape(t.shape[:-1] + (-1,))
        if self.logw.size == 0:
            raise ThetaZero("empty exponential sum")
        quad = 0.5 * np.einsum("...i,ij,...j->...", t, self.Q, t)
        return quad + _logsumexp(expo)

    def value(self, t):
        return np.exp(self.log_value(t))

    def log_series(self, t0, directions, shape) -> np.ndarray:
        """Taylor coefficients of ``log tau(t0 + sum_i s_i d_i)`` in ``s``."""
        t0 = self._t(t0)
        d = np.asarray(directions, dtype=complex).reshape(len(shape), self.M)
        expo = self.logw + self.K @ t0
        m = float(np.max(expo.real))
        w = np.exp(expo - m)
        rates = self.K @ d.T
        F = np.einsum("k,k...->...", w, series.exp_linear(rates, shape))
        scale = float(np.sum(np.abs(w)))
        if abs(F.flat[0]) <= 1e-12 * scale:
            raise ThetaZero("tau vanishes at the expansion point")
        out = series.log(F)
        out.flat[0] += m
        quad = 0.5 * t0 @ self.Q @ t0
        lin = d @ self.Q @ t0
        hess = d @ self.Q @ d.T
        out.flat[0] += quad
        for i in range(len(shape)):
            if shape[i] > 1:
                idx = [0] * len(shape)
                idx[i] = 1
                out[tuple(idx)] += lin[i]
            for j in range(len(shape)):
                idx = [0] * len(shape)
                idx[i] += 1
                idx[j] += 1
                if all(a < n for a, n in zip(idx, shape)):
                    out[tuple(idx)] += 0.5 * hess[i, j]
        return out

    def padded(self, M: int) -> "ExpSum":
        """Same function with extra trailing times it does not depend on."""
        if M <= self.M:
            return self
        K = np.zeros((self.K.shape[0], M), dtype=complex)
        K[:, : self.M] = self.K
        Q = np.zeros((M, M), dtype=complex)
        Q[: self.M, : self.M] = self.Q
        return ExpSum(self.logw, K, Q)


def constant_expsum(M: int, value: complex = 1.0) -> ExpSum:
    return ExpSum(np.array([np.log(complex(value))]), np.zeros((1, M), dtype=complex),
                  np.zeros((M, M), dtype=complex))


# ---------------------------------------------------------------- tau data


@dataclass(frozen=True)
class Characteristic:
    """Characteristic ``(alpha, beta)``; ``c = 2 pi i (alpha + Z beta)`` is derived on demand."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.atleast_1d(np.asarray(self.alpha, dtype=complex)))
        object.__setattr__(self, "beta", np.atleast_1d(np.asarray(self.beta, dtype=float)))
        if self.alpha.shape != self.beta.shape:
            raise InputError("alpha and beta must have the same length")

    @classmethod
    def zero(cls, g: int) -> "Characteristic":
        return cls(np.zeros(g), np.zeros(g))

    def c(self, Z) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        if Z.shape[0] != self.alpha.size:
            raise InputError("characteristic length does not match the genus")
        return TWO_PI_I * (self.alpha + Z @ self.beta)


@dataclass(frozen=True)
class TauData:
    """``tau(t) = exp(t.q.t / 2) * Theta(c + r t)``."""

    Z: np.ndarray
    c: np.ndarray
    r: np.ndarray
    q: np.ndarray
    radius: int | None = None
    eps: float = EPS_TAIL
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        Z = np.atleast_2d(np.asarray(self.Z, dtype=complex)).reshape(len(np.atleast_1d(self.c)), -1)
        object.__setattr__(self, "Z", Z)
        object.__setattr__(self, "c", np.atleast_1d(np.asarray(self.c, dtype=complex)))
        r = np.asarray(self.r, dtype=complex).reshape(Z.shape[0], -1)
        q = np.atleast_2d(np.asarray(self.q, dtype=complex))
        if q.size == 0:
            q = np.zeros((r.shape[1], r.shape[1]), dtype=complex)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "q", q)
        if q.shape != (r.shape[1], r.shape[1]):
            raise InputError("r must be g x M and q must be M x M")
        if Z.shape[0] and not np.min(np.linalg.eigvalsh(Z.imag)) > 0:
            raise InputError("Im Z is not positive definite")

    @property
    def genus(self) -> int:
        return self.Z.shape[0]

    @property
    def M(self) -> int:
        return self.q.shape[0]

    def lattice_radius(self) -> int:
        return self.radius if self.radius is not None else default_radius(self.Z, self.eps)

    def expsum(self, ts=None) -> ExpSum:
        """Exponential-sum form valid for every row of ``ts`` (default ``t = 0``)."""
        g, M = self.genus, self.M
        ts = np.zeros((1, M)) if ts is None else np.atleast_2d(np.asarray(ts, dtype=complex))
        if g == 0:
            return ExpSum(np.zeros(1, dtype=complex), np.zeros((1, M), dtype=complex), self.q)
        args = self.c[None, :] + ts @ self.r.T
        v = lattice_box(self.Z, args, self.lattice_radius()).astype(float)
        logw = _lattice_logw(self.Z, v, self.c)
        return ExpSum(logw, v @ self.r, self.q)

    def check_nonzero(self):
        th = theta(self.Z, self.c, self.radius) if self.genus else 1.0
        scale = float(np.real(theta(self.Z, np.real(self.c), self.radius))) if self.genus else 1.0
        if abs(th) <= 1e-12 * abs(scale):
            raise ThetaZero("Theta(c) vanishes")


def tau_data_from_curve(curve_or_group, characteristic: Characteristic | None = None, M: int = 3,
                        policy: TruncationPolicy = DEFAULT_POLICY, xt=None, periods=None,
                        radius: int | None = None) -> TauData:
    """Tau data of a Schottky curve at its marked point."""
    from .periods import period_matrix

    group = getattr(curve_or_group, "group", curve_or_group)
    if xt is None:
        xt = curve_or_group.marked_point
    if periods is None:
        periods = period_matrix(group, policy)
    Z = periods.Z
    ch = characteristic if characteristic is not None else Characteristic.zero(group.rank)
    ld = laurent_data(group, complex(xt), M, policy)
    return TauData(Z, ch.c(Z), ld.r, ld.q, radius)


def as_expsum(data, ts=None) -> ExpSum:
    if isinstance(data, ExpSum):
        return data
    if hasattr(data, "expsum"):
        return data.expsum(ts)
    raise InputError(f"cannot evaluate a tau function from {type(data).__name__}")


def tau(data, t):
    """Tau function at the time vector ``t`` (or rows of times)."""
    t = np.asarray(t, dtype=complex)
    return as_expsum(data, t).value(t)


def _times(M, x, t2=0.0, t3=0.0):
    t = np.zeros(max(M, 3), dtype=complex)
    t[:3] = (x, t2, t3)
    return t[:M] if M >= 3 else t


# ---------------------------------------------------------------- KP residual


KP_SHAPE = (7, 3, 2)
_KP_FACT = series.derivative_factors(KP_SHAPE)


def kp_terms_from_series(ls: np.ndarray) -> np.ndarray:
    """The five KP terms from Taylor coefficients of ``log tau`` in ``(x, t2, t3)``.

    Returns ``[3/4 u_yy, -u_xs, 1/4 u_xxxx, 3 u_x^2, 3 u u_xx]`` with
    ``u = d_x^2 log tau``; their sum is the KP residual.
    """
    d = ls * _KP_FACT
    u, ux, uxx, uxxxx = d[2, 0, 0], d[3, 0, 0], d[4, 0, 0], d[6, 0, 0]
    uyy, uxs = d[2, 2, 0], d[3, 0, 1]
    return np.array([0.75 * uyy, -uxs, 0.25 * uxxxx, 3 * ux * ux, 3 * u * uxx])


@dataclass(frozen=True)
class ResidualReport:
    """KP residual on a grid; ``max``/``rms`` are normalized by the largest term."""

    points: np.ndarray
    u: np.ndarray
    residual: np.ndarray
    scale: float
    max: float
    rms: float

    def as_dict(self) -> dict:
        return {"max_normalized_residual": self.max, "rms_normalized_residual": self.rms,
                "term_scale": self.scale, "points": int(len(self.points))}


def kp_residual_expsum(es: ExpSum, points) -> ResidualReport:
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    es = es.padded(3)
    M = es.M
    dirs = np.zeros((3, M))
    dirs[0, 0] = dirs[1, 1] = dirs[2, 2] = 1.0
    u = np.zeros(len(pts), dtype=complex)
    res = np.zeros(len(pts), dtype=complex)
    scale = 0.0
    for i, p in enumerate(pts):
        t = np.zeros(M, dtype=complex)
        t[:3] = p
        terms = kp_terms_from_series(es.log_series(t, dirs, KP_SHAPE))
        u[i] = _u_at(es, t, dirs)
        res[i] = np.sum(terms)
        scale = max(scale, float(np.max(np.abs(terms))))
    if len(pts) == 0:
        return ResidualReport(pts, u, res.real, 0.0, 0.0, 0.0)
    nr = np.abs(res) / scale if scale > 0 else np.abs(res)
    return ResidualReport(pts, u, nr, scale, float(np.max(nr)), float(np.sqrt(np.mean(nr**2))))


def _u_at(es: ExpSum, t, dirs) -> complex:
    return 2 * es.log_series(t, dirs[:1], (3,))[2]


def kp_residual(data, points) -> ResidualReport:
    """KP residual of ``u = d_x^2 log tau`` at grid points ``(x, t2, t3)``.

    All derivatives are exact moments of the exponential-sum form.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if isinstance(data, ExpSum):
        return kp_residual_expsum(data, pts)
    M = data.M
    ts = np.zeros((max(len(pts), 1), M), dtype=complex)
    k = min(M, 3)
    if len(pts):
        ts[:, :k] = pts[:, :k]
    return kp_residual_expsum(as_expsum(data, ts), pts)


def u1(data, x, t2=0.0, t3=0.0) -> complex:
    """``u_1 = d_x^2 log Theta(c + x r_1 + t2 r_2 + t3 r_3) + q_11``."""
    M = data.M
    t = _times(max(M, 3), x, t2, t3)
    es = as_expsum(data, t[None, :M] if M < 3 else t[None, :]).padded(3)
    dirs = np.zeros((1, es.M))
    dirs[0, 0] = 1.0
    return complex(_u_at(es, t[: es.M], dirs))


def parse_grid(spec: str) -> np.ndarray:
    """``"x0:x1:nx,t20:t21:n2,t30:t31:n3"`` to an array of points (x fastest-varying last)."""
    try:
        parts = [p.split(":") for p in spec.split(",")]
        if len(parts) != 3 or any(len(p) != 3 for p in parts):
            raise ValueError
        axes = [np.linspace(float(a), float(b), int(n)) for a, b, n in parts]
    except ValueError as exc:
        raise InputError(f"bad grid specification {spec!r}") from exc
    if any(int(p[2]) < 0 for p in parts):
        raise InputError("grid counts must be non-negative")
    return np.array(list(itertools.product(*axes)), dtype=float).reshape(-1, 3)


# ---------------------------------------------------------------- reality


def reality_check(data: TauData, ts) -> dict:
    """Imaginary parts of ``tau`` at real times and of ``exp(2 pi i Z)``."""
    ts = np.atleast_2d(np.asarray(ts, dtype=float))
    vals = tau(data, ts)
    tau_imag = float(np.max(np.abs(vals.imag) / np.abs(vals))) if len(ts) else 0.0
    P = np.exp(TWO_PI_I * data.Z)
    p_imag = float(np.max(np.abs(P.imag) / np.abs(P))) if data.genus else 0.0
    half = np.exp(1j * math.pi * np.diag(data.Z))
    half_ok = bool(np.all(np.abs(half.imag) <= 1e-7 * np.abs(half))
                   and np.all((half.real > 0) & (half.real < 1)))
    return {
        "max_relative_imag_tau": tau_imag,
        "max_relative_imag_exp_2pi_i_Z": p_imag,
        "exp_pi_i_Zii": [float(h.real) for h in half],
        "exp_pi_i_Zii_in_unit_interval": half_ok,
        "real": bool(tau_imag <= 1e-8 and p_imag <= 1e-7 and half_ok),
    }


# ---------------------------------------------------------------- wave coefficients


def _shift(alpha, M):
    """``[alpha] = (alpha, alpha^2/2, ..., alpha^M/M)`` for an array of ``alpha``."""
    m = np.arange(1, M + 1)
    return np.asarray(alpha)[..., None] ** m / m


def _ratio_fn(es: ExpSum, t):
    lt = es.log_value(t)

    def fn(alpha):
        return np.exp(es.log_value(t[None, :] - _shift(alpha, es.M)) - lt)

    return fn


def _winding(vals) -> int:
    ph = np.unwrap(np.angle(vals))
    return int(round((ph[-1] - ph[0] + (np.angle(vals[0] / vals[-1]))) / (2 * math.pi)))


def zero_free_radius(es: ExpSum, t, r_max: float = 1.0, n: int = 256) -> float:
    """Largest sampled radius whose disc contains no zero of ``alpha -> tau(t - [alpha])``."""
    t = np.asarray(t, dtype=complex)
    lt = es.log_value(t)
    theta_ = 2 * math.pi * np.arange(n) / n
    last = 0.0
    for rho in np.geomspace(1e-3, r_max, 30):
        a = rho * np.exp(1j * theta_)
        logs = es.log_value(t[None, :] - _shift(a, es.M)) - lt
        vals = np.exp(logs - np.max(logs.real))
        if np.min(np.abs(vals)) < 1e-12 or _winding(np.append(vals, vals[0])) != 0:
            return last
        last = rho
    return r_max


def wave_coefficients(data, t, K: int, radius: float | None = None, n: int = 64,
                      tol: float = 1e-10) -> np.ndarray:
    """``w_1 .. w_K`` with ``tau(t - [alpha]) / tau(t) = 1 + sum w_k alpha^k``.

    Coefficients come from samples on a circle of radius ``radius`` (default:
    half the sampled zero-free radius) by discrete Fourier inversion. The
    radius is halved up to four times when the ratio has a pole near the
    circle.
    """
    t = np.asarray(t, dtype=complex)
    es = as_expsum(data, t[None, :])
    if K > es.M:
        raise InputError(f"{K} wave coefficients need at least {K} active times")
    if radius is None:
        d = zero_free_radius(es, t)
        if d == 0:
            raise RatioPoleOnCircle("tau(t - [alpha]) vanishes arbitrarily close to alpha = 0")
        radius = 0.5 * d
    fn = _ratio_fn(es, t)
    from .differentials import taylor_coefficients

    for _ in range(5):
        theta_ = 2 * math.pi * np.arange(2 * n) / (2 * n)
        vals = fn(radius * np.exp(1j * theta_))
        if np.all(np.isfinite(vals)) and np.max(np.abs(vals)) < 1e12:
            try:
                c = taylor_coefficients(fn, 0.0, radius, K + 1, n, tol)
                return c[1:]
            except FourierNotConverged:
                pass
        radius *= 0.5
    raise RatioPoleOnCircle("wave-coefficient ratio not analytic on the sampling circle")


def wave_series(es: ExpSum, t, n: int, depth: int, nx: int) -> np.ndarray:
    """Exact Taylor coefficients of ``tau(t - [a] + x e_1 + s e_n) / tau(t + x e_1 + s e_n)``.

    Returns an array of shape ``(depth + 1, nx, 2)`` in ``(a, x, s)``.
    """
    t = np.asarray(t, dtype=complex)
    es = es.padded(max(depth, n))
    M = es.M
    expo = es.logw + es.K @ t
    w = np.exp(expo - np.max(expo.real))
    # exp(-sum_m K_m a^m / m) per term, by the recurrence E' = P' E
    P = np.zeros((len(w), depth + 1), dtype=complex)
    mm = np.arange(1, min(depth, M) + 1)
    P[:, mm] = -es.K[:, mm - 1] / mm
    E = np.zeros_like(P)
    E[:, 0] = 1.0
    for k in range(1, depth + 1):
        j = np.arange(1, k + 1)
        E[:, k] = np.sum(j * P[:, j] * E[:, k - j], axis=1) / k
    X = series.exp_linear(es.K[:, [0]], (nx,))
    S = series.exp_linear(es.K[:, [n - 1]], (2,))
    N = np.einsum("k,ka,kb,kc->abc", w, E, X, S)
    # quadratic factor exp(-[a].Q.(t + x e1 + s en) + [a].Q.[a] / 2)
    Q = es.Q
    G = np.zeros((depth + 1, nx, 2), dtype=complex)
    qt = Q @ t
    for m in range(1, min(depth, M) + 1):
        G[m, 0, 0] -= qt[m - 1] / m
        if nx > 1:
            G[m, 1, 0] -= Q[m - 1, 0] / m
        G[m, 0, 1] -= Q[m - 1, n - 1] / m
        for m2 in range(1, min(depth, M) + 1):
            if m + m2 <= depth:
                G[m + m2, 0, 0] += 0.5 * Q[m - 1, m2 - 1] / (m * m2)
    den = np.zeros_like(N)
    den[0] = N[0]
    return series.mul(series.mul(N, series.exp(G)), series.inv(den))


def _lax_symbols(es: ExpSum, t, n: int, depth: int):
    nx = 2 * depth + 2 * n + 8
    ws = wave_series(es, t, n, depth, nx)
    shape = (nx, 2)
    floor = -depth
    W = {0: ws[0]}
    for k in range(1, depth + 1):
        W[-k] = ws[k]
    V = psido.inverse_monic(W, floor, shape)
    dW = {k: psido.dx(v) for k, v in W.items() if k < 0}
    one = np.zeros(shape, dtype=complex)
    one[0, 0] = 1.0
    L = psido.add({1: one}, psido.compose(dW, V, floor), -1.0)
    return L, floor


def hierarchy_residual(data, t, n: int, depth: int) -> dict:
    """Coefficientwise ``d L / d t_n - [(L^n)_+, L]`` at ``t`` for ``W`` of the given depth.

    Only orders not affected by the truncation are compared: ``-depth + n``
    up to ``n``.
    """
    t = np.asarray(t, dtype=complex)
    es = as_expsum(data, t[None, :]).padded(max(depth, n))
    tt = np.zeros(es.M, dtype=complex)
    tt[: t.size] = t
    L, floor = _lax_symbols(es, tt, n, depth)
    B = psido.plus_part(psido.power(L, n, floor))
    C = psido.commutator(B, L, floor)
    lo, hi = floor + n, n
    res, lhs_vals, rhs_vals = [], [], []
    for j in range(lo, hi + 1):
        lhs = L[j][0, 1] if j in L else 0j
        rhs = C[j][0, 0] if j in C else 0j
        res.append(abs(lhs - rhs))
        lhs_vals.append(lhs)
        rhs_vals.append(rhs)
    scale = max([abs(v) for v in lhs_vals + rhs_vals] + [0.0])
    mx = max(res) if res else 0.0
    return {
        "n": n,
        "depth": depth,
        "orders": list(range(lo, hi + 1)),
        "lhs": lhs_vals,
        "rhs": rhs_vals,
        "max_abs": float(mx),
        "residual": float(mx / scale) if scale > 0 else float(mx),
    }


def hierarchy_check(data, t, orders=(2, 3), depth: int = 6, tol: float = 1e-5) -> dict:
    """Lax-equation residuals at depth ``D`` and ``D + 2``.

    Raises :class:`TruncationTooShallow` when the depth-``D`` residual exceeds
    ``tol`` while the deeper one is much smaller.
    """
    out = {}
    for n in orders:
        a = hierarchy_residual(data, t, n, depth)
        b = hierarchy_residual(data, t, n, depth + 2)
        if a["residual"] > tol and b["residual"] < 0.1 * a["residual"]:
            raise TruncationTooShallow(f"n={n}: residual {a['residual']:.3g} at depth {depth} "
                                       f"drops to {b['residual']:.3g} at depth {depth + 2}")
        out[n] = {"residual": a["residual"], "residual_deeper": b["residual"],
                  "max_abs": a["max_abs"], "orders": a["orders"]}
    return out
