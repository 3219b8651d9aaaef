"""Moebius transformations acting on the Riemann sphere.

A point of the sphere is either a Python ``complex`` or the singleton
:data:`INF`.  A :class:`MoebiusMap` stores the four entries of a 2x2 complex
matrix, understood up to a nonzero scalar.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, ParabolicOrEllipticMap, SingularMatrix


class _Infinity:
    """The point at infinity of the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
# relative determinant below which a matrix counts as singular; maps with
# tiny isometric circles (nearly pinched edges) sit far below 1e-14
DET_EPS = 1e-28


def is_inf(z) -> bool:
    return z is INF


def as_point(z):
    """Coerce ``z`` to a sphere point.

    Accepts ``INF``, the string ``"inf"``, numbers and ``[re, im]`` pairs.
    """
    if z is INF or (isinstance(z, str) and z.lower() == "inf"):
        return INF
    if isinstance(z, (list, tuple)) and len(z) == 2:
        z = complex(float(z[0]), float(z[1]))
    try:
        w = complex(z)
    except (TypeError, ValueError) as exc:
        raise InputError(f"not a sphere point: {z!r}") from exc
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise InputError(f"finite sphere point has non-finite coordinates: {z!r}")
    return w


def chordal_distance(z, w) -> float:
    """Chordal distance on the Riemann sphere (diameter 2)."""
    if z is INF and w is INF:
        return 0.0
    if z is INF:
        return 2.0 / math.sqrt(1.0 + abs(w) ** 2)
    if w is INF:
        return 2.0 / math.sqrt(1.0 + abs(z) ** 2)
    return 2.0 * abs(z - w) / math.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))


@dataclass(frozen=True, eq=False)
class MoebiusMap:
    """Projective 2x2 complex matrix ``[[a, b], [c, d]]``."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in "abcd":
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise SingularMatrix(f"entry {name} is not finite")
            object.__setattr__(self, name, v)
        scale = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        if scale == 0.0 or abs(self.det) <= DET_EPS * scale * scale:
            raise SingularMatrix("determinant vanishes")

    @classmethod
    def from_matrix(cls, m) -> "MoebiusMap":
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def singular(cls, a, b, c, d) -> "MoebiusMap":
        """Rank-one matrix (a constant map off one point); skips the determinant check."""
        m = object.__new__(cls)
        for name, v in zip("abcd", (a, b, c, d)):
            object.__setattr__(m, name, complex(v))
        return m

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def normalized(self) -> "MoebiusMap":
        """Scale so the first largest-magnitude entry equals 1."""
        entries = (self.a, self.b, self.c, self.d)
        k = max(range(4), key=lambda i: abs(entries[i]))
        s = entries[k]
        return MoebiusMap(*(e / s for e in entries))

    def unimodular(self) -> "MoebiusMap":
        """Representative with determinant 1 (sign chosen by principal root)."""
        s = cmath.sqrt(self.det)
        return MoebiusMap(self.a / s, self.b / s, self.c / s, self.d / s)

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def equals(self, other: "MoebiusMap", rtol: float = 1e-12) -> bool:
        m1 = self.normalized().matrix
        m2 = other.normalized().matrix
        return bool(np.all(np.abs(m1 - m2) <= rtol))

    def __eq__(self, other):
        if not isinstance(other, MoebiusMap):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def __call__(self, z):
        return apply(self, z)

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return compose(self, other)

    def derivative(self, z: complex) -> complex:
        """``d/dz`` of the map at a finite point."""
        return self.det / (self.c * z + self.d) ** 2


def apply(m: MoebiusMap, z):
    """Evaluate ``(az + b)/(cz + d)`` on the sphere."""
    if z is INF:
        if m.c == 0:
            return INF
        return m.a / m.c
    num = m.a * z + m.b
    den = m.c * z + m.d
    if den == 0:
        return INF
    return num / den


def compose(m1: MoebiusMap, m2: MoebiusMap) -> MoebiusMap:
    """Matrix product ``m1 @ m2`` renormalized to unit largest entry."""
    p = m1.matrix @ m2.matrix
    s = p.flat[int(np.argmax(np.abs(p)))]
    p = p / s
    return MoebiusMap(p[0, 0], p[0, 1], p[1, 0], p[1, 1])


def _eigen_fixed_point(m: MoebiusMap, lam: complex):
    """Sphere point spanned by the eigenvector of ``m`` for eigenvalue ``lam``."""
    # (a - lam) z + b = 0 and c z + (d - lam) = 0 describe the same point;
    # use the row with the larger coefficient on z.
    r1 = m.a - lam
    if abs(m.c) >= abs(r1):
        if m.c == 0:
            return INF
        return (lam - m.d) / m.c
    return -m.b / r1


def fixed_points_and_multiplier(m: MoebiusMap):
    """Attractive fixed point, repulsive fixed point and multiplier.

    Returns
    -------
    (alpha, alpha_rep, beta)
        ``alpha`` is attractive, ``alpha_rep`` repulsive and ``|beta| < 1``
        satisfies ``(m(z) - alpha)/(z - alpha) = beta (m(z) - alpha_rep)/(z - alpha_rep)``.

    Raises
    ------
    ParabolicOrEllipticMap
        If ``|beta|`` equals 1 within 1e-10.
    """
    m = m.normalized()
    if m.c == 0:
        # upper triangular: infinity is fixed with eigenvalue a, read off
        # exactly instead of through a cancelling eigenvector
        if m.a == m.d:
            raise ParabolicOrEllipticMap("parabolic map fixing infinity")
        finite = m.b / (m.d - m.a)
        if abs(m.a) > abs(m.d):
            beta = m.d / m.a
            alpha, alpha_rep = INF, finite
        else:
            beta = m.a / m.d
            alpha, alpha_rep = finite, INF
        if abs(abs(beta) - 1.0) <= 1e-10:
            raise ParabolicOrEllipticMap(f"|multiplier| = {abs(beta)!r} is 1 within 1e-10")
        return alpha, alpha_rep, beta
    tr = m.a + m.d
    det = m.det
    root = cmath.sqrt(tr * tr - 4.0 * det)
    lam1 = 0.5 * (tr + root)
    lam2 = 0.5 * (tr - root)
    lam_big = lam1 if abs(lam1) >= abs(lam2) else lam2
    if lam_big == 0:
        raise ParabolicOrEllipticMap("degenerate eigenvalues")
    lam_small = det / lam_big
    beta = lam_small / lam_big
    if abs(abs(beta) - 1.0) <= 1e-10:
        raise ParabolicOrEllipticMap(f"|multiplier| = {abs(beta)!r} is 1 within 1e-10")
    # the derivative at the fixed point of eigenvalue lam is det / lam**2,
    # which is smaller than 1 in modulus exactly for lam_big
    alpha = _eigen_fixed_point(m, lam_big)
    alpha_rep = _eigen_fixed_point(m, lam_small)
    return alpha, alpha_rep, beta


def isometric_circle(m: MoebiusMap):
    """Centre and radius of the isometric circle ``|cz + d| = |det|^(1/2)``.

    Returns ``None`` when ``c == 0`` (no isometric circle).
    """
    if m.c == 0:
        return None
    return -m.d / m.c, math.sqrt(abs(m.det)) / abs(m.c)


def cross_ratio(z1, z2, z3, z4) -> complex:
    """``(z1 - z3)(z2 - z4) / ((z2 - z3)(z1 - z4))`` for finite points."""
    return (z1 - z3) * (z2 - z4) / ((z2 - z3) * (z1 - z4))
