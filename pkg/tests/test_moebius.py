import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schottky_kp.errors import InputError, ParabolicOrEllipticMap, SingularMatrix
from schottky_kp.graph import build_phi
from schottky_kp.moebius import (
    INF,
    MoebiusMap,
    apply,
    as_point,
    compose,
    cross_ratio,
    fixed_points_and_multiplier,
    isometric_circle,
)

finite = st.complex_numbers(max_magnitude=5.0, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize(
    "m, z, expected",
    [
        (MoebiusMap.identity(), 3 + 4j, 3 + 4j),
        (MoebiusMap(0, 1, 1, 0), INF, 0j),
        (MoebiusMap(0, 1, 1, 0), 0j, INF),
        (MoebiusMap(2, 0, 0, 1), INF, INF),
        (build_phi(1, -1, 0.1), 1 + 0j, 1 + 0j),
        (build_phi(1, -1, 0.1), -1 + 0j, -1 + 0j),
    ],
)
def test_apply_examples(m, z, expected):
    out = apply(m, z)
    if expected is INF:
        assert out is INF
    else:
        assert abs(out - expected) < 1e-14


def test_infinity_is_a_singleton():
    assert as_point("inf") is INF
    assert as_point("INF") is INF
    assert as_point(INF) is INF
    with pytest.raises(InputError):
        as_point(math.inf)


def test_singular_matrix_rejected():
    with pytest.raises(SingularMatrix):
        MoebiusMap(1, 2, 2, 4)
    with pytest.raises(SingularMatrix):
        MoebiusMap(float("nan"), 0, 0, 1)


def test_projective_equality():
    m = MoebiusMap(1, 2, 3, 5)
    assert m == MoebiusMap(-2j, -4j, -6j, -10j)
    assert m != MoebiusMap(1, 2, 3, 7)


def test_compose_identity_and_inverse():
    m = MoebiusMap(1 + 1j, 2, -0.5, 3)
    assert compose(m, MoebiusMap.identity()) == m
    assert compose(m, m.inverse()) == MoebiusMap.identity()


def test_compose_squares_the_multiplier():
    phi = build_phi(1, -1, 0.1)
    _, _, b = fixed_points_and_multiplier(compose(phi, phi))
    assert abs(b - 0.01) < 1e-14


def test_fixed_points_of_diagonal_map():
    a, ar, b = fixed_points_and_multiplier(MoebiusMap(4, 0, 0, 1))
    assert a is INF and ar == 0 and abs(b - 0.25) < 1e-15


def test_fixed_points_of_built_map():
    a, ar, b = fixed_points_and_multiplier(build_phi(1, -1, 0.1))
    assert abs(a - 1) < 1e-14 and abs(ar + 1) < 1e-14 and abs(b - 0.1) < 1e-14


@pytest.mark.parametrize("m", [MoebiusMap(1, 1, 0, 1), MoebiusMap(0, -1, 1, 0)])
def test_non_loxodromic_rejected(m):
    with pytest.raises(ParabolicOrEllipticMap):
        fixed_points_and_multiplier(m)


@settings(max_examples=60, deadline=None)
@given(finite, finite, st.floats(0.01, 0.5), st.floats(-3.0, 3.0), finite)
def test_affine_conjugation_moves_fixed_points(a, b, ym, phase, shift):
    if abs(a - b) < 0.1:
        return
    y = ym * cmath.exp(1j * phase)
    phi = build_phi(a, b, y)
    T = MoebiusMap(cmath.exp(1j * phase), shift, 0, 1)
    conj = compose(compose(T, phi), T.inverse())
    fa, fr, fb = fixed_points_and_multiplier(conj)
    assert abs(fb - y) < 1e-9
    for p, q in ((fa, apply(T, a)), (fr, apply(T, b))):
        if q is INF or p is INF:
            assert p is q
        else:
            assert abs(p - q) < 1e-7 * max(1.0, abs(q))


@settings(max_examples=60, deadline=None)
@given(finite, finite, st.floats(0.01, 0.9))
def test_multiplier_relation_holds(a, b, y):
    if abs(a - b) < 0.1:
        return
    phi = build_phi(a, b, y)
    z = 7.0 + 2.0j
    w = apply(phi, z)
    lhs = (w - a) / (z - a)
    rhs = y * (w - b) / (z - b)
    assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(lhs))


@settings(max_examples=40, deadline=None)
@given(finite, finite, st.floats(0.01, 0.5))
def test_isometric_circle_is_mapped_isometrically(a, b, y):
    if abs(a - b) < 0.1:
        return
    phi = build_phi(a, b, y)
    c, r = isometric_circle(phi)
    zs = c + r * np.exp(2j * np.pi * np.arange(8) / 8)
    for z in zs:
        assert abs(abs(phi.derivative(z)) - 1.0) < 1e-8


def test_derivative_matches_difference_quotient():
    m = MoebiusMap(1 + 1j, 2, -0.5, 3)
    z, h = 0.3 + 0.2j, 1e-6
    fd = (apply(m, z + h) - apply(m, z - h)) / (2 * h)
    assert abs(fd - m.derivative(z)) < 1e-8


def test_cross_ratio_invariant_under_moebius():
    pts = [1 + 0j, -1 + 0j, 5 + 0j, 3 + 0j]
    m = MoebiusMap(2, 1j, 0.5, 1)
    before = cross_ratio(*pts)
    after = cross_ratio(*[apply(m, p) for p in pts])
    assert abs(before - after) < 1e-12
