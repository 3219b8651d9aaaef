import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import mcurve
from schottky_kp.differentials import (
    DifferentialSpec,
    FirstKind,
    SecondKind,
    ThirdKind,
    TruncationPolicy,
    a_period,
    b_path,
    choose_base_point,
    eval_density,
    fold_b_path,
    laurent_data,
    path_integral,
    residue,
    taylor_coefficients,
)
from schottky_kp.errors import InputError, PoleProximity, TruncationNotConverged
from schottky_kp.graph import build_curve, generator_circles, one_vertex_graph, one_vertex_params
from schottky_kp.group import SchottkyGroup
from schottky_kp.moebius import apply
from schottky_kp.words import enumerate_reduced_words

TWO_PI_I = 2j * math.pi


def sl2_words(group, max_len, exclude_identity=False):
    """Unimodular matrices of all reduced words, multiplied directly."""
    gens = {}
    for k in range(1, group.rank + 1):
        m = group.generators[k - 1].unimodular().matrix
        gens[k], gens[-k] = m, np.linalg.inv(m)
    for w in enumerate_reduced_words(group.rank, max_len):
        if exclude_identity and not w:
            continue
        m = np.eye(2, dtype=complex)
        for a in w:
            m = m @ gens[a]
        yield m


def brute_second_kind(group, xt, k, z, max_len, exclude_identity=False):
    """Direct Poincare sum of ``g'(z)/(g z - xt)^k`` over reduced words."""
    total = 0j
    for (a, b), (c, d) in sl2_words(group, max_len, exclude_identity):
        gz = (a * z + b) / (c * z + d)
        total += 1 / (c * z + d) ** 2 / (gz - xt) ** k
    return total


def brute_third_kind(group, p1, p2, z, max_len):
    total = 0j
    for (a, b), (c, d) in sl2_words(group, max_len):
        gz = (a * z + b) / (c * z + d)
        total += (1 / (gz - p1) - 1 / (gz - p2)) / (c * z + d) ** 2
    return total


def outside_circles(group, z):
    return all(abs(z - c) > 1.2 * r for _, c, r in generator_circles(group))


def test_genus_one_first_kind_is_closed_form():
    group = mcurve(1).group
    spec = DifferentialSpec(group, FirstKind(1))
    for z in (0.3j, 2.0 + 1.0j, -3.0):
        assert abs(eval_density(spec, z) - (1 / (z - 1) - 1 / (z + 1))) < 1e-15


@pytest.mark.parametrize("g", [2, 3])
def test_second_kind_matches_brute_force(g):
    group = mcurve(g).group
    spec = DifferentialSpec(group, SecondKind(-3 + 0j, 2))
    z = 0.4 + 1.3j
    ref = brute_second_kind(group, -3 + 0j, 2, z, 6)
    assert abs(eval_density(spec, z) - ref) < 1e-11 * abs(ref)


def test_third_kind_matches_brute_force():
    group = mcurve(2).group
    spec = DifferentialSpec(group, ThirdKind(-3 + 0j, 0.5j))
    z = 2.1 - 0.9j
    ref = brute_third_kind(group, -3 + 0j, 0.5j, z, 6)
    assert abs(eval_density(spec, z) - ref) < 1e-11 * abs(ref)


@settings(max_examples=30, deadline=None)
@given(
    st.floats(-5.0, 5.0),
    st.floats(-3.0, 3.0),
    st.sampled_from([1, -1, 2, -2]),
    st.sampled_from(["first", "second", "third"]),
)
def test_densities_are_group_invariant(x, y, h, kind):
    group = mcurve(2).group
    z = complex(x, y)
    if not outside_circles(group, z):
        return
    k = {"first": FirstKind(1), "second": SecondKind(-3 + 0j, 3), "third": ThirdKind(-3 + 0j, 6j)}[kind]
    spec = DifferentialSpec(group, k)
    g = group.generator(h)
    gz = apply(g, z)
    try:
        lhs = eval_density(spec, gz) * g.derivative(z)
        rhs = eval_density(spec, z)
    except PoleProximity:
        return
    assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(rhs))


@pytest.mark.parametrize("g", [1, 2, 3])
def test_a_periods_are_normalized(g):
    group = mcurve(g).group
    for i in range(1, g + 1):
        for j in range(1, g + 1):
            val = a_period(DifferentialSpec(group, FirstKind(j)), i)
            assert abs(val - TWO_PI_I * (i == j)) < 1e-9


@pytest.mark.parametrize("g", [1, 2])
def test_second_and_third_kind_have_zero_a_periods(g):
    group = mcurve(g).group
    for kind in (SecondKind(-3 + 0j, 2), SecondKind(-3 + 0j, 4), ThirdKind(-3 + 0j, -5 + 1j)):
        for i in range(1, g + 1):
            assert abs(a_period(DifferentialSpec(group, kind), i)) < 1e-9


def test_third_kind_residues():
    group = mcurve(2).group
    spec = DifferentialSpec(group, ThirdKind(-3 + 0j, 0.5 + 4j))
    assert abs(residue(spec, -3 + 0j) - 1) < 1e-10
    assert abs(residue(spec, 0.5 + 4j) + 1) < 1e-10


def test_genus_one_b_period_is_log_multiplier():
    group = mcurve(1).group
    z0 = choose_base_point(group)
    pts = b_path(group, 1, z0)
    spec = DifferentialSpec(group, FirstKind(1))
    val = sum(path_integral(spec, piece) for piece in fold_b_path(group, 1, pts))
    assert abs(cmath.exp(val) - 0.01) < 1e-14


def test_folded_path_ends_at_base_point():
    group = mcurve(2).group
    z0 = choose_base_point(group)
    pieces = fold_b_path(group, 2, b_path(group, 2, z0))
    assert pieces[0][0] == z0
    assert pieces[-1][-1] == z0 or pieces[-1][-1] == apply(group.generators[1], z0)


def test_laurent_first_kind_genus_one_closed_form():
    group = mcurve(1).group
    xt = -3 + 0j
    data = laurent_data(group, xt, 4)
    m = np.arange(4)
    expected = (-1.0) ** m * (1 / (xt - 1) ** (m + 1) - 1 / (xt + 1) ** (m + 1))
    assert np.max(np.abs(data.r[0] - expected)) < 1e-13


def test_laurent_second_kind_genus_one_brute_force():
    group = mcurve(1).group
    xt = -3 + 0j
    data = laurent_data(group, xt, 3)
    # the regular part of the order-2 differential at xt, by a direct sum
    u = 1e-3 * np.exp(2j * np.pi * np.arange(16) / 16)
    vals = np.array([brute_second_kind(group, xt, 2, xt + w, 8, exclude_identity=True) for w in u])
    c0 = np.mean(vals)
    assert abs(data.q[0, 0] - c0) < 1e-10


@pytest.mark.parametrize("g", [1, 2, 3])
def test_laurent_second_kind_is_symmetric(g):
    curve = mcurve(g)
    data = laurent_data(curve.group, curve.marked_point, 4)
    assert data.symmetry_defect() < 1e-8


def test_taylor_coefficients_of_exponential():
    c = taylor_coefficients(np.exp, 0.0, 1.0, 8)
    expected = np.array([1 / math.factorial(k) for k in range(8)])
    assert np.max(np.abs(c - expected)) < 1e-14


def test_truncation_strict_raises():
    group = mcurve(2).group
    spec = DifferentialSpec(group, FirstKind(1))
    with pytest.raises(TruncationNotConverged):
        eval_density(spec, 1j, TruncationPolicy(max_len=1))
    loose = eval_density(spec, 1j, TruncationPolicy(max_len=1, strict=False))
    assert abs(loose - eval_density(spec, 1j)) < 1e-3


def test_evaluation_at_pole_rejected():
    spec = DifferentialSpec(mcurve(1).group, FirstKind(1))
    with pytest.raises(PoleProximity):
        eval_density(spec, 1 + 0j)


@pytest.mark.parametrize(
    "kind", [FirstKind(3), SecondKind(0j, 1), ThirdKind(1j, 1j)]
)
def test_bad_specs_rejected(kind):
    with pytest.raises(InputError):
        DifferentialSpec(mcurve(2).group, kind)


def test_complex_group_a_periods():
    graph = one_vertex_graph(2)
    params = one_vertex_params([1 + 1j, 4 - 1j], [-1 + 0.5j, 2 + 2j], [0.02 + 0.01j, 0.01j], tails=[-3])
    group = build_curve(graph, params).group
    assert isinstance(group, SchottkyGroup)
    for j in (1, 2):
        spec = DifferentialSpec(group, FirstKind(j))
        for i in (1, 2):
            assert abs(a_period(spec, i) - TWO_PI_I * (i == j)) < 1e-9
