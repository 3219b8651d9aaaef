"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from conftest import KP_GRID, mcurve, mcurve_periods, mcurve_tau
from schottky_kp.degeneration import (
    DegenerationScenario,
    SolitonData,
    degeneration_report,
    differential_limit_check,
    soliton_kp_residual,
)
from schottky_kp.differentials import (
    DifferentialSpec,
    FirstKind,
    SecondKind,
    ThirdKind,
    TruncationPolicy,
    a_period,
    laurent_data,
    residue,
)
from schottky_kp.errors import SchottkyError
from schottky_kp.graph import (
    build_curve,
    dumbbell_params,
    dumps_config,
    mcurve_params,
    one_vertex_graph,
    one_vertex_params,
    validate_classical,
)
from schottky_kp.periods import multiplicative_period, period_matrix
from schottky_kp.theta_tau import ExpSum, hierarchy_check, kp_residual, parse_grid, reality_check, tau_data_from_curve

TWO_PI_I = 2j * math.pi
GRID = parse_grid(KP_GRID)


def test_criterion_01_rank_one_exactness(record_criterion):
    group = build_curve(one_vertex_graph(1), one_vertex_params([1], [-1], [0.01], tails=[-3])).group
    P = period_matrix(group).P[0, 0]
    err = abs(P - 0.01) / 0.01
    record_criterion(1, err <= 1e-14, f"|P11 - 0.01|/0.01 = {err:.2e}")
    assert err <= 1e-14


def test_criterion_02_a_period_normalization(record_criterion):
    worst = 0.0
    for g in (2, 3):
        group = mcurve(g).group
        A = np.array([[a_period(DifferentialSpec(group, FirstKind(j)), i) for j in range(1, g + 1)]
                      for i in range(1, g + 1)])
        worst = max(worst, float(np.max(np.abs(A - TWO_PI_I * np.eye(g)))))
    record_criterion(2, worst <= 1e-7, f"max |A - 2 pi i I| = {worst:.2e} (g = 2, 3)")
    assert worst <= 1e-7


def random_curve(rng, g):
    """Random classical Schottky data on the one-vertex graph with a clear gap between circles."""
    while True:
        pts = rng.uniform(-4, 4, 2 * g) + 1j * rng.uniform(-2, 2, 2 * g)
        ys = 10 ** rng.uniform(-3, -2, g) * np.exp(1j * rng.uniform(0, 2 * math.pi, g))
        params = one_vertex_params(pts[:g], pts[g:], ys, tails=[-6 - 1j])
        try:
            curve = build_curve(one_vertex_graph(g), params, validate=False)
        except SchottkyError:
            continue
        if validate_classical(curve.group).min_gap >= 0.5:
            return curve


def test_criterion_03_period_consistency(record_criterion):
    rng = np.random.default_rng(7)
    cons, sym, eig = 0.0, 0.0, math.inf
    for k in range(20):
        data = period_matrix(random_curve(rng, 1 + k % 3).group)
        P, Z = data.P, data.Z
        cons = max(cons, float(np.max(np.abs(np.exp(TWO_PI_I * Z) - P) / np.abs(P))))
        # the defect of the b-integrals before symmetrization, not of the returned Z
        sym = max(sym, data.symmetry_defect, float(np.max(np.abs(Z - Z.T))))
        eig = min(eig, float(np.min(np.linalg.eigvalsh(Z.imag))))
    ok = cons <= 1e-6 and sym <= 1e-7 and eig > 0
    record_criterion(3, ok, f"20 cases: consistency {cons:.2e}, symmetry {sym:.2e}, min eig Im Z {eig:.3f}")
    assert ok


def test_criterion_04_residues_and_zero_a_periods(record_criterion):
    worst_res, worst_a = 0.0, 0.0
    for g in (1, 2, 3):
        group = mcurve(g).group
        p1, p2 = -3 + 0j, 0.5 + 4j
        spec = DifferentialSpec(group, ThirdKind(p1, p2))
        worst_res = max(worst_res, abs(residue(spec, p1) - 1), abs(residue(spec, p2) + 1))
        for kind in (SecondKind(p1, 2), SecondKind(p1, 3), ThirdKind(p1, p2)):
            for i in range(1, g + 1):
                worst_a = max(worst_a, abs(a_period(DifferentialSpec(group, kind), i)))
    ok = worst_res <= 1e-8 and worst_a <= 1e-8
    record_criterion(4, ok, f"residue error {worst_res:.2e}, a-periods {worst_a:.2e}")
    assert ok


def test_criterion_05_cross_ratio_limit(record_criterion):
    detail, ok = [], True
    for y in (1e-2, 1e-3, 1e-4):
        group = build_curve(*mcurve_params(2, y_value=y)).group
        err = abs(multiplicative_period(group, 1, 2) - 4 / 3)
        ok &= err <= 3 * y
        detail.append(f"y={y:g}: {err:.2e}")
    record_criterion(5, ok, "|P12 - 4/3| " + ", ".join(detail))
    assert ok


REFINEMENT = [(1, 1), (2, 2), (3, 3), (4, 4), (6, 5), (10, 6)]


def test_criterion_06_kp_residual_under_refinement(record_criterion):
    ok, detail = True, []
    for g, tol in ((1, 1e-8), (2, 1e-6)):
        curve = mcurve(g)
        res = []
        for L, R in REFINEMENT:
            policy = TruncationPolicy(max_len=L, strict=False)
            periods = period_matrix(curve.group, policy, check=False)
            data = tau_data_from_curve(curve, None, 3, policy, periods=periods, radius=R)
            res.append(kp_residual(data, GRID).max)
        decreasing = all(b <= a for a, b in zip(res, res[1:]))
        ok &= decreasing and res[-1] <= tol
        detail.append(f"g={g}: " + " > ".join(f"{r:.1e}" for r in res))
    record_criterion(6, ok, "; ".join(detail))
    assert ok


def test_criterion_07_soliton_exactness(record_criterion):
    one = SolitonData((1.0,), (-1.0,), -3.0)
    two = SolitonData((1.0, 5.0), (-1.0, 3.0), -3.0)
    r1 = soliton_kp_residual(one, GRID).max
    r2 = soliton_kp_residual(two, GRID).max
    ok = r1 <= 1e-9 and r2 <= 1e-9
    record_criterion(7, ok, f"one-soliton {r1:.2e}, two-soliton {r2:.2e}")
    assert ok


def degeneration_scenarios():
    graph, params = mcurve_params(2)
    return {
        "generic": DegenerationScenario(graph, params, "e2", beta=(0.0, 0.0)),
        "half-integer": DegenerationScenario(graph, params, "e2", beta=(0.1, 0.5)),
        "reducible": DegenerationScenario(*dumbbell_params(), "e", beta=(0.1, 0.2)),
    }


def test_criterion_08_degeneration_convergence(record_criterion):
    ok, detail = True, []
    for name, sc in degeneration_scenarios().items():
        rep = degeneration_report(sc)
        passed = rep["monotone"] and rep["final_deviation"] <= 1e-2
        ok &= passed
        devs = ", ".join(f"{r['deviation']:.2e}" for r in rep["rows"])
        detail.append(f"{name} [{devs}]{'' if passed else ' FAIL'}")
    record_criterion(8, ok, "; ".join(detail))
    assert ok


def test_criterion_09_differential_limits(record_criterion):
    sc = degeneration_scenarios()
    irr = differential_limit_check(sc["generic"])
    red = differential_limit_check(sc["reducible"])
    third = next(r["third_kind"] for r in irr["rows"] if r["y"] == 1e-4)
    vanish = next(r["vanishing"] for r in red["rows"] if r["y"] == 1e-4)
    ok = third <= 1e-3 and vanish <= 1e-3
    record_criterion(9, ok, f"third-kind limit {third:.2e}, reducible vanishing {vanish:.2e} at y=1e-4")
    assert ok


def test_criterion_10_reality(record_criterion):
    rng = np.random.default_rng(2024)
    ok, detail = True, []
    for g in (1, 2, 3):
        out = reality_check(mcurve_tau(g), rng.uniform(-1, 1, size=(100, 3)))
        ok &= out["real"]
        detail.append(f"g={g}: Im tau {out['max_relative_imag_tau']:.1e}, "
                      f"Im P {out['max_relative_imag_exp_2pi_i_Z']:.1e}")
    record_criterion(10, ok, "; ".join(detail))
    assert ok


def test_criterion_11_laurent_symmetry(record_criterion):
    defects = []
    for g in (1, 2):
        curve = mcurve(g)
        defects.append(laurent_data(curve.group, curve.marked_point, 4).symmetry_defect())
    ok = max(defects) <= 1e-7
    record_criterion(11, ok, "||q - q^T|| / ||q|| " + ", ".join(f"g={g}: {d:.1e}" for g, d in zip((1, 2), defects)))
    assert ok


def test_criterion_12_hierarchy(record_criterion):
    M = 8
    m = np.arange(1, M + 1)
    # tau = 1 + exp(sum_m (p^m - q^m) t_m) with p, q = 0.6, -0.2
    k = 0.6**m - (-0.2) ** m
    soliton = ExpSum(np.zeros(2, dtype=complex), np.array([np.zeros(M), k], dtype=complex),
                     np.zeros((M, M), dtype=complex))
    t_curve = np.zeros(M)
    t_curve[0] = 0.1
    ok, detail = True, []
    for name, data, t in (("one-soliton", soliton, np.zeros(M)), ("g=1", mcurve_tau(1, M=M), t_curve)):
        out = hierarchy_check(data, t, orders=(2, 3), depth=6)
        for n in (2, 3):
            a, b = out[n]["residual"], out[n]["residual_deeper"]
            ok &= a <= 1e-5 and b <= 1e-5
            detail.append(f"{name} n={n}: {a:.1e}/{b:.1e}")
    record_criterion(12, ok, "depth 6/8 " + ", ".join(detail))
    assert ok


def cli_output(argv):
    proc = subprocess.run([sys.executable, "-m", "schottky_kp.cli", *argv], capture_output=True)
    return proc.returncode, proc.stdout, proc.stderr


def test_criterion_13_determinism(record_criterion, tmp_path):
    config = tmp_path / "g2.json"
    config.write_text(dumps_config(*mcurve_params(2)))
    soliton = tmp_path / "soliton.json"
    soliton.write_text(json.dumps(SolitonData((1.0, 5.0), (-1.0, 3.0), -3.0).to_dict()))
    scenario = tmp_path / "scenario.json"
    scenario.write_text(json.dumps(degeneration_scenarios()["half-integer"].to_dict()))
    commands = {
        "validate": ["validate", str(config)],
        "periods": ["periods", str(config)],
        "kp-check": ["kp-check", str(config)],
        "soliton": ["soliton", str(soliton)],
        "degenerate": ["degenerate", str(scenario)],
        "mcurve": ["mcurve", "--genus", "3"],
        "laurent": ["laurent", str(config)],
    }
    differing = []
    for name, argv in commands.items():
        first, second = cli_output(argv), cli_output(argv)
        if first != second or first[0] != 0:
            differing.append(name)
    ok = not differing
    record_criterion(13, ok, f"{len(commands)} subcommands run twice" + (f", differing: {differing}" if differing else ", identical"))
    assert ok


@pytest.mark.parametrize("g", [1, 2])
def test_shipped_defaults_reproduce_kp_numbers(g, tmp_path):
    # the CLI defaults use the same settings as criterion 6 at full refinement
    config = tmp_path / "c.json"
    config.write_text(dumps_config(*mcurve_params(g)))
    code, out, _ = cli_output(["kp-check", str(config), "--format", "json"])
    assert code == 0
    reported = json.loads(out)["summary"]["max_normalized_residual"]
    assert abs(reported - kp_residual(mcurve_tau(g), GRID).max) <= 1e-3 * reported + 1e-18
    assert mcurve_periods(g).consistency < 1e-10
