"""Schottky-uniformized curves, abelian differentials, periods, theta and tau
functions, and the KP solutions they produce."""

from .moebius import INF, MoebiusMap, apply, compose, fixed_points_and_multiplier
from .group import SchottkyGroup, evaluate_word
from .words import coset_representatives, double_coset_representatives, enumerate_reduced_words
from .graph import (
    Edge,
    SchottkyParams,
    StableGraph,
    Tail,
    build_curve,
    dumbbell_params,
    dumps_config,
    loads_config,
    mcurve_params,
    validate_classical,
)
from .differentials import (
    DifferentialSpec,
    FirstKind,
    SecondKind,
    ThirdKind,
    TruncationPolicy,
    a_period,
    eval_density,
    laurent_data,
    residue,
)
from .periods import multiplicative_period, period_matrix
from .theta_tau import (
    Characteristic,
    TauData,
    hierarchy_check,
    kp_residual,
    parse_grid,
    reality_check,
    tau,
    tau_data_from_curve,
    theta,
)
from .degeneration import (
    DegenerationScenario,
    SolitonData,
    degeneration_report,
    differential_limit_check,
    soliton_kp_residual,
    soliton_tau,
)

__version__ = "0.1.0"

__all__ = [
    "INF",
    "Characteristic",
    "DegenerationScenario",
    "DifferentialSpec",
    "Edge",
    "FirstKind",
    "MoebiusMap",
    "SchottkyGroup",
    "SchottkyParams",
    "SecondKind",
    "SolitonData",
    "StableGraph",
    "Tail",
    "TauData",
    "ThirdKind",
    "TruncationPolicy",
    "a_period",
    "apply",
    "build_curve",
    "compose",
    "coset_representatives",
    "degeneration_report",
    "differential_limit_check",
    "double_coset_representatives",
    "dumbbell_params",
    "enumerate_reduced_words",
    "eval_density",
    "evaluate_word",
    "fixed_points_and_multiplier",
    "hierarchy_check",
    "kp_residual",
    "laurent_data",
    "dumps_config",
    "loads_config",
    "mcurve_params",
    "multiplicative_period",
    "parse_grid",
    "period_matrix",
    "reality_check",
    "residue",
    "soliton_kp_residual",
    "soliton_tau",
    "tau",
    "tau_data_from_curve",
    "theta",
    "validate_classical",
]
