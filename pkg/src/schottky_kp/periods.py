"""Multiplicative periods and the period matrix."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .differentials import (
    DEFAULT_POLICY,
    TruncationPolicy,
    _image,
    _image_difference,
    accumulate_shells,
    b_period_integral,
    choose_base_point,
)
from .errors import DegenerateCrossRatio, RiemannRelationViolated
from .group import SchottkyGroup, evaluate_word
from .moebius import INF, apply

TWO_PI_I = 2j * math.pi


def psi_factor(group: SchottkyGroup, i: int, j: int, word) -> complex:
    """Factor of the double-coset product for one representative word.

    ``beta_i`` for ``i == j`` and the identity; otherwise the cross-ratio
    ``(a_i - g a_j)(a_-i - g a_-j) / ((a_-i - g a_j)(a_i - g a_-j))``.
    """
    word = tuple(word)
    if i == j and not word:
        return complex(group.beta[i - 1])
    g = evaluate_word(group, word)
    ai, ami = group.fixed_point(i), group.fixed_point(-i)
    A, B = apply(g, group.fixed_point(j)), apply(g, group.fixed_point(-j))
    den = (ami - A) * (ai - B)
    if abs(den) < 1e-14:
        raise DegenerateCrossRatio("cross-ratio denominator vanishes")
    return complex((ai - A) * (ami - B) / den)


def _psi_minus_one(group, i, j, mats, det):
    """``psi - 1`` for a stack of words, accurate when the factor is close to 1."""
    ai, ami = group.fixed_point(i), group.fixed_point(-i)
    pj, qj = group.fixed_point(j), group.fixed_point(-j)
    A = _image(mats, pj)
    B = _image(mats, qj)
    D = _image_difference(mats, det, pj, qj)
    den = (ami - A) * (ai - B)
    if den.size and np.min(np.abs(den)) < 1e-14:
        raise DegenerateCrossRatio("cross-ratio denominator vanishes")
    return D * (ai - ami) / den


def multiplicative_period(group: SchottkyGroup, i: int, j: int,
                          policy: TruncationPolicy = DEFAULT_POLICY) -> complex:
    """``P_ij`` as the product of :func:`psi_factor` over double-coset representatives.

    Factors other than the identity term are accumulated as ``sum log1p(psi - 1)``;
    the shell test is applied to ``sum |psi - 1|`` of each shell.
    """
    if any(p is INF for p in group.alpha + group.alpha_rep):
        return _multiplicative_period_plain(group, i, j, policy)
    head = psi_factor(group, i, j, ())

    def keep(table, l):
        sl = table.shell(l)
        return (np.abs(table.first[sl]) != i) & (np.abs(table.last[sl]) != j)

    def value(table, l):
        if l == 0:
            return np.array([0j, 0.0])
        sl = table.shell(l)
        k = keep(table, l)
        pm = _psi_minus_one(group, i, j, table.mats[sl][k], table.det[sl][k])
        return np.array([np.sum(np.log1p(pm)), np.sum(np.abs(pm))])

    def size(table, l):
        return 1 if l == 0 else int(np.count_nonzero(keep(table, l)))

    res = accumulate_shells(group, policy, value, size)
    return complex(head * np.exp(res.value[0]))


def _multiplicative_period_plain(group, i, j, policy):
    # direct product when a fixed point sits at infinity
    from .words import double_coset_representatives

    out = 1 + 0j
    for w in double_coset_representatives(group, i, j, policy.max_len):
        out *= psi_factor(group, i, j, w)
    return out


@dataclass(frozen=True)
class PeriodData:
    """Multiplicative periods ``P``, period matrix ``Z`` and diagnostics."""

    P: np.ndarray
    Z: np.ndarray
    symmetry_defect: float
    min_im_eig: float
    consistency: float
    base_point: complex

    def as_dict(self) -> dict:
        def mat(m):
            return [[[complex(v).real, complex(v).imag] for v in row] for row in m]

        return {
            "P": mat(self.P),
            "Z": mat(self.Z),
            "symmetry_defect": self.symmetry_defect,
            "min_im_eig": self.min_im_eig,
        }


def period_matrix_raw(group: SchottkyGroup, policy: TruncationPolicy = DEFAULT_POLICY,
                      z0: complex | None = None) -> np.ndarray:
    """``Z_ij = (1/2 pi i) * integral of omega_j along b_i``, before symmetrization."""
    g = group.rank
    if z0 is None:
        z0 = choose_base_point(group)
    Z = np.zeros((g, g), dtype=complex)
    for i in range(1, g + 1):
        for j in range(1, g + 1):
            Z[i - 1, j - 1] = b_period_integral(group, i, j, z0, policy) / TWO_PI_I
    return Z


def integer_symmetrize(Zr: np.ndarray) -> np.ndarray:
    """Remove the integer part of ``Zr - Zr^T`` from the lower triangle.

    b-paths sharing a base point give a homology basis that is symplectic only
    up to integer multiples of a-cycles, which shifts single entries by
    integers.  Replacing ``b_j`` by ``b_j - n a_i`` (``j > i``) restores the
    symmetry; the diagonal and every ``exp(2 pi i Z_ij)`` are unchanged.
    """
    Zc = np.array(Zr, dtype=complex)
    k = np.round((Zc - Zc.T).real)
    lower = np.tril_indices(Zc.shape[0], -1)
    Zc[lower] += k.T[lower]
    return Zc


def period_matrix(group: SchottkyGroup, policy: TruncationPolicy = DEFAULT_POLICY,
                  z0: complex | None = None, check: bool = True) -> PeriodData:
    """Period matrix from b-cycle integrals, cross-checked against the products ``P_ij``."""
    g = group.rank
    if z0 is None:
        z0 = choose_base_point(group) if g else 0j
    Zr = period_matrix_raw(group, policy, z0)
    Zc = integer_symmetrize(Zr)
    norm = float(np.max(np.abs(Zc))) if g else 0.0
    defect = float(np.max(np.abs(Zc - Zc.T))) / (1.0 + norm) if g else 0.0
    Z = 0.5 * (Zc + Zc.T)
    P = np.zeros((g, g), dtype=complex)
    for i in range(1, g + 1):
        for j in range(1, g + 1):
            P[i - 1, j - 1] = multiplicative_period(group, i, j, policy)
    min_eig = float(np.min(np.linalg.eigvalsh(Z.imag))) if g else math.inf
    if g:
        cons = float(np.max(np.abs(np.exp(TWO_PI_I * Zr) - P) / np.abs(P)))
    else:
        cons = 0.0
    if check and g and not min_eig > 0:
        raise RiemannRelationViolated(f"Im Z is not positive definite (min eigenvalue {min_eig:.3g})")
    return PeriodData(P, Z, defect, min_eig, cons, complex(z0))
