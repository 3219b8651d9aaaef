"""Truncated multivariate power series.

A series is an ndarray ``c`` whose entry ``c[i, j, ...]`` is the coefficient
of ``x**i * y**j * ...``; the array shape is the truncation (degrees
``0 .. shape - 1`` in each variable).
"""

from __future__ import annotations

import math

import numpy as np


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of two series truncated to the shape of ``a``."""
    shape = a.shape
    out = np.zeros(shape, dtype=np.result_type(a, b, complex))
    for idx in zip(*np.nonzero(a)):
        tgt = tuple(slice(i, n) for i, n in zip(idx, shape))
        src = tuple(slice(0, n - i) for i, n in zip(idx, shape))
        out[tgt] += a[idx] * b[src]
    return out


def _max_degree(shape) -> int:
    return sum(n - 1 for n in shape)


def _split(a: np.ndarray):
    zero = (0,) * a.ndim
    a0 = a[zero]
    h = np.array(a, dtype=complex)
    h[zero] = 0
    return a0, h


def exp(a: np.ndarray) -> np.ndarray:
    a0, h = _split(a)
    out = np.zeros(a.shape, dtype=complex)
    out[(0,) * a.ndim] = 1.0
    term = out.copy()
    for n in range(1, _max_degree(a.shape) + 1):
        term = mul(term, h) / n
        out += term
    return out * np.exp(a0)


def log(a: np.ndarray) -> np.ndarray:
    """Logarithm; the constant term uses the principal branch."""
    a0, h = _split(a)
    if a0 == 0:
        raise ZeroDivisionError("log of a series with vanishing constant term")
    h = h / a0
    out = np.zeros(a.shape, dtype=complex)
    term = np.zeros(a.shape, dtype=complex)
    term[(0,) * a.ndim] = 1.0
    for n in range(1, _max_degree(a.shape) + 1):
        term = mul(term, h)
        out += (-1) ** (n + 1) * term / n
    out[(0,) * a.ndim] += np.log(a0)
    return out


def inv(a: np.ndarray) -> np.ndarray:
    a0, h = _split(a)
    if a0 == 0:
        raise ZeroDivisionError("inverse of a series with vanishing constant term")
    h = h / a0
    out = np.zeros(a.shape, dtype=complex)
    out[(0,) * a.ndim] = 1.0
    term = out.copy()
    for _ in range(1, _max_degree(a.shape) + 1):
        term = -mul(term, h)
        out += term
    return out / a0


def div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return mul(a, inv(b))


def exp_linear(coeffs, shape) -> np.ndarray:
    """Series of ``exp(sum_k coeffs[k] * var_k)`` for each row of ``coeffs``.

    ``coeffs`` has shape ``(K, nvars)``; returns shape ``(K, *shape)``.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    out = np.ones((coeffs.shape[0],) + tuple(shape), dtype=complex)
    for v, n in enumerate(shape):
        powers = coeffs[:, v : v + 1] ** np.arange(n)[None, :]
        powers = powers / np.array([math.factorial(k) for k in range(n)], dtype=float)
        bshape = [coeffs.shape[0]] + [1] * len(shape)
        bshape[v + 1] = n
        out = out * powers.reshape(bshape)
    return out


def derivative_factors(shape) -> np.ndarray:
    """``prod_k i_k!`` for each multi-index; turns coefficients into derivatives."""
    grids = np.meshgrid(*[np.arange(n) for n in shape], indexing="ij")
    out = np.ones(shape)
    for g in grids:
        out = out * np.vectorize(math.factorial, otypes=[float])(g)
    return out
