"""Pseudo-differential symbols with power-series coefficients.

A symbol is a dict ``{order: coefficient}``; each coefficient is a 2-d array
of Taylor coefficients in ``(x, s)``, ``c[a, b]`` multiplying ``x**a s**b``.
Orders below ``floor`` are discarded after every operation.
"""

from __future__ import annotations

import numpy as np


def gbinom(i: int, k: int) -> float:
    """Generalized binomial coefficient ``i (i-1) ... (i-k+1) / k!``."""
    out = 1.0
    for m in range(k):
        out *= (i - m) / (m + 1)
    return out


def cmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Truncated product of two coefficient series."""
    nx, ns = a.shape
    out = np.zeros(a.shape, dtype=complex)
    for p in range(ns):
        for q in range(ns - p):
            out[:, p + q] += np.convolve(a[:, p], b[:, q])[:nx]
    return out


def dx(c: np.ndarray, k: int = 1) -> np.ndarray:
    """``k``-th x-derivative of a coefficient series."""
    nx = c.shape[0]
    out = np.zeros_like(c)
    if k >= nx:
        return out
    a = np.arange(k, nx)
    fac = np.ones(nx - k)
    for m in range(k):
        fac = fac * (a - m)
    out[: nx - k] = c[k:] * fac[:, None]
    return out


def compose(A: dict, B: dict, floor: int) -> dict:
    """``A o B`` by the Leibniz rule, keeping orders ``>= floor``."""
    out: dict = {}
    for i, a in A.items():
        if not np.any(a):
            continue
        for j, b in B.items():
            kmax = i + j - floor
            for k in range(0, kmax + 1):
                cb = gbinom(i, k)
                if cb == 0:
                    if i >= 0 and k > i:
                        break
                    continue
                db = dx(b, k)
                if not np.any(db):
                    break
                term = cb * cmul(a, db)
                o = i + j - k
                out[o] = out[o] + term if o in out else term
    return out


def add(A: dict, B: dict, sign: float = 1.0) -> dict:
    out = {k: v.copy() for k, v in A.items()}
    for k, v in B.items():
        out[k] = out[k] + sign * v if k in out else sign * v
    return out


def plus_part(A: dict) -> dict:
    return {k: v for k, v in A.items() if k >= 0}


def commutator(A: dict, B: dict, floor: int) -> dict:
    return add(compose(A, B, floor), compose(B, A, floor), -1.0)


def power(A: dict, n: int, floor: int) -> dict:
    out = A
    for _ in range(n - 1):
        out = compose(out, A, floor)
    return out


def inverse_monic(W: dict, floor: int, shape) -> dict:
    """Inverse of ``1 + (terms of negative order)`` as a Neumann series."""
    one = np.zeros(shape, dtype=complex)
    one[0, 0] = 1.0
    H = {k: -v for k, v in W.items() if k < 0}
    out = {0: one}
    term = {0: one}
    for _ in range(-floor):
        term = compose(term, H, floor)
        if not term:
            break
        out = add(out, term)
    return out
