"""Schottky groups and vectorized tables of reduced words."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import IndexOutOfRange, NotLoxodromic, ParabolicOrEllipticMap
from .moebius import INF, MoebiusMap, compose, fixed_points_and_multiplier
from .words import check_word, letters


def _normalize_stack(mats: np.ndarray):
    """Scale each 2x2 matrix so its largest entry has modulus 1; also return the scales."""
    flat = mats.reshape(-1, 4)
    k = np.argmax(np.abs(flat), axis=1)
    s = flat[np.arange(flat.shape[0]), k]
    return mats / s[:, None, None], s


class WordTable:
    """All reduced words up to some length, stored as arrays.

    Words are kept in canonical enumeration order, so the words of length at
    most ``l`` always form the prefix ``[:offsets[l + 1]]``.

    Attributes
    ----------
    mats : (N, 2, 2) complex array of normalized word matrices
    det : (N,) determinants of ``mats``, accumulated multiplicatively so that
        tiny determinants of long words keep full relative precision
    first, last : (N,) signed first and last letters (0 for the identity)
    length : (N,) word lengths
    offsets : list with ``offsets[l]`` the index of the first word of length ``l``

    With ``min_weight > 0`` a word whose weight ``|det| / |c|^2`` (the squared
    radius of its isometric circle) falls below ``min_weight`` is dropped
    together with all of its extensions.
    """

    def __init__(self, generators: list[np.ndarray], rank: int, min_weight: float = 0.0):
        self.rank = rank
        self.min_weight = float(min_weight)
        self._gens = {}
        for k, m in enumerate(generators, start=1):
            m = np.asarray(m, dtype=complex)
            inv = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])
            self._gens[k] = m
            self._gens[-k] = inv
        self._alphabet = letters(rank)
        self._gdet = {a: m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] for a, m in self._gens.items()}
        self.mats = np.eye(2, dtype=complex)[None]
        self.det = np.ones(1, dtype=complex)
        self.first = np.zeros(1, dtype=np.int16)
        self.last = np.zeros(1, dtype=np.int16)
        self.length = np.zeros(1, dtype=np.int16)
        self.letters = np.zeros((1, 0), dtype=np.int16)
        self.offsets = [0, 1]
        self._lock = threading.Lock()

    @property
    def max_len(self) -> int:
        return len(self.offsets) - 2

    def ensure(self, max_len: int) -> "WordTable":
        with self._lock:
            while self.max_len < max_len:
                self._grow()
        return self

    def _grow(self):
        l = self.max_len
        lo, hi = self.offsets[l], self.offsets[l + 1]
        if self.rank == 0:
            self.offsets.append(hi)
            return
        parents = self.mats[lo:hi]
        plast = self.last[lo:hi]
        pfirst = self.first[lo:hi]
        pletters = self.letters[lo:hi]
        alph = np.array(self._alphabet, dtype=np.int16)
        gmats = np.stack([self._gens[a] for a in self._alphabet])
        # parent-major, letter-minor ordering keeps the canonical order
        gdet = np.array([self._gdet[a] for a in self._alphabet])
        prod = np.einsum("pij,ajk->paik", parents, gmats)
        pdet = self.det[lo:hi][:, None] * gdet[None, :]
        keep = plast[:, None] != -alph[None, :]
        prod = prod[keep]
        pdet = pdet[keep]
        new_last = np.broadcast_to(alph[None, :], keep.shape)[keep]
        if l == 0:
            new_first = new_last.copy()
        else:
            new_first = np.broadcast_to(pfirst[:, None], keep.shape)[keep]
        prow = np.broadcast_to(np.arange(hi - lo)[:, None], keep.shape)[keep]
        prod, scale = _normalize_stack(prod)
        pdet = pdet / scale**2
        if self.min_weight > 0:
            c = np.abs(prod[:, 1, 0])
            with np.errstate(divide="ignore"):
                weight = np.where(c > 0, np.abs(pdet) / np.maximum(c, 1e-300) ** 2, np.inf)
            big = weight >= self.min_weight
            prod, pdet = prod[big], pdet[big]
            new_last, new_first, prow = new_last[big], new_first[big], prow[big]
        new_letters = np.concatenate(
            [pletters[prow], new_last[:, None].astype(np.int16)], axis=1
        )
        old_letters = np.zeros((self.letters.shape[0], l + 1), dtype=np.int16)
        old_letters[:, :l] = self.letters
        self.mats = np.concatenate([self.mats, prod])
        self.det = np.concatenate([self.det, pdet])
        self.first = np.concatenate([self.first, new_first.astype(np.int16)])
        self.last = np.concatenate([self.last, new_last.astype(np.int16)])
        self.length = np.concatenate(
            [self.length, np.full(prod.shape[0], l + 1, dtype=np.int16)]
        )
        self.letters = np.concatenate([old_letters, new_letters])
        self.offsets.append(self.mats.shape[0])

    def word(self, k: int) -> tuple:
        return tuple(int(a) for a in self.letters[k, : self.length[k]])

    def shell(self, l: int) -> slice:
        return slice(self.offsets[l], self.offsets[l + 1])

    def shell_size(self, l: int) -> int:
        return self.offsets[l + 1] - self.offsets[l]

    @property
    def size(self) -> int:
        return self.mats.shape[0]


@dataclass(eq=False)
class SchottkyGroup:
    """Free group generated by loxodromic Moebius maps.

    ``alpha[i]`` and ``alpha_rep[i]`` hold the attractive and repulsive fixed
    points of generator ``i + 1``; ``beta[i]`` its multiplier.
    """

    generators: tuple
    alpha: tuple = field(init=False)
    alpha_rep: tuple = field(init=False)
    beta: tuple = field(init=False)

    def __post_init__(self):
        self.generators = tuple(self.generators)
        alpha, alpha_rep, beta = [], [], []
        for k, gen in enumerate(self.generators, start=1):
            try:
                a, ar, b = fixed_points_and_multiplier(gen)
            except ParabolicOrEllipticMap as exc:
                raise NotLoxodromic(f"generator {k} is not loxodromic") from exc
            alpha.append(a)
            alpha_rep.append(ar)
            beta.append(b)
        self.alpha = tuple(alpha)
        self.alpha_rep = tuple(alpha_rep)
        self.beta = tuple(beta)
        self._tables = {}
        self._table_lock = threading.Lock()

    @classmethod
    def with_fixed_points(cls, generators, alpha, alpha_rep, beta) -> "SchottkyGroup":
        """Build a group whose fixed points are known in closed form."""
        grp = cls(generators)
        for k, (a, ar, b) in enumerate(zip(alpha, alpha_rep, beta)):
            # accept the exact data only if it agrees with the matrices, up to
            # the conditioning of recovering it from matrix entries
            m = grp.generators[k].normalized()
            cond = 1.0 / max(abs(m.det), 1e-300)
            if abs(b - grp.beta[k]) > max(1e-10, 1e-14 * cond) * max(1.0, abs(b)):
                raise NotLoxodromic("supplied multiplier disagrees with generator")
            for p, q in ((a, grp.alpha[k]), (ar, grp.alpha_rep[k])):
                if (p is INF) != (q is INF) or (
                    p is not INF and abs(p - q) > max(1e-8, 1e-14 * cond) * max(1.0, abs(p))
                ):
                    raise NotLoxodromic("supplied fixed point disagrees with generator")
        grp.alpha = tuple(alpha)
        grp.alpha_rep = tuple(alpha_rep)
        grp.beta = tuple(beta)
        return grp

    @property
    def rank(self) -> int:
        return len(self.generators)

    def fixed_point(self, h: int):
        """Attractive fixed point for ``h > 0``, repulsive for ``h < 0``."""
        if h == 0 or abs(h) > self.rank:
            raise IndexOutOfRange(f"generator {h} outside rank {self.rank}")
        return self.alpha[h - 1] if h > 0 else self.alpha_rep[-h - 1]

    def generator(self, h: int) -> MoebiusMap:
        if h == 0 or abs(h) > self.rank:
            raise IndexOutOfRange(f"generator {h} outside rank {self.rank}")
        g = self.generators[abs(h) - 1]
        return g if h > 0 else g.inverse()

    def finite_points(self) -> list[complex]:
        pts = [p for p in self.alpha + self.alpha_rep if p is not INF]
        return pts

    def word_table(self, max_len: int, min_weight: float = 0.0) -> WordTable:
        """Table of reduced words up to ``max_len``, optionally pruned by weight."""
        with self._table_lock:
            table = self._tables.get(min_weight)
            if table is None:
                gens = [g.normalized().matrix for g in self.generators]
                table = WordTable(gens, self.rank, min_weight)
                self._tables[min_weight] = table
        return table.ensure(max_len)


def evaluate_word(group: SchottkyGroup, word) -> MoebiusMap:
    """Left-to-right product of generator maps along ``word``."""
    word = check_word(word, group.rank)
    out = MoebiusMap.identity()
    for a in word:
        out = compose(out, group.generator(a))
    return out
