"""Reduced words in a free group of finite rank.

Words are tuples of signed generator indices; ``()`` is the identity.  Letters
are ordered ``1 < -1 < 2 < -2 < ...`` and words are listed by length, then
lexicographically, so every stream here is deterministic.
"""

from __future__ import annotations

from typing import Iterator

from .errors import IndexOutOfRange, InputError, NotReduced


def letters(rank: int) -> list[int]:
    """Generator letters in enumeration order."""
    out = []
    for k in range(1, rank + 1):
        out += [k, -k]
    return out


def is_reduced(word) -> bool:
    return all(word[k] != -word[k + 1] for k in range(len(word) - 1))


def check_word(word, rank: int) -> tuple:
    """Validate a word against ``rank`` and return it as a tuple."""
    word = tuple(int(a) for a in word)
    for a in word:
        if a == 0 or abs(a) > rank:
            raise IndexOutOfRange(f"letter {a} outside rank {rank}")
    if not is_reduced(word):
        raise NotReduced(f"word {word} is not reduced")
    return word


def inverse_word(word) -> tuple:
    return tuple(-a for a in reversed(word))


def reduce_word(word) -> tuple:
    """Free reduction of an arbitrary word."""
    out: list[int] = []
    for a in word:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def word_count(rank: int, length: int) -> int:
    """Number of reduced words of exactly ``length`` letters."""
    if length == 0:
        return 1
    return 2 * rank * (2 * rank - 1) ** (length - 1)


def _rank_of(group_or_rank) -> int:
    return group_or_rank if isinstance(group_or_rank, int) else group_or_rank.rank


def enumerate_reduced_words(rank: int, max_len: int) -> Iterator[tuple]:
    """Yield every reduced word of length ``0 .. max_len`` in canonical order."""
    if rank < 0 or max_len < 0:
        raise InputError("rank and max_len must be non-negative")
    alphabet = letters(rank)
    shell = [()]
    yield ()
    for _ in range(max_len):
        nxt = []
        for w in shell:
            for a in alphabet:
                if w and a == -w[-1]:
                    continue
                nxt.append(w + (a,))
        yield from nxt
        shell = nxt
        if not shell:
            break


def coset_representatives(group, i: int, max_len: int) -> Iterator[tuple]:
    """Representatives of the left cosets ``w <g_i>``: words not ending in ``+-i``."""
    rank = _rank_of(group)
    if not 1 <= i <= rank:
        raise IndexOutOfRange(f"generator {i} outside rank {rank}")
    for w in enumerate_reduced_words(rank, max_len):
        if not w or abs(w[-1]) != i:
            yield w


def double_coset_representatives(group, i: int, j: int, max_len: int) -> Iterator[tuple]:
    """Representatives of ``<g_i> w <g_j>``.

    The identity plus reduced words whose first letter is not ``+-i`` and
    whose last letter is not ``+-j``.
    """
    rank = _rank_of(group)
    for k in (i, j):
        if not 1 <= k <= rank:
            raise IndexOutOfRange(f"generator {k} outside rank {rank}")
    for w in enumerate_reduced_words(rank, max_len):
        if not w or (abs(w[0]) != i and abs(w[-1]) != j):
            yield w
