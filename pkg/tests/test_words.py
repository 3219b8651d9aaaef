import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schottky_kp.errors import IndexOutOfRange, NotLoxodromic, NotReduced
from schottky_kp.graph import build_phi
from schottky_kp.group import SchottkyGroup, evaluate_word
from schottky_kp.moebius import MoebiusMap, compose
from schottky_kp.words import (
    check_word,
    coset_representatives,
    double_coset_representatives,
    enumerate_reduced_words,
    inverse_word,
    is_reduced,
    reduce_word,
    word_count,
)


def all_words(rank, max_len):
    """Every word (reduced or not) up to ``max_len`` letters."""
    alphabet = [a for k in range(1, rank + 1) for a in (k, -k)]
    for n in range(max_len + 1):
        yield from itertools.product(alphabet, repeat=n)


def strip_right(w, j):
    while w and abs(w[-1]) == j:
        w = w[:-1]
    return w


def strip_left(w, i):
    while w and abs(w[0]) == i:
        w = w[1:]
    return w


def test_word_count_closed_form():
    assert [word_count(2, n) for n in range(4)] == [1, 4, 12, 36]
    assert word_count(3, 2) == 30


@pytest.mark.parametrize("rank, max_len", [(1, 4), (2, 3), (3, 2)])
def test_enumeration_matches_brute_force(rank, max_len):
    listed = list(enumerate_reduced_words(rank, max_len))
    brute = {w for w in all_words(rank, max_len) if is_reduced(w)}
    assert len(listed) == len(set(listed)) == len(brute)
    assert set(listed) == brute
    lengths = [len(w) for w in listed]
    assert lengths == sorted(lengths)


def test_enumeration_order_is_canonical():
    assert list(enumerate_reduced_words(1, 2)) == [(), (1,), (-1,), (1, 1), (-1, -1)]


@pytest.mark.parametrize("rank, i, max_len", [(2, 2, 2), (2, 1, 3), (3, 2, 2)])
def test_coset_representatives_match_brute_force(rank, i, max_len):
    reps = list(coset_representatives(rank, i, max_len))
    # each coset w<g_i> has a unique shortest member: strip trailing +-i
    brute = {strip_right(reduce_word(w), i) for w in all_words(rank, max_len)}
    assert set(reps) == brute
    assert len(reps) == len(brute)


def test_coset_count_rank_two():
    assert len(list(coset_representatives(2, 2, 2))) == 9


@pytest.mark.parametrize("rank, i, j, max_len", [(2, 1, 2, 3), (2, 1, 1, 3), (3, 2, 3, 2)])
def test_double_coset_representatives_match_brute_force(rank, i, j, max_len):
    reps = list(double_coset_representatives(rank, i, j, max_len))
    brute = set()
    for w in all_words(rank, max_len):
        brute.add(strip_right(strip_left(reduce_word(w), i), j))
    assert set(reps) == brute


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=12))
def test_reduction_and_inverse(word):
    w = reduce_word(word)
    assert is_reduced(w)
    assert reduce_word(w + inverse_word(w)) == ()
    assert reduce_word(tuple(word) + inverse_word(tuple(word))) == ()


@pytest.mark.parametrize(
    "word, rank, exc", [((1, -1), 2, NotReduced), ((3,), 2, IndexOutOfRange), ((0,), 2, IndexOutOfRange)]
)
def test_check_word_rejects(word, rank, exc):
    with pytest.raises(exc):
        check_word(word, rank)


def two_generator_group():
    return SchottkyGroup((build_phi(1, -1, 0.1), build_phi(4j, -4j, 0.05 + 0.02j)))


def test_word_table_shell_sizes():
    table = two_generator_group().word_table(4)
    assert [table.shell_size(l) for l in range(5)] == [word_count(2, l) for l in range(5)]


def test_word_table_matrices_match_products():
    grp = two_generator_group()
    table = grp.word_table(3)
    for k in range(table.size):
        w = table.word(k)
        expected = evaluate_word(grp, w)
        assert MoebiusMap.from_matrix(table.mats[k]) == expected
        m = table.mats[k]
        assert abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] - table.det[k]) < 1e-12 * max(
            1.0, abs(table.det[k])
        )


def test_word_table_pruning_removes_extensions():
    grp = two_generator_group()
    full = grp.word_table(5)
    pruned = grp.word_table(5, min_weight=1e-3)
    assert pruned.size < full.size
    kept = {pruned.word(k) for k in range(pruned.size)}
    # pruning is prefix closed
    for w in kept:
        assert w[:-1] in kept or w == ()


def test_evaluate_word_is_homomorphic():
    grp = two_generator_group()
    u, v = (1, -2), (2, 2, 1)
    lhs = evaluate_word(grp, reduce_word(u + v))
    rhs = compose(evaluate_word(grp, u), evaluate_word(grp, v))
    assert lhs == rhs


def test_group_rejects_elliptic_generator():
    rot = MoebiusMap(np.exp(0.3j), 0, 0, 1)
    with pytest.raises(NotLoxodromic):
        SchottkyGroup((rot,))


def test_fixed_point_indexing():
    grp = two_generator_group()
    assert abs(grp.fixed_point(1) - 1) < 1e-14
    assert abs(grp.fixed_point(-2) + 4j) < 1e-13
    with pytest.raises(IndexOutOfRange):
        grp.fixed_point(3)
