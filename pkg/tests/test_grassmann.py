"""Combinatorics of multi-indices, concatenation signs, and splitting signs."""

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from superpull.grassmann import (
    EMPTY,
    GeneratorSet,
    MultiIndex,
    ZERO,
    concat_sign,
    degree_indices,
    enumerate_indices,
    epsilon,
    multi_union,
    sort_with_sign,
)


def brute_force_sign(word):
    """Permutation sign by explicit transposition count on a selection sort."""
    items = list(word)
    if len(set(items)) != len(items):
        return 0
    sign = 1
    for i in range(len(items)):
        smallest = min(range(i, len(items)), key=items.__getitem__)
        if smallest != i:
            items[i], items[smallest] = items[smallest], items[i]
            sign = -sign
    return sign


def subsets(pool):
    for k in range(len(pool) + 1):
        yield from itertools.combinations(pool, k)


class TestMultiIndex:
    def test_validation(self):
        with pytest.raises(ValueError):
            MultiIndex((2, 1))
        with pytest.raises(ValueError):
            MultiIndex((1, 1))
        with pytest.raises(ValueError):
            MultiIndex((0,))

    def test_parity_and_degree(self):
        assert EMPTY.degree == 0
        assert EMPTY.parity == 0
        assert MultiIndex.of(1, 3).parity == 0
        assert MultiIndex.of(2).parity == 1

    def test_hashable_value_object(self):
        table = {MultiIndex.of(1, 2): "a", EMPTY: "b"}
        assert table[MultiIndex.of(1, 2)] == "a"
        assert MultiIndex.of(1, 2) == MultiIndex((1, 2))

    def test_complement(self):
        assert MultiIndex.of(1, 2, 4).restricted_complement(MultiIndex.of(2)) == MultiIndex.of(1, 4)


class TestConcatSign:
    def test_sorted_pair(self):
        got = concat_sign(MultiIndex.of(1), MultiIndex.of(2))
        assert (got.index, got.sign) == (MultiIndex.of(1, 2), 1)

    def test_one_transposition(self):
        got = concat_sign(MultiIndex.of(2), MultiIndex.of(1))
        assert (got.index, got.sign) == (MultiIndex.of(1, 2), -1)

    def test_repeated_index_vanishes(self):
        assert concat_sign(MultiIndex.of(1, 2), MultiIndex.of(2, 3)) is ZERO

    def test_sign_matches_brute_force(self):
        pool = range(1, 6)
        for left in subsets(pool):
            rest = [k for k in pool if k not in left]
            for right in subsets(rest):
                got = concat_sign(MultiIndex(left), MultiIndex(tuple(right)))
                assert got.sign == brute_force_sign(left + tuple(right))

    def test_associative_signs_exhaustive_g6(self):
        # assign each generator to one of (unused, I, J, K) and compare groupings
        for assignment in itertools.product(range(4), repeat=6):
            parts = {1: [], 2: [], 3: []}
            for gen, where in zip(range(1, 7), assignment):
                if where:
                    parts[where].append(gen)
            i, j, k = (MultiIndex(tuple(parts[x])) for x in (1, 2, 3))
            ij = concat_sign(i, j)
            jk = concat_sign(j, k)
            left = concat_sign(ij.index, k)
            right = concat_sign(i, jk.index)
            assert left.sign * ij.sign == right.sign * jk.sign
            assert left.index == right.index

    @given(st.integers(1, 9), st.integers(1, 9))
    def test_anticommutation_of_singletons(self, a, b):
        one = concat_sign(MultiIndex.of(a), MultiIndex.of(b))
        other = concat_sign(MultiIndex.of(b), MultiIndex.of(a))
        if a == b:
            assert one.is_zero and other.is_zero
        else:
            assert one.sign == -other.sign


class TestEpsilon:
    def test_identity_permutation(self):
        assert epsilon([MultiIndex.of(1, 2), MultiIndex.of(3, 4)], MultiIndex.of(1, 2, 3, 4)) == 1

    def test_interleaved_blocks(self):
        # frozen from brute_force_sign((1, 3, 2, 4)) == -1
        assert brute_force_sign((1, 3, 2, 4)) == -1
        assert epsilon([MultiIndex.of(1, 3), MultiIndex.of(2, 4)], MultiIndex.of(1, 2, 3, 4)) == -1

    def test_union_mismatch(self):
        assert epsilon([MultiIndex.of(1, 2)], MultiIndex.of(1, 2, 3, 4)) == 0

    def test_empty_block_list(self):
        assert epsilon([], EMPTY) == 1
        assert epsilon([], MultiIndex.of(1, 2)) == 0

    def test_empty_block_inside_vanishes(self):
        assert epsilon([MultiIndex.of(1, 2), EMPTY], MultiIndex.of(1, 2)) == 0

    def test_single_block_is_plus_one_exhaustive_g6(self):
        for sub in subsets(range(1, 7)):
            index = MultiIndex(sub)
            if sub:
                assert epsilon([index], index) == 1

    def test_matches_brute_force_on_all_q4_splittings(self):
        pool = range(1, 5)
        for target_tuple in subsets(pool):
            target = MultiIndex(target_tuple)
            for k in range(1, 3):
                for blocks in itertools.product(list(subsets(pool)), repeat=k):
                    idx_blocks = [MultiIndex(b) for b in blocks]
                    got = epsilon(idx_blocks, target)
                    word = tuple(itertools.chain.from_iterable(blocks))
                    if any(not b for b in blocks) or sorted(word) != list(target_tuple):
                        assert got == 0
                    else:
                        assert got == brute_force_sign(word)

    def test_even_blocks_commute(self):
        pairs = [
            (MultiIndex.of(1, 2), MultiIndex.of(3, 4)),
            (MultiIndex.of(1, 4), MultiIndex.of(2, 3)),
            (MultiIndex.of(2, 4), MultiIndex.of(1, 3)),
        ]
        target = MultiIndex.of(1, 2, 3, 4)
        for a, b in pairs:
            assert epsilon([a, b], target) == epsilon([b, a], target)


class TestEnumeration:
    def test_degree_two_over_three(self):
        assert degree_indices(3, 2) == [
            MultiIndex.of(1, 2),
            MultiIndex.of(1, 3),
            MultiIndex.of(2, 3),
        ]

    def test_degree_zero_even(self):
        assert enumerate_indices(4, 0, "even") == [EMPTY]

    def test_even_positive_g2(self):
        assert enumerate_indices(2, parity="even_positive") == [MultiIndex.of(1, 2)]

    def test_even_family_cardinality(self):
        for q in range(1, 7):
            assert len(enumerate_indices(q, parity="even")) == 2 ** (q - 1)

    def test_families_partition(self):
        for g in range(0, 7):
            evens = enumerate_indices(g, parity="even")
            odds = enumerate_indices(g, parity="odd")
            assert len(evens) + len(odds) == 2**g


class TestGeneratorSet:
    def test_naming(self):
        gs = GeneratorSet(2, 2)
        assert [gs.name(k) for k in range(1, 5)] == ["theta1", "theta2", "eta1", "eta2"]
        with pytest.raises(ValueError):
            gs.name(5)

    def test_theta_block(self):
        assert GeneratorSet(3, 1).theta_block() == MultiIndex.of(1, 2, 3)

    def test_even_indices(self):
        gs = GeneratorSet(2, 0)
        assert gs.even_indices() == [MultiIndex.of(1, 2)]
        assert gs.even_indices_with_empty() == [EMPTY, MultiIndex.of(1, 2)]


def test_multi_union():
    assert multi_union([MultiIndex.of(2, 5), MultiIndex.of(1)]) == MultiIndex.of(1, 2, 5)


def test_sort_with_sign_duplicates():
    assert sort_with_sign((1, 2, 1)) == (0, ())
