"""Operator calculus identities: product rule, chain rule, ideal, isomorphism, group."""

import random
from fractions import Fraction

import pytest

from superpull.algebra import SPolynomial, SuperScalar
from superpull.dops import DOperatorContext, SMap
from superpull.errors import DimensionMismatch
from superpull.grassmann import EMPTY, GeneratorSet, MultiIndex, epsilon
from superpull.pullback import pullback_taylor


def svar(*ix):
    return SPolynomial.variable(MultiIndex.of(*ix))


def ctx(q):
    return DOperatorContext(GeneratorSet(q, 0))


def random_spoly(rng, context, degree=3, terms=4) -> SPolynomial:
    indices = context.even_indices
    poly = SPolynomial.constant(Fraction(rng.randint(-2, 2)))
    for _ in range(rng.randint(1, terms)):
        term = SPolynomial.constant(Fraction(rng.randint(-3, 3), rng.randint(1, 2)))
        for _ in range(rng.randint(0, degree)):
            term = term * SPolynomial.variable(rng.choice(indices))
        poly = poly + term
    return poly


class TestDOp:
    def test_single_variable(self):
        assert ctx(2).d_op(MultiIndex.of(1, 2), svar(1, 2)) == 1

    def test_product_splitting(self):
        # one first-order term (zero) plus the two-block term with weight 1/2! each way
        got = ctx(4).d_op(MultiIndex.of(1, 2, 3, 4), svar(1, 2) * svar(3, 4))
        assert got == 1

    def test_empty_index_evaluates_at_zero(self):
        poly = svar(1, 2) + 7
        assert ctx(2).d_op(EMPTY, poly) == 7

    def test_odd_index_rejected(self):
        with pytest.raises(ValueError):
            ctx(2).d_op(MultiIndex.of(1), svar(1, 2))

    def test_interleaved_two_block(self):
        # splitting (1,3),(2,4) carries sign -1, both orderings agree
        got = ctx(4).d_op(MultiIndex.of(1, 2, 3, 4), svar(1, 3) * svar(2, 4))
        assert got == -1

    def test_splitting_cache_agrees_with_epsilon(self):
        context = ctx(4)
        for index in context.even_with_empty:
            for blocks, sign in context.splittings(index):
                assert sign == epsilon(list(blocks), index)
                assert sign != 0


class TestLeibniz:
    def test_degenerate_degree(self):
        c = ctx(2)
        lhs, rhs = c.leibniz_check(svar(1, 2), svar(1, 2), MultiIndex.of(1, 2))
        assert lhs == rhs == 0

    def test_two_block_example(self):
        c = ctx(4)
        lhs, rhs = c.leibniz_check(svar(1, 2), svar(3, 4), MultiIndex.of(1, 2, 3, 4))
        assert lhs == rhs == 1

    def test_scalar_factor(self):
        c = ctx(4)
        b = svar(1, 2) * svar(3, 4) + svar(1, 4)
        for index in c.even_with_empty:
            lhs, rhs = c.leibniz_check(SPolynomial.constant(5), b, index)
            assert lhs == rhs == 5 * c.d_op(index, b)

    def test_randomized(self):
        rng = random.Random(3)
        for q in (2, 4, 6):
            c = ctx(q)
            for _ in range(20):
                a = random_spoly(rng, c)
                b = random_spoly(rng, c)
                index = rng.choice(c.even_with_empty)
                lhs, rhs = c.leibniz_check(a, b, index)
                assert lhs == rhs


class TestChainRule:
    def test_identity_map(self):
        c = ctx(4)
        rng = random.Random(9)
        f = random_spoly(rng, c)
        identity = SMap.identity(c)
        for index in c.even_with_empty:
            lhs, rhs = c.chain_rule_check(f, identity, index)
            assert lhs == rhs == c.d_op(index, f)

    def test_single_component_square(self):
        c = ctx(4)
        outer = SPolynomial.variable(MultiIndex.of(1, 2, 3, 4))
        inner = SMap(
            {
                MultiIndex.of(1, 2, 3, 4): svar(1, 2) * svar(3, 4),
                **{
                    ix: SPolynomial.zero()
                    for ix in c.even_indices
                    if ix != MultiIndex.of(1, 2, 3, 4)
                },
            }
        )
        lhs, rhs = c.chain_rule_check(outer, inner, MultiIndex.of(1, 2, 3, 4))
        assert lhs == rhs == 1

    def test_constant_outer(self):
        c = ctx(4)
        inner = SMap.identity(c)
        for index in c.even_indices:
            lhs, rhs = c.chain_rule_check(SPolynomial.constant(3), inner, index)
            assert lhs == rhs == 0

    def test_missing_component(self):
        c = ctx(4)
        with pytest.raises(DimensionMismatch):
            c.chain_rule_check(svar(1, 2), SMap({}), MultiIndex.of(1, 2))

    def test_randomized(self):
        rng = random.Random(27)
        for q in (4, 6):
            c = ctx(q)
            for _ in range(12):
                outer = random_spoly(rng, c, degree=2)
                inner = SMap(
                    {ix: random_spoly(rng, c, degree=2, terms=2) for ix in c.even_indices}
                )
                index = rng.choice(c.even_with_empty)
                lhs, rhs = c.chain_rule_check(outer, inner, index)
                assert lhs == rhs


class TestIdeal:
    def test_pair_generator_in_ideal(self):
        c = ctx(4)
        gen = c.ideal_pair_generator(MultiIndex.of(1, 2), MultiIndex.of(3, 4))
        assert gen == svar(1, 2) * svar(3, 4) - svar(1, 2, 3, 4)
        assert c.ideal_member(gen)

    def test_variable_not_in_ideal(self):
        assert not ctx(2).ideal_member(svar(1, 2))

    def test_zero_in_ideal(self):
        assert ctx(2).ideal_member(SPolynomial.zero())

    def test_ideal_absorbs_products(self):
        rng = random.Random(41)
        c = ctx(4)
        for _ in range(15):
            left, right = rng.sample(c.even_indices, 2)
            base = c.ideal_pair_generator(left, right)
            other = random_spoly(rng, c, degree=2)
            assert c.ideal_member(base * other)


class TestIsomorphism:
    def test_linear_generator_map(self):
        assert ctx(2).iso_to_grassmann(svar(1, 2)) == SuperScalar.generators(
            MultiIndex.of(1, 2)
        )

    def test_unit(self):
        assert ctx(2).iso_to_grassmann(SPolynomial.constant(1)) == SuperScalar.one()

    def test_kernel_contains_pair_generators(self):
        c = ctx(4)
        for left in c.even_indices:
            for right in c.even_indices:
                gen = c.ideal_pair_generator(left, right)
                assert c.iso_to_grassmann(gen).is_zero

    def test_multiplicative(self):
        rng = random.Random(53)
        c = ctx(4)
        for _ in range(25):
            a = random_spoly(rng, c, degree=2)
            b = random_spoly(rng, c, degree=2)
            assert c.iso_to_grassmann(a * b) == c.iso_to_grassmann(a) * c.iso_to_grassmann(b)

    def test_kernel_is_ideal(self):
        rng = random.Random(59)
        c = ctx(4)
        for _ in range(20):
            poly = random_spoly(rng, c, degree=2)
            assert c.ideal_member(poly) == c.iso_to_grassmann(poly).is_zero


def random_tq_map(rng, context) -> SMap:
    """Identity plus random multiples of ideal pair generators."""
    comps = {}
    for target in context.even_indices:
        poly = SPolynomial.variable(target)
        for _ in range(rng.randint(0, 2)):
            left, right = rng.sample(context.even_indices, 2)
            factor = Fraction(rng.randint(-2, 2))
            poly = poly + factor * context.ideal_pair_generator(left, right)
        comps[target] = poly
    return SMap(comps)


class TestTqGroup:
    def test_identity_member(self):
        c = ctx(4)
        assert c.tq_member(SMap.identity(c))

    def test_scaled_map_rejected(self):
        c = ctx(2)
        assert not c.tq_member(SMap({MultiIndex.of(1, 2): 2 * svar(1, 2)}))

    def test_constructed_members(self):
        rng = random.Random(61)
        c = ctx(4)
        for _ in range(10):
            assert c.tq_member(random_tq_map(rng, c))

    def test_closed_under_composition(self):
        rng = random.Random(67)
        c = ctx(4)
        for _ in range(8):
            s1 = random_tq_map(rng, c)
            s2 = random_tq_map(rng, c)
            assert c.tq_member(s1.compose(s2))

    def test_wrong_shape_rejected(self):
        c = ctx(4)
        with pytest.raises(DimensionMismatch):
            c.tq_member(SMap({MultiIndex.of(1, 2): svar(1, 2)}))


class TestPhiRoute:
    def test_linear_map_matches_taylor(self):
        c = ctx(4)
        rng = random.Random(71)
        for _ in range(10):
            coord_map = SMap.to_target(
                [random_spoly(rng, c, degree=1, terms=3) for _ in range(2)]
            )
            got = c.phi_route_pullback(coord_map, "f")
            field = c.smap_to_superfield(coord_map)
            assert got == pullback_taylor("f", field)

    def test_quadratic_map_matches_taylor(self):
        c = ctx(4)
        rng = random.Random(73)
        for _ in range(10):
            coord_map = SMap.to_target(
                [random_spoly(rng, c, degree=2, terms=3) for _ in range(2)]
            )
            assert c.phi_route_pullback(coord_map, "f") == pullback_taylor(
                "f", c.smap_to_superfield(coord_map)
            )

    def test_ideal_shift_invisible(self):
        c = ctx(4)
        base = SMap.to_target([svar(1, 2) + 2 * svar(1, 2, 3, 4)])
        shifted = SMap.to_target(
            [
                base.components[1]
                + c.ideal_pair_generator(MultiIndex.of(1, 2), MultiIndex.of(3, 4))
            ]
        )
        assert c.phi_route_pullback(base, "f") == c.phi_route_pullback(shifted, "f")

    def test_constant_function_map(self):
        from superpull.algebra import FuncDeriv

        c = ctx(2)
        coord_map = SMap.to_target([SPolynomial.constant(4)])
        got = c.phi_route_pullback(coord_map, "f")
        assert got == SuperScalar.func_deriv(FuncDeriv("f", (0,)))

    def test_tq_invariance(self):
        rng = random.Random(79)
        c = ctx(4)
        for _ in range(8):
            coord_map = SMap.to_target(
                [random_spoly(rng, c, degree=2, terms=3) for _ in range(2)]
            )
            reparam = random_tq_map(rng, c)
            composed = SMap.to_target(
                [coord_map.components[lab].subs(dict(reparam.components)) for lab in (1, 2)]
            )
            assert c.phi_route_pullback(composed, "f") == c.phi_route_pullback(coord_map, "f")
