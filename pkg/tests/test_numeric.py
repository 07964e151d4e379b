"""Float Grassmann arithmetic and the two-route numeric cross check."""

import math
import random
from fractions import Fraction

import pytest

from superpull.algebra import SPolynomial, SuperScalar, Symbol
from superpull.errors import MissingBinding
from superpull.grassmann import EMPTY, EVEN, GeneratorSet, MultiIndex, enumerate_indices
from superpull.numeric import (
    NumericGrassmann,
    coefficients_close,
    cos_fn,
    cross_check,
    eval_taylor,
    exp_fn,
    polynomial_fn,
    product_fn,
    resolve_bodies,
    sin_fn,
)
from superpull.pullback import Superfield


def ng(mapping):
    return NumericGrassmann({MultiIndex.of(*k) if k else EMPTY: v for k, v in mapping.items()})


class TestNumericGrassmann:
    def test_mul_sign(self):
        a = ng({(1,): 2.0})
        b = ng({(2,): 3.0})
        assert (a * b).coefficient(MultiIndex.of(1, 2)) == 6.0
        assert (b * a).coefficient(MultiIndex.of(1, 2)) == -6.0

    def test_nilpotency_is_structural(self):
        a = ng({(1,): 1e-30})
        assert not (a * a).support()

    def test_from_superscalar_rejects_symbols(self):
        with pytest.raises(ValueError):
            NumericGrassmann.from_superscalar(SuperScalar.from_symbol(Symbol("x")))


class TestEvalTaylor:
    def test_square(self):
        f = polynomial_fn("sq", SPolynomial.variable(1) ** 2, 1)
        arg = ng({(): 2.0, (1, 2): 3.0})
        got = eval_taylor(f, [arg])
        assert got.coefficient(EMPTY) == 4.0
        assert got.coefficient(MultiIndex.of(1, 2)) == 12.0

    def test_exp_of_nilpotent(self):
        got = eval_taylor(exp_fn(), [ng({(1, 2): 1.0})])
        assert got.coefficient(EMPTY) == 1.0
        assert got.coefficient(MultiIndex.of(1, 2)) == 1.0
        assert got.support() == {EMPTY, MultiIndex.of(1, 2)}

    def test_linear_is_exact(self):
        f = polynomial_fn("lin", 3 * SPolynomial.variable(1) + 1, 1)
        arg = ng({(): 0.5, (1, 2): -2.0, (3, 4): 7.0})
        got = eval_taylor(f, [arg])
        assert got.coefficient(EMPTY) == 2.5
        assert got.coefficient(MultiIndex.of(1, 2)) == -6.0
        assert got.coefficient(MultiIndex.of(3, 4)) == 21.0

    def test_morphism_law_numeric(self):
        rng = random.Random(3)
        f = sin_fn()
        g = exp_fn()
        fg = product_fn("sinexp", f, g)
        for _ in range(25):
            arg = random_numeric(rng, GeneratorSet(2, 2))
            left = eval_taylor(fg, [arg])
            right = eval_taylor(f, [arg]) * eval_taylor(g, [arg])
            assert coefficients_close(left, right)


def random_numeric(rng, gens: GeneratorSet) -> NumericGrassmann:
    out = {EMPTY: rng.uniform(-1.5, 1.5)}
    for index in enumerate_indices(gens.total, parity="even_positive"):
        if rng.random() < 0.5:
            out[index] = rng.uniform(-2, 2)
    return NumericGrassmann(out)


def random_field_and_bindings(rng, gens: GeneratorSet, with_odd_monomials=True):
    """A symbolic superfield over theta/eta monomials plus rational bindings."""
    amp = Symbol("amp", EVEN)
    base = Symbol("base", EVEN)
    indices = enumerate_indices(gens.total, parity="all")
    comp = SuperScalar.from_symbol(base)
    for index in indices:
        if not index.indices:
            continue
        if index.parity and not with_odd_monomials:
            continue
        if index.parity:
            # odd monomials must pair up to stay even
            continue
        if rng.random() < 0.5:
            coeff = Fraction(rng.randint(-2, 2), rng.randint(1, 2))
            term = coeff * SuperScalar.generators(index)
            if rng.random() < 0.5:
                term = term * SuperScalar.from_symbol(amp)
            comp = comp + term
    field = Superfield.from_components([comp])
    bindings = {base: Fraction(rng.randint(-1, 2)), amp: Fraction(rng.randint(-2, 2), 2)}
    return field, bindings


class TestCrossCheck:
    def test_physicist_field_with_auxiliary_generators(self):
        # psi_a realized as eta-monomials: comp = base + theta1*eta1 + theta2*eta2 + 2*theta1*theta2
        gens = GeneratorSet(2, 2)
        base = Symbol("base", EVEN)
        comp = (
            SuperScalar.from_symbol(base)
            + SuperScalar.generators(MultiIndex.of(1, 3))
            + SuperScalar.generators(MultiIndex.of(2, 4))
            + 2 * SuperScalar.generators(MultiIndex.of(1, 2))
        )
        field = Superfield.from_components([comp])
        left, right = cross_check(field, sin_fn(), {base: 1})
        assert coefficients_close(left, right)
        # top coefficient is -f''(1) after the pair reordering sign: +sin(1)
        top = left.coefficient(MultiIndex.of(1, 2, 3, 4))
        assert math.isclose(top, math.sin(1.0), rel_tol=1e-12)

    def test_zero_nilpotent_part(self):
        base = Symbol("base", EVEN)
        field = Superfield.from_components([SuperScalar.from_symbol(base)])
        left, right = cross_check(field, exp_fn(), {base: 2})
        assert left.support() == right.support() == {EMPTY}
        assert math.isclose(left.body, math.exp(2.0), rel_tol=1e-12)

    def test_degree_one_polynomial_exact(self):
        f = polynomial_fn("lin", 2 * SPolynomial.variable(1) - 1, 1)
        rng = random.Random(5)
        field, bindings = random_field_and_bindings(rng, GeneratorSet(2, 2))
        left, right = cross_check(field, f, bindings)
        for index in left.support() | right.support():
            assert left.coefficient(index) == right.coefficient(index)

    def test_randomized_dictionary(self):
        rng = random.Random(7)
        fns = [
            exp_fn(),
            sin_fn(),
            cos_fn(),
            polynomial_fn("quartic", (SPolynomial.variable(1) + 1) ** 4, 1),
        ]
        for _ in range(40):
            gens = GeneratorSet(rng.randint(0, 3), rng.randint(0, 3))
            if gens.total < 2:
                continue
            field, bindings = random_field_and_bindings(rng, gens)
            fn = rng.choice(fns)
            left, right = cross_check(field, fn, bindings)
            assert coefficients_close(left, right)

    def test_unbound_body_symbol(self):
        base = Symbol("base", EVEN)
        field = Superfield.from_components([SuperScalar.from_symbol(base)])
        with pytest.raises(MissingBinding):
            resolve_bodies(field, {})


class TestTolerance:
    def test_close_accepts_rounding(self):
        a = ng({(1, 2): 1.0})
        b = ng({(1, 2): 1.0 + 1e-13})
        assert coefficients_close(a, b)

    def test_close_rejects_disagreement(self):
        a = ng({(1, 2): 1.0})
        b = ng({(1, 2): 1.001})
        assert not coefficients_close(a, b)
