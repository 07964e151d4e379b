"""Differential operator calculus on polynomials in the even coordinates.

Functions on the space of even coordinates (one commuting variable per
nonempty even multi-index) carry a family of operators, one per even
multi-index I: the sign-weighted sum over ordered splittings of I into
nonempty even blocks of the matching mixed partials, evaluated at the origin,
divided by the factorial of the block count.  These operators extract the
generator-monomial components of a pullback presented through such a
coordinate map.

This module builds the splitting tables once per context and implements the
operator itself, the pair identity it satisfies on products, the chain rule
through polynomial maps, membership in the kernel ideal, the isomorphism onto
the even generator algebra, the reparametrization group with identity jet, and
the pullback route that goes through a polynomial coordinate map.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial
from typing import Hashable, Mapping

from .algebra import FuncDeriv, SPolynomial, SuperScalar
from .errors import DimensionMismatch
from .grassmann import EMPTY, EVEN, GeneratorSet, MultiIndex, epsilon

Splitting = tuple[tuple[MultiIndex, ...], int]


def _ordered_even_splittings(indices: tuple[int, ...]) -> list[tuple[MultiIndex, ...]]:
    """All ordered tuples of disjoint nonempty even-size blocks covering the indices."""
    if not indices:
        return [()]
    out = []
    rest_pool = indices
    for size in range(2, len(indices) + 1, 2):
        for first in combinations(rest_pool, size):
            remaining = tuple(k for k in rest_pool if k not in first)
            for tail in _ordered_even_splittings(remaining):
                out.append((MultiIndex(first),) + tail)
    return out


@dataclass(frozen=True)
class SMap:
    """A polynomial map recorded by target-label -> polynomial components.

    Labels are integers 1..n for an ordinary coordinate target, or nonempty
    even multi-indices when the map sends the even coordinate space to
    itself.
    """

    components: Mapping[Hashable, SPolynomial]

    @classmethod
    def to_target(cls, polys: list[SPolynomial]) -> "SMap":
        return cls({alpha: p for alpha, p in enumerate(polys, start=1)})

    @classmethod
    def identity(cls, context: "DOperatorContext") -> "SMap":
        return cls({i: SPolynomial.variable(i) for i in context.even_indices})

    def labels(self) -> list:
        return sorted(self.components, key=_label_key)

    def at_zero(self) -> dict:
        return {lab: poly.constant_term() for lab, poly in self.components.items()}

    def compose(self, inner: "SMap") -> "SMap":
        """self after inner: substitute inner's components into each polynomial."""
        subs = dict(inner.components)
        return SMap({lab: poly.subs(subs) for lab, poly in self.components.items()})


def _label_key(label):
    if isinstance(label, MultiIndex):
        return (1, label.indices)
    return (0, label)


class DOperatorContext:
    """Cached splitting tables and the operator calculus for one generator context."""

    def __init__(self, generators: GeneratorSet):
        self.generators = generators
        self.even_indices = generators.even_indices()
        self.even_with_empty = generators.even_indices_with_empty()
        self._splittings: dict[MultiIndex, list[Splitting]] = {}

    def splittings(self, index: MultiIndex) -> list[Splitting]:
        """Ordered even block splittings of the index with their reassembly signs."""
        if index not in self._splittings:
            entries = []
            for blocks in _ordered_even_splittings(index.indices):
                sign = epsilon(list(blocks), index)
                entries.append((blocks, sign))
            self._splittings[index] = entries
        return self._splittings[index]

    def d_op(self, index: MultiIndex, poly: SPolynomial) -> Fraction:
        """Evaluate the operator of the given even multi-index on a polynomial at 0."""
        if index.parity != EVEN:
            raise ValueError(f"operator index {index} must be even")
        total = Fraction(0)
        cap = poly.degree()
        for blocks, sign in self.splittings(index):
            if len(blocks) > cap and blocks:
                continue
            d = poly
            for block in blocks:
                d = d.partial(block)
                if d.is_zero:
                    break
            else:
                total += Fraction(sign, factorial(len(blocks))) * d.constant_term()
        return total

    # -- identities ----------------------------------------------------

    def leibniz_check(
        self, a: SPolynomial, b: SPolynomial, index: MultiIndex
    ) -> tuple[Fraction, Fraction]:
        """Both sides of the product identity: operator of a*b versus the
        sign-weighted sum over two-block splittings (empty blocks allowed)."""
        lhs = self.d_op(index, a * b)
        rhs = Fraction(0)
        pool = index.indices
        for size in range(0, len(pool) + 1, 2):
            for left in combinations(pool, size):
                right = tuple(k for k in pool if k not in left)
                if len(right) % 2:
                    continue
                left_ix, right_ix = MultiIndex(left), MultiIndex(right)
                blocks = [ix for ix in (left_ix, right_ix) if ix.indices]
                sign = epsilon(blocks, index)
                if sign == 0:
                    continue
                rhs += sign * self.d_op(left_ix, a) * self.d_op(right_ix, b)
        return lhs, rhs

    def chain_rule_check(
        self, outer: SPolynomial, inner: SMap, index: MultiIndex
    ) -> tuple[Fraction, Fraction]:
        """Both sides of the chain rule through a polynomial map at the origin.

        Left: the operator applied to the composition.  Right: the splitting
        sum contracting the outer derivatives at inner(0) with per-block
        operator values of the inner components.
        """
        missing = outer.variables() - set(inner.components)
        if missing:
            raise DimensionMismatch(f"map lacks components for {sorted(missing, key=str)}")
        composed = outer.subs(dict(inner.components))
        lhs = self.d_op(index, composed)

        base = inner.at_zero()
        labels = inner.labels()
        rhs = Fraction(0)
        for blocks, sign in self.splittings(index):
            k = len(blocks)
            block_values: list[dict] = []
            for block in blocks:
                values = {}
                for lab in labels:
                    v = self.d_op(block, inner.components[lab])
                    if v:
                        values[lab] = v
                block_values.append(values)

            def walk(i: int, outer_deriv: SPolynomial, acc: Fraction) -> Fraction:
                if outer_deriv.is_zero:
                    return Fraction(0)
                if i == k:
                    return acc * Fraction(
                        outer_deriv.eval(base) if outer_deriv.variables() else outer_deriv.constant_term()
                    )
                total = Fraction(0)
                for lab, v in block_values[i].items():
                    total += walk(i + 1, outer_deriv.partial(lab), acc * v)
                return total

            rhs += Fraction(sign, factorial(k)) * walk(0, outer, Fraction(1))
        return lhs, rhs

    # -- ideal and isomorphism ------------------------------------------

    def ideal_member(self, poly: SPolynomial) -> bool:
        """True when every operator of the context kills the polynomial at 0."""
        return all(self.d_op(index, poly) == 0 for index in self.even_with_empty)

    def ideal_pair_generator(self, left: MultiIndex, right: MultiIndex) -> SPolynomial:
        """The relation: product of two coordinates minus its sign-resolved coordinate."""
        prod = SPolynomial.variable(left) * SPolynomial.variable(right)
        for index in self.even_indices:
            sign = epsilon([left, right], index)
            if sign:
                prod = prod - sign * SPolynomial.variable(index)
        return prod

    def iso_to_grassmann(self, poly: SPolynomial) -> SuperScalar:
        """The algebra morphism onto the even generator algebra.

        Sends each polynomial to the sum over even multi-indices of the
        operator value times the generator monomial; its kernel is exactly
        the ideal."""
        total = SuperScalar.zero()
        for index in self.even_with_empty:
            value = self.d_op(index, poly)
            if value:
                total = total + value * SuperScalar.generators(index)
        return total

    # -- reparametrizations ----------------------------------------------

    def tq_member(self, candidate: SMap) -> bool:
        """Membership in the group of origin-fixing self-maps with identity jet."""
        if set(candidate.components) != set(self.even_indices):
            raise DimensionMismatch("candidate must map the even coordinate space to itself")
        for target in self.even_indices:
            poly = candidate.components[target]
            if poly.constant_term() != 0:
                return False
            for index in self.even_indices:
                want = Fraction(1) if index == target else Fraction(0)
                if self.d_op(index, poly) != want:
                    return False
        return True

    # -- pullback through a polynomial coordinate map ----------------------

    def phi_route_pullback(self, coord_map: SMap, fname: str) -> SuperScalar:
        """Pull a function back through a polynomial map of the even coordinates.

        The coefficient of each generator monomial is the splitting sum of
        derivative atoms contracted with per-block operator values of the map
        components.  Equals the Taylor pullback of the superfield whose
        components are the operator-value expansions of the map.
        """
        labels = coord_map.labels()
        n = len(labels)
        if labels != list(range(1, n + 1)):
            raise DimensionMismatch("coordinate map components must be labeled 1..n")
        total = SuperScalar.zero()
        for index in self.even_with_empty:
            gens = SuperScalar.generators(index)
            for blocks, sign in self.splittings(index):
                k = len(blocks)
                block_values: list[dict[int, Fraction]] = []
                for block in blocks:
                    values = {}
                    for lab in labels:
                        v = self.d_op(block, coord_map.components[lab])
                        if v:
                            values[lab] = v
                    block_values.append(values)

                def walk(i: int, orders: tuple[int, ...], acc: Fraction) -> SuperScalar:
                    if i == k:
                        return acc * SuperScalar.func_deriv(FuncDeriv(fname, orders))
                    out = SuperScalar.zero()
                    for lab, v in block_values[i].items():
                        bumped = tuple(
                            o + (1 if j == lab - 1 else 0) for j, o in enumerate(orders)
                        )
                        out = out + walk(i + 1, bumped, acc * v)
                    return out

                contribution = walk(0, (0,) * n, Fraction(1, factorial(k)))
                if not contribution.is_zero:
                    total = total + sign * gens * contribution
        return total

    def smap_to_superfield(self, coord_map: SMap):
        """The superfield whose components expand the map by operator values."""
        from .pullback import Superfield

        labels = coord_map.labels()
        comps = []
        for lab in labels:
            poly = coord_map.components[lab]
            comp = SuperScalar.zero()
            for index in self.even_with_empty:
                value = self.d_op(index, poly)
                if value:
                    comp = comp + value * SuperScalar.generators(index)
            comps.append(comp)
        return Superfield(
            tuple(comps),
            tuple(poly.constant_term() for poly in (coord_map.components[l] for l in labels)),
        )
