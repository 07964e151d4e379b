"""The pullback engine for maps from superspace into a chart.

A map into an n-dimensional chart is recorded by the images of the n
coordinate functions: even SuperScalars whose generator-free part is a single
base-point atom (the body) plus a nilpotent remainder.  Composing an arbitrary
smooth function through such a map is then a finite Taylor sum, because powers
of the nilpotent remainder vanish exactly.  On top of that Taylor engine this
module implements the exponential-of-vector-field route (a field of
coefficients indexed by nonempty even multi-indices), reconstruction of those
coefficients from the component images, the ordered product of first-order
factors with odd-coordinate prefixes, pullbacks through targets with odd
coordinates, and coefficient extraction in the Berezin convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .algebra import FuncDeriv, SPolynomial, SuperScalar, Symbol, Term
from .errors import DimensionMismatch, OddComponentError, ParityMismatch
from .grassmann import EMPTY, EVEN, MultiIndex, concat_sign, epsilon, multi_union

BodyAtom = int | Fraction | Symbol


def body_scalar(atom: BodyAtom) -> SuperScalar:
    if isinstance(atom, Symbol):
        if atom.is_odd:
            raise ValueError(f"body atom {atom.name!r} must be even")
        return SuperScalar.from_symbol(atom)
    return SuperScalar.from_rational(Fraction(atom))


@dataclass(frozen=True)
class Superfield:
    """The images of the target coordinates under an even superspace map.

    Each component is an even SuperScalar; ``bodies`` holds the base-point
    atom of each component (a symbol or a rational), and the component minus
    its body must be nilpotent: every remaining term carries at least one
    generator or odd symbol.
    """

    components: tuple[SuperScalar, ...]
    bodies: tuple[BodyAtom, ...]

    def __post_init__(self):
        if len(self.components) != len(self.bodies):
            raise DimensionMismatch(
                f"{len(self.components)} components but {len(self.bodies)} bodies"
            )
        if not self.components:
            raise ValueError("a superfield needs at least one component")
        for i, (comp, body) in enumerate(zip(self.components, self.bodies)):
            if comp.parity() != EVEN:
                raise OddComponentError(f"component {i} is not even")
            if not (comp - body_scalar(body)).is_nilpotent():
                raise ValueError(
                    f"component {i} minus its body is not nilpotent; "
                    "check the body atom"
                )

    @classmethod
    def from_components(cls, components: Sequence[SuperScalar]) -> "Superfield":
        """Build a superfield, reading each body off the generator-free part."""
        bodies = []
        for i, comp in enumerate(components):
            body_terms = [
                (t, c) for t, c in comp.items() if not t.has_odd_factor
            ]
            if not body_terms:
                bodies.append(Fraction(0))
                continue
            if len(body_terms) > 1:
                raise ValueError(f"component {i} has no single body atom")
            term, coeff = body_terms[0]
            if term.derivs:
                raise ValueError(f"component {i} has a derivative atom in its body")
            if not term.evens:
                bodies.append(Fraction(coeff))
            elif len(term.evens) == 1 and term.evens[0][1] == 1 and coeff == 1:
                bodies.append(Symbol(term.evens[0][0], EVEN))
            else:
                raise ValueError(f"component {i} body is not a single atom")
        return cls(tuple(components), tuple(bodies))

    @property
    def dim(self) -> int:
        return len(self.components)

    def nilpotent_parts(self) -> tuple[SuperScalar, ...]:
        return tuple(
            comp - body_scalar(body)
            for comp, body in zip(self.components, self.bodies)
        )


@dataclass(frozen=True)
class XiField:
    """Constant-coefficient vector field data indexed by nonempty even multi-indices.

    ``coefficients[I]`` is the n-vector of generator-free even SuperScalars
    multiplying the generator monomial of I in the exponential representation.
    """

    dim: int
    coefficients: Mapping[MultiIndex, tuple[SuperScalar, ...]]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        cleaned = {}
        for index, vector in self.coefficients.items():
            if not index.indices or index.parity != EVEN:
                raise ValueError(f"coefficient index {index} must be even and nonempty")
            if len(vector) != self.dim:
                raise DimensionMismatch(
                    f"coefficient vector for {index} has length {len(vector)}, want {self.dim}"
                )
            for entry in vector:
                if not entry.free_of_generators():
                    raise ValueError(f"coefficient for {index} contains generators")
                if entry.parity() != EVEN:
                    raise ParityMismatch(f"coefficient for {index} is not even")
            if any(not entry.is_zero for entry in vector):
                cleaned[index] = tuple(vector)
        object.__setattr__(self, "coefficients", cleaned)

    @classmethod
    def empty(cls, dim: int) -> "XiField":
        return cls(dim, {})


@dataclass(frozen=True)
class OddTargetMap:
    """An even map into a target carrying both ordinary and odd coordinates."""

    even_part: Superfield
    odd_images: tuple[SuperScalar, ...]

    def __post_init__(self):
        for j, chi in enumerate(self.odd_images):
            if not chi.is_zero and chi.parity() != 1:
                raise ParityMismatch(f"odd image {j} is not odd")


# ---------------------------------------------------------------------------
# Taylor pullback
# ---------------------------------------------------------------------------


def _multi_factorial(orders: Sequence[int]) -> int:
    out = 1
    for o in orders:
        out *= math.factorial(o)
    return out


def _taylor_sum(
    derivative_term: Callable[[tuple[int, ...]], SuperScalar],
    field: Superfield,
    max_total: int | None = None,
) -> SuperScalar:
    """Sum derivative_term(r) * N^r / r! until the nilpotent powers die out."""
    n = field.dim
    nil = field.nilpotent_parts()
    zero_r = (0,) * n
    total = derivative_term(zero_r)
    frontier: dict[tuple[int, ...], SuperScalar] = {zero_r: SuperScalar.one()}
    degree = 0
    while frontier:
        degree += 1
        if max_total is not None and degree > max_total:
            break
        new: dict[tuple[int, ...], SuperScalar] = {}
        for r, prod in frontier.items():
            support = next((i for i, v in enumerate(r) if v), n)
            for slot in range(min(support, n - 1) + 1):
                bumped = nil[slot] * prod
                if bumped.is_zero:
                    continue
                key = tuple(v + (1 if i == slot else 0) for i, v in enumerate(r))
                new[key] = bumped
        for r, prod in new.items():
            dterm = derivative_term(r)
            if not dterm.is_zero:
                total = total + dterm * prod * Fraction(1, _multi_factorial(r))
        frontier = new
    return total


def pullback_taylor(fname: str, field: Superfield) -> SuperScalar:
    """Pull an opaque smooth function back through a superfield.

    The result is the finite Taylor sum in the nilpotent parts with formal
    derivative atoms D[r]fname standing for the derivatives at the body.
    """
    return _taylor_sum(
        lambda r: SuperScalar.func_deriv(FuncDeriv(fname, r)), field
    )


def pullback_polynomial(poly: SPolynomial, field: Superfield) -> SuperScalar:
    """Pull an explicit polynomial (variables 1..n) back through a superfield.

    Derivatives are computed exactly and evaluated at the body atoms, so the
    result contains no derivative atoms.  This equals evaluating the
    polynomial directly on the components.
    """
    n = field.dim
    labels = poly.variables()
    if not labels <= set(range(1, n + 1)):
        raise DimensionMismatch(
            f"polynomial variables {sorted(labels, key=str)} exceed target dimension {n}"
        )
    bodies = {alpha: body_scalar(b) for alpha, b in zip(range(1, n + 1), field.bodies)}
    cache: dict[tuple[int, ...], SuperScalar] = {}

    def deriv(r: tuple[int, ...]) -> SuperScalar:
        if r not in cache:
            d = poly
            for alpha, power in enumerate(r, start=1):
                for _ in range(power):
                    d = d.partial(alpha)
            value = d.eval(bodies) if not d.is_zero else Fraction(0)
            if not isinstance(value, SuperScalar):
                value = SuperScalar.from_rational(value)
            cache[r] = value
        return cache[r]

    cap = poly.degree()
    return _taylor_sum(deriv, field, max_total=None if cap < 0 else cap)


# ---------------------------------------------------------------------------
# Exponential route
# ---------------------------------------------------------------------------


def exp_xi_apply(xi: XiField, fname: str) -> SuperScalar:
    """Expand the exponential of the coefficient field applied to a function.

    The coefficient of each generator monomial collects the block-splitting
    sign times the matching products of coefficient vectors contracted with
    one derivative atom per block.  Enumerating subsets of the (even) keys is
    exactly the ordered-tuple sum with its 1/n! weight: every ordering of a
    subset contributes the same summand.
    """
    keys = sorted(xi.coefficients)
    n = xi.dim
    total = SuperScalar.func_deriv(FuncDeriv(fname, (0,) * n))

    def emit(chosen: list[MultiIndex]) -> None:
        nonlocal total
        target = multi_union(chosen)
        sign = epsilon(chosen, target)
        if sign == 0:
            return
        spread: dict[tuple[int, ...], SuperScalar] = {(0,) * n: SuperScalar.one()}
        for block in chosen:
            vector = xi.coefficients[block]
            new: dict[tuple[int, ...], SuperScalar] = {}
            for r, acc in spread.items():
                for slot in range(n):
                    entry = vector[slot]
                    if entry.is_zero:
                        continue
                    key = tuple(v + (1 if i == slot else 0) for i, v in enumerate(r))
                    new[key] = new.get(key, SuperScalar.zero()) + acc * entry
            spread = new
        gens = SuperScalar.generators(target)
        for r, acc in spread.items():
            total = total + sign * gens * acc * SuperScalar.func_deriv(FuncDeriv(fname, r))

    def walk(start: int, chosen: list[MultiIndex], used: set[int]) -> None:
        for t in range(start, len(keys)):
            block = keys[t]
            if used & set(block.indices):
                continue
            chosen.append(block)
            emit(chosen)
            walk(t + 1, chosen, used | set(block.indices))
            chosen.pop()

    walk(0, [], set())
    return total


def reconstruct_xi(field: Superfield) -> XiField:
    """Read the exponential-route coefficients off a superfield's components.

    Requires every component term to carry an even generator monomial with no
    odd-symbol content (the chart-adapted even form): then the coefficient of
    each nonempty even monomial is the corresponding vector entry, and
    ``exp_xi_apply`` on the result reproduces ``pullback_taylor`` for every
    function name.
    """
    n = field.dim
    coeffs: dict[MultiIndex, list[SuperScalar]] = {}
    for alpha, comp in enumerate(field.components):
        for term, _ in comp.items():
            if term.odds:
                raise OddComponentError(
                    f"component {alpha} carries odd symbol content; "
                    "odd data must live in generators for reconstruction"
                )
            if term.gens.parity != EVEN:
                raise OddComponentError(
                    f"component {alpha} has an odd generator monomial {term.gens}"
                )
        for index in comp.generator_support():
            if index == EMPTY:
                continue
            vector = coeffs.setdefault(index, [SuperScalar.zero()] * n)
            vector[alpha] = comp.coefficient_of_gens(index)
    return XiField(n, {k: tuple(v) for k, v in coeffs.items()})


# ---------------------------------------------------------------------------
# Ordered product of first-order factors
# ---------------------------------------------------------------------------


def _check_factor_parity(index: MultiIndex, entries: Sequence[SuperScalar]) -> None:
    if not index.indices:
        raise ValueError("factor prefixes must be nonempty multi-indices")
    want = index.parity
    for entry in entries:
        if entry.is_zero:
            continue
        if entry.parity() != want:
            raise ParityMismatch(
                f"factor {index} needs parity {want} coefficients"
            )
        if not entry.free_of_derivs():
            raise ValueError(f"factor {index} coefficient must not contain derivative atoms")


def product_form_expand(
    factors: Sequence[tuple[MultiIndex, SuperScalar]]
) -> SuperScalar:
    """Multiply out (1 + prefix_A * op_A) over the given factors.

    Each op_A is an opaque scalar standing for a first-order operator whose
    parity matches its prefix; the supercommutation signs of the expansion are
    exactly the algebra's product signs.
    """
    result = SuperScalar.one()
    for index, op in factors:
        _check_factor_parity(index, [op])
        result = result * (SuperScalar.one() + SuperScalar.generators(index) * op)
    return result


def product_form_apply(
    bodies: Sequence[BodyAtom],
    factors: Sequence[tuple[MultiIndex, Sequence[SuperScalar]]],
    fname: str,
) -> SuperScalar:
    """Apply the ordered product of first-order factors to a function.

    Each factor is a generator prefix together with the coefficient vector of
    a first-order operator acting on the target coordinates; coefficients are
    constants for the derivation.  Factors are applied right to left, each
    step adding prefix * (sum_alpha c_alpha * d/dy_alpha) of the running
    value.  On a superfield of the matching shape this agrees with
    ``pullback_taylor``.
    """
    n = len(bodies)
    for index, entries in factors:
        if len(entries) != n:
            raise DimensionMismatch(
                f"factor {index} has {len(entries)} coefficients, want {n}"
            )
        _check_factor_parity(index, entries)
    value = SuperScalar.func_deriv(FuncDeriv(fname, (0,) * n))
    for index, entries in reversed(list(factors)):
        derived = SuperScalar.zero()
        for slot, entry in enumerate(entries):
            if entry.is_zero:
                continue
            derived = derived + entry * value.func_partial(slot)
        value = value + SuperScalar.generators(index) * derived
    return value


# ---------------------------------------------------------------------------
# Odd-coordinate targets and Berezin extraction
# ---------------------------------------------------------------------------


def pullback_odd_target(
    target_map: OddTargetMap, components: Mapping[MultiIndex, str]
) -> SuperScalar:
    """Pull back a function on a target with odd coordinates.

    ``components`` names, for each even multi-index J over the odd target
    coordinates, the coefficient function F_J; the result is the sum of the
    ordinary pullbacks of the F_J times the matching products of the odd
    coordinate images.
    """
    m = len(target_map.odd_images)
    total = SuperScalar.zero()
    for index in sorted(components):
        if index.parity != EVEN:
            raise ValueError(f"coefficient index {index} must be even")
        if index.indices and index.indices[-1] > m:
            raise DimensionMismatch(
                f"coefficient index {index} exceeds {m} odd target coordinates"
            )
        chi = SuperScalar.one()
        for j in index:
            chi = chi * target_map.odd_images[j - 1]
        if chi.is_zero:
            continue
        total = total + pullback_taylor(components[index], target_map.even_part) * chi
    return total


def berezin(value: SuperScalar, odd_vars: MultiIndex) -> SuperScalar:
    """Extract the coefficient of the ascending product of the given generators.

    Terms not containing the whole block integrate to zero; for the others the
    block is factored out on the left in ascending order and the remaining
    generators and symbols are kept intact.
    """
    wanted = set(odd_vars.indices)
    out = SuperScalar.zero()
    for term, coeff in value.items():
        if not wanted <= set(term.gens.indices):
            continue
        rest = term.gens.restricted_complement(odd_vars)
        signed = concat_sign(odd_vars, rest)
        piece = SuperScalar({Term(term.evens, term.odds, rest, term.derivs): coeff})
        out = out + signed.sign * piece
    return out
