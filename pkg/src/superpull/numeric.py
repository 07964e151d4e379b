"""Independent floating-point verification path.

This module re-does pullbacks numerically, with genuine smooth functions and
float coefficients, sharing nothing with the symbolic Taylor engine except the
generator sign combinatorics.  Odd data must be realized through auxiliary
generators before numbers appear, since floats cannot anticommute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .algebra import SPolynomial, SuperScalar, Symbol, substitute_numeric
from .errors import MissingBinding
from .grassmann import EMPTY, MultiIndex, sort_with_sign
from .pullback import Superfield, pullback_taylor


class NumericGrassmann:
    """A float-coefficient element of the generator algebra.

    Stored as a map from multi-index to coefficient.  Vanishing of repeated
    generators is structural, so nilpotency is exact even in floating point.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[MultiIndex, float] | None = None):
        data: dict[MultiIndex, float] = {}
        if terms:
            for index, value in terms.items():
                if value != 0.0:
                    data[index] = float(value)
        self._terms = data

    @classmethod
    def constant(cls, value: float) -> "NumericGrassmann":
        return cls({EMPTY: value})

    @classmethod
    def from_superscalar(cls, value: SuperScalar) -> "NumericGrassmann":
        """Convert a fully substituted SuperScalar; symbols must be gone."""
        out: dict[MultiIndex, float] = {}
        for term, coeff in value.items():
            if term.evens or term.odds or term.derivs:
                raise ValueError("value still contains symbols or derivative atoms")
            out[term.gens] = out.get(term.gens, 0.0) + float(coeff)
        return cls(out)

    def items(self):
        return iter(self._terms.items())

    def coefficient(self, index: MultiIndex) -> float:
        return self._terms.get(index, 0.0)

    @property
    def body(self) -> float:
        return self._terms.get(EMPTY, 0.0)

    def support(self) -> set[MultiIndex]:
        return set(self._terms)

    def __add__(self, other) -> "NumericGrassmann":
        rhs = _coerce(other)
        out = dict(self._terms)
        for index, value in rhs._terms.items():
            out[index] = out.get(index, 0.0) + value
        return NumericGrassmann(out)

    __radd__ = __add__

    def __neg__(self) -> "NumericGrassmann":
        return NumericGrassmann({i: -v for i, v in self._terms.items()})

    def __sub__(self, other) -> "NumericGrassmann":
        return self + (-_coerce(other))

    def __mul__(self, other) -> "NumericGrassmann":
        rhs = _coerce(other)
        out: dict[MultiIndex, float] = {}
        for ia, va in self._terms.items():
            for ib, vb in rhs._terms.items():
                sign, word = sort_with_sign(ia.indices + ib.indices)
                if sign == 0:
                    continue
                key = MultiIndex(word)
                out[key] = out.get(key, 0.0) + sign * va * vb
        return NumericGrassmann(out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "NumericGrassmann":
        result = NumericGrassmann.constant(1.0)
        for _ in range(exponent):
            result = result * self
        return result

    def __repr__(self) -> str:
        if not self._terms:
            return "NumericGrassmann(0)"
        bits = [
            f"{v!r}*{i}" if i.indices else f"{v!r}"
            for i, v in sorted(self._terms.items(), key=lambda kv: kv[0].indices)
        ]
        return "NumericGrassmann(" + " + ".join(bits) + ")"


def _coerce(value) -> NumericGrassmann:
    if isinstance(value, NumericGrassmann):
        return value
    if isinstance(value, (int, float, Fraction)):
        return NumericGrassmann.constant(float(value))
    raise TypeError(f"cannot mix NumericGrassmann with {type(value)!r}")


@dataclass(frozen=True)
class SmoothFn:
    """A named smooth function with closed-form derivative evaluation.

    ``derivative(point, orders)`` returns the mixed partial of the given
    multi-degree at the point; it must be exact up to rounding for every order
    the nilpotent Taylor sums can request.
    """

    name: str
    arity: int
    derivative: Callable[[tuple[float, ...], tuple[int, ...]], float]

    def value(self, point: tuple[float, ...]) -> float:
        return self.derivative(point, (0,) * self.arity)


def exp_fn(name: str = "exp") -> SmoothFn:
    return SmoothFn(name, 1, lambda p, r: math.exp(p[0]))


def sin_fn(name: str = "sin") -> SmoothFn:
    cycle = (math.sin, math.cos, lambda x: -math.sin(x), lambda x: -math.cos(x))
    return SmoothFn(name, 1, lambda p, r: cycle[r[0] % 4](p[0]))


def cos_fn(name: str = "cos") -> SmoothFn:
    cycle = (math.cos, lambda x: -math.sin(x), lambda x: -math.cos(x), math.sin)
    return SmoothFn(name, 1, lambda p, r: cycle[r[0] % 4](p[0]))


def polynomial_fn(name: str, poly: SPolynomial, arity: int) -> SmoothFn:
    """Wrap an exact polynomial over variables 1..arity as a smooth function."""

    def derivative(point: tuple[float, ...], orders: tuple[int, ...]) -> float:
        d = poly
        for slot, power in enumerate(orders, start=1):
            for _ in range(power):
                d = d.partial(slot)
                if d.is_zero:
                    return 0.0
        total = 0.0
        for mono, coeff in d.items():
            acc = float(coeff)
            for var, p in mono:
                acc *= point[var - 1] ** p
            total += acc
        return total

    return SmoothFn(name, arity, derivative)


def product_fn(name: str, left: SmoothFn, right: SmoothFn) -> SmoothFn:
    """The pointwise product, differentiated by the general Leibniz rule."""
    if left.arity != right.arity:
        raise ValueError("product factors must share an arity")

    def derivative(point: tuple[float, ...], orders: tuple[int, ...]) -> float:
        total = 0.0
        splits = [range(o + 1) for o in orders]

        def walk(slot: int, taken: tuple[int, ...], weight: float) -> None:
            nonlocal total
            if slot == len(orders):
                rest = tuple(o - t for o, t in zip(orders, taken))
                total += weight * left.derivative(point, taken) * right.derivative(point, rest)
                return
            for t in splits[slot]:
                walk(slot + 1, taken + (t,), weight * math.comb(orders[slot], t))

        walk(0, (), 1.0)
        return total

    return SmoothFn(name, left.arity, derivative)


def eval_taylor(fn: SmoothFn, args: Sequence[NumericGrassmann]) -> NumericGrassmann:
    """Evaluate a smooth function on nilpotent-plus-body arguments.

    The Taylor sum around the vector of bodies terminates exactly when the
    products of the nilpotent parts die out.
    """
    if len(args) != fn.arity:
        raise ValueError(f"{fn.name} takes {fn.arity} arguments, got {len(args)}")
    point = tuple(a.body for a in args)
    nil = [a - a.body for a in args]
    n = fn.arity
    total = NumericGrassmann.constant(fn.derivative(point, (0,) * n))
    frontier: dict[tuple[int, ...], NumericGrassmann] = {
        (0,) * n: NumericGrassmann.constant(1.0)
    }
    while frontier:
        new: dict[tuple[int, ...], NumericGrassmann] = {}
        for r, prod in frontier.items():
            support = next((i for i, v in enumerate(r) if v), n)
            for slot in range(min(support, n - 1) + 1):
                bumped = nil[slot] * prod
                if not bumped.support():
                    continue
                key = tuple(v + (1 if i == slot else 0) for i, v in enumerate(r))
                new[key] = bumped
        for r, prod in new.items():
            weight = fn.derivative(point, r) / _multi_factorial(r)
            if weight:
                total = total + prod * weight
        frontier = new
    return total


def _multi_factorial(orders: Sequence[int]) -> int:
    out = 1
    for o in orders:
        out *= math.factorial(o)
    return out


def resolve_bodies(
    field: Superfield, bindings: Mapping[Symbol, float | Fraction | int]
) -> tuple[float, ...]:
    """Numeric body point of a superfield under the given symbol bindings."""
    by_name = {s.name: float(v) for s, v in bindings.items()}
    point = []
    for atom in field.bodies:
        if isinstance(atom, Symbol):
            if atom.name not in by_name:
                raise MissingBinding(f"body symbol {atom.name!r} is unbound")
            point.append(by_name[atom.name])
        else:
            point.append(float(atom))
    return tuple(point)


def cross_check(
    field: Superfield,
    fn: SmoothFn,
    bindings: Mapping[Symbol, float | Fraction | int],
) -> tuple[NumericGrassmann, NumericGrassmann]:
    """Run the symbolic route and the numeric route and return both results.

    Left: the formal Taylor pullback of the function name, with symbols and
    derivative atoms substituted numerically at the bound body point.  Right:
    the numeric Taylor evaluation of the function on the substituted
    components.  The two agree coefficient-by-coefficient up to rounding.
    """
    if fn.arity != field.dim:
        raise ValueError(f"{fn.name} takes {fn.arity} arguments, field has {field.dim}")
    point = resolve_bodies(field, bindings)
    symbolic = pullback_taylor(fn.name, field)
    ftable = {fn.name: lambda orders: fn.derivative(point, orders)}
    left = NumericGrassmann.from_superscalar(
        substitute_numeric(symbolic, bindings, ftable)
    )
    args = [
        NumericGrassmann.from_superscalar(substitute_numeric(comp, bindings, {}))
        for comp in field.components
    ]
    right = eval_taylor(fn, args)
    return left, right


def coefficients_close(
    left: NumericGrassmann,
    right: NumericGrassmann,
    rel: float = 1e-9,
    abs_floor: float = 1e-12,
) -> bool:
    """Per-coefficient agreement within relative tolerance over an absolute floor."""
    for index in left.support() | right.support():
        a, b = left.coefficient(index), right.coefficient(index)
        if abs(a - b) > max(abs_floor, rel * max(abs(a), abs(b))):
            return False
    return True
