"""The coefficient world: a free supercommutative algebra over declared symbols.

A SuperScalar is a finite sum of terms.  Each term is a rational coefficient
times a normal-form monomial built from four commuting-or-anticommuting kinds
of factors:

  * even symbols   -- opaque commuting unknowns (powers allowed),
  * odd symbols    -- anticommuting unknowns (each squares to zero),
  * generators     -- the anticommuting generators of the ambient context,
  * derivative atoms -- formal values D[r]f of a named smooth function's
    partial derivatives at the relevant base point (even, powers allowed).

The normal form orders the odd part of every monomial as generators ascending
followed by odd symbol names ascending, with the sign of the reordering folded
into the coefficient, so equality of SuperScalars is plain dictionary equality.

SPolynomial is the commutative companion: an exact sparse polynomial over
hashable variable labels with Fraction coefficients, used for functions of the
even coordinates indexed by even multi-indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterator, Mapping, NamedTuple, Sequence

from .errors import MissingBinding
from .grassmann import EMPTY, EVEN, ODD, MultiIndex, sort_with_sign

Rational = int | Fraction
Numeric = int | float | Fraction


@dataclass(frozen=True)
class Symbol:
    """A named unknown with a fixed parity."""

    name: str
    parity: int = EVEN

    def __post_init__(self):
        if self.parity not in (EVEN, ODD):
            raise ValueError(f"parity must be 0 or 1, got {self.parity!r}")
        if not self.name or not self.name[0].isalpha():
            raise ValueError(f"symbol name must start with a letter, got {self.name!r}")

    @property
    def is_odd(self) -> bool:
        return self.parity == ODD


@dataclass(frozen=True)
class FuncDeriv:
    """The formal value of one partial derivative of a named function.

    ``orders`` is the derivative multi-degree, one entry per argument of the
    function, so the arity is implicit in its length.  The atom is even and
    never expands further; products only accumulate these as factors.
    """

    fname: str
    orders: tuple[int, ...]

    def __post_init__(self):
        if not self.orders:
            raise ValueError("a function must have at least one argument")
        if any(o < 0 for o in self.orders):
            raise ValueError(f"derivative orders must be nonnegative, got {self.orders}")

    @property
    def arity(self) -> int:
        return len(self.orders)

    @property
    def total_order(self) -> int:
        return sum(self.orders)

    def bump(self, slot: int) -> "FuncDeriv":
        """One more derivative in the given argument slot (0-based)."""
        orders = list(self.orders)
        orders[slot] += 1
        return FuncDeriv(self.fname, tuple(orders))

    def sort_key(self):
        return (self.fname, len(self.orders), self.orders)


class Term(NamedTuple):
    """Normal-form monomial key: even symbols, odd symbols, generators, derivative atoms."""

    evens: tuple[tuple[str, int], ...]
    odds: tuple[str, ...]
    gens: MultiIndex
    derivs: tuple[tuple[FuncDeriv, int], ...]

    @property
    def parity(self) -> int:
        return (len(self.odds) + len(self.gens)) % 2

    @property
    def has_odd_factor(self) -> bool:
        return bool(self.odds) or bool(self.gens.indices)

    def sort_key(self):
        return (
            self.gens.indices,
            self.odds,
            self.evens,
            tuple((fd.sort_key(), p) for fd, p in self.derivs),
        )


_UNIT_TERM = Term((), (), EMPTY, ())


def _merge_powers(a, b):
    out = dict(a)
    for key, p in b:
        out[key] = out.get(key, 0) + p
    return out


def _power_tuple(d: dict, key=None) -> tuple:
    items = [(k, p) for k, p in d.items() if p]
    items.sort(key=(lambda kv: key(kv[0])) if key else (lambda kv: kv[0]))
    return tuple(items)


def _odd_word(term: Term) -> list[tuple[int, object]]:
    # generators sort before odd symbols; within a kind, by index resp. name
    word = [(0, k) for k in term.gens.indices]
    word.extend((1, name) for name in term.odds)
    return word


def _mul_terms(a: Term, b: Term) -> tuple[int, Term] | None:
    """Multiply two normal-form monomials; None when the product vanishes."""
    sign, word = sort_with_sign(_odd_word(a) + _odd_word(b))
    if sign == 0:
        return None
    gens = MultiIndex(tuple(k for kind, k in word if kind == 0))
    odds = tuple(name for kind, name in word if kind == 1)
    evens = _power_tuple(_merge_powers(a.evens, b.evens))
    derivs = _power_tuple(_merge_powers(a.derivs, b.derivs), key=FuncDeriv.sort_key)
    return sign, Term(evens, odds, gens, derivs)


class SuperScalar:
    """A normalized element of the free supercommutative algebra.

    Stored as a map from Term to coefficient with no zero entries.  All
    arithmetic returns new values; instances are never mutated after
    construction and can be shared freely.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Term, Numeric] | None = None):
        data: dict[Term, Numeric] = {}
        if terms:
            for term, coeff in terms.items():
                if isinstance(coeff, int):
                    coeff = Fraction(coeff)
                if coeff != 0:
                    data[term] = coeff
        self._terms = data

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> "SuperScalar":
        return cls()

    @classmethod
    def one(cls) -> "SuperScalar":
        return cls({_UNIT_TERM: Fraction(1)})

    @classmethod
    def from_rational(cls, value: Numeric) -> "SuperScalar":
        return cls({_UNIT_TERM: value})

    @classmethod
    def from_symbol(cls, symbol: Symbol) -> "SuperScalar":
        if symbol.is_odd:
            return cls({Term((), (symbol.name,), EMPTY, ()): Fraction(1)})
        return cls({Term(((symbol.name, 1),), (), EMPTY, ()): Fraction(1)})

    @classmethod
    def generator(cls, index: int) -> "SuperScalar":
        return cls({Term((), (), MultiIndex.of(index), ()): Fraction(1)})

    @classmethod
    def generators(cls, index: MultiIndex) -> "SuperScalar":
        return cls({Term((), (), index, ()): Fraction(1)})

    @classmethod
    def func_deriv(cls, atom: FuncDeriv) -> "SuperScalar":
        return cls({Term((), (), EMPTY, ((atom, 1),)): Fraction(1)})

    # -- inspection ---------------------------------------------------

    def items(self) -> Iterator[tuple[Term, Numeric]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def parity(self) -> int | None:
        """0 or 1 for homogeneous values (0 for zero), None when mixed."""
        seen = {term.parity for term in self._terms}
        if not seen:
            return EVEN
        if len(seen) == 1:
            return seen.pop()
        return None

    def is_nilpotent(self) -> bool:
        """True when every term carries at least one generator or odd symbol."""
        return all(term.has_odd_factor for term in self._terms)

    def constant_value(self) -> Numeric | None:
        """The value when this is a pure number; None otherwise."""
        if not self._terms:
            return Fraction(0)
        if len(self._terms) == 1 and _UNIT_TERM in self._terms:
            return self._terms[_UNIT_TERM]
        return None

    def coefficient_of_gens(self, index: MultiIndex) -> "SuperScalar":
        """The generator-free left coefficient of the given generator monomial."""
        picked = {
            Term(t.evens, t.odds, EMPTY, t.derivs): c
            for t, c in self._terms.items()
            if t.gens == index
        }
        return SuperScalar(picked)

    def generator_part(self, index: MultiIndex) -> "SuperScalar":
        """The sum of terms whose generator monomial equals the given index."""
        return SuperScalar({t: c for t, c in self._terms.items() if t.gens == index})

    def generator_support(self) -> set[MultiIndex]:
        return {t.gens for t in self._terms}

    def free_of_generators(self) -> bool:
        return all(t.gens == EMPTY for t in self._terms)

    def free_of_derivs(self) -> bool:
        return all(not t.derivs for t in self._terms)

    # -- arithmetic ---------------------------------------------------

    @staticmethod
    def _coerce(value) -> "SuperScalar | None":
        if isinstance(value, SuperScalar):
            return value
        if isinstance(value, (int, Fraction, float)):
            return SuperScalar.from_rational(value)
        return None

    def __add__(self, other) -> "SuperScalar":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        out = dict(self._terms)
        for term, coeff in rhs._terms.items():
            new = out.get(term, 0) + coeff
            if new == 0:
                out.pop(term, None)
            else:
                out[term] = new
        result = SuperScalar.__new__(SuperScalar)
        result._terms = out
        return result

    __radd__ = __add__

    def __neg__(self) -> "SuperScalar":
        result = SuperScalar.__new__(SuperScalar)
        result._terms = {t: -c for t, c in self._terms.items()}
        return result

    def __sub__(self, other) -> "SuperScalar":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other) -> "SuperScalar":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return rhs + (-self)

    def __mul__(self, other) -> "SuperScalar":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        out: dict[Term, Numeric] = {}
        for ta, ca in self._terms.items():
            for tb, cb in rhs._terms.items():
                hit = _mul_terms(ta, tb)
                if hit is None:
                    continue
                sign, term = hit
                coeff = out.get(term, 0) + sign * ca * cb
                if coeff == 0:
                    out.pop(term, None)
                else:
                    out[term] = coeff
        result = SuperScalar.__new__(SuperScalar)
        result._terms = out
        return result

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "SuperScalar":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = SuperScalar.one()
        for _ in range(exponent):
            result = result * self
            if result.is_zero:
                break
        return result

    def __eq__(self, other) -> bool:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self._terms == rhs._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return "SuperScalar(0)"
        parts = []
        for term, coeff in sorted(self._terms.items(), key=lambda kv: kv[0].sort_key()):
            bits = [str(coeff)]
            bits.extend(f"{n}^{p}" if p > 1 else n for n, p in term.evens)
            bits.extend(f"g{k}" for k in term.gens.indices)
            bits.extend(term.odds)
            bits.extend(
                f"D{list(fd.orders)}{fd.fname}" + (f"^{p}" if p > 1 else "")
                for fd, p in term.derivs
            )
            parts.append("*".join(bits))
        return "SuperScalar(" + " + ".join(parts) + ")"

    # -- derivations on derivative atoms -------------------------------

    def func_partial(self, slot: int) -> "SuperScalar":
        """Formally differentiate every derivative atom in argument ``slot``.

        Symbols and generators are constants for this derivation; the atom
        D[r]f becomes D[r + e_slot]f with the product rule applied across
        repeated atoms.
        """
        out: dict[Term, Numeric] = {}
        for term, coeff in self._terms.items():
            for i, (atom, power) in enumerate(term.derivs):
                lowered = dict(term.derivs)
                if power == 1:
                    del lowered[atom]
                else:
                    lowered[atom] = power - 1
                bumped = atom.bump(slot)
                lowered[bumped] = lowered.get(bumped, 0) + 1
                new_term = Term(
                    term.evens,
                    term.odds,
                    term.gens,
                    _power_tuple(lowered, key=FuncDeriv.sort_key),
                )
                new = out.get(new_term, 0) + coeff * power
                if new == 0:
                    out.pop(new_term, None)
                else:
                    out[new_term] = new
        return SuperScalar(out)


def substitute_numeric(
    value: SuperScalar,
    bindings: Mapping[Symbol, Numeric],
    ftable: Mapping[str, Callable[[tuple[int, ...]], Numeric]],
) -> SuperScalar:
    """Replace symbols by numbers and derivative atoms by evaluated derivatives.

    ``bindings`` maps symbols to numeric values; an odd symbol may only be
    bound to zero.  ``ftable`` maps each function name to an evaluator that
    receives the derivative multi-degree and returns the derivative's value at
    the base point the caller has already fixed.  Generators are retained.
    Raises MissingBinding when a symbol or function name is not covered.
    """
    by_name: dict[str, Numeric] = {}
    for symbol, val in bindings.items():
        if symbol.is_odd and val != 0:
            raise ValueError(
                f"odd symbol {symbol.name!r} can only be bound to 0; "
                "model odd data with auxiliary generators instead"
            )
        by_name[symbol.name] = val
    out = SuperScalar.zero()
    for term, coeff in value.items():
        factor = coeff
        for name, power in term.evens:
            if name not in by_name:
                raise MissingBinding(f"symbol {name!r} is unbound")
            factor = factor * by_name[name] ** power
        dead = False
        for name in term.odds:
            if name not in by_name:
                raise MissingBinding(f"odd symbol {name!r} is unbound")
            dead = True  # only zero is allowed above
        if dead:
            continue
        for atom, power in term.derivs:
            if atom.fname not in ftable:
                raise MissingBinding(f"function {atom.fname!r} is unbound")
            factor = factor * ftable[atom.fname](atom.orders) ** power
        out = out + SuperScalar({Term((), (), term.gens, ()): 1}) * factor
    return out


# ---------------------------------------------------------------------------
# Commutative exact polynomials
# ---------------------------------------------------------------------------

Monomial = tuple[tuple[Hashable, int], ...]


def _mono_sorted(powers: dict) -> Monomial:
    items = [(v, p) for v, p in powers.items() if p]
    items.sort(key=lambda vp: _var_key(vp[0]))
    return tuple(items)


def _var_key(var):
    if isinstance(var, MultiIndex):
        return (1, var.indices)
    return (0, var)


class SPolynomial:
    """Exact sparse polynomial over hashable variable labels.

    The labels are the even coordinates (multi-indices) in the main use, or
    plain integers when the polynomial describes a function on an ordinary
    coordinate target.  Coefficients are Fractions and all arithmetic is
    exact.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Rational] | None = None):
        data: dict[Monomial, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                coeff = Fraction(coeff)
                if coeff != 0:
                    data[mono] = coeff
        self._terms = data

    @classmethod
    def zero(cls) -> "SPolynomial":
        return cls()

    @classmethod
    def constant(cls, value: Rational) -> "SPolynomial":
        return cls({(): Fraction(value)})

    @classmethod
    def variable(cls, var: Hashable) -> "SPolynomial":
        return cls({((var, 1),): Fraction(1)})

    def items(self):
        return iter(self._terms.items())

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def variables(self) -> set:
        out = set()
        for mono in self._terms:
            out.update(v for v, _ in mono)
        return out

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(p for _, p in mono) for mono in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    @staticmethod
    def _coerce(value) -> "SPolynomial | None":
        if isinstance(value, SPolynomial):
            return value
        if isinstance(value, (int, Fraction)):
            return SPolynomial.constant(value)
        return None

    def __add__(self, other) -> "SPolynomial":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        out = dict(self._terms)
        for mono, coeff in rhs._terms.items():
            new = out.get(mono, Fraction(0)) + coeff
            if new == 0:
                out.pop(mono, None)
            else:
                out[mono] = new
        result = SPolynomial.__new__(SPolynomial)
        result._terms = out
        return result

    __radd__ = __add__

    def __neg__(self) -> "SPolynomial":
        result = SPolynomial.__new__(SPolynomial)
        result._terms = {m: -c for m, c in self._terms.items()}
        return result

    def __sub__(self, other) -> "SPolynomial":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other) -> "SPolynomial":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return rhs + (-self)

    def __mul__(self, other) -> "SPolynomial":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        out: dict[Monomial, Fraction] = {}
        for ma, ca in self._terms.items():
            for mb, cb in rhs._terms.items():
                mono = _mono_sorted(_merge_powers(ma, mb))
                new = out.get(mono, Fraction(0)) + ca * cb
                if new == 0:
                    out.pop(mono, None)
                else:
                    out[mono] = new
        result = SPolynomial.__new__(SPolynomial)
        result._terms = out
        return result

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "SPolynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = SPolynomial.constant(1)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self._terms == rhs._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return "SPolynomial(0)"
        bits = []
        for mono, coeff in sorted(self._terms.items(), key=lambda kv: tuple(map(_var_key, (v for v, _ in kv[0])))):
            factors = [str(coeff)]
            factors.extend(f"{v}^{p}" if p > 1 else str(v) for v, p in mono)
            bits.append("*".join(factors))
        return "SPolynomial(" + " + ".join(bits) + ")"

    def partial(self, var: Hashable) -> "SPolynomial":
        """Exact formal partial derivative in one variable."""
        out: dict[Monomial, Fraction] = {}
        for mono, coeff in self._terms.items():
            powers = dict(mono)
            p = powers.get(var, 0)
            if not p:
                continue
            if p == 1:
                del powers[var]
            else:
                powers[var] = p - 1
            key = _mono_sorted(powers)
            new = out.get(key, Fraction(0)) + coeff * p
            if new == 0:
                out.pop(key, None)
            else:
                out[key] = new
        return SPolynomial(out)

    def eval(self, values: Mapping[Hashable, object]):
        """Evaluate with ring values (Fractions, SuperScalars, polynomials).

        Every variable must be covered.  The result type follows the values.
        """
        total = None
        for mono, coeff in self._terms.items():
            acc = coeff
            for var, power in mono:
                if var not in values:
                    raise KeyError(f"no value for variable {var!r}")
                acc = acc * values[var] ** power
            total = acc if total is None else total + acc
        if total is None:
            return Fraction(0)
        return total

    def subs(self, mapping: Mapping[Hashable, "SPolynomial"]) -> "SPolynomial":
        """Substitute polynomials for variables; unmapped variables persist."""
        total = SPolynomial.zero()
        for mono, coeff in self._terms.items():
            acc = SPolynomial.constant(coeff)
            for var, power in mono:
                acc = acc * mapping.get(var, SPolynomial.variable(var)) ** power
            total = total + acc
        return total
