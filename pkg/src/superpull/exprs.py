"""Expression grammar shared by the CLI and the service.

Three entry points parse the same surface syntax into different carriers:

  parse_scalar       -> SuperScalar over generators, declared symbols, and
                        derivative atoms (f, f', D[1,0]g, ...)
  parse_spoly        -> SPolynomial over the even coordinates s{i,j,...}
  parse_target_poly  -> SPolynomial over ordinary target variables u1..un

``theta<k>``, ``eta<k>``, ``s{...}``, ``u<k>`` and the D[...] prefix are
reserved.  Identifiers declared with a parity are symbols; any other bare
identifier denotes a function atom at derivative order zero, and primes or
D[...] select higher derivatives.  Rendering inverts the parse: the printed
normal form reads back to the same value.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping

from .algebra import FuncDeriv, SPolynomial, SuperScalar, Symbol
from .errors import ContextError, ParseError
from .grassmann import GeneratorSet, MultiIndex

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<svar>s\{\s*\d+(?:\s*,\s*\d+)*\s*\})
  | (?P<deriv>D\[\s*\d+(?:\s*,\s*\d+)*\s*\])
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<number>\d+)
  | (?P<primes>'+)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_RESERVED_NAME = re.compile(r"^(theta\d+|eta\d+|u\d*|D)$")


def is_reserved_name(name: str) -> bool:
    return bool(_RESERVED_NAME.match(name))


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind: str, text: str, pos: int):
        self.kind = kind
        self.text = text
        self.pos = pos


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


_GENERATOR_RE = re.compile(r"^(theta|eta)(\d+)$")
_TARGET_RE = re.compile(r"^u(\d*)$")


class _Parser:
    """Recursive descent over the shared token stream.

    ``mode`` selects the atom set: "scalar" builds SuperScalars, "spoly"
    polynomials in the even coordinates, "target" polynomials in u-variables.
    """

    def __init__(
        self,
        text: str,
        mode: str,
        generators: GeneratorSet | None = None,
        symbols: Mapping[str, Symbol] | None = None,
        arity: int = 1,
    ):
        self.tokens = _tokenize(text)
        self.at = 0
        self.mode = mode
        self.generators = generators
        self.symbols = symbols or {}
        self.arity = arity

    def peek(self) -> _Token:
        return self.tokens[self.at]

    def next(self) -> _Token:
        tok = self.tokens[self.at]
        self.at += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {what}, found {tok.text or 'end of input'!r}", tok.pos)
        return tok

    def parse(self):
        value = self.sum()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected trailing input {tok.text!r}", tok.pos)
        return value

    def sum(self):
        negate = False
        if self.peek().kind == "op" and self.peek().text == "-":
            self.next()
            negate = True
        value = self.product()
        if negate:
            value = -value
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.next().text
            rhs = self.product()
            value = value + rhs if op == "+" else value - rhs
        return value

    def product(self):
        value = self.power()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text == "*":
                self.next()
                value = value * self.power()
            elif tok.kind == "op" and tok.text == "/":
                self.next()
                denom = self.expect("number", "an integer denominator")
                d = int(denom.text)
                if d == 0:
                    raise ParseError("division by zero", denom.pos)
                value = value * Fraction(1, d)
            else:
                return value

    def power(self):
        value = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.next()
            exponent = self.expect("number", "an integer exponent")
            value = value ** int(exponent.text)
        return value

    def atom(self):
        tok = self.next()
        if tok.kind == "op" and tok.text == "(":
            inner = self.sum()
            closing = self.next()
            if not (closing.kind == "op" and closing.text == ")"):
                raise ParseError("expected ')'", closing.pos)
            return inner
        if tok.kind == "number":
            return self._constant(Fraction(int(tok.text)))
        if tok.kind == "svar":
            return self._svar(tok)
        if tok.kind == "deriv":
            return self._deriv(tok)
        if tok.kind == "name":
            return self._name(tok)
        raise ParseError(f"unexpected {tok.text or 'end of input'!r}", tok.pos)

    def _constant(self, value: Fraction):
        if self.mode == "scalar":
            return SuperScalar.from_rational(value)
        return SPolynomial.constant(value)

    def _svar(self, tok: _Token):
        if self.mode != "spoly":
            raise ParseError("s-variables are only valid in polynomial expressions", tok.pos)
        numbers = [int(x) for x in re.findall(r"\d+", tok.text)]
        for a, b in zip(numbers, numbers[1:]):
            if a >= b:
                raise ParseError(f"indices in {tok.text} must be strictly increasing", tok.pos)
        if len(numbers) % 2:
            raise ParseError(f"{tok.text} must have even degree", tok.pos)
        if self.generators and numbers and numbers[-1] > self.generators.total:
            raise ContextError(
                f"{tok.text} refers past the {self.generators.total} declared generators"
            )
        return SPolynomial.variable(MultiIndex(tuple(numbers)))

    def _deriv(self, tok: _Token):
        if self.mode != "scalar":
            raise ParseError("derivative atoms are only valid in scalar expressions", tok.pos)
        orders = tuple(int(x) for x in re.findall(r"\d+", tok.text))
        name = self.expect("name", "a function name after D[...]")
        if name.text in self.symbols:
            raise ParseError(f"{name.text!r} is a declared symbol, not a function", name.pos)
        return SuperScalar.func_deriv(FuncDeriv(name.text, orders))

    def _name(self, tok: _Token):
        gen_match = _GENERATOR_RE.match(tok.text)
        if gen_match:
            if self.mode != "scalar":
                raise ParseError("generators are only valid in scalar expressions", tok.pos)
            if self.generators is None:
                raise ContextError("no generator context declared")
            kind, num = gen_match.group(1), int(gen_match.group(2))
            if num < 1:
                raise ParseError(f"bad generator {tok.text}", tok.pos)
            if kind == "theta":
                if num > self.generators.n_theta:
                    raise ContextError(
                        f"theta{num} outside context with {self.generators.n_theta} thetas"
                    )
                return SuperScalar.generator(num)
            if num > self.generators.n_eta:
                raise ContextError(f"eta{num} outside context with {self.generators.n_eta} etas")
            return SuperScalar.generator(self.generators.n_theta + num)

        target_match = _TARGET_RE.match(tok.text)
        if self.mode == "target":
            if not target_match:
                raise ParseError(f"expected a u-variable, found {tok.text!r}", tok.pos)
            slot = int(target_match.group(1)) if target_match.group(1) else 1
            if not 1 <= slot <= self.arity:
                raise ContextError(f"{tok.text} outside target of dimension {self.arity}")
            return SPolynomial.variable(slot)

        if self.mode != "scalar":
            raise ParseError(f"unexpected identifier {tok.text!r}", tok.pos)

        if self.peek().kind == "primes":
            primes = self.next()
            if tok.text in self.symbols:
                raise ParseError(f"{tok.text!r} is a declared symbol, not a function", tok.pos)
            return SuperScalar.func_deriv(FuncDeriv(tok.text, (len(primes.text),)))
        if tok.text in self.symbols:
            return SuperScalar.from_symbol(self.symbols[tok.text])
        # any other bare identifier is a function atom at derivative order zero
        return SuperScalar.func_deriv(FuncDeriv(tok.text, (0,)))


def parse_scalar(
    text: str, generators: GeneratorSet, symbols: Mapping[str, Symbol]
) -> SuperScalar:
    return _Parser(text, "scalar", generators, symbols).parse()


def parse_spoly(text: str, generators: GeneratorSet | None = None) -> SPolynomial:
    return _Parser(text, "spoly", generators).parse()


def parse_target_poly(text: str, arity: int) -> SPolynomial:
    return _Parser(text, "target", arity=arity).parse()


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def render_funcderiv(atom: FuncDeriv) -> str:
    if atom.arity == 1:
        k = atom.orders[0]
        if k == 0:
            return atom.fname
        if k <= 3:
            return atom.fname + "'" * k
    return "D[" + ",".join(str(o) for o in atom.orders) + "]" + atom.fname


def _render_term(term, coeff, generators: GeneratorSet) -> tuple[int, str]:
    """One monomial as (sign, bare product string); the caller places signs."""
    parts = []
    for atom, power in term.derivs:
        piece = render_funcderiv(atom)
        parts.append(f"{piece}^{power}" if power > 1 else piece)
    for name, power in term.evens:
        parts.append(f"{name}^{power}" if power > 1 else name)
    parts.extend(generators.name(k) for k in term.gens.indices)
    parts.extend(term.odds)
    sign = 1
    if isinstance(coeff, Fraction) and coeff < 0:
        sign, coeff = -1, -coeff
    elif isinstance(coeff, float) and coeff < 0:
        sign, coeff = -1, -coeff
    if not parts:
        return sign, str(coeff)
    if coeff == 1:
        return sign, "*".join(parts)
    return sign, str(coeff) + "*" + "*".join(parts)


def render_scalar(value: SuperScalar, generators: GeneratorSet) -> str:
    if value.is_zero:
        return "0"
    rendered = []
    for term, coeff in sorted(value.items(), key=lambda kv: kv[0].sort_key()):
        rendered.append(_render_term(term, coeff, generators))
    head_sign, head = rendered[0]
    out = ("-" if head_sign < 0 else "") + head
    for sign, body in rendered[1:]:
        out += (" - " if sign < 0 else " + ") + body
    return out


def _render_svar(var) -> str:
    if isinstance(var, MultiIndex):
        return "s{" + ",".join(str(k) for k in var.indices) + "}"
    return f"u{var}"


def render_spoly(poly: SPolynomial) -> str:
    if poly.is_zero:
        return "0"
    entries = []
    for mono, coeff in sorted(
        poly.items(), key=lambda kv: tuple((str(v), p) for v, p in kv[0])
    ):
        parts = [
            f"{_render_svar(v)}^{p}" if p > 1 else _render_svar(v) for v, p in mono
        ]
        sign = 1
        if coeff < 0:
            sign, coeff = -1, -coeff
        if not parts:
            entries.append((sign, str(coeff)))
        elif coeff == 1:
            entries.append((sign, "*".join(parts)))
        else:
            entries.append((sign, str(coeff) + "*" + "*".join(parts)))
    head_sign, head = entries[0]
    out = ("-" if head_sign < 0 else "") + head
    for sign, body in entries[1:]:
        out += (" - " if sign < 0 else " + ") + body
    return out


def structured_terms(value: SuperScalar, generators: GeneratorSet) -> list[dict]:
    """Response records: one entry per term, sorted by generator multi-index."""
    out = []
    for term, coeff in sorted(value.items(), key=lambda kv: kv[0].sort_key()):
        out.append(
            {
                "gens": list(term.gens.indices),
                "gen_names": [generators.name(k) for k in term.gens.indices],
                "odd": list(term.odds),
                "even": [[name, power] for name, power in term.evens],
                "derivs": [
                    {"name": fd.fname, "orders": list(fd.orders), "power": power}
                    for fd, power in term.derivs
                ],
                "coeff": str(coeff),
            }
        )
    return out
