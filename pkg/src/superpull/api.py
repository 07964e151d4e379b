"""Command dispatch shared by the CLI and the HTTP service.

A Request names a command, fixes the generator context (q thetas, L etas) and
symbol declarations, and carries the command's payload as strings in the
shared expression grammar.  ``run`` parses, dispatches to the library, and
returns a Response whose term records are normalized and sorted, so identical
requests always produce identical output.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Mapping

from .algebra import SPolynomial, SuperScalar, Symbol
from .dops import DOperatorContext, SMap
from .errors import ContextError
from .exprs import (
    is_reserved_name,
    parse_scalar,
    parse_spoly,
    parse_target_poly,
    render_scalar,
    structured_terms,
)
from .grassmann import EMPTY, EVEN, ODD, GeneratorSet, MultiIndex
from .numeric import (
    coefficients_close,
    cos_fn,
    cross_check,
    exp_fn,
    polynomial_fn,
    sin_fn,
)
from .pullback import (
    Superfield,
    XiField,
    berezin,
    exp_xi_apply,
    pullback_taylor,
    reconstruct_xi,
)

COMMANDS = (
    "pullback",
    "exp-expand",
    "reconstruct",
    "berezin",
    "dop",
    "ideal-check",
    "chain-check",
    "tq-check",
    "iso",
    "oracle-compare",
)


@dataclass
class Request:
    command: str
    n_theta: int = 0
    n_eta: int = 0
    even: list[str] = field(default_factory=list)
    odd: list[str] = field(default_factory=list)
    payload: dict[str, str] = field(default_factory=dict)


@dataclass
class Response:
    command: str
    terms: list[dict] | None = None
    expr: str | None = None
    value: str | None = None
    boolean: bool | None = None
    lhs: str | None = None
    rhs: str | None = None
    xi: list[dict] | None = None
    oracle: dict | None = None
    diagnostics: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


class _Session:
    """Parsed context and helpers for one request."""

    def __init__(self, request: Request):
        if request.command not in COMMANDS:
            raise ContextError(f"unknown command {request.command!r}")
        if request.n_theta < 0 or request.n_eta < 0:
            raise ContextError("generator counts must be nonnegative")
        self.request = request
        self.generators = GeneratorSet(request.n_theta, request.n_eta)
        self.symbols: dict[str, Symbol] = {}
        for name in request.even:
            self._declare(name, EVEN)
        for name in request.odd:
            self._declare(name, ODD)

    def _declare(self, name: str, parity: int) -> None:
        name = name.strip()
        if not name:
            return
        if is_reserved_name(name):
            raise ContextError(f"{name!r} is reserved notation and cannot be a symbol")
        if name in self.symbols and self.symbols[name].parity != parity:
            raise ContextError(f"{name!r} declared with both parities")
        self.symbols[name] = Symbol(name, parity)

    def need(self, key: str) -> str:
        value = self.request.payload.get(key, "").strip()
        if not value:
            raise ContextError(f"command {self.request.command!r} needs payload field {key!r}")
        return value

    def optional(self, key: str) -> str | None:
        value = self.request.payload.get(key, "").strip()
        return value or None

    def scalar(self, text: str) -> SuperScalar:
        return parse_scalar(text, self.generators, self.symbols)

    def spoly(self, text: str) -> SPolynomial:
        return parse_spoly(text, self.generators)

    def superfield(self, text: str) -> Superfield:
        components = [self.scalar(part) for part in text.split(";") if part.strip()]
        if not components:
            raise ContextError("no superfield components given")
        try:
            return Superfield.from_components(components)
        except ValueError as err:
            raise ContextError(str(err)) from err

    def multi_index(self, text: str) -> MultiIndex:
        text = text.strip()
        if not text:
            return EMPTY
        try:
            return MultiIndex(tuple(int(x) for x in text.split(",")))
        except ValueError as err:
            raise ContextError(f"bad multi-index {text!r}: {err}") from err

    def smap(self, text: str) -> SMap:
        components = {}
        for entry in text.split(";"):
            entry = entry.strip()
            if not entry:
                continue
            if "=" not in entry:
                raise ContextError(f"map entry {entry!r} needs the form s{{...}}=poly")
            lhs, rhs = entry.split("=", 1)
            key_poly = self.spoly(lhs.strip())
            keys = [
                mono[0][0]
                for mono, coeff in key_poly.items()
                if len(mono) == 1 and mono[0][1] == 1 and coeff == 1
            ]
            if len(keys) != 1 or len(list(key_poly.items())) != 1:
                raise ContextError(f"map entry key {lhs.strip()!r} must be one s-variable")
            components[keys[0]] = self.spoly(rhs.strip())
        return SMap(components)

    def bindings(self, text: str) -> dict[Symbol, Fraction]:
        out: dict[Symbol, Fraction] = {}
        for entry in text.split(";"):
            entry = entry.strip()
            if not entry:
                continue
            if "=" not in entry:
                raise ContextError(f"binding {entry!r} needs the form name=value")
            name, value = entry.split("=", 1)
            name = name.strip()
            if name not in self.symbols:
                raise ContextError(f"binding for undeclared symbol {name!r}")
            try:
                out[self.symbols[name]] = Fraction(value.strip())
            except ValueError as err:
                raise ContextError(f"bad numeric value in {entry!r}") from err
        return out

    def scalar_response(self, value: SuperScalar, **extra) -> Response:
        return Response(
            command=self.request.command,
            terms=structured_terms(value, self.generators),
            expr=render_scalar(value, self.generators),
            **extra,
        )


def run(request: Request) -> Response:
    """Execute one request; raises ParseError / ContextError / domain errors."""
    session = _Session(request)
    handler = _HANDLERS[request.command]
    return handler(session)


def _cmd_pullback(s: _Session) -> Response:
    field = s.superfield(s.need("field"))
    fname = s.need("f")
    return s.scalar_response(pullback_taylor(fname, field))


def _cmd_exp_expand(s: _Session) -> Response:
    fname = s.need("f")
    entries: dict[MultiIndex, tuple[SuperScalar, ...]] = {}
    dim = int(s.optional("dim") or 0)
    text = s.optional("xi") or ""
    for entry in text.split(";"):
        entry = entry.strip()
        if not entry:
            continue
        if "=" not in entry:
            raise ContextError(f"xi entry {entry!r} needs the form s{{...}}=expr|expr")
        lhs, rhs = entry.split("=", 1)
        key_poly = parse_spoly(lhs.strip(), s.generators)
        keys = [
            mono[0][0]
            for mono, coeff in key_poly.items()
            if len(mono) == 1 and mono[0][1] == 1 and coeff == 1
        ]
        if len(keys) != 1:
            raise ContextError(f"xi entry key {lhs.strip()!r} must be one s-variable")
        vector = tuple(s.scalar(part) for part in rhs.split("|"))
        if dim == 0:
            dim = len(vector)
        if len(vector) != dim:
            raise ContextError("xi coefficient vectors must share one length")
        entries[keys[0]] = vector
    if dim == 0:
        dim = 1
    xi = XiField(dim, entries)
    return s.scalar_response(exp_xi_apply(xi, fname))


def _cmd_reconstruct(s: _Session) -> Response:
    field = s.superfield(s.need("field"))
    xi = reconstruct_xi(field)
    records = []
    for index in sorted(xi.coefficients):
        for slot, entry in enumerate(xi.coefficients[index]):
            records.append(
                {
                    "index": list(index.indices),
                    "component": slot,
                    "expr": render_scalar(entry, s.generators),
                    "terms": structured_terms(entry, s.generators),
                }
            )
    return Response(command=s.request.command, xi=records)


def _cmd_berezin(s: _Session) -> Response:
    value = s.scalar(s.need("expr"))
    block_text = s.optional("vars")
    block = (
        s.multi_index(block_text)
        if block_text is not None
        else s.generators.theta_block()
    )
    return s.scalar_response(berezin(value, block))


def _cmd_dop(s: _Session) -> Response:
    context = DOperatorContext(s.generators)
    index = s.multi_index(s.request.payload.get("index", ""))
    poly = s.spoly(s.need("poly"))
    value = context.d_op(index, poly)
    return Response(command=s.request.command, value=str(value))


def _cmd_ideal_check(s: _Session) -> Response:
    context = DOperatorContext(s.generators)
    poly = s.spoly(s.need("poly"))
    return Response(command=s.request.command, boolean=context.ideal_member(poly))


def _cmd_chain_check(s: _Session) -> Response:
    context = DOperatorContext(s.generators)
    outer = s.spoly(s.need("f"))
    inner = s.smap(s.need("map"))
    index = s.multi_index(s.request.payload.get("index", ""))
    lhs, rhs = context.chain_rule_check(outer, inner, index)
    return Response(
        command=s.request.command,
        lhs=str(lhs),
        rhs=str(rhs),
        boolean=(lhs == rhs),
    )


def _cmd_tq_check(s: _Session) -> Response:
    context = DOperatorContext(s.generators)
    candidate = s.smap(s.need("map"))
    return Response(command=s.request.command, boolean=context.tq_member(candidate))


def _cmd_iso(s: _Session) -> Response:
    context = DOperatorContext(s.generators)
    poly = s.spoly(s.need("poly"))
    return s.scalar_response(context.iso_to_grassmann(poly))


_BUILTIN_FNS = {"exp": exp_fn, "sin": sin_fn, "cos": cos_fn}


def _cmd_oracle_compare(s: _Session) -> Response:
    field = s.superfield(s.need("field"))
    fname = s.optional("f")
    fpoly = s.optional("fpoly")
    if fname and fname in _BUILTIN_FNS:
        if field.dim != 1:
            raise ContextError(f"{fname} is unary; field has {field.dim} components")
        fn = _BUILTIN_FNS[fname]()
    elif fpoly:
        poly = parse_target_poly(fpoly, field.dim)
        fn = polynomial_fn("poly", poly, field.dim)
    else:
        raise ContextError(
            "oracle-compare needs f in {exp,sin,cos} or an fpoly expression"
        )
    bindings = s.bindings(s.optional("bind") or "")
    left, right = cross_check(field, fn, bindings)
    entries = []
    for index in sorted(left.support() | right.support(), key=lambda ix: ix.indices):
        a, b = left.coefficient(index), right.coefficient(index)
        entries.append(
            {
                "gens": list(index.indices),
                "symbolic": a,
                "numeric": b,
                "abs_diff": abs(a - b),
            }
        )
    agree = coefficients_close(left, right)
    report = {
        "entries": entries,
        "agree": agree,
        "max_abs_diff": max((e["abs_diff"] for e in entries), default=0.0),
    }
    return Response(command=s.request.command, boolean=agree, oracle=report)


_HANDLERS = {
    "pullback": _cmd_pullback,
    "exp-expand": _cmd_exp_expand,
    "reconstruct": _cmd_reconstruct,
    "berezin": _cmd_berezin,
    "dop": _cmd_dop,
    "ideal-check": _cmd_ideal_check,
    "chain-check": _cmd_chain_check,
    "tq-check": _cmd_tq_check,
    "iso": _cmd_iso,
    "oracle-compare": _cmd_oracle_compare,
}
