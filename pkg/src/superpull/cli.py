"""Command-line client for the pullback calculus.

Runs each request in-process by default; with --server URL the same request
is POSTed to a running service instance instead.  Exit codes: 0 on success,
2 on parse errors, 3 on context or domain errors.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import api
from .errors import ParseError, SuperPullError

TEXT_FIELDS = ("expr", "value", "lhs", "rhs", "boolean")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="superpull",
        description="Sign-exact pullback calculus for superspace maps into a chart",
    )
    parser.add_argument("--server", help="base URL of a running service to send the request to")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--q", type=int, default=0, help="number of theta generators")
        p.add_argument("--L", type=int, default=0, help="number of auxiliary eta generators")
        p.add_argument("--even", default="", help="comma-separated even symbol names")
        p.add_argument("--odd", default="", help="comma-separated odd symbol names")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("pullback", help="Taylor pullback of a function through a superfield")
    common(p)
    p.add_argument("--field", action="append", required=True, help="component expression (repeat for vector targets)")
    p.add_argument("--f", required=True, help="function name")

    p = sub.add_parser("exp-expand", help="expand the exponential of a coefficient field")
    common(p)
    p.add_argument("--xi", default="", help="entries like 's{1,2}=a|b; s{3,4}=c|d'")
    p.add_argument("--f", required=True, help="function name")
    p.add_argument("--dim", type=int, default=0, help="target dimension when --xi is empty")

    p = sub.add_parser("reconstruct", help="read coefficient vectors off a superfield")
    common(p)
    p.add_argument("--field", action="append", required=True)

    p = sub.add_parser("berezin", help="extract the coefficient of a generator block")
    common(p)
    p.add_argument("--expr", required=True, help="expression ('-' reads stdin)")
    p.add_argument("--vars", default=None, help="comma-separated block, default all thetas")

    p = sub.add_parser("dop", help="evaluate the operator of an even multi-index at 0")
    common(p)
    p.add_argument("--index", default="", help="comma-separated even multi-index")
    p.add_argument("--poly", required=True, help="polynomial in s-variables")

    p = sub.add_parser("ideal-check", help="membership in the kernel ideal")
    common(p)
    p.add_argument("--poly", required=True)

    p = sub.add_parser("chain-check", help="both sides of the chain rule through a map")
    common(p)
    p.add_argument("--f", required=True, help="outer polynomial in s-variables")
    p.add_argument("--map", required=True, help="entries like 's{1,2}=poly; ...'")
    p.add_argument("--index", default="")

    p = sub.add_parser("tq-check", help="origin-fixing identity-jet membership")
    common(p)
    p.add_argument("--map", required=True)

    p = sub.add_parser("iso", help="image in the even generator algebra")
    common(p)
    p.add_argument("--poly", required=True)

    p = sub.add_parser("oracle-compare", help="symbolic versus numeric pullback")
    common(p)
    p.add_argument("--field", action="append", required=True)
    p.add_argument("--f", default="", help="builtin function: exp, sin, cos")
    p.add_argument("--fpoly", default="", help="polynomial in u-variables")
    p.add_argument("--bind", default="", help="bindings like 'phi=1; F=2'")

    return parser


_PAYLOAD_KEYS = {
    "pullback": [("field", "field"), ("f", "f")],
    "exp-expand": [("xi", "xi"), ("f", "f"), ("dim", "dim")],
    "reconstruct": [("field", "field")],
    "berezin": [("expr", "expr"), ("vars", "vars")],
    "dop": [("index", "index"), ("poly", "poly")],
    "ideal-check": [("poly", "poly")],
    "chain-check": [("f", "f"), ("map", "map"), ("index", "index")],
    "tq-check": [("map", "map")],
    "iso": [("poly", "poly")],
    "oracle-compare": [("field", "field"), ("f", "f"), ("fpoly", "fpoly"), ("bind", "bind")],
}


def _payload_value(raw) -> str | None:
    if raw is None:
        return None
    if isinstance(raw, list):
        raw = ";".join(raw)
    raw = str(raw)
    if raw == "-":
        raw = sys.stdin.read()
    return raw


def request_from_args(args: argparse.Namespace) -> api.Request:
    payload = {}
    for flag, key in _PAYLOAD_KEYS[args.command]:
        value = _payload_value(getattr(args, flag.replace("-", "_"), None))
        if value is not None and value != "":
            payload[key] = value
    split = lambda text: [x.strip() for x in text.split(",") if x.strip()]
    return api.Request(
        command=args.command,
        n_theta=args.q,
        n_eta=args.L,
        even=split(args.even),
        odd=split(args.odd),
        payload=payload,
    )


def run_remote(server: str, request: api.Request) -> dict:
    import httpx

    body = {
        "command": request.command,
        "q": request.n_theta,
        "L": request.n_eta,
        "even": request.even,
        "odd": request.odd,
        "payload": request.payload,
    }
    reply = httpx.post(server.rstrip("/") + "/v1/run", json=body, timeout=60.0)
    if reply.status_code == 422:
        detail = reply.json().get("detail", {})
        raise ParseError(str(detail.get("message", "parse error")), int(detail.get("position", 0)))
    if reply.status_code >= 400:
        detail = reply.json().get("detail", {})
        raise SuperPullError(str(detail.get("message", reply.text)))
    return reply.json()


def print_response(data: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(data, indent=2, sort_keys=True))
        return
    print(f"command: {data['command']}")
    for key in TEXT_FIELDS:
        if data.get(key) is not None:
            print(f"{key}: {data[key]}")
    for record in data.get("xi") or []:
        index = "{" + ",".join(str(k) for k in record["index"]) + "}"
        print(f"xi{index}[{record['component']}] = {record['expr']}")
    oracle = data.get("oracle")
    if oracle:
        for entry in oracle["entries"]:
            gens = "{" + ",".join(str(k) for k in entry["gens"]) + "}"
            print(
                f"coeff{gens} symbolic={entry['symbolic']!r} "
                f"numeric={entry['numeric']!r} diff={entry['abs_diff']:.3e}"
            )
        print(f"max_abs_diff: {oracle['max_abs_diff']:.3e}")
        print(f"agree: {oracle['agree']}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        request = request_from_args(args)
        if args.server:
            data = run_remote(args.server, request)
        else:
            data = api.run(request).to_dict()
    except ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return 2
    except SuperPullError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    print_response(data, args.json)
    return 0


if __name__ == "__main__":
    sys.exit(main())
