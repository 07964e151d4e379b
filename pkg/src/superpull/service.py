"""HTTP frontend: a stateless FastAPI service wrapping the command dispatch.

Every computation is a POST of one Request-shaped JSON body to /v1/run; the
service holds no state between calls, so any number of clients can share one
instance.  Parse failures map to 422 with the offending position, semantic
and context failures to 400.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import api
from .errors import ParseError, SuperPullError

app = FastAPI(
    title="superpull",
    description="Sign-exact pullback calculus for superspace maps into a chart",
    version="0.1.0",
)


class RunRequest(BaseModel):
    command: str
    q: int = Field(default=0, ge=0, description="number of theta generators")
    L: int = Field(default=0, ge=0, description="number of auxiliary eta generators")
    even: list[str] = Field(default_factory=list)
    odd: list[str] = Field(default_factory=list)
    payload: dict[str, str] = Field(default_factory=dict)


class OracleEntry(BaseModel):
    gens: list[int]
    symbolic: float
    numeric: float
    abs_diff: float


class OracleReport(BaseModel):
    entries: list[OracleEntry]
    agree: bool
    max_abs_diff: float


class TermRecord(BaseModel):
    gens: list[int]
    gen_names: list[str]
    odd: list[str]
    even: list[list]
    derivs: list[dict]
    coeff: str


class XiRecord(BaseModel):
    index: list[int]
    component: int
    expr: str
    terms: list[TermRecord]


class RunResponse(BaseModel):
    command: str
    terms: list[TermRecord] | None = None
    expr: str | None = None
    value: str | None = None
    boolean: bool | None = None
    lhs: str | None = None
    rhs: str | None = None
    xi: list[XiRecord] | None = None
    oracle: OracleReport | None = None
    diagnostics: list[str] = Field(default_factory=list)


@app.get("/v1/health")
def health() -> dict:
    return {"status": "ok", "commands": list(api.COMMANDS)}


@app.post("/v1/run", response_model=RunResponse, response_model_exclude_none=True)
def run(request: RunRequest) -> RunResponse:
    wire = api.Request(
        command=request.command,
        n_theta=request.q,
        n_eta=request.L,
        even=request.even,
        odd=request.odd,
        payload=request.payload,
    )
    try:
        response = api.run(wire)
    except ParseError as err:
        raise HTTPException(
            status_code=422,
            detail={"error": "parse", "message": str(err), "position": err.position},
        ) from err
    except SuperPullError as err:
        raise HTTPException(
            status_code=400,
            detail={"error": type(err).__name__, "message": str(err)},
        ) from err
    return RunResponse(**response.to_dict())
