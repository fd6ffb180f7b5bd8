"""HTTP service wrapping the verification engine.

The handlers delegate to plain functions so the command-line client can run
the same logic in-process; a remote client posts the identical pydantic
payloads. All responses are deterministic for fixed inputs apart from the
measured elapsed_ms on single-model checks (catalog runs zero it out so
reports are byte-identical across runs).
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict

from . import __version__
from .catalog import catalog_model, catalog_names
from .checks import CHECK_NAMES, run_checks
from .hamiltonian import SynthesisError, synthesize_tangent_connection
from .models import (CheckReportModel, ModelError, ModelSpec,
                     build_runtime)
from .weil import GradedModel, is_basic, theorem_check
from . import expr as ex

__all__ = [
    "app", "CheckRequest", "CatalogRunRequest", "SynthRequest", "WeilRequest",
    "CatalogRunResponse", "WeilResponse", "SynthResponse",
    "do_check", "do_catalog_run", "do_synth", "do_weil",
]


class CheckRequest(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model: ModelSpec
    checks: Optional[list[str]] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    tol: Optional[float] = None


class CatalogRunRequest(BaseModel):
    name: Optional[str] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    tol: Optional[float] = None


class ModelComparison(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model: str
    matches: bool
    mismatches: dict[str, dict[str, Optional[str]]]
    report: CheckReportModel


class CatalogRunResponse(BaseModel):
    ok: bool
    results: list[ModelComparison]


class SynthRequest(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model: ModelSpec
    v_ref: list[str]


class SynthResponse(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model: ModelSpec


class WeilRequest(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model: ModelSpec
    samples: Optional[int] = None
    seed: Optional[int] = None
    tol: Optional[float] = None


class WeilResponse(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model: str
    extension: str
    closed: bool
    bidegree_passed: dict[str, bool]
    residuals: dict[str, float]
    extension_property: bool
    basic: Optional[bool]
    horizontal: Optional[bool]
    invariant: Optional[bool]


def do_check(req: CheckRequest) -> CheckReportModel:
    rt = build_runtime(req.model, req.samples, req.seed, req.tol)
    return run_checks(rt, req.checks)


def do_catalog_run(req: CatalogRunRequest) -> CatalogRunResponse:
    names = [req.name] if req.name else catalog_names()
    results = []
    ok = True
    for name in names:
        spec = catalog_model(name)
        rt = build_runtime(spec, req.samples, req.seed, req.tol)
        report = run_checks(rt, measure_time=False)
        actual = {c.name: c.verdict for c in report.checks}
        mism = {}
        for check, expect in spec.expected.items():
            if actual.get(check) != expect:
                mism[check] = {"expected": expect, "actual": actual.get(check)}
        matches = not mism
        ok = ok and matches
        results.append(ModelComparison(model=name, matches=matches,
                                       mismatches=mism, report=report))
    return CatalogRunResponse(ok=ok, results=results)


def do_synth(req: SynthRequest) -> SynthResponse:
    spec = req.model.model_copy(deep=True)
    spec.synthesis = None
    spec.connection = {}
    rt = build_runtime(spec)
    if rt.omega is None:
        raise ModelError("synthesis needs a 2-form")
    if rt.momentum is None:
        raise ModelError("synthesis needs a momentum candidate")
    if len(req.v_ref) != rt.chart.dim:
        raise ModelError("v_ref must have one component per coordinate")
    v_ref = [rt.chart.parse(s) for s in req.v_ref]
    conn = synthesize_tangent_connection(rt.chart, rt.omega, rt.momentum,
                                         v_ref, rt.domain)
    names = rt.chart.names
    entries = {}
    for j in range(conn.rank):
        for alpha in range(rt.chart.dim):
            for i in range(conn.rank):
                c = conn.coeffs[j][alpha][i]
                if not (isinstance(c, ex.Rat) and c.value == 0):
                    entries[f"{j},{alpha},{i}"] = ex.to_string(c, names)
    out = spec.model_copy(deep=True)
    out.connection = entries
    return SynthResponse(model=out)


def do_weil(req: WeilRequest) -> WeilResponse:
    rt = build_runtime(req.model, req.samples, req.seed, req.tol)
    if rt.omega is None:
        raise ModelError("the extension check needs a 2-form")
    if rt.momentum is None:
        raise ModelError("the extension check needs a momentum section")
    if rt.synthesis_error is not None:
        raise ModelError(f"connection synthesis failed: {rt.synthesis_error}")
    gm = GradedModel(rt.algebroid, rt.connection)
    rep = theorem_check(gm, rt.omega, rt.momentum, rt.domain)
    basic = horizontal = invariant = None
    if rep.closed:
        b = is_basic(gm, rep.extension, rt.domain)
        basic, horizontal, invariant = b.basic, b.horizontal, b.invariant
    return WeilResponse(
        model=rt.name,
        extension=repr(rep.extension),
        closed=rep.closed,
        bidegree_passed={"(3,0)": rep.closed_part.passed,
                         "(2,1)": rep.momentum_part.passed,
                         "(1,2)": rep.bracket_part.passed},
        residuals={"(3,0)": rep.closed_part.residual,
                   "(2,1)": rep.momentum_part.residual,
                   "(1,2)": rep.bracket_part.residual},
        extension_property=rep.extension_property.passed,
        basic=basic, horizontal=horizontal, invariant=invariant)


app = FastAPI(title="algebroid-forge", version=__version__)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/checks")
def list_checks() -> dict:
    return {"checks": CHECK_NAMES}


@app.get("/catalog")
def catalog_list() -> dict:
    return {"models": catalog_names()}


@app.get("/catalog/{name}")
def catalog_get(name: str) -> ModelSpec:
    try:
        return catalog_model(name)
    except KeyError as err:
        raise HTTPException(status_code=404, detail=str(err))


@app.post("/check")
def check(req: CheckRequest) -> CheckReportModel:
    try:
        return do_check(req)
    except (ModelError, ValueError) as err:
        raise HTTPException(status_code=422, detail=str(err))


@app.post("/catalog/run")
def catalog_run(req: CatalogRunRequest) -> CatalogRunResponse:
    try:
        return do_catalog_run(req)
    except KeyError as err:
        raise HTTPException(status_code=404, detail=str(err))
    except (ModelError, ValueError) as err:
        raise HTTPException(status_code=422, detail=str(err))


@app.post("/synth")
def synth(req: SynthRequest) -> SynthResponse:
    try:
        return do_synth(req)
    except (ModelError, ValueError) as err:
        raise HTTPException(status_code=422, detail=str(err))
    except SynthesisError as err:
        raise HTTPException(status_code=409, detail=str(err))


@app.post("/weil")
def weil(req: WeilRequest) -> WeilResponse:
    try:
        return do_weil(req)
    except (ModelError, ValueError) as err:
        raise HTTPException(status_code=422, detail=str(err))
