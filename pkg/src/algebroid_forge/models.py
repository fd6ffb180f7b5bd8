"""Model files: the JSON schema and its runtime compilation.

A model file carries a chart, a trivialized anchored bundle, and the
optional structure the checks consume: structure functions, a 2-form, a
connection, a momentum section, a claimed orthogonal frame, sample points
for locus and pointwise tests, a finite Lie algebra, and a synthesis
request. Sparse matrices are keyed by comma-joined 0-based indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .expr import Expression, ParseError, SampleDomain, SamplePoint
from .exterior import Chart, DifferentialForm, VectorField
from .algebroid import AnchoredBundle, LieAlgebroid
from .connection import Connection
from .hamiltonian import FiniteLieAlgebra, SynthesisError, synthesize_tangent_connection

__all__ = [
    "ModelError", "SamplingSpec", "ChartSpec", "FramesSpec", "LieAlgebraSpec",
    "SynthesisSpec", "ModelSpec", "CheckResultModel", "CheckReportModel",
    "RuntimeModel", "build_runtime",
]


class ModelError(Exception):
    """Raised on malformed model files; maps to exit status 2."""


class SamplingSpec(BaseModel):
    n: int = 32
    seed: int = 0
    tol: float = 1e-9


class ChartSpec(BaseModel):
    coordinates: list[str]
    domain: list[tuple[float, float]]


class FramesSpec(BaseModel):
    orthogonal: Optional[list[list[str]]] = None


class LieAlgebraSpec(BaseModel):
    dimension: int
    structure: dict[str, str] = Field(default_factory=dict)
    subalgebra: Optional[list[list[str]]] = None


class SynthesisSpec(BaseModel):
    v_ref: list[str]


class ModelSpec(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    name: str = "unnamed"
    chart: ChartSpec
    rank: int
    anchor: list[list[str]]
    structure: dict[str, str] = Field(default_factory=dict)
    omega: dict[str, str] = Field(default_factory=dict)
    connection: dict[str, str] = Field(default_factory=dict)
    momentum: Optional[list[str]] = None
    frames: Optional[FramesSpec] = None
    sampling: SamplingSpec = Field(default_factory=SamplingSpec)
    finite_lie_algebra: Optional[LieAlgebraSpec] = None
    locus_points: list[list[float]] = Field(default_factory=list)
    c3_points: list[list[float]] = Field(default_factory=list)
    synthesis: Optional[SynthesisSpec] = None
    expected: dict[str, str] = Field(default_factory=dict)

    @field_validator("rank")
    @classmethod
    def _rank_positive(cls, v):
        if v < 1:
            raise ValueError("rank must be at least 1")
        return v


class CheckResultModel(BaseModel):
    name: str
    verdict: str  # pass | fail | skipped
    residual_max: Optional[float] = None
    exact: Optional[bool] = None
    witness: Optional[str] = None
    skipped_reason: Optional[str] = None
    detail: Optional[dict] = None


class CheckReportModel(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model: str
    seed: int
    samples: int
    tol: float
    checks: list[CheckResultModel]
    elapsed_ms: int = 0


def _parse_key(key: str, arity: int, context: str) -> tuple:
    try:
        parts = tuple(int(p) for p in key.split(","))
    except ValueError:
        raise ModelError(f"{context}: bad index key {key!r}")
    if len(parts) != arity:
        raise ModelError(f"{context}: key {key!r} needs {arity} indices")
    return parts


@dataclass
class RuntimeModel:
    spec: ModelSpec
    chart: Chart
    bundle: AnchoredBundle
    algebroid: LieAlgebroid
    omega: Optional[DifferentialForm]
    connection: Connection
    connection_supplied: bool
    synthesized: bool
    synthesis_error: Optional[str]
    momentum: Optional[list]
    frames: Optional[list]
    lie: Optional[FiniteLieAlgebra]
    lie_subalgebra: Optional[list]
    locus_points: list
    c3_points: list

    @property
    def domain(self) -> SampleDomain:
        return self.chart.domain

    @property
    def name(self) -> str:
        return self.spec.name


def build_runtime(spec: ModelSpec, samples: Optional[int] = None,
                  seed: Optional[int] = None,
                  tol: Optional[float] = None) -> RuntimeModel:
    """Compile a model file; sampling overrides replace the file's values."""
    n = len(spec.chart.coordinates)
    if len(spec.chart.domain) != n:
        raise ModelError("chart domain must list one interval per coordinate")
    try:
        domain = SampleDomain(
            tuple((float(lo), float(hi)) for lo, hi in spec.chart.domain),
            spec.sampling.n if samples is None else samples,
            spec.sampling.seed if seed is None else seed,
            spec.sampling.tol if tol is None else tol)
        chart = Chart(tuple(spec.chart.coordinates), domain)
    except ValueError as err:
        raise ModelError(str(err))

    def parse(text: str, what: str) -> Expression:
        try:
            return chart.parse(text)
        except ParseError as err:
            raise ModelError(f"{what}: {err}")

    if len(spec.anchor) != spec.rank:
        raise ModelError("anchor needs one row per frame section")
    anchor_rows = []
    for i, row in enumerate(spec.anchor):
        if len(row) != n:
            raise ModelError(f"anchor row {i} must have {n} entries")
        anchor_rows.append(tuple(parse(s, f"anchor[{i}]") for s in row))
    bundle = AnchoredBundle(chart, spec.rank, tuple(anchor_rows))

    structure = {}
    for key, text in spec.structure.items():
        i, j, k = _parse_key(key, 3, "structure")
        if not (0 <= i < j < spec.rank and 0 <= k < spec.rank):
            raise ModelError(f"structure: key {key!r} out of range (need i<j)")
        structure[(i, j, k)] = parse(text, f"structure[{key}]")
    algebroid = LieAlgebroid(bundle, structure)

    omega = None
    if spec.omega:
        terms = {}
        for key, text in spec.omega.items():
            a, b = _parse_key(key, 2, "omega")
            if not (0 <= a < b < n):
                raise ModelError(f"omega: key {key!r} out of range (need a<b)")
            terms[(a, b)] = parse(text, f"omega[{key}]")
        omega = DifferentialForm(chart, 2, terms)

    connection_supplied = bool(spec.connection)
    entries = {}
    for key, text in spec.connection.items():
        j, alpha, i = _parse_key(key, 3, "connection")
        if not (0 <= j < spec.rank and 0 <= alpha < n and 0 <= i < spec.rank):
            raise ModelError(f"connection: key {key!r} out of range")
        entries[(j, alpha, i)] = parse(text, f"connection[{key}]")
    connection = Connection.from_entries(chart, spec.rank, entries)

    momentum = None
    if spec.momentum is not None:
        if len(spec.momentum) != spec.rank:
            raise ModelError("momentum must have one component per frame section")
        momentum = [parse(s, "momentum") for s in spec.momentum]

    synthesized = False
    synthesis_error = None
    if spec.synthesis is not None:
        if connection_supplied:
            raise ModelError("a model cannot both supply a connection and "
                             "request synthesis")
        if momentum is None:
            raise ModelError("synthesis needs a momentum candidate")
        if omega is None:
            raise ModelError("synthesis needs a 2-form")
        if spec.rank != n:
            raise ModelError("synthesis is defined for tangent models (rank = dim)")
        if len(spec.synthesis.v_ref) != n:
            raise ModelError("v_ref must have one component per coordinate")
        v_ref = [parse(s, "synthesis.v_ref") for s in spec.synthesis.v_ref]
        try:
            connection = synthesize_tangent_connection(chart, omega, momentum,
                                                       v_ref, domain)
            synthesized = True
        except SynthesisError as err:
            synthesis_error = str(err)

    frames = None
    if spec.frames is not None and spec.frames.orthogonal:
        frames = []
        for k, row in enumerate(spec.frames.orthogonal):
            if len(row) != n:
                raise ModelError(f"frames.orthogonal[{k}] must have {n} entries")
            frames.append(VectorField(chart, tuple(parse(s, "frames") for s in row)))

    lie = None
    lie_subalgebra = None
    if spec.finite_lie_algebra is not None:
        fla = spec.finite_lie_algebra
        entries_lie = {}
        for key, text in fla.structure.items():
            i, j, k = _parse_key(key, 3, "finite_lie_algebra.structure")
            try:
                entries_lie[(i, j, k)] = Fraction(text)
            except ValueError:
                raise ModelError(f"finite_lie_algebra: {text!r} is not rational")
        try:
            lie = FiniteLieAlgebra(fla.dimension, entries_lie)
        except ValueError as err:
            raise ModelError(str(err))
        if fla.subalgebra:
            lie_subalgebra = [[Fraction(v) for v in row] for row in fla.subalgebra]

    def to_points(rows, what):
        out = []
        for row in rows:
            if len(row) != n:
                raise ModelError(f"{what}: points must have {n} coordinates")
            out.append(SamplePoint(tuple(float(v) for v in row)))
        return out

    return RuntimeModel(
        spec=spec, chart=chart, bundle=bundle, algebroid=algebroid,
        omega=omega, connection=connection,
        connection_supplied=connection_supplied, synthesized=synthesized,
        synthesis_error=synthesis_error, momentum=momentum, frames=frames,
        lie=lie, lie_subalgebra=lie_subalgebra,
        locus_points=to_points(spec.locus_points, "locus_points"),
        c3_points=to_points(spec.c3_points, "c3_points"),
    )
