"""Versioned JSON documents written by the command line tool."""
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from .quadratic import QuadNum, to_real

SCHEMA_VERSION = "1.0"


def format_decimal(value: float) -> str:
    return f"{value:.10g}"


class ExactNumber(BaseModel):
    """a + b·λ with rational coefficients, plus a 10-digit decimal rendering."""
    model_config = ConfigDict(frozen=True)

    a: str
    b: str
    decimal: str

    @classmethod
    def of(cls, x: QuadNum) -> 'ExactNumber':
        return cls(a=str(x.a), b=str(x.b), decimal=format_decimal(to_real(x)))


class IntervalReport(BaseModel):
    lo: ExactNumber
    hi: ExactNumber


class SeedReport(BaseModel):
    left: str
    right: str
    period: int


class WindowReport(BaseModel):
    kind: Literal["Intervals", "NotIntervals"]
    a: Optional[IntervalReport] = None
    b: Optional[IntervalReport] = None
    reason: Optional[str] = None


class HullReport(BaseModel):
    a: List[str]
    b: List[str]
    err: str


class DimensionReport(BaseModel):
    spectral_radius: float
    radius_error: float
    dimension: float
    dimension_error: float
    node_count: int
    B: int
    stable: bool
    spectral_radius_next: float
    validated: Optional[bool] = None
    witness_missing: List[str] = Field(default_factory=list)
    singleton_nodes: List[str] = Field(default_factory=list)


class ClassificationReport(BaseModel):
    kind: Literal["Interval", "Cantorval", "FiniteUnionOrUndetermined"]
    evidence: Dict[str, Any] = Field(default_factory=dict)


class AnalysisReport(BaseModel):
    schema_version: Literal["1.0"] = SCHEMA_VERSION
    substitution: str
    matrix: List[List[int]]
    primitive: bool
    unimodular: bool
    pisot_unit: bool
    trace: int
    det: int
    lam: ExactNumber
    lam_star: ExactNumber
    tile_lengths: Dict[str, ExactNumber]
    displacement: Dict[str, List[ExactNumber]]
    measure_ratio: ExactNumber
    seed: SeedReport
    invertible: bool
    inverse: Optional[Dict[str, str]] = None
    windows: WindowReport
    hulls: HullReport
    dimension: Optional[DimensionReport] = None
    classification: ClassificationReport


class GraphEquation(BaseModel):
    node: str
    terms: List[str]


class GraphEdgeReport(BaseModel):
    source: str
    target: str
    translate: ExactNumber
    multiplicity: int


class GraphReport(BaseModel):
    schema_version: Literal["1.0"] = SCHEMA_VERSION
    substitution: str
    B: int
    canonical: bool
    nodes: List[str]
    edges: List[GraphEdgeReport]
    adjacency: List[List[int]]
    reduced_system: List[GraphEquation]


class ErrorReport(BaseModel):
    error: str
    message: str
    details: Dict[str, Any] = Field(default_factory=dict)


def report_schema() -> Dict[str, Any]:
    return AnalysisReport.model_json_schema()


def validate_report(document: Dict[str, Any]) -> AnalysisReport:
    """Raises pydantic.ValidationError if ``document`` is not an analysis report."""
    return AnalysisReport.model_validate(document)
