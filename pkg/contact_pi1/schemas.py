"""
Input documents and output reports.

Documents are strict: unknown fields, floats and booleans are rejected and
offsets are exact (integers or "p/q" strings).
"""

import json
from fractions import Fraction
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, StrictInt, ValidationError, model_validator

from contact_pi1.src.errors import ParseError
from contact_pi1.src.cone import MomentCone, build_cone
from contact_pi1.src.pi1 import Pi1Report, T3Bundle, compute_pi1
from contact_pi1.src.polytope import Halfspace, RationalPolytope, fraction_text


def _exact_number(value: Any) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError("offsets must be integers or 'p/q' strings")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise ValueError(f"'{value}' is not an exact fraction")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"'{value}' is not a fraction 'p/q'")
    raise ValueError(f"unsupported offset {value!r}")


ExactNumber = Annotated[Fraction, BeforeValidator(_exact_number)]

_KIND_FIELDS = {
    "cone": ({"ambient_dim", "normals"}, {"bundle_class", "reeb"}),
    "polytope": ({"ambient_dim", "halfspaces"}, set()),
    "t3_bundle": ({"bundle_class"}, set()),
}


class HalfspaceInput(BaseModel):
    """<x, normal> >= offset"""
    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True)

    normal: List[StrictInt]
    offset: ExactNumber


class InputDocument(BaseModel):
    """One cone, polytope or T^3-bundle to analyse"""
    model_config = ConfigDict(extra="forbid", arbitrary_types_allowed=True)

    kind: Literal["cone", "polytope", "t3_bundle"]
    ambient_dim: Optional[StrictInt] = None
    normals: Optional[List[List[StrictInt]]] = None
    halfspaces: Optional[List[HalfspaceInput]] = None
    bundle_class: Optional[List[StrictInt]] = None
    reeb: Optional[List[StrictInt]] = None
    label: Optional[str] = None

    @model_validator(mode="after")
    def check_kind_fields(self):
        required, optional = _KIND_FIELDS[self.kind]
        present = {name for name in self.model_fields_set if name not in ("kind", "label")}
        missing = sorted(required - present)
        if missing:
            raise ValueError(f"kind '{self.kind}' requires field '{missing[0]}'")
        unexpected = sorted(present - required - optional)
        if unexpected:
            raise ValueError(f"field '{unexpected[0]}' is not allowed for kind '{self.kind}'")
        if self.bundle_class is not None and len(self.bundle_class) != 3:
            raise ValueError("bundle_class must have exactly three entries")
        return self

    def to_source(self) -> Union[MomentCone, RationalPolytope, T3Bundle]:
        if self.kind == "cone":
            return build_cone(self.normals, self.ambient_dim)
        if self.kind == "polytope":
            return RationalPolytope.from_halfspaces(
                [Halfspace(tuple(h.normal), h.offset) for h in self.halfspaces], self.ambient_dim
            )
        return T3Bundle(*self.bundle_class)

    def compute(self, methods: Optional[Union[str, List[str]]] = None) -> Pi1Report:
        return compute_pi1(self.to_source(), methods=methods, reeb=self.reeb, bundle_class=self.bundle_class)

    def echo(self) -> Dict[str, Any]:
        """JSON-ready copy of the document with offsets rendered exactly."""
        data = self.model_dump(exclude_none=True)
        if self.halfspaces is not None:
            data["halfspaces"] = [
                {"normal": list(h.normal), "offset": fraction_text(h.offset)} for h in self.halfspaces
            ]
        return data


class CorpusExpectation(BaseModel):
    """A built-in example and the answer it must produce"""
    model_config = ConfigDict(extra="forbid")

    name: str
    document: InputDocument
    expected_class: str
    expected_pi1: str
    expected_pi2: Optional[str] = None


class ValidationSummary(BaseModel):
    strictly_convex: Optional[bool] = None
    good: Optional[bool] = None
    lineality_dim: Optional[int] = None
    delzant: Optional[bool] = None
    integral: Optional[bool] = None


class MethodOutput(BaseModel):
    result: Optional[str] = None
    skipped: Optional[str] = None


class VertexOrder(BaseModel):
    vertex: List[Union[int, str]]
    order: int


class OrbifoldOutput(BaseModel):
    vertex_orders: List[VertexOrder]
    m_lcm: int


class FiltrationStepOutput(BaseModel):
    vertex: List[Union[int, str]]
    index: int
    pi1: str


class MorseOutput(BaseModel):
    """Morse data of the Delzant slice: b2 and the sublevel fundamental groups"""

    betti2: int
    filtration: List[FiltrationStepOutput]


class OutputReport(BaseModel):
    """Machine-readable result of one computation"""

    input: Dict[str, Any]
    validation: ValidationSummary
    class_label: str
    manifold: str
    non_reeb_case: Optional[int] = None
    pi1: str
    methods: Dict[str, MethodOutput]
    cross_check: str
    cross_check_details: Optional[str] = None
    warnings: List[str] = []
    reeb: Optional[List[int]] = None
    orbifold: Optional[OrbifoldOutput] = None
    morse: Optional[MorseOutput] = None
    bundle_basis: Optional[List[List[int]]] = None
    higher_homotopy: Dict[str, str] = {}

    @classmethod
    def from_report(cls, document: InputDocument, report: Pi1Report) -> "OutputReport":
        validation = ValidationSummary(delzant=report.delzant, integral=report.integral)
        if report.validation is not None:
            validation.strictly_convex = report.validation.strictly_convex
            validation.good = report.validation.good
            validation.lineality_dim = report.validation.lineality_dim

        orbifold = None
        if report.orbifold is not None:
            orbifold = OrbifoldOutput(
                vertex_orders=[
                    VertexOrder(vertex=vertex.render(), order=order)
                    for vertex, order in report.orbifold.order_by_vertex.items()
                ],
                m_lcm=report.orbifold.m_lcm,
            )

        morse = None
        if report.betti2 is not None:
            morse = MorseOutput(
                betti2=report.betti2,
                filtration=[
                    FiltrationStepOutput(vertex=step.vertex.render(), index=step.index, pi1=step.pi1.render())
                    for step in report.filtration
                ],
            )

        return cls(
            input=document.echo(),
            validation=validation,
            class_label=report.class_label,
            manifold=report.manifold.manifold,
            non_reeb_case=report.manifold.non_reeb_case,
            pi1=report.pi1.render(),
            methods={
                name: MethodOutput(result=None if result.group is None else result.group.render(),
                                   skipped=result.skipped)
                for name, result in report.methods.items()
            },
            cross_check=report.cross_check.render(),
            cross_check_details=report.cross_check.details or None,
            warnings=list(report.warnings),
            reeb=list(report.reeb) if report.reeb is not None else None,
            orbifold=orbifold,
            morse=morse,
            bundle_basis=[list(w) for w in report.bundle_basis] if report.bundle_basis is not None else None,
            higher_homotopy=dict(report.higher_homotopy),
        )

    def to_json(self) -> str:
        return json.dumps(self.model_dump(exclude_none=True), indent=2)

    def to_text(self) -> str:
        lines = [
            f"class:       {self.class_label} ({self.manifold})",
            f"pi1:         {self.pi1}",
        ]
        for name, method in self.methods.items():
            value = method.result if method.result is not None else f"skipped ({method.skipped})"
            lines.append(f"  {name:<10} {value}")
        lines.append(f"cross-check: {self.cross_check}")
        if self.cross_check_details:
            lines.append(f"  {self.cross_check_details}")
        for key, value in self.higher_homotopy.items():
            lines.append(f"{key + ':':<12} {value}")
        if self.orbifold is not None:
            orders = ", ".join(str(entry.order) for entry in self.orbifold.vertex_orders)
            lines.append(f"orbifold:    vertex orders {orders}; lcm {self.orbifold.m_lcm}")
        if self.morse is not None:
            lines.append(f"betti2:      {self.morse.betti2}")
            steps = " -> ".join(step.pi1 for step in self.morse.filtration)
            lines.append(f"filtration:  {steps}")
        if self.bundle_basis is not None:
            lines.append(f"basis:       {' '.join(str(tuple(w)) for w in self.bundle_basis)}")
        for warning in self.warnings:
            lines.append(f"warning:     {warning}")
        return "\n".join(lines)


def _parse_error(error: ValidationError, index: Optional[int] = None) -> ParseError:
    first = error.errors()[0]
    location = [str(part) for part in first.get("loc", ())]
    if index is not None:
        location.insert(0, str(index))
    message = first.get("msg", "invalid document")
    return ParseError(message, field=".".join(location) or None)


def _load_json(data: Union[bytes, str]) -> Any:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"input is not UTF-8: {e}")
    try:
        return json.loads(data)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno)
    # oversized integer literals
    except ValueError as e:
        raise ParseError(str(e))
    except RecursionError:
        raise ParseError("input is nested too deeply")


def parse_input(data: Union[bytes, str]) -> InputDocument:
    """Parse a single JSON document."""
    raw = _load_json(data)
    if not isinstance(raw, dict):
        raise ParseError("expected a JSON object")
    try:
        return InputDocument.model_validate(raw)
    except ValidationError as e:
        raise _parse_error(e)


def parse_documents(data: Union[bytes, str]) -> List[InputDocument]:
    """Parse a single document or a JSON array of documents (batch mode)."""
    raw = _load_json(data)
    if isinstance(raw, dict):
        raw = [raw]
    if not isinstance(raw, list):
        raise ParseError("expected a JSON object or an array of objects")
    documents = []
    for index, item in enumerate(raw):
        if not isinstance(item, dict):
            raise ParseError("expected a JSON object", field=str(index))
        try:
            documents.append(InputDocument.model_validate(item))
        except ValidationError as e:
            raise _parse_error(e, index if len(raw) > 1 else None)
    return documents
