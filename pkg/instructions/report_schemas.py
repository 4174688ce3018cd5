"""
Schemas of the JSON documents the CLI reads and writes.

Documents are built as plain dicts (their key order is the output order) and
validated against these models before they are written.
"""

from typing import Dict, List, Literal, Optional, Type

from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError

from tools.errors import ValidationError


class _Document(BaseModel):
    model_config = ConfigDict(extra='forbid')

    schema_version: Literal[1]


class GraphPropertiesDocument(_Document):
    n: int = Field(ge=2)
    vertices: int
    edges: int
    degree: int
    connectivity: Optional[int] = None
    diameter: Optional[int] = None
    decomposition: Optional[Dict[str, object]] = None
    notes: List[str] = []


class WitnessBody(BaseModel):
    model_config = ConfigDict(extra='forbid')

    F1: List[str]
    F2: List[str]
    S: List[str]
    D: List[str]
    sizes: List[int] = Field(min_length=2, max_length=2)
    conditional: bool
    verification: Dict[str, bool]


class WitnessDocument(_Document):
    n: int = Field(ge=4)
    x: str
    y: str
    x_prime: str
    y_prime: str
    indistinguishable: bool
    witness: WitnessBody


class DiagnosabilityDocument(_Document):
    graph: str
    mode: Literal['exhaustive', 'randomized', 'witness-only']
    t: Optional[int] = None
    t_c: Optional[int] = None
    conclusive: bool
    witness: Optional[WitnessBody]
    subsets_examined: int
    candidates: int
    notes: List[str]
    wall_ms: Optional[float] = None


class SyndromeEntry(BaseModel):
    model_config = ConfigDict(extra='forbid')

    tester: str
    tested: str
    result: Literal[0, 1]


class SyndromeDocument(_Document):
    n: Optional[int]
    tests: List[SyndromeEntry]


class SyndromeInputDocument(BaseModel):
    """A syndrome file read by `diagnose`; files written by hand may omit the version."""

    model_config = ConfigDict(extra='forbid')

    schema_version: Optional[Literal[1]] = None
    n: Optional[int] = None
    tests: List[SyndromeEntry]


class FaultSetDocument(_Document):
    vertices: List[str]


class OutcomeDocument(_Document):
    kind: Literal['unique', 'ambiguous', 'infeasible']
    faults: Optional[List[str]] = None
    candidates: Optional[List[List[str]]] = None
    truncated: Optional[bool] = None
    t: int = Field(ge=0)
    conditional: bool
    consistent_sets: int
    candidates_examined: int


class CheckResult(BaseModel):
    model_config = ConfigDict(extra='forbid')

    check: str
    status: Literal['pass', 'fail']
    detail: str
    wall_ms: Optional[float] = None


class VerificationDocument(_Document):
    suite: str
    seed: int
    passed: bool
    checks: List[CheckResult]


SCHEMAS: Dict[str, Type[_Document]] = {
    'props': GraphPropertiesDocument,
    'witness': WitnessDocument,
    'tc': DiagnosabilityDocument,
    't': DiagnosabilityDocument,
    'simulate': SyndromeDocument,
    'diagnose': OutcomeDocument,
    'verify': VerificationDocument,
}


def validate_document(command: str, document: Dict[str, object]) -> Dict[str, object]:
    """Validate a document against the schema of ``command`` and return it unchanged.

    Raises:
        ValidationError: unknown command or a document that does not match its schema
    """
    if command not in SCHEMAS:
        raise ValidationError(f"no document schema for command {command!r}")
    try:
        SCHEMAS[command].model_validate(document)
    except PydanticValidationError as e:
        raise ValidationError(f"{command} document failed validation: {e}") from e
    return document


def validate_syndrome_input(document: object) -> Dict[str, object]:
    """Validate a syndrome file before decoding it.

    Raises:
        ValidationError: the document is not a syndrome
    """
    try:
        SyndromeInputDocument.model_validate(document)
    except PydanticValidationError as e:
        raise ValidationError(f"syndrome file failed validation: {e}") from e
    return document
