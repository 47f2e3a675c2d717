from fractions import Fraction
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field

from klr_lab.core.errors import ConfigError
from klr_lab.services.cartan import CartanDatum, cartan_preset, perturb_q

LabelValue = Union[int, str]
Scalar = Union[int, str]

TaskName = Literal[
    "verify-relations", "biweight-basis", "full-basis", "cocenter-basis", "center-check",
    "annihilator-check", "trace-check", "iota-check", "sweep",
]
SweepCheck = Literal["center-check", "annihilator-check", "iota-check", "trace-check", "cocenter-basis"]


def _scalar(value: Scalar) -> Fraction:
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"Cannot read scalar {value!r}: {e}") from e


def resolve_label(datum: CartanDatum, key: LabelValue):
    """Map a JSON key (always a string for objects) back onto a datum label."""
    for label in datum.labels:
        if label == key or str(label) == str(key):
            return label
    raise ConfigError(f"Unknown label {key!r}; labels are {list(datum.labels)}")


class CartanBlock(BaseModel):
    """Cartan datum: a preset name, or explicit labels, matrix and symmetrizers; Q and a coefficients apply to either"""
    preset: Optional[str] = Field(None, description="One of A1, A2, A3, B2")
    labels: Optional[List[LabelValue]] = Field(None, description="Vertex labels, in order")
    matrix: Optional[List[List[int]]] = Field(None, description="Generalized Cartan matrix, rows in label order")
    symmetrizers: Optional[List[int]] = Field(None, description="Positive d_i with DA symmetric")
    q_coeffs: List[List[Scalar]] = Field(default_factory=list, description="Entries [i, j, p, q, value] giving c_{i,j,p,q}")
    a_coeffs: List[List[Scalar]] = Field(default_factory=list, description="Entries [i, k, value]: coefficient of u^k in a_i(u)")
    perturb: Optional[Scalar] = Field(None, description="Rescale the u-power terms of every Q_{i,j} by this scalar")

    def to_datum(self) -> CartanDatum:
        if self.preset:
            explicit = [name for name in ("labels", "matrix", "symmetrizers") if getattr(self, name) is not None]
            if explicit:
                raise ConfigError(f"cartan gives both 'preset' and {', '.join(repr(e) for e in explicit)}; use one or the other")
            base = cartan_preset(self.preset)
            labels, matrix, symmetrizers, name = base.labels, base.matrix, base.symmetrizers, base.name
        else:
            if self.labels is None or self.matrix is None or self.symmetrizers is None:
                raise ConfigError("cartan needs either 'preset' or all of 'labels', 'matrix', 'symmetrizers'")
            labels = tuple(self.labels)
            matrix = tuple(tuple(row) for row in self.matrix)
            symmetrizers = tuple(self.symmetrizers)
            name = "custom"
        skeleton = CartanDatum(labels=labels, matrix=matrix, symmetrizers=symmetrizers, name=name)

        q: Dict = {}
        for entry in self.q_coeffs:
            if len(entry) != 5:
                raise ConfigError(f"q_coeffs entries are [i, j, p, q, value], got {entry}")
            i, j = resolve_label(skeleton, entry[0]), resolve_label(skeleton, entry[1])
            q.setdefault((i, j), {})[(int(entry[2]), int(entry[3]))] = _scalar(entry[4])
        a: Dict = {}
        for entry in self.a_coeffs:
            if len(entry) != 3:
                raise ConfigError(f"a_coeffs entries are [i, k, value], got {entry}")
            a.setdefault(resolve_label(skeleton, entry[0]), {})[int(entry[1])] = _scalar(entry[2])

        datum = CartanDatum(labels=labels, matrix=matrix, symmetrizers=symmetrizers, q_coeffs=q, a_coeffs=a, name=name)
        if self.perturb is not None:
            datum = perturb_q(datum, _scalar(self.perturb))
        return datum

    class Config:
        json_schema_extra = {
            "example": {"preset": "A2", "a_coeffs": [], "q_coeffs": []}
        }


class JobOptions(BaseModel):
    """Per-job overrides of the environment settings"""
    scalar_field: Optional[Literal["QQ", "GF"]] = Field(None, description="QQ or GF")
    prime: Optional[int] = Field(None, description="Modulus when scalar_field is GF")
    max_height: Optional[int] = Field(None, description="Refuse beta of larger height")
    output: Optional[str] = Field(None, description="Report path; --out takes precedence")


class SweepGrid(BaseModel):
    """Instance grid for task=sweep"""
    lambda_max: int = Field(1, ge=0, description="Every Lambda with coordinates in [0, lambda_max]")
    betas: List[Dict[str, int]] = Field(default_factory=list, description="Explicit beta multiplicity maps")
    heights: List[int] = Field(default_factory=list, description="Add every multiplicity-free beta of these heights")
    checks: List[SweepCheck] = Field(
        default_factory=lambda: ["center-check", "annihilator-check", "iota-check"],
        description="Checks run on each instance",
    )
    skip_zero: bool = Field(True, description="Skip instances whose quotient is zero")


class JobConfig(BaseModel):
    """A single klr-lab job"""
    cartan: CartanBlock = Field(..., description="Cartan datum and Q-polynomials")
    lambda_: Dict[str, int] = Field(default_factory=dict, alias="lambda", description="Dominant weight coordinates by label")
    beta: Dict[str, int] = Field(default_factory=dict, description="Root multiplicities by label")
    gamma: Optional[List[LabelValue]] = Field(None, description="Initial weight for the cocenter order")
    target: Optional[List[LabelValue]] = Field(None, description="Target sequence for bi-weight spaces")
    nu: Optional[List[LabelValue]] = Field(None, description="Source sequence for bi-weight spaces")
    i: Optional[LabelValue] = Field(None, description="Label for annihilator-check and iota-check")
    task: TaskName = Field("verify-relations", description="What to run")
    options: JobOptions = Field(default_factory=JobOptions, description="Per-job overrides")
    sweep: Optional[SweepGrid] = Field(None, description="Grid for task=sweep")

    class Config:
        populate_by_name = True
        json_schema_extra = {
            "example": {
                "cartan": {"preset": "A2"},
                "lambda": {"1": 1, "2": 1},
                "beta": {"1": 1, "2": 1},
                "task": "center-check"
            }
        }
