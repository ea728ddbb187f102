"""Pydantic request/response models for the verification service.

Exact rational numbers travel as strings ("1/3") or integers; polynomial
forms travel in the canonical term schema
{n, l, terms: [{blade: [..], monomials: [{alpha: [..], num, den}]}]}.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator

RationalIn = Union[int, str]


def parse_fraction(v: RationalIn) -> Fraction:
    if isinstance(v, bool):
        raise ValueError("booleans are not rationals")
    return Fraction(v)


class BumpSpec(BaseModel):
    """Smoothing bump specification: {kind, n, center, r, k}."""
    kind: Literal["tensor", "radial"] = "tensor"
    n: int = Field(ge=1, le=8)
    center: List[RationalIn]
    r: RationalIn = 1
    k: int = Field(default=4, ge=1)

    @field_validator("center")
    @classmethod
    def _check_center(cls, v):
        for item in v:
            parse_fraction(item)
        return v

    def build(self):
        from ..bumps import ThetaBump
        return ThetaBump(self.n, [parse_fraction(c) for c in self.center],
                         parse_fraction(self.r), self.k, kind=self.kind)


class MonomialModel(BaseModel):
    alpha: List[int]
    num: int
    den: int = 1


class FormTermModel(BaseModel):
    blade: List[int]
    monomials: List[MonomialModel]


class PolyFormModel(BaseModel):
    """The wire format of a polynomial differential form."""
    n: int = Field(ge=1, le=8)
    l: int = Field(ge=0)
    terms: List[FormTermModel] = Field(default_factory=list)

    def build(self):
        from ..forms import form_from_dict
        return form_from_dict(self.model_dump())

    @classmethod
    def from_form(cls, form) -> "PolyFormModel":
        from ..forms import form_to_dict
        return cls.model_validate(form_to_dict(form))


class FixtureComponent(BaseModel):
    blade: List[int]
    monomials: List[MonomialModel]


class FixtureSpec(BaseModel):
    """Sampled-form fixture: polynomial components times a radial profile."""
    kind: Literal["poly_bump", "plateau", "zero_mean_volume", "star_theta"] = "poly_bump"
    n: int = Field(ge=1, le=8)
    l: int = Field(ge=0)
    center: List[float] = Field(default_factory=list)
    radius: float = 0.7
    r_flat: Optional[float] = None
    k: int = 4
    components: List[FixtureComponent] = Field(default_factory=list)
    second_center: Optional[List[float]] = None
    bump: Optional[BumpSpec] = None

    def build(self):
        import numpy as np
        from ..polynomials import RationalPoly
        from ..sampled import (poly_bump_form, poly_plateau_form,
                               star_theta_form, zero_mean_volume_form)
        center = self.center or [0.0] * self.n
        comps = {}
        for item in self.components:
            terms = {tuple(m.alpha): Fraction(m.num, m.den) for m in item.monomials}
            comps[tuple(item.blade)] = RationalPoly(self.n, terms)
        if self.kind == "poly_bump":
            return poly_bump_form(self.n, self.l, center, self.radius, comps,
                                  k=self.k)
        if self.kind == "plateau":
            r_flat = self.r_flat if self.r_flat is not None else 0.7 * self.radius
            return poly_plateau_form(self.n, self.l, center, r_flat, self.radius,
                                     comps, k=self.k)
        if self.kind == "zero_mean_volume":
            c2 = self.second_center or [-c for c in center]
            return zero_mean_volume_form(self.n, center, c2, self.radius, k=self.k)
        if self.kind == "star_theta":
            bump = (self.bump or BumpSpec(n=self.n, center=[0] * self.n,
                                          r="1/2", k=self.k)).build()
            return star_theta_form(bump)
        raise ValueError(self.kind)


# -- poincare ------------------------------------------------------------------

class PoincareApplyRequest(BaseModel):
    form: PolyFormModel
    bump: Optional[BumpSpec] = None


class PoincareApplyResponse(BaseModel):
    form: PolyFormModel
    degree_in: int
    degree_out: int
    max_total_degree: int


class PoincareHomotopyRequest(BaseModel):
    n: int = Field(default=2, ge=1, le=6)
    degree: int = Field(default=4, ge=0, le=8)
    count: int = Field(default=20, ge=1, le=500)
    seed: int = 0
    l_values: Optional[List[int]] = None
    bump: Optional[BumpSpec] = None


class HomotopyCellResult(BaseModel):
    n: int
    l: int
    forms: int
    violations: int


class PoincareHomotopyResponse(BaseModel):
    all_zero: bool
    cells: List[HomotopyCellResult]


class QspaceCheckRequest(BaseModel):
    p: int = Field(default=2, ge=1, le=6)
    l_values: Optional[List[int]] = None
    bump: Optional[BumpSpec] = None


class QspaceCheckResponse(BaseModel):
    p: int
    all_preserved: bool
    per_degree: Dict[str, dict]


# -- bogovskii ------------------------------------------------------------------

class QuadratureSpec(BaseModel):
    outer_points: int = Field(default=12, ge=2, le=48)
    outer_points_near: int = Field(default=0, ge=0, le=64)
    inner_points: int = Field(default=12, ge=2, le=64)
    inner_panels: int = Field(default=2, ge=1, le=24)
    pair_points: int = Field(default=20, ge=4, le=48)
    fd_step: float = Field(default=1e-4, gt=0)
    fd_stencil: Literal[3, 5] = 3

    def build(self, theta):
        from ..bogovskii import BogovskiiContext
        return BogovskiiContext(theta, outer_points=self.outer_points,
                                outer_points_near=self.outer_points_near,
                                inner_points=self.inner_points,
                                inner_panels=self.inner_panels,
                                pair_points=self.pair_points,
                                fd_step=self.fd_step,
                                fd_stencil=self.fd_stencil)


class BogovskiiEvalRequest(BaseModel):
    fixture: FixtureSpec
    points: List[List[float]]
    bump: Optional[BumpSpec] = None
    quadrature: QuadratureSpec = Field(default_factory=QuadratureSpec)
    operator: Literal["T", "R"] = "T"


class BogovskiiEvalResponse(BaseModel):
    blades: List[List[int]]
    values: List[List[float]]


class BogovskiiHomotopyRequest(BaseModel):
    n: int = Field(default=2, ge=2, le=3)
    l: Optional[int] = None
    points: int = Field(default=25, ge=1, le=200)
    seed: int = 0
    bump: Optional[BumpSpec] = None
    quadrature: QuadratureSpec = Field(default_factory=QuadratureSpec)


class ResidualReport(BaseModel):
    max_residual: float
    mean_residual: float
    tolerance: float
    passed: bool
    cases: List[dict]


class AdjointCheckRequest(BaseModel):
    pairs: int = Field(default=4, ge=1, le=50)
    seed: int = 0
    l: Optional[int] = None
    bump: Optional[BumpSpec] = None
    quadrature: QuadratureSpec = Field(default_factory=QuadratureSpec)


class AdjointCheckResponse(BaseModel):
    max_relative_defect: float
    tolerance: float
    passed: bool
    pairs: List[dict]


class KernelScanRequest(BaseModel):
    n: int = Field(default=2, ge=2, le=4)
    l: Optional[int] = None
    pairs: int = Field(default=50, ge=1, le=500)
    seed: int = 0
    bump: Optional[BumpSpec] = None


class KernelScanResponse(BaseModel):
    max_relative_defect: float
    tolerance: float
    passed: bool
    fitted_constant_coarse: float
    fitted_constant_fine: float
    rows: List[dict]


# -- symbol -----------------------------------------------------------------------

class SymbolScanRequest(BaseModel):
    n: int = Field(default=2, ge=2, le=3)
    l: int = Field(default=1, ge=1)
    j: int = Field(default=1, ge=1)
    directions: int = Field(default=8, ge=1, le=32)
    xi_points: int = Field(default=40, ge=4, le=200)
    xi_max: float = Field(default=1e3, gt=1)
    x_points: int = Field(default=3, ge=1, le=9)
    bump: Optional[BumpSpec] = None


class SymbolScanResponse(BaseModel):
    all_plateau: bool
    spot_value_defect: float
    verdicts: List[dict]
    rows: List[dict]
    smoothness_note: str


# -- glue --------------------------------------------------------------------------

class GlueCheckRequest(BaseModel):
    domain: Literal["l", "u", "box"] = "l"
    l: int = Field(default=1, ge=0)
    points: int = Field(default=5, ge=1, le=50)
    seed: int = 0
    side: Literal["R", "T", "both"] = "both"


class GlueCheckResponse(BaseModel):
    domain: str
    results: List[dict]
    partition: dict
    passed: bool


# -- verify ------------------------------------------------------------------------

class RunConfig(BaseModel):
    """Validated configuration for a verification suite run."""
    suite: str
    n: Optional[int] = Field(default=None, ge=1, le=6)
    l: Optional[int] = Field(default=None, ge=0, le=6)
    degree: int = Field(default=4, ge=0, le=10)
    count: int = Field(default=20, ge=1, le=1000)
    points: int = Field(default=8, ge=1, le=200)
    pairs: int = Field(default=4, ge=1, le=100)
    seed: int = 0
    options: Dict[str, Union[int, float, str, bool]] = Field(default_factory=dict)

    def to_suite_config(self) -> dict:
        cfg = {
            "seed": self.seed,
            "degree": self.degree,
            "count": self.count,
            "points": self.points,
            "pairs": self.pairs,
        }
        if self.n is not None:
            cfg["n"] = self.n
            cfg["n_list"] = [self.n]
        if self.l is not None:
            cfg["l"] = self.l
            cfg["l_list"] = [self.l]
        cfg.update(self.options)
        return cfg


class SuiteCheckModel(BaseModel):
    id: str
    description: str
    residual: float
    tolerance: float
    passed: bool
    extra: dict = Field(default_factory=dict)


class SuiteReportModel(BaseModel):
    suite: str
    seed: int
    passed: bool
    max_residual: float
    checks: List[SuiteCheckModel]
    elapsed_s: float
    environment: dict
