"""
Report schemas shared by the CLI and the HTTP API
"""
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.config import settings


class ConditionId(str, Enum):
    PROP21A = "prop21a"
    PROP21B = "prop21b"
    PROP22A = "prop22a"
    PROP22B = "prop22b"
    THM1_PLUS = "thm1_plus"
    THM1_MINUS = "thm1_minus"
    CATINO_12 = "catino_12"
    CATINO_13 = "catino_13"
    CATINO_INTEGRAL = "catino_integral"
    REMARK_14 = "remark_14"


class IdentityId(str, Enum):
    SOLITON_EQ = "soliton_eq"
    LEM1_1 = "lem1_1"
    LEM1_2 = "lem1_2"
    LEM1_3 = "lem1_3"
    LEM1_4 = "lem1_4"
    LEM1_5 = "lem1_5"
    LEM1_6 = "lem1_6"
    LEM1_7 = "lem1_7"
    DRIFT_POTENTIAL = "drift_potential"
    WEITZENBOCK_PLUS = "weitzenbock_plus"
    WEITZENBOCK_MINUS = "weitzenbock_minus"
    EINSTEIN_WEITZENBOCK_PLUS = "einstein_weitzenbock_plus"
    EINSTEIN_WEITZENBOCK_MINUS = "einstein_weitzenbock_minus"


class PinchReport(BaseModel):
    """One pointwise inequality evaluated with margin and equality diagnostics"""
    condition_id: ConditionId = Field(..., description="Which inequality was evaluated")
    lhs: float = Field(..., description="Left-hand side as printed")
    rhs: float = Field(..., description="Right-hand side as printed")
    margin: float = Field(..., description="Signed slack; negative means the inequality fails")
    satisfied: bool = Field(..., description="margin >= -tolerance")
    equality_flag: bool = Field(..., description="|margin| <= tolerance")
    equality_diagnosis: str = Field(default="", description="Code describing the equality locus, e.g. 'w1==w2'")
    tolerance: float = Field(..., description="Equality tolerance (0 in rational mode)")
    exact: bool = Field(default=False, description="True when every value was evaluated in exact arithmetic")
    lhs_text: str = Field(default="", description="Stable text form of lhs (p/q when exact)")
    rhs_text: str = Field(default="", description="Stable text form of rhs")
    margin_text: str = Field(default="", description="Stable text form of margin")
    extra: Dict[str, float] = Field(default_factory=dict, description="Auxiliary values such as ratios")

    @model_validator(mode="after")
    def check_flags(self) -> "PinchReport":
        """Equality implies satisfaction"""
        if self.equality_flag and not self.satisfied:
            raise ValueError("equality_flag requires satisfied")
        return self


class FuzzSummary(BaseModel):
    """Aggregate of a randomized inequality sweep"""
    trials: int = Field(..., description="Random spectra and random matrices drawn (each)", ge=1)
    violations: int = Field(..., description="Evaluations with margin below -tolerance", ge=0)
    near_equality_hits: int = Field(..., description="Evaluations with margin below 1e-6", ge=0)
    seed: int = Field(..., description="Root seed of the sweep")
    worst_margin: float = Field(..., description="Smallest margin seen over all conditions")
    checks: int = Field(default=0, description="Total inequality evaluations", ge=0)
    tolerance: float = Field(default=0.0, description="Violation tolerance")
    violations_by_condition: Dict[str, int] = Field(default_factory=dict)


class IdentityReport(BaseModel):
    """Residual of one soliton identity over a set of sample points"""
    identity_id: IdentityId = Field(..., description="Identity checked")
    model: str = Field(..., description="Catalog model name")
    residual: float = Field(..., description="|LHS - RHS| at the first sample point")
    max_residual: float = Field(..., description="Largest |LHS - RHS| over all sample points")
    points_checked: int = Field(..., description="Number of sample points", ge=0)
    tolerance: float = Field(..., description="Acceptance tolerance (0 in rational mode)")
    passed: bool = Field(..., description="max_residual <= tolerance")
    exact: bool = Field(default=False, description="True when residuals were computed exactly")
    residual_text: str = Field(default="", description="Stable text form of max_residual")
    note: str = Field(default="", description="Scope note for partially checkable identities")


class AsymptoticsReport(BaseModel):
    """Smallest c on the search grid with (r - c)^2/4 <= f <= (r + c)^2/4 for r >= r0"""
    model: str
    c_found: Optional[float] = Field(None, description="Smallest admissible c, None when none on the grid works")
    holds: bool
    r0: float
    radii_checked: int
    c_grid_max: float


class GrowthFit(BaseModel):
    """Empirical fit of R <= A + eps f and of the induced curvature envelopes"""
    epsilon_hat: float = Field(..., ge=0.0, lt=1.0)
    a_hat: float = Field(..., gt=0.0)
    c0_hat: float = Field(..., ge=0.0)
    c1_hat: float = Field(..., ge=0.0)
    c2_hat: float = Field(..., ge=0.0)
    feasible: bool
    support_fraction: float = Field(..., ge=0.0, le=1.0, description="Interior nodes with |grad f| above tolerance")
    gradient_margin: float = Field(..., description="min of |grad f|^2 - ((1 - eps) f - A) over interior nodes")
    nodes: int = Field(..., ge=1)


class Prop41Report(BaseModel):
    """Empirical supremum of |Rm| / (|Ric| + |grad Ric| / |grad f|)"""
    nodes_included: int
    nodes_excluded: int
    sup_ratio: float
    min_ratio: float
    lhs_max: float
    rhs_core_min: float


class CheckRecord(BaseModel):
    """One row of a structured report"""
    model_config = ConfigDict(populate_by_name=True)

    id: str
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    passed: bool = Field(..., serialization_alias="pass", validation_alias="pass")
    detail: str = ""


class ReportDocument(BaseModel):
    """Versioned structured report written by every CLI command"""
    schema_version: str = Field(default=settings.SCHEMA_VERSION)
    project: str = Field(default=settings.PROJECT_NAME)
    command: str
    target: Optional[str] = None
    precision: str
    checks: List[CheckRecord] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)
