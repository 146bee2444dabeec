"""
Run configuration and API request/response schemas
"""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from app.core.numeric import Precision
from app.schemas.reports import IdentityReport, PinchReport


class Command(str, Enum):
    CATALOG = "catalog"
    VERIFY = "verify"
    CLASSIFY = "classify"
    FUZZ = "fuzz"
    CHART = "chart"


class OutputFormat(str, Enum):
    TEXT = "text"
    STRUCTURED = "structured"


class DualitySelector(str, Enum):
    PLUS = "plus"
    MINUS = "minus"
    BOTH = "both"


class RunConfig(BaseModel):
    """One CLI invocation"""
    command: Command = Field(..., description="Subcommand to run")
    target: Optional[str] = Field(None, description="Model name, or chart path for 'chart'/'classify'")
    duality: DualitySelector = Field(default=DualitySelector.BOTH, description="Which Weyl half to check")
    gamma: Optional[float] = Field(None, description="Constant of the catino_13 condition", gt=0)
    trials: Optional[int] = Field(None, description="Random draws for 'fuzz'", ge=1)
    seed: Optional[int] = Field(None, description="Root seed for 'fuzz' and sample points")
    precision: Precision = Field(default=Precision.FLOATING)
    points: int = Field(default=100, description="Sample points for 'verify'", ge=1)
    out: Optional[str] = Field(None, description="Output path (stdout when omitted)")
    format: OutputFormat = Field(default=OutputFormat.TEXT)

    @model_validator(mode="after")
    def check_command_arguments(self) -> "RunConfig":
        """Each subcommand gets exactly the arguments it uses"""
        needs_target = {Command.VERIFY, Command.CLASSIFY, Command.CHART}
        if self.command in needs_target and not self.target:
            raise ValueError(f"'{self.command.value}' needs a model name or chart path")
        if self.command is Command.FUZZ:
            if self.trials is None:
                raise ValueError("'fuzz' needs --trials")
            if self.seed is None:
                raise ValueError("'fuzz' needs --seed for reproducibility")
        elif self.trials is not None:
            raise ValueError("--trials only applies to 'fuzz'")
        if self.gamma is not None and self.command is not Command.CLASSIFY:
            raise ValueError("--gamma only applies to 'classify'")
        return self


class ModelInfo(BaseModel):
    """Catalog entry"""
    name: str
    title: str
    normalization: str
    potential: str
    scalar_curvature: str
    compact: bool
    coordinates: List[str]


class ClassifyRequest(BaseModel):
    """Pinching classification of one catalog model"""
    model: str = Field(..., description="Catalog model name")
    gamma: Optional[float] = Field(None, description="Constant of the catino_13 condition", gt=0)
    duality: DualitySelector = Field(default=DualitySelector.BOTH)
    precision: Precision = Field(default=Precision.FLOATING)


class ClassifyResponse(BaseModel):
    model: str
    reports: List[PinchReport]


class FuzzRequest(BaseModel):
    trials: int = Field(..., description="Random draws per family", ge=1, le=10_000_000)
    seed: int = Field(..., description="Root seed")


class VerifyResponse(BaseModel):
    model: str
    precision: Precision
    passed: bool
    reports: List[IdentityReport]
