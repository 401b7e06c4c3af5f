"""
RunReport: the machine-readable result of the solve, verify and sweep commands
"""

from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from .. import __version__

ExtendedReal = Union[float, str]


class SolutionSummary(BaseModel):
    regime: str
    c_star: ExtendedReal
    thresholds: List[float]
    lambda_star: float
    generator: Dict[str, Any]
    period: Optional[float] = None
    y_ref: Optional[float] = None
    value_at_ref: Optional[float] = None


class McCheck(BaseModel):
    y0: float
    n_paths: int
    dt: float
    horizon: float
    mean: float
    std_error: float
    fraction_stopped: float
    cap_bias_bound: float
    analytic: float
    abs_error: float
    tolerance: float
    conclusive: bool
    passed: Optional[bool] = None
    note: Optional[str] = None


class PdeCheck(BaseModel):
    grid_n: int
    lo: float
    hi: float
    spacing: float
    detected_thresholds: List[float]
    analytic_thresholds: List[float]
    threshold_deltas: List[float]
    max_value_gap: Optional[float] = None
    passed: bool


class SweepRow(BaseModel):
    param_value: float
    regime: str
    c_star: ExtendedReal
    thresholds: List[float]
    value_at_ref: float
    monotone: Optional[bool] = None


class SweepBlock(BaseModel):
    param: str
    y_ref: float
    rows: List[SweepRow]
    monotone: Optional[bool] = None


class RunInfo(BaseModel):
    """Non-deterministic part of a report; excluded from byte comparisons."""

    created_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    timing: Dict[str, float] = Field(default_factory=dict)


class RunReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_version: str = Field(default="1", alias="schema")
    tool_version: str = __version__
    seed: Optional[int] = None
    command: str
    problem: Dict[str, Any]
    solution: Optional[SolutionSummary] = None
    mc: Optional[McCheck] = None
    pde: Optional[PdeCheck] = None
    sweep: Optional[SweepBlock] = None
    passed: Optional[bool] = None
    warnings: List[str] = Field(default_factory=list)
    run_info: RunInfo = Field(default_factory=RunInfo)

    def to_json(self, indent: int = 2) -> str:
        return self.model_dump_json(by_alias=True, indent=indent)

    def deterministic_dict(self) -> Dict[str, Any]:
        data = self.model_dump(mode="json", by_alias=True)
        data.pop("run_info", None)
        return data


__all__ = [
    "SolutionSummary", "McCheck", "PdeCheck", "SweepRow", "SweepBlock",
    "RunInfo", "RunReport",
]
