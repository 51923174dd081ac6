"""
Report stream schemas

A report is a JSON Lines stream: one header record, body records, and a
closing summary record. Keys are sorted so identical runs produce identical
bytes apart from the summary's wall time.
"""

import json
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

REPORT_FORMAT = "jordan-spectra-report"


class HeaderRecord(BaseModel):
    record: Literal["header"] = "header"
    format: str = Field(REPORT_FORMAT, description="Stream format identifier")
    version: int = Field(..., description="Report format version")
    command: str = Field(..., description="Subcommand that produced the report")
    arguments: Dict[str, Any] = Field(default_factory=dict, description="Effective command-line arguments")
    tolerance: Dict[str, float] = Field(..., description="Tolerance configuration in force")


class ResultRecord(BaseModel):
    record: Literal["result"] = "result"
    trial: Optional[int] = Field(None, description="Trial index for campaign results")
    payload: Dict[str, Any] = Field(default_factory=dict, description="Command-specific result")


class FailureRecord(BaseModel):
    record: Literal["failure"] = "failure"
    trial: int = Field(..., description="Trial index")
    seed: int = Field(..., description="Campaign seed; (seed, trial) replays the failure")
    detail: str = Field(..., description="What went wrong")
    inputs: Dict[str, Any] = Field(default_factory=dict, description="Matrices and parameters of the trial")
    observed: Optional[Any] = Field(None, description="Observed spectrum or value")
    expected: Optional[Any] = Field(None, description="Expected spectrum or value")


class ErrorRecord(BaseModel):
    record: Literal["error"] = "error"
    error: str = Field(..., description="Error class name")
    detail: str = Field(..., description="Error message")
    exit_code: int = Field(..., description="Process exit status")
    context: Dict[str, Any] = Field(default_factory=dict, description="Structured diagnostics")


class SummaryRecord(BaseModel):
    record: Literal["summary"] = "summary"
    exit_code: int = Field(..., description="Process exit status")
    trials: Optional[int] = Field(None, description="Trials run")
    passes: Optional[int] = Field(None, description="Trials that passed")
    failures: Optional[int] = Field(None, description="Trials that failed")
    wall_time: float = Field(..., description="Seconds elapsed; the only nondeterministic field")


class CampaignReport(BaseModel):
    campaign: str = Field(..., description="Campaign identifier")
    n: int = Field(..., description="Matrix dimension")
    r: int
    s: int
    seed: int
    trials: int = Field(..., ge=0)
    passes: int = Field(..., ge=0)
    failures: List[FailureRecord] = Field(default_factory=list)
    results: List[ResultRecord] = Field(default_factory=list)
    tolerance: Dict[str, float]
    wall_time: float = 0.0

    @model_validator(mode="after")
    def check_counts(self) -> "CampaignReport":
        if self.passes + len(self.failures) != self.trials:
            raise ValueError(f"passes ({self.passes}) + failures ({len(self.failures)}) != trials ({self.trials})")
        return self


def dump_record(record: BaseModel) -> str:
    return json.dumps(record.model_dump(mode="json"), sort_keys=True, allow_nan=False, default=str)
