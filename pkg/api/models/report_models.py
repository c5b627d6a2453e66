"""
Report Models - Structured Check Results
========================================
Every checker in the toolkit returns a Report. A failing report always
carries a counterexample; a passing existence check carries a witness.
Reports serialize to canonical JSON (sorted keys) so that identical jobs
produce identical bytes.
"""

import json
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

REPORT_SCHEMA_VERSION = "1.0"


class Status(str, Enum):
    """Outcome of a check"""
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


class Certification(str, Enum):
    """How far a verdict reaches"""
    EXHAUSTIVE = "exhaustive"
    WINDOW = "window-certified"
    CHARACTERIZATION = "characterization-certified"
    LIFTING = "lifting-exercised"


def plain(value: Any) -> Any:
    """Convert witness payloads into JSON-ready values with a stable order"""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(plain(k)) if not isinstance(k, str) else k: plain(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted((plain(v) for v in value), key=repr)
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(v) for v in value]
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    return str(value)


class Report(BaseModel):
    """Result of one check, possibly with nested sub-checks"""

    schema_version: str = REPORT_SCHEMA_VERSION
    check: str
    status: Status
    certification: Certification = Certification.EXHAUSTIVE
    conditions: Dict[str, Status] = Field(default_factory=dict)
    witness: Optional[Any] = None
    counterexample: Optional[Any] = None
    stats: Dict[str, int] = Field(default_factory=dict)
    subreports: List["Report"] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)

    @field_validator("witness", "counterexample", mode="before")
    @classmethod
    def _plain_payload(cls, value: Any) -> Any:
        return plain(value)

    @field_validator("stats", mode="before")
    @classmethod
    def _int_stats(cls, value: Any) -> Any:
        return {str(k): int(v) for k, v in (value or {}).items()}

    @model_validator(mode="after")
    def _fail_has_counterexample(self) -> "Report":
        if self.status == Status.FAIL and self.counterexample is None:
            raise ValueError(f"failing report for {self.check!r} needs a counterexample")
        return self

    @property
    def passed(self) -> bool:
        return self.status == Status.PASS

    @property
    def failed(self) -> bool:
        return self.status == Status.FAIL

    @classmethod
    def passing(cls, check: str, witness: Any = None, **fields: Any) -> "Report":
        return cls(check=check, status=Status.PASS, witness=witness, **fields)

    @classmethod
    def failing(cls, check: str, counterexample: Any, **fields: Any) -> "Report":
        return cls(check=check, status=Status.FAIL, counterexample=counterexample, **fields)

    @classmethod
    def inconclusive(cls, check: str, **fields: Any) -> "Report":
        return cls(check=check, status=Status.INCONCLUSIVE, **fields)

    def certified(self, certification: Certification) -> "Report":
        """Copy of this report (and its subreports) relabelled with a certification"""
        return self.model_copy(update={
            "certification": certification,
            "subreports": [sub.certified(certification) for sub in self.subreports],
        })

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2, ensure_ascii=False)


Report.model_rebuild()


def combine(check: str, subreports: List[Report], **fields: Any) -> Report:
    """Conjunction of sub-checks: the first failure (or inconclusive) decides"""
    stats: Dict[str, int] = {}
    for sub in subreports:
        for key, count in sub.stats.items():
            stats[key] = stats.get(key, 0) + count
    stats.update(fields.pop("stats", {}))
    for sub in subreports:
        if sub.status == Status.FAIL:
            return Report.failing(check, {"failed": sub.check, "detail": sub.counterexample},
                                  subreports=subreports, stats=stats, **fields)
    if any(sub.status == Status.INCONCLUSIVE for sub in subreports):
        return Report.inconclusive(check, subreports=subreports, stats=stats, **fields)
    return Report.passing(check, subreports=subreports, stats=stats, **fields)
