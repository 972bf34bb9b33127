"""Structured outcome of one inequality check."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

PASS = "pass"
FAIL = "fail"
PRECONDITION = "precondition violated"


@dataclass
class VerificationReport:
    """One inequality check ``lhs >= rhs`` with its numerical tolerance.

    ``margin`` is ``lhs - rhs`` unless the check documents a different
    normalization; ``passed`` is ``margin >= -tolerance``.  Rows whose inputs
    violate a precondition carry ``status == "precondition violated"`` and
    ``passed == False`` but are not counted as failures by the harness.
    """

    claim_id: str
    inputs: str
    lhs: float
    rhs: float
    margin: float
    tolerance: float
    passed: bool = field(default=False)
    status: str = ""
    numerics: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.status == PRECONDITION:
            self.passed = False
        else:
            self.passed = bool(self.margin >= -self.tolerance)
            self.status = PASS if self.passed else FAIL

    @classmethod
    def precondition(cls, claim_id: str, inputs: str, reason: str) -> "VerificationReport":
        nan = math.nan
        return cls(claim_id, inputs, nan, nan, nan, 0.0, status=PRECONDITION, numerics={"reason": reason})

    @property
    def relative_margin(self) -> float:
        return self.margin / abs(self.rhs) if self.rhs else math.inf

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "VerificationReport":
        report = cls(**{k: data[k] for k in ("claim_id", "inputs", "lhs", "rhs", "margin", "tolerance")},
                     status=data.get("status", ""), numerics=dict(data.get("numerics", {})))
        return report

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)
