"""Pydantic models shared across the statistical modules."""

from enum import Enum
from typing import Optional

from pydantic import BaseModel


class Verdict(str, Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    INCONCLUSIVE = "inconclusive"


class TestReport(BaseModel):
    """Outcome record of a statistical procedure (KS, bootstrap)."""

    __test__ = False  # not a pytest class

    test: str
    statistic: float
    threshold: float
    alpha: float
    verdict: Verdict
    n_samples: int
    n_resamples: Optional[int] = None
    subsample_size: Optional[int] = None
    seed: Optional[int] = None
    stream_id: Optional[int] = None
    note: Optional[str] = None

    @property
    def accepted(self) -> bool:
        return self.verdict == Verdict.ACCEPT
