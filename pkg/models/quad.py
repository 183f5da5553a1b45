import numpy as np
from pydantic import Field

from . import Base
from ..utils import RuleOrder


class QuadConfig(Base):
    abs_tol: float = Field(default=1e-10, gt=0)
    rel_tol: float = Field(default=1e-10, gt=0)
    max_subdivisions: int = Field(default=200, ge=1)
    rule_order: RuleOrder = RuleOrder.GK21

    def tolerance(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


class QuadResult(Base):
    value: float
    error_estimate: float = Field(ge=0)
    subdivisions_used: int = Field(ge=0)
    converged: bool
    # the worst panel sits at its round-off floor; bisecting further cannot help
    roundoff_limited: bool = False

    @property
    def usable(self) -> bool:
        return self.converged or self.roundoff_limited


class VectorQuadResult(Base):
    values: np.ndarray
    error_estimate: float = Field(ge=0)
    subdivisions_used: int = Field(ge=0)
    converged: bool
    roundoff_limited: bool = False

    @property
    def usable(self) -> bool:
        return self.converged or self.roundoff_limited
