from typing import Callable

import numpy as np
from pydantic import Field, field_validator

from . import Base, require_finite


class AtsParams(Base):
    a: float = Field(gt=0)
    b: float = Field(gt=0)
    c: float = Field(ge=0, lt=1)
    t: float = Field(default=1.0, ge=0)

    @field_validator("a", "b", "c", "t")
    @classmethod
    def validate_finite(cls, v):
        return require_finite(v)

    @property
    def shape(self) -> float:
        """Effective shape a*t; laws sharing (shape, b, c) coincide."""
        return self.a * self.t

    def with_horizon(self, t: float) -> "AtsParams":
        return AtsParams(a=self.a, b=self.b, c=self.c, t=t)

    def replace(self, **changes: float) -> "AtsParams":
        return AtsParams(**{**self.model_dump(), **changes})


class LevyTriplet(Base):
    drift: float
    brownian: float = Field(default=0.0, ge=0)
    levy_density: Callable[[np.ndarray], np.ndarray]
