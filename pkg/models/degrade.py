import numpy as np
from pydantic import Field, field_validator, model_validator

from . import Base
from ..utils import DegradationModel


class DegradationSeries(Base):
    unit_id: str = Field(min_length=1)
    times: np.ndarray
    readings: np.ndarray
    temperature_label: str | None = None

    @field_validator("times", "readings", mode="before")
    @classmethod
    def validate_vector(cls, v):
        arr = np.asarray(v, dtype=float)
        if arr.ndim != 1 or not np.all(np.isfinite(arr)):
            raise ValueError("must be a finite one dimensional vector")
        return arr

    @model_validator(mode="after")
    def validate_series(self):
        if self.times.size != self.readings.size:
            raise ValueError("times and readings must have equal length")
        if self.times.size == 0 or self.times[0] != 0.0:
            raise ValueError("first inspection time must be 0")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.readings[0] != 0.0:
            raise ValueError("reading at time 0 must be 0")
        return self


class FitResult(Base):
    model: DegradationModel
    a_hat: float = Field(gt=0)
    b_hat: float = Field(gt=0)
    log_likelihood: float
    aic: float
    usable: bool = True

    @model_validator(mode="after")
    def validate_aic(self):
        if self.usable and not np.isclose(self.aic, 4.0 - 2.0 * self.log_likelihood, rtol=0, atol=1e-9):
            raise ValueError("aic must equal 4 - 2 * log_likelihood")
        return self


class BarrierSpec(Base):
    initial_condition: float = Field(gt=0)
    alert_level: float = Field(gt=0)

    @model_validator(mode="after")
    def validate_levels(self):
        if not self.alert_level < self.initial_condition:
            raise ValueError("alert_level must lie strictly below initial_condition")
        return self

    @property
    def headroom(self) -> float:
        return self.initial_condition - self.alert_level


class ReportRow(Base):
    unit_id: str
    model: DegradationModel
    a_hat: float | None = None
    b_hat: float | None = None
    aic: float | None = None
    survival: float | None = None
    usable: bool
    note: str | None = None
