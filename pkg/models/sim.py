import numpy as np
from pydantic import Field, field_validator, model_validator

from . import Base
from ..utils import BinSpacing


class PathGrid(Base):
    n_steps: int = Field(ge=1)
    horizon: float = Field(gt=0)

    @property
    def dt(self) -> float:
        return self.horizon / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.n_steps + 1)


class CpaConfig(Base):
    n_bins: int = Field(default=200, ge=1)
    x_min: float = Field(default=1e-10, gt=0)
    x_max: float = Field(default=20.0, gt=0)
    spacing: BinSpacing = BinSpacing.LOG
    # floor the compensated drift at zero so every path is nondecreasing
    monotone: bool = True

    @model_validator(mode="after")
    def validate_range(self):
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be below x_max")
        return self

    @classmethod
    def coarse_uniform(cls) -> "CpaConfig":
        """Uniform bins on [1e-10, 7 + 1e-10] with the printed compensated drift."""
        return cls(n_bins=100, x_min=1e-10, x_max=7.0 + 1e-10, spacing=BinSpacing.UNIFORM, monotone=False)


class CpaBins(Base):
    edges: np.ndarray
    intensities: np.ndarray
    jump_sizes: np.ndarray
    drift: float


class SamplePath(Base):
    grid: PathGrid
    values: np.ndarray

    @field_validator("values")
    @classmethod
    def validate_origin(cls, v):
        if v.ndim != 1 or v.size == 0 or v[0] != 0.0:
            raise ValueError("path must be one dimensional and start at 0")
        return v

    @model_validator(mode="after")
    def validate_length(self):
        if self.values.size != self.grid.n_steps + 1:
            raise ValueError("path length must equal n_steps + 1")
        return self

    @property
    def is_nondecreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) >= 0))
