import math

from pydantic import BaseModel, ConfigDict


class Base(BaseModel):
    """Frozen base shared by every value object of the library."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


def require_finite(value: float) -> float:
    if not math.isfinite(value):
        raise ValueError("must be finite")
    return value
