from pydantic import Field

from . import Base
from ..utils import TailRegime


class TailEstimate(Base):
    value: float = Field(ge=0)
    regime: TailRegime
    leading_order_only: bool = True


class LimitReport(Base):
    """Max deviations of the three weak-convergence limits on a u-grid."""

    activity_limit: float = Field(ge=0)
    stable_limit: float | None = Field(default=None, ge=0)
    gamma_limit: float = Field(ge=0)
