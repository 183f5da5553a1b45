from pydantic import Field

from . import Base


class SummaryStats(Base):
    mean: float
    variance: float = Field(gt=0)
    skewness: float
    excess_kurtosis: float
