from . import Base


class CheckResult(Base):
    name: str
    passed: bool
    deviation: float
    tolerance: float
    seconds: float
    detail: str | None = None
