import math

from pydantic import Field, field_validator, model_validator

from . import Base, require_finite
from .params import AtsParams


def strip_bounds(b: float, mu: float, sigma: float) -> tuple[float, float]:
    """Real u for which the mixture transform exists: (mu -+ sqrt(mu^2 + 2 b sigma^2)) / sigma^2."""
    root = math.sqrt(mu * mu + 2.0 * b * sigma * sigma)
    s2 = sigma * sigma
    return (mu - root) / s2, (mu + root) / s2


class MixtureParams(Base):
    kappa: float = 0.0
    mu: float
    sigma: float = Field(gt=0)
    base: AtsParams
    # False swaps the running-average subordinator for the plain TS one
    averaging: bool = True

    @field_validator("kappa", "mu", "sigma")
    @classmethod
    def validate_finite(cls, v):
        return require_finite(v)

    @model_validator(mode="after")
    def validate_integrability(self):
        lo, _ = strip_bounds(self.base.b, self.mu, self.sigma)
        if not lo < -1.0:
            raise ValueError(
                f"e^H is not integrable: strip lower bound {lo:.6g} must lie below -1 "
                "(equivalently mu + sigma^2/2 < b)"
            )
        return self

    def with_horizon(self, t: float) -> "MixtureParams":
        return self.model_copy(update={"base": self.base.with_horizon(t)})


class OptionQuote(Base):
    strike: float = Field(gt=0)
    maturity: float = Field(gt=0)
    market_price: float = Field(gt=0)
    is_call: bool = True


class MarketContext(Base):
    spot: float = Field(gt=0)
    rate: float = 0.0
    dividend_yield: float = 0.0

    def forward(self, maturity: float) -> float:
        return self.spot * math.exp((self.rate - self.dividend_yield) * maturity)


class OptionPrice(Base):
    call: float
    put: float
    p_star: float
    p_breve: float
    bound_violation: bool = False


class QuoteReport(Base):
    strike: float
    maturity: float
    model_price: float
    market_price: float
    rel_err: float


class CalibrationResult(Base):
    params: MixtureParams
    arpe: float
    per_quote: list[QuoteReport]
    seed_arpes: list[float] = []
