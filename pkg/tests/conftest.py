import numpy as np
import pytest

from ..models.params import AtsParams
from ..models.pricing import MarketContext, MixtureParams


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def reference():
    return AtsParams(a=1.0, b=1.0, c=0.5)


@pytest.fixture
def average_gamma():
    return AtsParams(a=2.0, b=1.0, c=0.0)


@pytest.fixture
def mixture():
    return MixtureParams(mu=-0.1, sigma=0.5, base=AtsParams(a=2.0, b=1.0, c=0.25))


@pytest.fixture
def market():
    return MarketContext(spot=100.0, rate=0.01, dividend_yield=0.005)


@pytest.fixture
def write_csv(tmp_path):
    def write(text: str, name: str = "data.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write
