import math

import numpy as np
import pytest
from scipy import integrate
from scipy import stats as sps

from ..exceptions import DataFormatError, DomainError
from ..models.params import AtsParams
from ..models.pricing import MixtureParams, OptionQuote
from ..params import laplace_exponent_ats
from ..pricing import (
    DAYS_PER_YEAR,
    arpe,
    calibrate,
    characteristic_function,
    itm_probabilities,
    itm_probabilities_batch,
    itm_probabilities_density,
    load_quotes_csv,
    log_martingale_factor,
    mixture_exponent,
    pdf_mixture,
    price_both,
    price_european,
    price_quotes,
)

STRIKES = [80.0, 90.0, 100.0, 110.0, 120.0]


def test_characteristic_function_at_zero(mixture):
    assert characteristic_function(mixture, 0.0) == pytest.approx(1.0, abs=1e-15)
    phi = characteristic_function(mixture, np.array([0.5, 3.0, 20.0]))
    assert np.all(np.abs(phi) <= 1.0 + 1e-12)


def test_martingale_factor_matches_clock_exponent(mixture):
    mp = mixture.model_copy(update={"kappa": 0.05})
    expected = 0.05 * mp.base.t + float(np.real(laplace_exponent_ats(mp.base, -mp.mu - 0.5 * mp.sigma**2)))
    assert log_martingale_factor(mp) == pytest.approx(expected, rel=1e-12)


def test_mixture_exponent_outside_strip(mixture):
    # strip for b=1, mu=-0.1, sigma=0.5 is roughly (-3.26, 2.46)
    with pytest.raises(DomainError):
        mixture_exponent(mixture, 3.0)
    with pytest.raises(DomainError):
        mixture_exponent(mixture, np.array([0.0, -4.0]))
    assert np.isfinite(mixture_exponent(mixture, 2.0))


def test_plain_clock_with_half_is_normal_inverse_gaussian():
    # IG clock: the mixture is NIG with delta = sqrt(2 pi) at sigma, beta = mu/sigma^2
    mp = MixtureParams(mu=-0.1, sigma=0.5, base=AtsParams(a=1.0, b=1.0, c=0.5), averaging=False)
    delta = math.sqrt(2.0 * math.pi) * mp.base.shape * mp.sigma
    beta = mp.mu / mp.sigma**2
    alpha = math.sqrt(beta**2 + 2.0 * mp.base.b / mp.sigma**2)
    xs = np.array([-1.5, -0.4, 0.0, 0.3, 1.2])
    expected = sps.norminvgauss.pdf(xs, alpha * delta, beta * delta, scale=delta)
    np.testing.assert_allclose(pdf_mixture(mp, xs), expected, rtol=1e-7)


def test_mixture_density_matches_direct_inversion(mixture):
    for x in (-0.3, 0.2, 0.8):

        def integrand(u, x=x):
            return np.real(np.exp(-1j * u * x) * characteristic_function(mixture, u))

        direct, _ = integrate.quad(integrand, 0.0, 2000.0, limit=2000, epsabs=1e-12, epsrel=1e-10)
        assert pdf_mixture(mixture, x) == pytest.approx(direct / math.pi, rel=1e-6)


def test_mixture_density_domain(mixture):
    with pytest.raises(DomainError):
        pdf_mixture(mixture.with_horizon(0.0), 0.1)
    with pytest.raises(DomainError):
        pdf_mixture(mixture, float("nan"))
    spike = MixtureParams(mu=0.0, sigma=0.3, base=AtsParams(a=0.5, b=1.0, c=0.0))
    with pytest.raises(DomainError):
        pdf_mixture(spike, 0.0)


def test_fourier_and_density_probabilities_agree(mixture, market):
    maturity = 0.5
    p_star, p_breve = itm_probabilities_batch(mixture, market, STRIKES, maturity)
    for k, ps, pb in zip(STRIKES, p_star, p_breve):
        ds, db = itm_probabilities_density(mixture, market, k, maturity)
        assert ps == pytest.approx(ds, abs=1e-6)
        assert pb == pytest.approx(db, abs=1e-6)
    assert np.all(np.diff(p_star) < 0)
    assert np.all(np.diff(p_breve) < 0)


def test_itm_probabilities_domain(mixture, market):
    with pytest.raises(DomainError):
        itm_probabilities(mixture, market, 100.0, 0.0)
    with pytest.raises(DomainError):
        itm_probabilities_batch(mixture, market, [100.0, -5.0], 0.5)


def test_put_call_parity_and_bounds(mixture, market):
    maturity = 47.0 / DAYS_PER_YEAR
    share = market.spot * math.exp(-market.dividend_yield * maturity)
    for k in STRIKES:
        price = price_both(mixture, market, k, maturity)
        cash = k * math.exp(-market.rate * maturity)
        assert price.put - price.call == pytest.approx(cash - share, abs=1e-10)
        assert price.call >= max(share - cash, 0.0)
        assert price.put >= 0.0
        assert price.call <= share
        assert not price.bound_violation


def test_call_monotone_and_convex_in_strike(mixture, market):
    strikes = np.linspace(80.0, 120.0, 9)
    calls = np.array([price_both(mixture, market, k, 0.25).call for k in strikes])
    assert np.all(np.diff(calls) < 0)
    assert np.all(np.diff(calls, 2) > -1e-8)


def test_price_quotes_matches_single_pricing(mixture, market):
    quotes = [
        OptionQuote(strike=95.0, maturity=0.1, market_price=1.0, is_call=False),
        OptionQuote(strike=105.0, maturity=0.4, market_price=1.0),
        OptionQuote(strike=100.0, maturity=0.1, market_price=1.0),
        OptionQuote(strike=90.0, maturity=0.4, market_price=1.0, is_call=False),
    ]
    batch = price_quotes(mixture, market, quotes, workers=2)
    single = [price_european(mixture, market, q) for q in quotes]
    np.testing.assert_allclose(batch, single, rtol=1e-9, atol=1e-10)


def test_arpe():
    assert arpe([1.1, 1.8], [1.0, 2.0]) == pytest.approx(0.1)
    with pytest.raises(DomainError):
        arpe([1.0], [1.0, 2.0])
    with pytest.raises(DomainError):
        arpe([], [])


def _synthetic_quotes(mp, market):
    quotes = []
    for maturity in np.array([19.0, 47.0, 166.0, 257.0]) / DAYS_PER_YEAR:
        maturity = float(maturity)
        for k in (90.0, 95.0, 105.0, 110.0):
            price = price_both(mp, market, k, maturity)
            is_call = k > market.spot
            quotes.append(
                OptionQuote(
                    strike=k, maturity=maturity, market_price=price.call if is_call else price.put, is_call=is_call
                )
            )
    return quotes


@pytest.mark.slow
def test_calibrate_recovers_generating_prices(market):
    truth = MixtureParams(mu=-0.1, sigma=0.5, base=AtsParams(a=2.0, b=1.0, c=0.5))
    quotes = _synthetic_quotes(truth, market)
    seed = (truth.base.a, truth.base.b, truth.mu, truth.sigma)
    result = calibrate(quotes, market, 0.5, init=[seed], max_iter=5)
    assert result.seed_arpes[0] < 1e-6
    assert result.arpe <= result.seed_arpes[0] + 1e-12
    assert result.arpe < 1e-4
    assert len(result.per_quote) == len(quotes)
    assert result.params.base.c == 0.5


def test_calibrate_rejects_bad_inputs(market):
    quotes = [OptionQuote(strike=k, maturity=0.1, market_price=1.0) for k in (95.0, 100.0, 105.0)]
    with pytest.raises(DomainError):
        calibrate(quotes, market, 0.5)
    quotes.append(OptionQuote(strike=110.0, maturity=0.1, market_price=0.5))
    with pytest.raises(DomainError):
        calibrate(quotes, market, 1.0)
    with pytest.raises(DomainError):
        calibrate(quotes, market, 0.5, init=[(1.0, -1.0, 0.0, 0.5)])


def test_load_quotes_csv(write_csv):
    path = write_csv("strike,maturity_days,price,type\n100,36.5,5.2,C\n95, 73 ,1.1,p\n")
    quotes = load_quotes_csv(path)
    assert [q.is_call for q in quotes] == [True, False]
    assert quotes[0].maturity == pytest.approx(0.1)
    assert quotes[1].maturity == pytest.approx(0.2)
    assert quotes[1].market_price == 1.1


def test_load_quotes_csv_errors(write_csv):
    with pytest.raises(DataFormatError) as exc:
        load_quotes_csv(write_csv("strike,maturity_days,price\n100,30,1\n"))
    assert exc.value.line == 1
    with pytest.raises(DataFormatError) as exc:
        load_quotes_csv(write_csv("strike,maturity_days,price,type\n100,30,1,C\n100,30,1,X\n"))
    assert exc.value.line == 3
    with pytest.raises(DataFormatError) as exc:
        load_quotes_csv(write_csv("strike,maturity_days,price,type\n100,30,abc,C\n"))
    assert exc.value.line == 2
    with pytest.raises(DataFormatError) as exc:
        load_quotes_csv(write_csv("strike,maturity_days,price,type\n100,30,-1,P\n"))
    assert exc.value.line == 2
    assert exc.value.exit_code == 8
