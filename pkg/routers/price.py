import logging
from typing import Annotated, Optional

import click
import typer

from ..dependencies import (
    ADep,
    AveragingDep,
    BDep,
    CDep,
    DivYieldDep,
    GridDep,
    InputDep,
    JsonDep,
    KappaDep,
    MuDep,
    RateDep,
    SigmaDep,
    SpotDep,
    build_market,
    build_mixture,
    emit_json,
    emit_records,
    surface_errors,
)
from ..exceptions import AtsException
from ..models.pricing import MarketContext, MixtureParams
from ..pricing import DAYS_PER_YEAR, calibrate, load_quotes_csv, price_both
from ..utils import parse_grid

logger = logging.getLogger(__name__)

router = typer.Typer(no_args_is_help=True, help="European options on the Gaussian mixture of the ATS subordinator.")


def _quote_row(mp: MixtureParams, market: MarketContext, strike: float, maturity: float) -> dict:
    """One priced strike; a failing strike becomes a row carrying its error instead of ending the batch."""
    try:
        price = price_both(mp, market, strike, maturity)
    except AtsException as exc:
        logger.info("strike %g at T=%.6g not priced: %s", strike, maturity, exc.detail)
        return {"strike": strike, "maturity": maturity, "error": exc.detail}
    return {"strike": strike, "maturity": maturity, **price.model_dump(), "error": None}


@router.command("quote")
@surface_errors
def quote_command(
    strike: GridDep = "80,90,100,110,120",
    maturity_days: Annotated[float, typer.Option(click_type=click.FloatRange(min=0.0, min_open=True), help="Maturity in days (365 per year).")] = 47.0,
    spot: SpotDep = 100.0,
    rate: RateDep = 0.0,
    div_yield: DivYieldDep = 0.0,
    a: ADep = 2.0,
    b: BDep = 1.0,
    c: CDep = 0.5,
    mu: MuDep = -0.1,
    sigma: SigmaDep = 0.5,
    kappa: KappaDep = 0.0,
    averaging: AveragingDep = True,
    as_json: JsonDep = False,
):
    """Call and put prices with both in-the-money probabilities"""
    mp = build_mixture(a, b, c, mu, sigma, kappa, averaging)
    market = build_market(spot, rate, div_yield)
    maturity = maturity_days / DAYS_PER_YEAR
    records = [_quote_row(mp, market, float(k), maturity) for k in parse_grid(strike)]
    emit_records(records, as_json)


@router.command("calibrate")
@surface_errors
def calibrate_command(
    input_path: InputDep,
    c: Annotated[float, typer.Option("--c", help="Fixed family parameter c.")] = 0.5,
    spot: SpotDep = 9232.98,
    rate: RateDep = 0.0,
    div_yield: DivYieldDep = 0.0,
    kappa: KappaDep = 0.0,
    averaging: AveragingDep = True,
    seed_params: Annotated[
        Optional[list[str]], typer.Option("--seed-params", help="Start as a,b,mu,sigma; repeat for several starts.")
    ] = None,
    max_iter: Annotated[int, typer.Option(min=1, help="Nelder-Mead iterations per start.")] = 600,
    as_json: JsonDep = False,
):
    """Fit (a, b, mu, sigma) to quotes by minimising the average relative pricing error"""
    init = None
    if seed_params:
        try:
            init = [tuple(float(v) for v in s.split(",")) for s in seed_params]
        except ValueError:
            raise typer.BadParameter("--seed-params takes a,b,mu,sigma")
        if any(len(s) != 4 for s in init):
            raise typer.BadParameter("--seed-params takes exactly four values")
    result = calibrate(
        load_quotes_csv(input_path),
        build_market(spot, rate, div_yield),
        c,
        init=init,
        kappa=kappa,
        averaging=averaging,
        max_iter=max_iter,
    )
    if as_json:
        params = result.params
        emit_json(
            {
                "params": {
                    "a": params.base.a,
                    "b": params.base.b,
                    "c": params.base.c,
                    "mu": params.mu,
                    "sigma": params.sigma,
                    "kappa": params.kappa,
                },
                "arpe": result.arpe,
                "per_quote": [row.model_dump() for row in result.per_quote],
            }
        )
    else:
        emit_records([row.model_dump() for row in result.per_quote], False)
