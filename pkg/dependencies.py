import json
import logging
from functools import wraps
from pathlib import Path
from typing import Annotated

import pandas as pd
import typer
from pydantic import BaseModel, ValidationError

from .exceptions import AtsException
from .models.degrade import BarrierSpec
from .models.params import AtsParams
from .models.pricing import MarketContext, MixtureParams
from .utils import InversionMethod

logger = logging.getLogger(__name__)


ADep = Annotated[float, typer.Option(help="Shape parameter a > 0.")]
BDep = Annotated[float, typer.Option(help="Tempering parameter b > 0.")]
CDep = Annotated[float, typer.Option(help="Family parameter c in [0, 1).")]
TDep = Annotated[float, typer.Option(help="Time t >= 0.")]
GridDep = Annotated[str, typer.Option(help="Evaluation grid: lo..hi[:n] or v1,v2,...")]
MethodDep = Annotated[InversionMethod, typer.Option(help="Density inversion route.")]
SeedDep = Annotated[int, typer.Option(help="Random seed (defaults to ATS_SEED).")]
JsonDep = Annotated[bool, typer.Option("--json", help="Emit JSON instead of CSV.")]
InputDep = Annotated[Path, typer.Option("--input", exists=True, dir_okay=False, help="Input CSV file.")]

MuDep = Annotated[float, typer.Option(help="Brownian location mu.")]
SigmaDep = Annotated[float, typer.Option(help="Brownian scale sigma > 0.")]
KappaDep = Annotated[float, typer.Option(help="Drift kappa per unit time.")]
AveragingDep = Annotated[bool, typer.Option("--averaging/--no-averaging", help="Running-average clock or plain TS clock.")]
SpotDep = Annotated[float, typer.Option(help="Spot price S0 > 0.")]
RateDep = Annotated[float, typer.Option(help="Continuously compounded rate r.")]
DivYieldDep = Annotated[float, typer.Option("--div-yield", help="Continuous dividend yield q.")]

InitialConditionDep = Annotated[float, typer.Option(help="Initial condition l.")]
AlertLevelDep = Annotated[float, typer.Option(help="Alert level below l.")]


def _first_error(exc: ValidationError) -> str:
    error = exc.errors()[0]
    where = ".".join(str(part) for part in error["loc"])
    return f"{where}: {error['msg']}" if where else error["msg"]


def _build(model: type[BaseModel], **fields) -> BaseModel:
    """
    Validate CLI flags into a model.

    Args:
        model (type[BaseModel]): The pydantic model to build.
        **fields: Flag values keyed by field name.

    Raises:
        typer.BadParameter: If a flag violates a model constraint.

    Returns:
        BaseModel: The validated model.
    """
    try:
        return model(**fields)
    except ValidationError as exc:
        raise typer.BadParameter(_first_error(exc))


def build_params(a: float, b: float, c: float, t: float = 1.0) -> AtsParams:
    return _build(AtsParams, a=a, b=b, c=c, t=t)


def build_mixture(
    a: float, b: float, c: float, mu: float, sigma: float, kappa: float = 0.0, averaging: bool = True
) -> MixtureParams:
    base = build_params(a, b, c)
    return _build(MixtureParams, kappa=kappa, mu=mu, sigma=sigma, base=base, averaging=averaging)


def build_market(spot: float, rate: float, div_yield: float) -> MarketContext:
    return _build(MarketContext, spot=spot, rate=rate, dividend_yield=div_yield)


def build_barrier(initial_condition: float, alert_level: float) -> BarrierSpec:
    return _build(BarrierSpec, initial_condition=initial_condition, alert_level=alert_level)


def surface_errors(command):
    """Turn library errors into `error: <detail>` on stderr and the matching exit code"""

    @wraps(command)
    def wrapper(*args, **kwargs):
        logger.debug("running %s", command.__name__)
        try:
            return command(*args, **kwargs)
        except AtsException as exc:
            typer.echo(f"error: {exc.detail}", err=True)
            raise typer.Exit(code=exc.exit_code)

    return wrapper


def emit_frame(frame: pd.DataFrame, as_json: bool) -> None:
    """Write a table to stdout as CSV, or as a JSON list of records"""
    if as_json:
        typer.echo(frame.to_json(orient="records", indent=2, double_precision=15))
    else:
        typer.echo(frame.to_csv(index=False, float_format="%.15g"), nl=False)


def emit_records(records: list[dict], as_json: bool) -> None:
    emit_frame(pd.DataFrame.from_records(records), as_json)


def emit_json(payload) -> None:
    """Write any JSON-able payload, including pydantic models"""
    if isinstance(payload, BaseModel):
        typer.echo(payload.model_dump_json(indent=2))
    else:
        typer.echo(json.dumps(payload, indent=2, default=str))
