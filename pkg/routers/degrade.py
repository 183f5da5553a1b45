from typing import Annotated, Optional

import numpy as np
import typer

from ..degrade import (
    INSPECTION_TIMES,
    batch_report,
    expected_condition,
    load_series_csv,
    median_lifetime,
    simulate_series,
    survival_probability,
)
from ..dependencies import (
    ADep,
    AlertLevelDep,
    BDep,
    CDep,
    GridDep,
    InitialConditionDep,
    InputDep,
    JsonDep,
    SeedDep,
    build_barrier,
    build_params,
    emit_records,
    surface_errors,
)
from ..utils import SEED, WORKERS, DegradationModel, parse_grid

router = typer.Typer(no_args_is_help=True, help="Degradation modelling: fits, survival and lifetimes.")


def _parse_models(spec: str) -> tuple[DegradationModel, ...]:
    try:
        return tuple(DegradationModel(name.strip().lower()) for name in spec.split(",") if name.strip())
    except ValueError:
        raise typer.BadParameter(f"models must be drawn from {[m.value for m in DegradationModel]}, got {spec!r}")


@router.command("fit")
@surface_errors
def fit_command(
    input_path: InputDep,
    horizon: Annotated[float, typer.Option(help="Horizon T for the survival column.")] = 1.0,
    models: Annotated[str, typer.Option(help="Comma separated subset of gamma, ag, aig.")] = "gamma,ag,aig",
    barrier: Annotated[Optional[float], typer.Option(help="Headroom l - D; sets l to the alert level plus this value.")] = None,
    initial_condition: InitialConditionDep = 4.8,
    alert_level: AlertLevelDep = 1.0,
    workers: Annotated[int, typer.Option(min=1, help="Threads fitting units concurrently.")] = WORKERS,
    as_json: JsonDep = False,
):
    """Per unit and model: estimates, AIC and survival to the horizon (NA rows for unusable units)"""
    if barrier is not None:
        initial_condition = alert_level + barrier
    spec = build_barrier(initial_condition, alert_level)
    rows = batch_report(load_series_csv(input_path), spec, horizon, _parse_models(models), workers)
    emit_records([row.model_dump(mode="json") for row in rows], as_json)


@router.command("survival")
@surface_errors
def survival_command(
    horizon: GridDep = "0.25..2:8",
    a: ADep = 5.0,
    b: BDep = 6.0,
    c: CDep = 0.0,
    initial_condition: InitialConditionDep = 4.8,
    alert_level: AlertLevelDep = 1.0,
    as_json: JsonDep = False,
):
    """Survival probability and expected condition on a grid of horizons"""
    p = build_params(a, b, c)
    spec = build_barrier(initial_condition, alert_level)
    records = [
        {
            "horizon": float(T),
            "survival": survival_probability(p, spec, float(T)),
            "expected_condition": expected_condition(p, spec, float(T)),
        }
        for T in parse_grid(horizon)
    ]
    emit_records(records, as_json)


@router.command("lifetime")
@surface_errors
def lifetime_command(
    a: ADep = 5.0,
    b: BDep = 6.0,
    c: CDep = 0.0,
    initial_condition: InitialConditionDep = 4.8,
    alert_level: AlertLevelDep = 1.0,
    as_json: JsonDep = False,
):
    """Median lifetime: the horizon where survival crosses 1/2"""
    p = build_params(a, b, c)
    emit_records([{"median_lifetime": median_lifetime(p, build_barrier(initial_condition, alert_level))}], as_json)


@router.command("simulate")
@surface_errors
def simulate_command(
    units: Annotated[int, typer.Option(min=1)] = 29,
    times: GridDep = ",".join(str(v) for v in INSPECTION_TIMES),
    seed: SeedDep = SEED,
    a: ADep = 15.0,
    b: BDep = 5.0,
    c: CDep = 0.0,
    n_steps: Annotated[int, typer.Option(min=1, help="Euler steps behind each series.")] = 2000,
):
    """Synthetic running-average readings in the `unit_id,time,reading` input format"""
    data = simulate_series(build_params(a, b, c), np.random.default_rng(seed), units, parse_grid(times), n_steps)
    records = [
        {"unit_id": s.unit_id, "time": float(t), "reading": float(r)}
        for s in data
        for t, r in zip(s.times, s.readings)
    ]
    emit_records(records, False)
