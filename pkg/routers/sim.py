from typing import Annotated, Optional

import numpy as np
import pandas as pd
import click
import typer

from ..dependencies import (
    ADep,
    BDep,
    CDep,
    JsonDep,
    KappaDep,
    MuDep,
    SeedDep,
    SigmaDep,
    build_market,
    build_mixture,
    build_params,
    emit_frame,
    surface_errors,
)
from ..models.sim import CpaConfig, PathGrid
from ..sim import cpa_bins, cpa_matrix, euler_matrix, matrix_frame, mixture_matrix, price_paths
from ..utils import SEED, BinSpacing, PathModel

router = typer.Typer(no_args_is_help=True, help="Simulate paths of X, its running average, the induced subordinator and H.")


def _cpa_config(coarse_uniform: bool, bins: int, x_min: float, x_max: float, spacing: BinSpacing, monotone: bool) -> CpaConfig:
    if coarse_uniform:
        return CpaConfig.coarse_uniform()
    try:
        return CpaConfig(n_bins=bins, x_min=x_min, x_max=x_max, spacing=spacing, monotone=monotone)
    except ValueError as exc:
        raise typer.BadParameter(str(exc))


@router.command("paths")
@surface_errors
def paths_command(
    model: Annotated[
        PathModel,
        typer.Option(help="ts: X, avg: running average, lambda: CPA of the induced subordinator, mixture: H."),
    ] = PathModel.AVG,
    n_paths: Annotated[int, typer.Option(min=1)] = 10,
    n_steps: Annotated[int, typer.Option(min=1)] = 2000,
    horizon: Annotated[float, typer.Option(click_type=click.FloatRange(min=0.0, min_open=True))] = 1.0,
    seed: SeedDep = SEED,
    a: ADep = 1.0,
    b: BDep = 1.0,
    c: CDep = 0.5,
    mu: MuDep = 0.0,
    sigma: SigmaDep = 0.2,
    kappa: KappaDep = 0.0,
    spot: Annotated[
        Optional[float], typer.Option(help="With --model mixture, emit mean-corrected prices S0 e^H instead of H.")
    ] = None,
    rate: Annotated[float, typer.Option(help="Rate r used with --spot.")] = 0.0,
    div_yield: Annotated[float, typer.Option("--div-yield", help="Dividend yield q used with --spot.")] = 0.0,
    bins: Annotated[int, typer.Option(min=1, help="Number of compound Poisson bins.")] = 200,
    x_min: Annotated[float, typer.Option(help="Smallest jump size kept by the compound Poisson scheme.")] = 1e-10,
    x_max: Annotated[float, typer.Option(help="Largest jump size kept by the compound Poisson scheme.")] = 20.0,
    spacing: Annotated[BinSpacing, typer.Option(help="Bin layout.")] = BinSpacing.LOG,
    monotone: Annotated[bool, typer.Option("--monotone/--signed-drift", help="Floor the compensated drift at 0.")] = True,
    coarse_uniform: Annotated[
        bool, typer.Option("--figure7", "--coarse-uniform", help="100 uniform bins on (1e-10, 7] over 2000 steps.")
    ] = False,
    bins_only: Annotated[bool, typer.Option("--bins-only", help="Emit the compound Poisson bin table and stop.")] = False,
    as_json: JsonDep = False,
):
    """Sample paths as a long (path, time, value) table"""
    rng = np.random.default_rng(seed)
    if coarse_uniform:
        n_steps = 2000
    grid = PathGrid(n_steps=n_steps, horizon=horizon)
    cfg = _cpa_config(coarse_uniform, bins, x_min, x_max, spacing, monotone)
    if bins_only:
        table = cpa_bins(build_params(a, b, c), cfg)
        frame = pd.DataFrame(
            {
                "lower": table.edges[:-1],
                "upper": table.edges[1:],
                "intensity": table.intensities,
                "jump_size": table.jump_sizes,
                "drift": table.drift,
            }
        )
        emit_frame(frame, as_json)
        return
    if model is PathModel.MIXTURE:
        mp = build_mixture(a, b, c, mu, sigma, kappa)
        if spot is None:
            values = mixture_matrix(mp, grid, cfg, rng, n_paths)
        else:
            values = price_paths(mp, build_market(spot, rate, div_yield), grid, cfg, rng, n_paths)
    elif model is PathModel.LAMBDA:
        values = cpa_matrix(build_params(a, b, c), grid, cfg, rng, n_paths)
    else:
        levels, averages = euler_matrix(build_params(a, b, c), grid, n_paths, rng)
        values = levels if model is PathModel.TS else averages
    emit_frame(matrix_frame(values, grid.times), as_json)
