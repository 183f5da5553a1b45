from fractions import Fraction
from typing import Annotated

import numpy as np
import typer

from ..dependencies import (
    ADep,
    BDep,
    CDep,
    GridDep,
    JsonDep,
    MethodDep,
    TDep,
    build_params,
    emit_json,
    emit_records,
    surface_errors,
)
from ..dist import cdf, cdf_tails, limit_checks, mode, pdf, pdf_left_tail, pdf_right_tail, quantile, sf
from ..moments import moment, moment_exact, moment_table, stats, ts_stats
from ..params import laplace_ats, laplace_ts
from ..utils import InversionMethod, Process, TailRegime, parse_grid

router = typer.Typer(no_args_is_help=True, help="Evaluate the ATS law: density, distribution, transforms, moments.")

ProcessDep = Annotated[Process, typer.Option(help="ats for the running average, ts for the subordinator itself.")]


def _pointwise(func, a, b, c, t, x, method, as_json):
    p = build_params(a, b, c, t)
    xs = parse_grid(x)
    values = func(p, xs, method=method)
    emit_records([{"x": float(v), "value": float(f)} for v, f in zip(xs, np.atleast_1d(values))], as_json)


@router.command("pdf")
@surface_errors
def pdf_command(
    x: GridDep = "0.05..5:100",
    a: ADep = 1.0,
    b: BDep = 1.0,
    c: CDep = 0.5,
    t: TDep = 1.0,
    method: MethodDep = InversionMethod.AUTO,
    as_json: JsonDep = False,
):
    """Density f(x) on a grid"""
    _pointwise(pdf, a, b, c, t, x, method, as_json)


@router.command("cdf")
@surface_errors
def cdf_command(
    x: GridDep = "0.05..5:100",
    a: ADep = 1.0,
    b: BDep = 1.0,
    c: CDep = 0.5,
    t: TDep = 1.0,
    method: MethodDep = InversionMethod.AUTO,
    as_json: JsonDep = False,
):
    """Distribution function F(x) on a grid"""
    _pointwise(cdf, a, b, c, t, x, method, as_json)


@router.command("sf")
@surface_errors
def sf_command(
    x: GridDep = "1..20:20",
    a: ADep = 1.0,
    b: BDep = 1.0,
    c: CDep = 0.5,
    t: TDep = 1.0,
    method: MethodDep = InversionMethod.AUTO,
    as_json: JsonDep = False,
):
    """Survival function 1 - F(x) on a grid"""
    _pointwise(sf, a, b, c, t, x, method, as_json)


def _transform(u_values, p, process, sign):
    transform = laplace_ats if process is Process.ATS else laplace_ts
    return [{"u": float(u), "value": float(np.real(transform(p, sign * u)))} for u in u_values]


@router.command("mgf")
@surface_errors
def mgf_command(
    u: Annotated[str, typer.Option(help="Grid of u < b.")] = "-0.5..0.9:15",
    a: ADep = 1.0,
    b: BDep = 1.0,
    c: CDep = 0.5,
    t: TDep = 1.0,
    process: ProcessDep = Process.ATS,
    as_json: JsonDep = False,
):
    """Moment generating function E e^{uX}, finite for u < b"""
    p = build_params(a, b, c, t)
    emit_records(_transform(parse_grid(u), p, process, -1.0), as_json)


@router.command("lt")
@surface_errors
def lt_command(
    u: Annotated[str, typer.Option(help="Grid of u > -b.")] = "0..5:11",
    a: ADep = 1.0,
    b: BDep = 1.0,
    c: CDep = 0.5,
    t: TDep = 1.0,
    process: ProcessDep = Process.ATS,
    as_json: JsonDep = False,
):
    """Laplace transform E e^{-uX}"""
    p = build_params(a, b, c, t)
    emit_records(_transform(parse_grid(u), p, process, 1.0), as_json)


def _exact(value: float) -> Fraction:
    return Fraction(str(value))


@router.command("moments")
@surface_errors
def moments_command(
    n: Annotated[int, typer.Option(min=0, help="Highest order.")] = 5,
    a: ADep = 1.0,
    b: BDep = 1.0,
    c: CDep = 0.5,
    t: TDep = 1.0,
    table_grid: Annotated[
        bool, typer.Option("--table1", "--table", help="Moments for a in {1/2, 1, 3/2, 2}, b = t = 1, c in {0, 1/2}.")
    ] = False,
    as_json: JsonDep = False,
):
    """Raw moments M(0..n); exact rationals when c = 0"""
    if table_grid:
        records = [
            {"a": str(row["a"]), "c": row["c"], "order": k, "value": str(value)}
            for row in moment_table(n)
            for k, value in enumerate(row["moments"])
        ]
        emit_records(records, as_json)
        return
    p = build_params(a, b, c, t)
    if c == 0:
        values = [str(moment_exact(_exact(a), _exact(b), k, _exact(t))) for k in range(n + 1)]
    else:
        values = [repr(moment(p, k)) for k in range(n + 1)]
    emit_records([{"order": k, "value": v} for k, v in enumerate(values)], as_json)


@router.command("stats")
@surface_errors
def stats_command(
    a: ADep = 1.0,
    b: BDep = 1.0,
    c: CDep = 0.5,
    t: TDep = 1.0,
    process: ProcessDep = Process.ATS,
    as_json: JsonDep = False,
):
    """Mean, variance, skewness and excess kurtosis"""
    p = build_params(a, b, c, t)
    summary = stats(p) if process is Process.ATS else ts_stats(p)
    emit_records([summary.model_dump()], as_json)


@router.command("mode")
@surface_errors
def mode_command(
    a: ADep = 1.0,
    b: BDep = 1.0,
    c: CDep = 0.5,
    t: TDep = 1.0,
    method: MethodDep = InversionMethod.AUTO,
    as_json: JsonDep = False,
):
    """Location of the density maximum"""
    p = build_params(a, b, c, t)
    emit_records([{"mode": mode(p, method=method)}], as_json)


@router.command("tails")
@surface_errors
def tails_command(
    x: GridDep = "20,40,60",
    regime: Annotated[TailRegime, typer.Option(help="Right (large x) or left (x near 0) tail.")] = TailRegime.RIGHT,
    a: ADep = 1.0,
    b: BDep = 1.0,
    c: CDep = 0.5,
    t: TDep = 1.0,
    as_json: JsonDep = False,
):
    """Leading-order tail estimates of the density and distribution function next to the exact values"""
    p = build_params(a, b, c, t)
    estimate = pdf_right_tail if regime is TailRegime.RIGHT else pdf_left_tail
    records = []
    for v in parse_grid(x):
        v = float(v)
        exact_tail = sf(p, v) if regime is TailRegime.RIGHT else cdf(p, v)
        records.append(
            {
                "x": v,
                "pdf": pdf(p, v),
                "pdf_estimate": estimate(p, v).value,
                "tail": exact_tail,
                "tail_estimate": cdf_tails(p, v, regime).value,
            }
        )
    emit_records(records, as_json)


@router.command("limits")
@surface_errors
def limits_command(
    u: Annotated[str, typer.Option(help="Grid of transform arguments.")] = "0..5:21",
    a: ADep = 1.0,
    b: BDep = 1.0,
    c: CDep = 0.5,
    t: TDep = 1.0,
):
    """Worst deviations of the infinite-activity, stable and gamma limits"""
    p = build_params(a, b, c, t)
    emit_json(limit_checks(p, parse_grid(u)))


@router.command("quantile")
@surface_errors
def quantile_command(
    q: Annotated[str, typer.Option(help="Probabilities in (0, 1).")] = "0.05,0.25,0.5,0.75,0.95",
    a: ADep = 1.0,
    b: BDep = 1.0,
    c: CDep = 0.5,
    t: TDep = 1.0,
    as_json: JsonDep = False,
):
    """Quantiles by root finding on F"""
    p = build_params(a, b, c, t)
    emit_records([{"q": float(v), "x": quantile(p, float(v))} for v in parse_grid(q)], as_json)
