from typing import Annotated

import typer
from rich.console import Console
from rich.table import Table

from ..checks import run_checks
from ..dependencies import JsonDep, emit_records
from ..utils import CheckLevel

router = typer.Typer(help="Run the acceptance checks.")


@router.callback(invoke_without_command=True)
def selftest(
    full: Annotated[bool, typer.Option("--full/--quick", help="Add the Monte Carlo and grid checks.")] = False,
    as_json: JsonDep = False,
):
    """Run the checks; exit 1 if any fails"""
    results = run_checks(CheckLevel.FULL if full else CheckLevel.QUICK)
    if as_json:
        emit_records([r.model_dump() for r in results], True)
    else:
        table = Table(title="selftest " + ("full" if full else "quick"))
        for column in ("check", "status", "deviation", "tolerance", "seconds", "detail"):
            table.add_column(column)
        for r in results:
            status = "[green]pass[/green]" if r.passed else "[red]FAIL[/red]"
            table.add_row(r.name, status, f"{r.deviation:.3e}", f"{r.tolerance:.1e}", f"{r.seconds:.2f}", r.detail or "")
        Console().print(table)
    if not all(r.passed for r in results):
        raise typer.Exit(code=1)
