import logging
from pathlib import Path
from typing import Annotated, Optional

import typer

from .exceptions import DataFormatError
from .routers import degrade, dist, price, selftest, sim
from .utils import LOG_LEVEL, configure_logging, load_config

logger = logging.getLogger(__name__)

app = typer.Typer(
    no_args_is_help=True,
    help="Average-tempered stable subordinators: distributions, paths, degradation and option pricing.",
)

app.add_typer(dist.router, name="dist")
app.add_typer(sim.router, name="sim")
app.add_typer(degrade.router, name="degrade")
app.add_typer(price.router, name="price")
app.add_typer(selftest.router, name="selftest")


@app.callback()
def root(
    ctx: typer.Context,
    config: Annotated[
        Optional[Path],
        typer.Option("--config", exists=True, dir_okay=False, help="YAML/JSON file of default flags keyed by command."),
    ] = None,
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Debug logging on stderr.")] = False,
):
    configure_logging("DEBUG" if verbose else LOG_LEVEL)
    if config is not None:
        try:
            ctx.default_map = load_config(config)
        except DataFormatError as exc:
            typer.echo(f"error: {exc.detail}", err=True)
            raise typer.Exit(code=exc.exit_code)
        logger.debug("defaults loaded from %s", config)


def run() -> None:
    app()
