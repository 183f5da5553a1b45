import logging
import os
from enum import Enum
from pathlib import Path

import numpy as np
import yaml
from dotenv import load_dotenv
from rich.console import Console
from rich.logging import RichHandler

from .exceptions import DataFormatError

load_dotenv()


SEED: int = int(os.getenv("ATS_SEED", 0))
LOG_LEVEL: str = os.getenv("ATS_LOG_LEVEL", "WARNING")
TALBOT_NODES: int = int(os.getenv("ATS_TALBOT_NODES", 32))
WORKERS: int = int(os.getenv("ATS_WORKERS", 1))


class Process(Enum):
    """Enumeration for the two subordinators"""

    TS: str = "ts"
    ATS: str = "ats"


class TailRegime(Enum):
    """Enumeration for tail regimes"""

    RIGHT: str = "right"
    LEFT: str = "left"


class InversionMethod(Enum):
    """Enumeration for density inversion routes"""

    AUTO: str = "auto"
    CONTOUR: str = "contour"
    TALBOT: str = "talbot"
    SADDLE: str = "saddle"


class RuleOrder(Enum):
    """Enumeration for Gauss-Kronrod rule pairs"""

    GK15: str = "gk15"
    GK21: str = "gk21"
    GK61: str = "gk61"


class BinSpacing(Enum):
    """Enumeration for compound Poisson bin layouts"""

    UNIFORM: str = "uniform"
    LOG: str = "log"


class PathModel(Enum):
    """Enumeration for simulated path families"""

    TS: str = "ts"
    AVG: str = "avg"
    LAMBDA: str = "lambda"
    MIXTURE: str = "mixture"


class DegradationModel(Enum):
    """Enumeration for degradation likelihoods"""

    GAMMA: str = "gamma"
    AG: str = "ag"
    AIG: str = "aig"


class CheckLevel(Enum):
    """Enumeration for self-test depths"""

    QUICK: str = "quick"
    FULL: str = "full"


def configure_logging(level: str | int = LOG_LEVEL) -> None:
    """Route every logger through a rich handler on stderr"""
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=True)],
        force=True,
    )


def load_config(path: Path) -> dict:
    """Read a JSON or YAML config file into a click default map"""
    try:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise DataFormatError(f"cannot read config {path}: {exc.strerror}")
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise DataFormatError(f"invalid config {path}", line=mark.line + 1 if mark else None)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise DataFormatError(f"config {path} must hold a mapping of commands to flags")
    return data


def parse_grid(spec: str) -> np.ndarray:
    """Parse `lo..hi[:n]` ranges or comma separated values into an array"""
    spec = spec.strip()
    try:
        if ".." in spec:
            bounds, _, count = spec.partition(":")
            lo, hi = (float(v) for v in bounds.split("..", 1))
            n = int(count) if count else 50
            if n < 1:
                raise ValueError
            return np.linspace(lo, hi, n)
        return np.array([float(v) for v in spec.split(",") if v.strip()])
    except ValueError:
        raise DataFormatError(f"cannot parse grid {spec!r}; use lo..hi[:n] or v1,v2,...")
