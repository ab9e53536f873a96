# core/utils.py
import functools
import hashlib
import logging
import math
from pathlib import Path
from typing import Optional

import numpy as np
import typer
from rich.console import Console
from rich.logging import RichHandler

from event_fusion.core.errors import ConfigError

log = logging.getLogger(__name__)


def configure_logging(verbose: bool = False, quiet: bool = False):
    """Route log records to standard error through rich; stdout stays machine-readable."""
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), show_path=verbose)],
        force=True,
    )
    # numba's compiler logs are noise at DEBUG
    logging.getLogger("numba").setLevel(logging.WARNING)


def export_schedule(t_start: float, t_end: float, rate: float) -> np.ndarray:
    """Uniform export times t_start + k/rate covering [t_start, t_end]."""
    if rate <= 0:
        raise ConfigError(f"export rate must be positive, got {rate}")
    if t_end < t_start:
        raise ConfigError(f"export window ends ({t_end}) before it starts ({t_start})")
    n = max(1, math.ceil(round((t_end - t_start) * rate, 9)))
    return t_start + np.arange(n) / rate


def hash_file(path: Path) -> str:
    """sha256 of a written artifact, logged so repeated runs can be compared."""
    digest = hashlib.sha256()
    with Path(path).open("rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def parse_times(value: Optional[str]) -> Optional[list[float]]:
    """Comma-separated timestamps from the command line."""
    if value is None:
        return None
    try:
        return [float(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"export times must be comma-separated numbers, got {value!r}") from None


def exit_on_error(func):
    """Map failures to exit codes: 1 for invalid input or config, 2 for I/O."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except OSError as e:
            log.debug("I/O failure", exc_info=True)
            typer.echo(typer.style(f"error: {e}", fg=typer.colors.RED), err=True)
            raise typer.Exit(code=2)
        except ValueError as e:
            log.debug("validation failure", exc_info=True)
            typer.echo(typer.style(f"error: {e}", fg=typer.colors.RED), err=True)
            raise typer.Exit(code=1)
    return wrapper
