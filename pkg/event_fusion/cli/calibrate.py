# cli/calibrate.py
import logging
from pathlib import Path

import typer

from event_fusion.core.calibration import calibrate as calibrate_thresholds
from event_fusion.core.outputs import print_calibration
from event_fusion.core.stream_io import load_dataset, read_config, write_config
from event_fusion.core.utils import configure_logging, exit_on_error
from event_fusion.models.args import CalibrateArgs
from event_fusion.models.config import merge_config, parse_config

log = logging.getLogger(__name__)


@exit_on_error
def calibrate(
    events: Path = typer.Option(None, help="Events file"),
    frames: Path = typer.Option(None, help="Frames index"),
    config_path: Path = typer.Option(None, "--config", help="Config file (key = value, or YAML)"),
    sequence: str = typer.Option(None, help="Per-sequence overrides from a YAML config"),
    frame_delay: float = typer.Option(None, help="Known frame latency in seconds"),
    kappa_fraction: float = typer.Option(None, help="Reduced-gain band width"),
    log_offset: float = typer.Option(None, help="Offset b in ln(I/255 + b)"),
    l_min: float = typer.Option(None, help="Lowest sensor log intensity"),
    l_max: float = typer.Option(None, help="Highest sensor log intensity"),
    write: Path = typer.Option(None, help="Write c_on/c_off into this config file"),
    verbose: bool = typer.Option(False, help="Enable verbose logging"),
    quiet: bool = typer.Option(False, help="Suppress progress output"),
):
    """
    Estimate the contrast thresholds from frames and the events between them.
    """
    configure_logging(verbose, quiet)
    cli_args = {
        "events": events,
        "frames": frames,
        "config_path": config_path,
        "sequence": sequence,
        "frame_delay": frame_delay,
        "kappa_fraction": kappa_fraction,
        "log_offset": log_offset,
        "l_min": l_min,
        "l_max": l_max,
        "write": write,
        "verbose": verbose,
        "quiet": quiet,
    }

    config = parse_config(CalibrateArgs, config_path, sequence)
    args = merge_config(cli_args, config, CalibrateArgs)

    dataset = load_dataset(args.events, args.frames)
    result = calibrate_thresholds(dataset, args, frame_delay=args.frame_delay)

    for key, value in result.to_config().items():
        typer.echo(f"{key} = {value!r}")
    if not args.quiet:
        print_calibration(result)

    if args.write is not None:
        values = read_config(args.write) if args.write.exists() else {}
        values.update(result.to_config())
        write_config(values, args.write, header=f"thresholds calibrated from {args.events.name}")
        log.info(f"Wrote thresholds to {args.write}")
