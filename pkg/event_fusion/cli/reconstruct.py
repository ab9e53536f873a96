# cli/reconstruct.py
import logging
from pathlib import Path
from typing import Optional

import typer

from event_fusion.core.filter_core import run
from event_fusion.core.stream_io import load_dataset, write_frames
from event_fusion.core.utils import configure_logging, exit_on_error, export_schedule, hash_file, parse_times
from event_fusion.models.args import FilterConfig, ReconstructArgs
from event_fusion.models.config import merge_config, parse_config
from event_fusion.models.mixins import FilterMode

log = logging.getLogger(__name__)


def default(model, field):
    return model.model_fields[field].default


@exit_on_error
def reconstruct(
    events: Path = typer.Option(None, help="Events file (t x y p per line)"),
    frames: Path = typer.Option(None, help="Frames index (t filename per line)"),
    config_path: Path = typer.Option(None, "--config", help="Config file (key = value, or YAML)"),
    sequence: str = typer.Option(None, help="Per-sequence overrides from a YAML config"),
    out: Path = typer.Option(default(ReconstructArgs, "out"), help="Output directory"),
    mode: FilterMode = typer.Option(None, help="fusion | events_only | direct_integration"),
    export_rate: float = typer.Option(None, help="Export rate in Hz"),
    export_times: str = typer.Option(None, help="Comma-separated export timestamps"),
    c_on: float = typer.Option(None, help="ON contrast threshold"),
    c_off: float = typer.Option(None, help="OFF contrast threshold"),
    alpha1: float = typer.Option(None, help="Crossover frequency in rad/s"),
    lam: float = typer.Option(None, "--lambda", help="Gain fraction kept at saturation"),
    kappa_fraction: float = typer.Option(None, help="Reduced-gain band width"),
    log_offset: float = typer.Option(None, help="Offset b in ln(I/255 + b)"),
    l_min: float = typer.Option(None, help="Lowest sensor log intensity"),
    l_max: float = typer.Option(None, help="Highest sensor log intensity"),
    init_from_frame: Optional[bool] = typer.Option(None, "--init-from-frame/--no-init-from-frame", help="Seed with the first frame"),
    width: int = typer.Option(None, help="Sensor width when no frames are given"),
    height: int = typer.Option(None, help="Sensor height when no frames are given"),
    verbose: bool = typer.Option(False, help="Enable verbose logging"),
    quiet: bool = typer.Option(False, help="Suppress progress output"),
):
    """
    Fuse events (and frames) into log-intensity images at the requested times.
    """
    configure_logging(verbose, quiet)
    cli_args = {
        "events": events,
        "frames": frames,
        "config_path": config_path,
        "sequence": sequence,
        "out": out,
        "mode": mode,
        "export_rate": export_rate,
        "export_times": parse_times(export_times),
        "c_on": c_on,
        "c_off": c_off,
        "alpha1": alpha1,
        "lambda": lam,
        "kappa_fraction": kappa_fraction,
        "log_offset": log_offset,
        "l_min": l_min,
        "l_max": l_max,
        "init_from_frame": init_from_frame,
        "width": width,
        "height": height,
        "verbose": verbose,
        "quiet": quiet,
    }

    config = parse_config(ReconstructArgs, config_path, sequence)
    args = merge_config(cli_args, config, ReconstructArgs)
    filter_config = FilterConfig.model_validate(args.model_dump())
    if args.frames is None and filter_config.mode is not FilterMode.EVENTS_ONLY:
        log.info(f"No frames given, running events_only instead of {filter_config.mode.value}")
        filter_config = filter_config.model_copy(update={"mode": FilterMode.EVENTS_ONLY})

    dataset = load_dataset(args.events, args.frames, args.width, args.height)
    if args.export_rate is not None:
        t_start, t_end = dataset.span
        times = export_schedule(t_start, t_end, args.export_rate)
    else:
        times = args.export_times

    session = run(dataset, filter_config)
    index = write_frames(session.export(times), args.out, offset=filter_config.log_offset)
    log.info(f"Wrote {len(times)} images to {args.out}")
    log.debug(f"{index.name} sha256 {hash_file(index)}")
