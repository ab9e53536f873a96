# cli/simulate.py
import logging
from pathlib import Path

import typer

from event_fusion.core.simulator import simulate as simulate_sequence
from event_fusion.core.stream_io import EVENTS_NAME, read_frames, write_events, write_frames
from event_fusion.core.utils import configure_logging, exit_on_error, hash_file
from event_fusion.models.args import SimulateArgs, SimulationConfig
from event_fusion.models.config import merge_config, parse_config

log = logging.getLogger(__name__)


def default(model, field):
    return model.model_fields[field].default


@exit_on_error
def simulate(
    frames: Path = typer.Option(None, help="Ground-truth frames index"),
    config_path: Path = typer.Option(None, "--config", help="Config file (key = value, or YAML)"),
    sequence: str = typer.Option(None, help="Per-sequence overrides from a YAML config"),
    out: Path = typer.Option(default(SimulateArgs, "out"), help="Output directory"),
    c_on: float = typer.Option(None, help="ON contrast threshold"),
    c_off: float = typer.Option(None, help="OFF contrast threshold"),
    noise_fraction: float = typer.Option(None, help="Noise events as a fraction of generated events"),
    subsample_rate: float = typer.Option(None, help="Degraded frame rate in Hz"),
    frame_delay: float = typer.Option(None, help="Frame latency in seconds"),
    truncation_fraction: float = typer.Option(None, help="Fraction of the range clipped at each end"),
    log_offset: float = typer.Option(None, help="Offset b in ln(I/255 + b)"),
    seed: int = typer.Option(None, help="Noise seed"),
    verbose: bool = typer.Option(False, help="Enable verbose logging"),
    quiet: bool = typer.Option(False, help="Suppress progress output"),
):
    """
    Turn a high-rate ground-truth sequence into events plus degraded frames.
    """
    configure_logging(verbose, quiet)
    cli_args = {
        "frames": frames,
        "config_path": config_path,
        "sequence": sequence,
        "out": out,
        "c_on": c_on,
        "c_off": c_off,
        "noise_fraction": noise_fraction,
        "subsample_rate": subsample_rate,
        "frame_delay": frame_delay,
        "truncation_fraction": truncation_fraction,
        "log_offset": log_offset,
        "rng_seed": seed,
        "verbose": verbose,
        "quiet": quiet,
    }

    config = parse_config(SimulateArgs, config_path, sequence)
    args = merge_config(cli_args, config, SimulateArgs)
    sim_config = SimulationConfig.model_validate(args.model_dump())

    gt_frames = read_frames(args.frames)
    result = simulate_sequence(gt_frames, sim_config)

    args.out.mkdir(parents=True, exist_ok=True)
    events_path = args.out / EVENTS_NAME
    write_events(result.events, events_path)
    index = write_frames(result.frames, args.out)
    log.info(f"Wrote {len(result.events)} events and {len(result.frames)} frames to {args.out}")
    log.debug(f"{events_path.name} sha256 {hash_file(events_path)}")
    log.debug(f"{index.name} sha256 {hash_file(index)}")
