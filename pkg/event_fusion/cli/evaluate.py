# cli/evaluate.py
import logging
from pathlib import Path

import typer

from event_fusion.core.metrics import compare_sequences
from event_fusion.core.outputs import print_report
from event_fusion.core.stream_io import read_frames
from event_fusion.core.utils import configure_logging, exit_on_error
from event_fusion.models.args import EvaluateArgs

log = logging.getLogger(__name__)


@exit_on_error
def evaluate(
    ground_truth: Path = typer.Option(None, help="Ground-truth frames index"),
    reconstruction: Path = typer.Option(None, help="Reconstruction frames index"),
    out: Path = typer.Option(None, help="Report file (standard output when omitted)"),
    verbose: bool = typer.Option(False, help="Enable verbose logging"),
    quiet: bool = typer.Option(False, help="Suppress progress output"),
):
    """
    Score a reconstruction against ground truth: photometric error and SSIM per frame.
    """
    configure_logging(verbose, quiet)
    args = EvaluateArgs(
        ground_truth=ground_truth,
        reconstruction=reconstruction,
        out=out,
        verbose=verbose,
        quiet=quiet,
    )

    gt_frames = read_frames(args.ground_truth)
    recon_frames = read_frames(args.reconstruction)
    report = compare_sequences(gt_frames, recon_frames)

    if args.out is None:
        typer.echo(report.to_csv(), nl=False)
    else:
        with args.out.open("w", encoding="utf-8", newline="") as f:
            report.to_csv(f)
        log.info(f"Wrote report to {args.out}")
    if not args.quiet:
        print_report(report)
