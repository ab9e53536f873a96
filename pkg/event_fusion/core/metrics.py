# core/metrics.py
"""Reconstruction quality against ground truth: timestamp matching, photometric error, SSIM."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import pandas as pd
from skimage.metrics import structural_similarity

from event_fusion.core.errors import DimensionError, EventFusionError
from event_fusion.core.event_model import Frame, from_log
from event_fusion.core.filter_core import ReconstructionSession

log = logging.getLogger(__name__)

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
DATA_RANGE = 255.0

REPORT_COLUMNS = ["t", "photometric", "ssim"]


def match_timestamps(gt_times: Sequence[float], recon_times: Sequence[float]) -> list[tuple[float, float]]:
    """Pair each ground-truth time with the closest reconstruction time (ties go earlier)."""
    gt = np.asarray(gt_times, dtype=np.float64)
    recon = np.asarray(recon_times, dtype=np.float64)
    if not gt.size or not recon.size:
        raise EventFusionError("timestamp matching needs two non-empty lists")
    right = np.clip(np.searchsorted(recon, gt), 0, recon.size - 1)
    left = np.clip(right - 1, 0, recon.size - 1)
    pick = np.where(np.abs(recon[right] - gt) < np.abs(gt - recon[left]), right, left)
    return list(zip(gt.tolist(), recon[pick].tolist()))


def _check_pair(a: Frame, b: Frame):
    if a.shape != b.shape:
        raise DimensionError(f"image sizes differ: {a.width}x{a.height} vs {b.width}x{b.height}")


def photometric_error(a: Frame, b: Frame) -> float:
    """Mean absolute 8-bit difference as a percentage of the full range."""
    _check_pair(a, b)
    diff = np.abs(a.pixels.astype(np.int16) - b.pixels.astype(np.int16))
    return float(diff.mean() / DATA_RANGE * 100.0)


def ssim(a: Frame, b: Frame) -> float:
    """Mean SSIM with an 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03."""
    _check_pair(a, b)
    if min(a.shape) < SSIM_WINDOW:
        raise DimensionError(
            f"image {a.width}x{a.height} is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window"
        )
    return float(structural_similarity(
        a.pixels.astype(np.float64),
        b.pixels.astype(np.float64),
        data_range=DATA_RANGE,
        gaussian_weights=True,
        sigma=SSIM_SIGMA,
        use_sample_covariance=False,
        K1=SSIM_K1,
        K2=SSIM_K2,
    ))


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    """Per-pair metrics (one row per ground-truth frame) with mean and population std."""
    pairs: pd.DataFrame

    @property
    def mean(self) -> pd.Series:
        return self.pairs[["photometric", "ssim"]].mean()

    @property
    def std(self) -> pd.Series:
        return self.pairs[["photometric", "ssim"]].std(ddof=0)

    def summary(self) -> pd.DataFrame:
        return pd.DataFrame({"mean": self.mean, "std": self.std}).T

    def to_csv(self, sink=None) -> str:
        body = self.pairs[REPORT_COLUMNS].to_csv(index=False, float_format="%.6f", lineterminator="\n")
        footer = self.summary().to_csv(header=False, float_format="%.6f", lineterminator="\n")
        text = body + footer
        if sink is not None:
            sink.write(text)
        return text


def compare_sequences(gt_frames: Sequence[Frame], recon_frames: Sequence[Frame]) -> EvaluationReport:
    """Score every ground-truth frame against the reconstruction closest in time."""
    recon_by_time = {f.t: f for f in recon_frames}
    pairs = match_timestamps([f.t for f in gt_frames], [f.t for f in recon_frames])
    rows = []
    for gt, (_, recon_t) in zip(gt_frames, pairs):
        recon = recon_by_time[recon_t]
        rows.append({
            "t": gt.t,
            "recon_t": recon_t,
            "photometric": photometric_error(gt, recon),
            "ssim": ssim(gt, recon),
        })
    report = EvaluationReport(pd.DataFrame(rows, columns=["t", "recon_t", "photometric", "ssim"]))
    log.info(
        f"Evaluated {len(rows)} pairs: photometric {report.mean['photometric']:.3f}% "
        f"± {report.std['photometric']:.3f}, SSIM {report.mean['ssim']:.4f} ± {report.std['ssim']:.4f}"
    )
    return report


def evaluate(
    gt_frames: Sequence[Frame],
    session: ReconstructionSession,
    query_times: Iterable[float],
) -> EvaluationReport:
    """Query the session at each time, export to 8-bit and compare with ground truth."""
    offset = session.config.log_offset
    recon = [from_log(img, offset) for img in session.export(sorted(query_times))]
    if not recon:
        raise EventFusionError("evaluation needs at least one query time")
    return compare_sequences(gt_frames, recon)
