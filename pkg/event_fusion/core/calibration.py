# core/calibration.py
"""
Contrast-threshold calibration from frames.

Between two consecutive frames the integrated events at a pixel should reproduce the
log-intensity change up to one quantisation step:

    dL ~= c_on * N_on - c_off * N_off

c_on and c_off are the least-squares solution over every (pixel, interval) pair whose
frame values sit inside the full-gain band [L1, L2] in both frames. When the frames pile
up at a clip level the sensor range is taken from the observed clip levels instead of
the full 8-bit range.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from event_fusion.core.errors import CalibrationError
from event_fusion.core.event_model import Frame, to_log
from event_fusion.core.filter_core import log_range
from event_fusion.core.stream_io import Dataset
from event_fusion.models.mixins import GainRangeMixin

log = logging.getLogger(__name__)

# share of all frame samples at an extreme level that marks it as a clip level
CLIP_SHARE = 0.05


@dataclass(frozen=True)
class CalibrationResult:
    c_on: float
    c_off: float
    residual: float
    n_intervals: int
    n_samples: int = 0

    def to_config(self) -> dict:
        return {"c_on": self.c_on, "c_off": self.c_off}


def clip_levels(frames: Sequence[Frame]) -> tuple[Optional[int], Optional[int]]:
    """Darkest and brightest pixel levels if the frames pile up there, else None."""
    counts = np.bincount(np.concatenate([f.pixels.ravel() for f in frames]), minlength=256)
    levels = np.flatnonzero(counts)
    lo, hi = int(levels[0]), int(levels[-1])
    if lo == hi:
        return None, None
    floor = max(2, CLIP_SHARE * counts.sum())
    return (lo if counts[lo] >= floor else None), (hi if counts[hi] >= floor else None)


def clipped_range(frames: Sequence[Frame], config: GainRangeMixin) -> GainRangeMixin:
    """Narrow an unset l_min/l_max to the clip levels observed in the frames."""
    lo, hi = clip_levels(frames)
    update = {}
    if config.l_min is None and lo is not None:
        update["l_min"] = math.log(lo / 255.0 + config.log_offset)
    if config.l_max is None and hi is not None:
        update["l_max"] = math.log(hi / 255.0 + config.log_offset)
    if not update:
        return config
    log.info(f"Frames clip at pixel levels {lo}/{hi}; narrowing the usable band")
    return config.model_copy(update=update)


def calibrate(
    dataset: Dataset,
    config: Optional[GainRangeMixin] = None,
    frame_delay: float = 0.0,
) -> CalibrationResult:
    """
    Estimate ON/OFF thresholds from a dataset with frames and events.

    Args:
        dataset: events plus at least two frames.
        config: log offset and gain band used to reject saturated pixels.
        frame_delay: known latency subtracted from frame timestamps before the
            events are binned into inter-frame intervals.

    Raises:
        CalibrationError: too few frames, no events, an unidentifiable threshold or
            a non-positive solution.
    """
    if config is None:
        config = GainRangeMixin()
    if len(dataset.frames) < 2:
        raise CalibrationError(f"need >= 2 frames to calibrate, got {len(dataset.frames)}")
    events = dataset.events
    if not len(events):
        raise CalibrationError("no events to calibrate against")

    _, _, l1, l2 = log_range(clipped_range(dataset.frames, config))
    n_pixels = dataset.width * dataset.height
    pix = events.y.astype(np.int64) * dataset.width + events.x
    on = events.polarity > 0

    logs = [to_log(f, config.log_offset).values.ravel() for f in dataset.frames]
    stamps = np.array([f.t for f in dataset.frames]) - frame_delay
    bounds = np.searchsorted(events.t, stamps, side="left")

    # normal-equation sums for the columns [N_on, -N_off]
    s_on_on = s_off_off = s_on_off = 0.0
    b_on = b_off = s_dl_dl = 0.0
    n_samples = 0
    for i in range(len(logs) - 1):
        l_a, l_b = logs[i], logs[i + 1]
        usable = (l_a >= l1) & (l_a <= l2) & (l_b >= l1) & (l_b <= l2)
        lo, hi = bounds[i], bounds[i + 1]
        n_on = np.bincount(pix[lo:hi][on[lo:hi]], minlength=n_pixels)[usable].astype(np.float64)
        n_off = np.bincount(pix[lo:hi][~on[lo:hi]], minlength=n_pixels)[usable].astype(np.float64)
        d_l = (l_b - l_a)[usable]

        s_on_on += n_on @ n_on
        s_off_off += n_off @ n_off
        s_on_off += n_on @ n_off
        b_on += n_on @ d_l
        b_off += n_off @ d_l
        s_dl_dl += d_l @ d_l
        n_samples += int(usable.sum())

    if s_on_on == 0 and s_off_off == 0:
        raise CalibrationError("no events fall between frames on usable pixels")
    if s_off_off == 0:
        raise CalibrationError(
            "c_off is unidentifiable: no OFF events between frames",
            parameter="c_off", partial={"c_on": b_on / s_on_on},
        )
    if s_on_on == 0:
        raise CalibrationError(
            "c_on is unidentifiable: no ON events between frames",
            parameter="c_on", partial={"c_off": -b_off / s_off_off},
        )

    gram = np.array([[s_on_on, -s_on_off], [-s_on_off, s_off_off]])
    rhs = np.array([b_on, -b_off])
    if abs(np.linalg.det(gram)) <= 1e-12 * s_on_on * s_off_off:
        raise CalibrationError("ON and OFF event counts are collinear; thresholds are not separable")
    c_on, c_off = np.linalg.solve(gram, rhs)
    if c_on <= 0 or c_off <= 0:
        raise CalibrationError(
            f"calibration failed: non-positive solution c_on={c_on:.6g}, c_off={c_off:.6g}"
        )

    sq_err = s_dl_dl - 2 * (c_on * rhs[0] + c_off * rhs[1]) + np.array([c_on, c_off]) @ gram @ np.array([c_on, c_off])
    residual = math.sqrt(max(sq_err, 0.0) / max(n_samples, 1))
    log.info(
        f"Calibrated c_on={c_on:.5f} c_off={c_off:.5f} from {n_samples} samples "
        f"over {len(logs) - 1} intervals (rms {residual:.4f})"
    )
    return CalibrationResult(
        c_on=float(c_on),
        c_off=float(c_off),
        residual=residual,
        n_intervals=len(logs) - 1,
        n_samples=n_samples,
    )
