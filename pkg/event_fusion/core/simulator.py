# core/simulator.py
"""
Synthetic event-camera data from a high-rate frame sequence.

Per pixel the log intensity is interpolated linearly between consecutive frames. A
reference level starts at the first frame; every time the interpolant passes
reference + c_on (reference - c_off) an ON (OFF) event is emitted at the exact
crossing time and the reference steps by exactly c. Degraded "camera" frames are
produced by clipping the intensity range, subsampling and delaying the timestamps.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from event_fusion.core.errors import DatasetError, DimensionError
from event_fusion.core.event_model import EventArray, Frame, to_log
from event_fusion.models.args import SimulationConfig

log = logging.getLogger(__name__)


@njit(cache=True)
def _threshold_crossings(logs, times, c_on, c_off, fill, out_t, out_pix, out_p):
    n_frames, height, width = logs.shape
    ref = logs[0].copy()
    n = 0
    for k in range(n_frames - 1):
        t0 = times[k]
        span = times[k + 1] - t0
        for y in range(height):
            for x in range(width):
                l0 = logs[k, y, x]
                l1 = logs[k + 1, y, x]
                if l1 > l0:
                    while l1 > ref[y, x] + c_on:
                        level = ref[y, x] + c_on
                        if fill:
                            out_t[n] = t0 + (level - l0) / (l1 - l0) * span
                            out_pix[n] = y * width + x
                            out_p[n] = 1
                        ref[y, x] = level
                        n += 1
                elif l1 < l0:
                    while l1 < ref[y, x] - c_off:
                        level = ref[y, x] - c_off
                        if fill:
                            out_t[n] = t0 + (level - l0) / (l1 - l0) * span
                            out_pix[n] = y * width + x
                            out_p[n] = -1
                        ref[y, x] = level
                        n += 1
    return n


def _check_sequence(gt_frames: Sequence[Frame]):
    if len(gt_frames) < 2:
        raise DatasetError(f"need >= 2 frames to simulate events, got {len(gt_frames)}")
    for prev, frame in zip(gt_frames, gt_frames[1:]):
        if frame.t <= prev.t:
            raise DatasetError(f"frame timestamps must increase: {prev.t!r} then {frame.t!r}")
        if frame.shape != gt_frames[0].shape:
            raise DimensionError(
                f"frame at t={frame.t!r} is {frame.width}x{frame.height}, "
                f"expected {gt_frames[0].width}x{gt_frames[0].height}"
            )


def frames_to_events(gt_frames: Sequence[Frame], config: SimulationConfig) -> EventArray:
    _check_sequence(gt_frames)
    logs = np.stack([to_log(f, config.log_offset).values for f in gt_frames])
    times = np.array([f.t for f in gt_frames], dtype=np.float64)
    width = gt_frames[0].width

    # count first, then fill preallocated columns
    scratch_t = np.empty(0)
    scratch_i = np.empty(0, dtype=np.int64)
    scratch_p = np.empty(0, dtype=np.int8)
    n = _threshold_crossings(logs, times, config.c_on, config.c_off, False, scratch_t, scratch_i, scratch_p)
    out_t = np.empty(n)
    out_pix = np.empty(n, dtype=np.int64)
    out_p = np.empty(n, dtype=np.int8)
    _threshold_crossings(logs, times, config.c_on, config.c_off, True, out_t, out_pix, out_p)

    # by time, then row-major pixel; stable keeps per-pixel emission order
    order = np.lexsort((out_pix, out_t))
    pix = out_pix[order]
    log.info(f"Generated {n} events from {len(gt_frames)} frames")
    return EventArray(out_t[order], pix % width, pix // width, out_p[order])


def inject_noise(events: EventArray, config: SimulationConfig, width: int, height: int) -> EventArray:
    """Add round(noise_fraction * N) uniform random events and re-sort by time."""
    n_noise = int(round(config.noise_fraction * len(events)))
    if n_noise == 0:
        return events
    rng = np.random.default_rng(config.rng_seed)
    t_start, t_end = events.span
    noise = EventArray(
        rng.uniform(t_start, t_end, n_noise),
        rng.integers(0, width, n_noise),
        rng.integers(0, height, n_noise),
        rng.choice(np.array([-1, 1], dtype=np.int8), n_noise),
    )
    merged = events.concat(noise)
    log.info(f"Injected {n_noise} noise events")
    return merged.take(np.argsort(merged.t, kind="stable"))


def degrade_frames(gt_frames: Sequence[Frame], config: SimulationConfig) -> list[Frame]:
    """Clip to the middle of the 8-bit range, subsample to the configured rate, delay."""
    _check_sequence(gt_frames)
    times = np.array([f.t for f in gt_frames])
    duration = times[-1] - times[0]
    gt_rate = (len(times) - 1) / duration
    if config.subsample_rate > gt_rate * (1 + 1e-9):
        raise DatasetError(
            f"subsample rate {config.subsample_rate} Hz exceeds the input rate {gt_rate:.3f} Hz"
        )

    lo = int(round(config.truncation_fraction * 255))
    hi = int(round((1 - config.truncation_fraction) * 255))

    period = 1.0 / config.subsample_rate
    n_grid = int(np.floor(duration / period + 1e-9)) + 1
    grid = times[0] + period * np.arange(n_grid)
    right = np.clip(np.searchsorted(times, grid), 1, len(times) - 1)
    left = right - 1
    # ties go to the earlier frame
    nearest = np.where(times[right] - grid < grid - times[left], right, left)
    picked = np.unique(nearest)

    degraded = [
        Frame(gt_frames[i].t + config.frame_delay, np.clip(gt_frames[i].pixels, lo, hi))
        for i in picked
    ]
    log.info(
        f"Degraded {len(gt_frames)} frames to {len(degraded)} "
        f"({config.subsample_rate:g} Hz, range [{lo}, {hi}], +{config.frame_delay * 1e3:g} ms)"
    )
    return degraded


@dataclass(frozen=True)
class SimulationResult:
    events: EventArray
    frames: list[Frame]
    width: int
    height: int


def simulate(gt_frames: Sequence[Frame], config: SimulationConfig) -> SimulationResult:
    events = frames_to_events(gt_frames, config)
    height, width = gt_frames[0].shape
    events = inject_noise(events, config, width, height)
    frames = degrade_frames(gt_frames, config)
    return SimulationResult(events=events, frames=frames, width=width, height=height)
