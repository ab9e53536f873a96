# core/filter_core.py
"""
Per-pixel asynchronous complementary filter.

Each pixel holds an estimate L_hat, the time of its last update, the latest frame
reference L_ref and its gain alpha. Between inputs the estimate relaxes toward the
reference along the closed-form solution

    L_hat(t) = exp(-alpha * dt) * L_hat + (1 - exp(-alpha * dt)) * L_ref

An event adds +c_on / -c_off at its own pixel only. A frame decays every pixel under
the old reference, then swaps in the new reference and recomputes the gain; the
estimate itself stays continuous. Pixels are decayed lazily: only their own events,
frames and queries touch them.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np
from numba import njit

from event_fusion.core.errors import DatasetError, DimensionError, ModeError, OutOfOrderError
from event_fusion.core.event_model import Event, EventArray, LogImage, log_bounds, to_log
from event_fusion.core.stream_io import Dataset
from event_fusion.models.args import FilterConfig
from event_fusion.models.mixins import FilterMode, GainRangeMixin

log = logging.getLogger(__name__)


@njit(cache=True)
def _integrate_events(l_hat, t_last, l_ref, alpha, ts, xs, ys, ps, c_on, c_off, leak):
    for i in range(ts.shape[0]):
        x = xs[i]
        y = ys[i]
        t = ts[i]
        dt = t - t_last[y, x]
        if dt < 0.0:
            return i
        if leak:
            k = math.exp(-alpha[y, x] * dt)
            l_hat[y, x] = k * l_hat[y, x] + (1.0 - k) * l_ref[y, x]
        t_last[y, x] = t
        if ps[i] > 0:
            l_hat[y, x] += c_on
        else:
            l_hat[y, x] -= c_off
    return -1


@njit(cache=True)
def _decay_all(l_hat, t_last, l_ref, alpha, t, leak):
    height, width = l_hat.shape
    for y in range(height):
        for x in range(width):
            if t < t_last[y, x]:
                return y * width + x
    for y in range(height):
        for x in range(width):
            if leak:
                k = math.exp(-alpha[y, x] * (t - t_last[y, x]))
                l_hat[y, x] = k * l_hat[y, x] + (1.0 - k) * l_ref[y, x]
            t_last[y, x] = t
    return -1


def log_range(config: GainRangeMixin) -> tuple[float, float, float, float]:
    """(L_min, L_max, L1, L2): sensor log range and the full-gain band inside it."""
    black, white = log_bounds(config.log_offset)
    l_min = black if config.l_min is None else config.l_min
    l_max = white if config.l_max is None else config.l_max
    kappa = config.kappa_fraction * (l_max - l_min)
    return l_min, l_max, l_min + kappa, l_max - kappa


@dataclass(frozen=True)
class GainParams:
    alpha1: float
    lam: float
    l_min: float
    l_max: float
    l1: float
    l2: float

    @classmethod
    def from_config(cls, config: FilterConfig) -> "GainParams":
        l_min, l_max, l1, l2 = log_range(config)
        return cls(config.alpha1, config.lambda_, l_min, l_max, l1, l2)


def compute_alpha(l_ref_value, gain: GainParams):
    """
    Adaptive gain: alpha1 on [L1, L2], falling linearly to lambda * alpha1 at
    L_min and L_max. Values outside [L_min, L_max] are clamped to the boundary.
    Accepts a scalar or an array.
    """
    v = np.clip(np.asarray(l_ref_value, dtype=np.float64), gain.l_min, gain.l_max)
    a1 = gain.alpha1
    floor = gain.lam * a1
    with np.errstate(divide="ignore", invalid="ignore"):
        low = floor + (1.0 - gain.lam) * a1 * (v - gain.l_min) / (gain.l1 - gain.l_min)
        high = floor + (1.0 - gain.lam) * a1 * (v - gain.l_max) / (gain.l2 - gain.l_max)
    alpha = np.where(v < gain.l1, low, np.where(v > gain.l2, high, a1))
    if alpha.ndim == 0:
        return float(alpha)
    return alpha


@dataclass(frozen=True)
class PixelState:
    l_hat: float
    t_last: float
    l_ref: float
    alpha: float


def decay(
    pixel: PixelState,
    t: float,
    mode: FilterMode = FilterMode.FUSION,
    x: int = 0,
    y: int = 0,
) -> PixelState:
    """Advance one pixel to time t along the closed-form solution."""
    dt = t - pixel.t_last
    if dt < 0:
        raise OutOfOrderError(x, y, pixel.t_last, t)
    if mode is FilterMode.DIRECT_INTEGRATION:
        return replace(pixel, t_last=t)
    k = math.exp(-pixel.alpha * dt)
    return replace(pixel, l_hat=k * pixel.l_hat + (1.0 - k) * pixel.l_ref, t_last=t)


class FilterState:
    """
    The continuous-time image state.

    Attributes:
        l_hat (ndarray): log-intensity estimate per pixel.
        t_last (ndarray): time of the latest update per pixel.
        l_ref (ndarray): latest frame reference per pixel (zero in events_only mode).
        alpha (ndarray): per-pixel gain in rad/s.
    """

    def __init__(self, width: int, height: int, config: FilterConfig):
        if width <= 0 or height <= 0:
            raise DimensionError(f"sensor size must be positive, got {width}x{height}")
        self.width = width
        self.height = height
        self.mode = FilterMode(config.mode)
        self.gain = GainParams.from_config(config)
        self.c_on = float(config.c_on)
        self.c_off = float(config.c_off)
        self.init_from_frame = config.init_from_frame
        self.frames_seen = 0

        shape = (height, width)
        self.l_hat = np.zeros(shape)
        self.t_last = np.zeros(shape)
        self.l_ref = np.zeros(shape)
        self.alpha = np.full(shape, self.gain.alpha1)

    @property
    def leak(self) -> bool:
        return self.mode is not FilterMode.DIRECT_INTEGRATION

    @property
    def t_max(self) -> float:
        return float(self.t_last.max())

    def pixel(self, x: int, y: int) -> PixelState:
        self._check_bounds(x, y)
        return PixelState(
            float(self.l_hat[y, x]), float(self.t_last[y, x]),
            float(self.l_ref[y, x]), float(self.alpha[y, x]),
        )

    def _check_bounds(self, x: int, y: int):
        if not (0 <= x < self.width and 0 <= y < self.height):
            raise DatasetError(f"pixel ({x}, {y}) is outside the {self.width}x{self.height} sensor")

    def decay_pixel(self, x: int, y: int, t: float):
        updated = decay(self.pixel(x, y), t, self.mode, x, y)
        self.l_hat[y, x] = updated.l_hat
        self.t_last[y, x] = updated.t_last

    def process_event(self, ev: Event):
        self.decay_pixel(ev.x, ev.y, ev.t)
        if ev.polarity > 0:
            self.l_hat[ev.y, ev.x] += self.c_on
        else:
            self.l_hat[ev.y, ev.x] -= self.c_off

    def process_events(self, events: EventArray):
        """Apply a time-ordered batch; equivalent to process_event on each in turn."""
        if not len(events):
            return
        if events.x.max() >= self.width or events.y.max() >= self.height:
            i = int(np.flatnonzero((events.x >= self.width) | (events.y >= self.height))[0])
            self._check_bounds(int(events.x[i]), int(events.y[i]))
        self._integrate(events.t, events.x, events.y, events.polarity)

    def _integrate(self, ts, xs, ys, ps):
        bad = _integrate_events(
            self.l_hat, self.t_last, self.l_ref, self.alpha,
            ts, xs, ys, ps, self.c_on, self.c_off, self.leak,
        )
        if bad >= 0:
            x, y = int(xs[bad]), int(ys[bad])
            raise OutOfOrderError(x, y, float(self.t_last[y, x]), float(ts[bad]))

    def _decay_to(self, t: float, l_hat, t_last):
        bad = _decay_all(l_hat, t_last, self.l_ref, self.alpha, float(t), self.leak)
        if bad >= 0:
            y, x = divmod(bad, self.width)
            raise OutOfOrderError(x, y, float(t_last[y, x]), float(t))

    def process_frame(self, frame_log: LogImage):
        if self.mode is FilterMode.EVENTS_ONLY:
            raise ModeError("frames cannot be applied in events_only mode")
        if frame_log.shape != (self.height, self.width):
            raise DimensionError(
                f"frame is {frame_log.width}x{frame_log.height}, "
                f"sensor is {self.width}x{self.height}"
            )
        # decay under the old reference: the previous frame holds until this one
        self._decay_to(frame_log.t, self.l_hat, self.t_last)

        values = frame_log.values
        if self.mode is FilterMode.DIRECT_INTEGRATION:
            self.l_hat[:] = values
        elif self.init_from_frame and self.frames_seen == 0:
            self.l_hat += values
        self.l_ref[:] = values
        self.alpha[:] = compute_alpha(values, self.gain)
        self.frames_seen += 1
        log.debug(f"Applied frame at t={frame_log.t:.6f}")

    def query(self, t: float) -> LogImage:
        """Bring every pixel to time t and return the image. Advances the state."""
        self._decay_to(t, self.l_hat, self.t_last)
        return LogImage(t, self.l_hat.copy())

    def snapshot(self, t: float) -> LogImage:
        """Like query, without touching the state."""
        l_hat = self.l_hat.copy()
        self._decay_to(t, l_hat, self.t_last.copy())
        return LogImage(t, l_hat)


class ReconstructionSession:
    """
    Merges a dataset's event and frame streams by timestamp and feeds them to a
    FilterState, exposing the image at caller-chosen times. At equal timestamps the
    frame is applied before the events.
    """

    def __init__(
        self,
        dataset: Dataset,
        config: FilterConfig,
        frames_log: Optional[Sequence[LogImage]] = None,
    ):
        self.dataset = dataset
        self.config = config
        self.state = FilterState(dataset.width, dataset.height, config)

        if self.state.mode is FilterMode.EVENTS_ONLY:
            if dataset.frames or frames_log:
                log.info("events_only mode: ignoring input frames")
            self._frames: Sequence[LogImage] = ()
        elif frames_log is not None:
            self._frames = tuple(frames_log)
        else:
            self._frames = tuple(to_log(f, config.log_offset) for f in dataset.frames)
        for prev, frame in zip(self._frames, self._frames[1:]):
            if frame.t <= prev.t:
                raise DatasetError(f"frame timestamps must increase: {prev.t!r} then {frame.t!r}")

        self._next_frame = 0
        self._next_event = 0

    def _feed(self, stop: int):
        if stop <= self._next_event:
            return
        events = self.dataset.events
        start = self._next_event
        self.state._integrate(
            events.t[start:stop], events.x[start:stop],
            events.y[start:stop], events.polarity[start:stop],
        )
        self._next_event = stop

    def advance(self, t: float):
        """Consume every frame and event stamped at or before t."""
        stamps = self.dataset.events.t
        while self._next_frame < len(self._frames) and self._frames[self._next_frame].t <= t:
            frame = self._frames[self._next_frame]
            self._feed(int(np.searchsorted(stamps, frame.t, side="left")))
            self.state.process_frame(frame)
            self._next_frame += 1
        self._feed(int(np.searchsorted(stamps, t, side="right")))

    def query(self, t: float) -> LogImage:
        self.advance(t)
        return self.state.query(t)

    def export(self, times: Iterable[float]) -> Iterator[LogImage]:
        for t in times:
            yield self.query(float(t))

    @property
    def events_consumed(self) -> int:
        return self._next_event


def run(dataset: Dataset, config: FilterConfig) -> ReconstructionSession:
    log.info(
        f"Reconstructing {dataset.width}x{dataset.height} in {FilterMode(config.mode).value} mode "
        f"(alpha1={config.alpha1:.4g} rad/s, c_on={config.c_on}, c_off={config.c_off})"
    )
    return ReconstructionSession(dataset, config)
