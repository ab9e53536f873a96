# core/event_model.py
"""
Value types shared by every pipeline: events, 8-bit frames and log-intensity images.

Log convention: L = ln(I / 255 + offset), natural log, with a small positive offset
guarding the log of a black pixel. Contrast thresholds are expressed in the same units.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Union, overload

import numpy as np

from event_fusion.core.errors import ConfigError, DimensionError, EventFusionError

# Round-off guard for half-integers reached through exp(log(x)).
_ROUND_EPS = 1e-9

# Pixel coordinates are stored as int32.
COORD_MAX = int(np.iinfo(np.int32).max)


@dataclass(frozen=True, slots=True)
class Event:
    t: float
    x: int
    y: int
    polarity: int

    def __post_init__(self):
        if self.polarity not in (1, -1):
            raise EventFusionError(f"Event polarity must be +1 or -1, got {self.polarity!r}")
        if not math.isfinite(self.t) or self.t < 0:
            raise EventFusionError(f"Event timestamp must be finite and >= 0, got {self.t!r}")
        if self.x < 0 or self.y < 0:
            raise EventFusionError(f"Event coordinates must be >= 0, got ({self.x}, {self.y})")


def _coordinates(values) -> np.ndarray:
    raw = np.asarray(values)
    if raw.size and raw.min() < 0:
        raise EventFusionError("Event coordinates must be >= 0")
    if raw.size and raw.max() > COORD_MAX:
        raise EventFusionError(f"Event coordinate {raw.max()} exceeds {COORD_MAX}")
    return np.ascontiguousarray(raw, dtype=np.int32)


@dataclass(frozen=True, eq=False)
class EventArray:
    """
    Column-wise event storage.

    The filter and simulator kernels work on the raw columns; iterating or indexing
    yields `Event` value objects.
    """
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    polarity: np.ndarray

    def __post_init__(self):
        t = np.ascontiguousarray(self.t, dtype=np.float64)
        x = _coordinates(self.x)
        y = _coordinates(self.y)
        p = np.ascontiguousarray(self.polarity, dtype=np.int8)
        if not (t.ndim == x.ndim == y.ndim == p.ndim == 1):
            raise DimensionError("Event columns must be one-dimensional")
        if not (len(t) == len(x) == len(y) == len(p)):
            raise DimensionError(
                f"Event columns differ in length: t={len(t)} x={len(x)} y={len(y)} p={len(p)}"
            )
        if len(t):
            if not np.all(np.isfinite(t)) or t.min() < 0:
                raise EventFusionError("Event timestamps must be finite and >= 0")
            if not np.all((p == 1) | (p == -1)):
                raise EventFusionError("Event polarity must be +1 or -1")
        for name, arr in (("t", t), ("x", x), ("y", y), ("polarity", p)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def empty(cls) -> "EventArray":
        return cls(np.empty(0), np.empty(0), np.empty(0), np.empty(0))

    @classmethod
    def from_events(cls, events: Iterable[Event]) -> "EventArray":
        events = list(events)
        if not events:
            return cls.empty()
        return cls(
            np.fromiter((e.t for e in events), dtype=np.float64, count=len(events)),
            np.fromiter((e.x for e in events), dtype=np.int32, count=len(events)),
            np.fromiter((e.y for e in events), dtype=np.int32, count=len(events)),
            np.fromiter((e.polarity for e in events), dtype=np.int8, count=len(events)),
        )

    def take(self, index) -> "EventArray":
        return EventArray(self.t[index], self.x[index], self.y[index], self.polarity[index])

    def concat(self, other: "EventArray") -> "EventArray":
        return EventArray(
            np.concatenate([self.t, other.t]),
            np.concatenate([self.x, other.x]),
            np.concatenate([self.y, other.y]),
            np.concatenate([self.polarity, other.polarity]),
        )

    def to_list(self) -> list[Event]:
        return list(self)

    @property
    def span(self) -> tuple[float, float]:
        if not len(self):
            raise EventFusionError("Empty event stream has no time span")
        return float(self.t[0]), float(self.t[-1])

    def __len__(self) -> int:
        return len(self.t)

    def __iter__(self) -> Iterator[Event]:
        for t, x, y, p in zip(self.t.tolist(), self.x.tolist(), self.y.tolist(), self.polarity.tolist()):
            yield Event(t, x, y, p)

    @overload
    def __getitem__(self, index: int) -> Event: ...
    @overload
    def __getitem__(self, index: slice) -> "EventArray": ...

    def __getitem__(self, index):
        if isinstance(index, (int, np.integer)):
            return Event(float(self.t[index]), int(self.x[index]), int(self.y[index]), int(self.polarity[index]))
        return self.take(index)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventArray):
            return NotImplemented
        return (
            np.array_equal(self.t, other.t)
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.polarity, other.polarity)
        )


def _raster(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    if arr.ndim == 3:
        raise DimensionError(f"Only single-channel images are supported, got shape {arr.shape}")
    if arr.ndim != 2:
        raise DimensionError(f"Images must be two-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Frame:
    """8-bit grayscale intensity frame, held constant until the next one (zero-order hold)."""
    t: float
    pixels: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.pixels)
        if raw.dtype != np.uint8:
            if raw.size and (raw.min() < 0 or raw.max() > 255):
                raise EventFusionError("Frame pixels must lie in [0, 255]")
            if raw.size and not np.array_equal(raw, np.round(raw)):
                raise EventFusionError("Frame pixels must be integral 8-bit values")
        object.__setattr__(self, "pixels", _raster(raw, np.uint8))
        object.__setattr__(self, "t", float(self.t))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def __eq__(self, other) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return self.t == other.t and np.array_equal(self.pixels, other.pixels)


@dataclass(frozen=True, eq=False)
class LogImage:
    t: float
    values: np.ndarray

    def __post_init__(self):
        arr = _raster(self.values, np.float64)
        if not np.all(np.isfinite(arr)):
            raise EventFusionError("Log image values must be finite")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "t", float(self.t))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @classmethod
    def zeros(cls, t: float, height: int, width: int) -> "LogImage":
        return cls(t, np.zeros((height, width)))


def check_offset(offset: float) -> float:
    if not (isinstance(offset, (int, float)) and math.isfinite(offset) and offset > 0):
        raise ConfigError(f"log offset must be a positive real, got {offset!r}")
    return float(offset)


def log_bounds(offset: float) -> tuple[float, float]:
    """Log values of a black and a white 8-bit pixel."""
    offset = check_offset(offset)
    return math.log(offset), math.log(1.0 + offset)


def to_log(frame: Frame, offset: float) -> LogImage:
    offset = check_offset(offset)
    return LogImage(frame.t, np.log(frame.pixels / 255.0 + offset))


def from_log(img: Union[LogImage, np.ndarray], offset: float, t: float | None = None) -> Frame:
    offset = check_offset(offset)
    values = img.values if isinstance(img, LogImage) else np.asarray(img, dtype=np.float64)
    if t is None:
        t = img.t if isinstance(img, LogImage) else 0.0
    with np.errstate(over="ignore"):
        scaled = (np.exp(values) - offset) * 255.0
    pixels = np.clip(np.floor(scaled + 0.5 + _ROUND_EPS), 0, 255).astype(np.uint8)
    return Frame(t, pixels)
