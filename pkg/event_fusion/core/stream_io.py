# core/stream_io.py
"""
Readers and writers for the on-disk formats.

Events:   UTF-8 lines `t x y p`, t in seconds, p in {0, 1} for OFF/ON.
Frames:   index lines `t filename`, paths relative to the index; 8-bit grayscale
          images (binary PGM, P5; PNG is accepted on read).
Config:   UTF-8 `key = value` lines with `#` comments.
"""
from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd
from jinja2 import Environment, PackageLoader
from PIL import Image

from event_fusion.core.errors import DatasetError, DimensionError, EventFusionError, ParseError
from event_fusion.core.event_model import COORD_MAX, EventArray, Frame, LogImage, from_log

log = logging.getLogger(__name__)

Source = Union[str, Path, IO[bytes]]

EVENT_COLUMNS = ["t", "x", "y", "p"]
IMAGE_PATTERN = "frame_%08d.pgm"
INDEX_NAME = "index.txt"
EVENTS_NAME = "events.txt"
_NETPBM_SUFFIXES = {".pgm", ".ppm", ".pnm"}


def _read_text(source: Source) -> str:
    if hasattr(source, "read"):
        data = source.read()
    else:
        data = Path(source).read_bytes()
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(f"input is not valid UTF-8: {e}") from e


def _write_text(sink, text: str):
    data = text.encode("utf-8")
    if hasattr(sink, "write"):
        sink.write(data)
    else:
        Path(sink).write_bytes(data)


# ---------------------------------------------------------------------------
# events
# ---------------------------------------------------------------------------

def _parse_event_lines(text: str) -> EventArray:
    """Line-by-line parser; slow, but reports the first bad line."""
    ts, xs, ys, ps = [], [], [], []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(f"expected 4 fields 't x y p', got {len(parts)}: {line!r}", line=lineno)
        try:
            t = float(parts[0])
            x = int(parts[1])
            y = int(parts[2])
            p = int(parts[3])
        except ValueError:
            raise ParseError(f"malformed event {line!r}", line=lineno) from None
        if p not in (0, 1):
            raise ParseError(f"polarity must be 0 or 1, got {p}", line=lineno)
        if not math.isfinite(t) or t < 0:
            raise ParseError(f"timestamp must be finite and >= 0, got {parts[0]}", line=lineno)
        if x < 0 or y < 0:
            raise ParseError(f"negative pixel coordinate ({x}, {y})", line=lineno)
        if x > COORD_MAX or y > COORD_MAX:
            raise ParseError(f"pixel coordinate ({x}, {y}) out of range", line=lineno)
        ts.append(t)
        xs.append(x)
        ys.append(y)
        ps.append(1 if p else -1)
    return EventArray(np.array(ts, dtype=np.float64), np.array(xs), np.array(ys), np.array(ps))


def read_events(source: Source) -> EventArray:
    """
    Parse an events file into an EventArray, keeping file order.

    The bulk parse goes through pandas; any failure or out-of-domain value falls back to
    the line parser, which raises a ParseError naming the offending line.
    """
    text = _read_text(source)
    if not text.strip():
        return EventArray.empty()
    try:
        df = pd.read_csv(
            io.StringIO(text),
            sep=r"\s+",
            header=None,
            names=EVENT_COLUMNS,
            dtype={"t": np.float64, "x": np.int64, "y": np.int64, "p": np.int64},
            float_precision="round_trip",
            engine="c",
        )
    except (ValueError, pd.errors.ParserError):
        return _parse_event_lines(text)
    if not isinstance(df.index, pd.RangeIndex):
        # surplus leading columns were taken as an index
        return _parse_event_lines(text)

    t = df["t"].to_numpy()
    x = df["x"].to_numpy()
    y = df["y"].to_numpy()
    p = df["p"].to_numpy()
    valid = (
        np.all(np.isfinite(t)) and (t >= 0).all()
        and (x >= 0).all() and (y >= 0).all()
        and (x <= COORD_MAX).all() and (y <= COORD_MAX).all()
        and np.isin(p, (0, 1)).all()
    )
    if not valid:
        return _parse_event_lines(text)
    return EventArray(t, x, y, np.where(p == 1, 1, -1))


def write_events(events: EventArray, sink: Source):
    lines = [
        f"{t!r} {x} {y} {1 if p > 0 else 0}\n"
        for t, x, y, p in zip(
            events.t.tolist(), events.x.tolist(), events.y.tolist(), events.polarity.tolist()
        )
    ]
    _write_text(sink, "".join(lines))


# ---------------------------------------------------------------------------
# images and frames
# ---------------------------------------------------------------------------

def read_image(path: Union[str, Path, IO[bytes]]) -> np.ndarray:
    """Load an 8-bit grayscale image; anything else is rejected."""
    with Image.open(path) as im:
        if im.mode != "L":
            raise DatasetError(f"{path}: expected 8-bit grayscale image, got mode {im.mode}")
        return np.array(im, dtype=np.uint8)


def write_image(img: Union[Frame, LogImage], sink, offset: Optional[float] = None):
    if isinstance(img, LogImage):
        if offset is None:
            raise EventFusionError("writing a log image needs the log offset")
        img = from_log(img, offset)
    fmt = "PPM"
    if not hasattr(sink, "write") and Path(sink).suffix.lower() not in _NETPBM_SUFFIXES:
        fmt = None
    Image.fromarray(np.ascontiguousarray(img.pixels)).save(sink, format=fmt)


def read_frames(
    index: Union[str, Path, IO[bytes]],
    loader: Callable[[Path], np.ndarray] = read_image,
    root: Optional[Path] = None,
) -> list[Frame]:
    """Read a frames index and load every listed image through `loader`."""
    if root is None:
        root = Path(index).parent if not hasattr(index, "read") else Path.cwd()
    text = _read_text(index)

    frames: list[Frame] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.strip().split(maxsplit=1)
        if len(parts) != 2:
            raise ParseError(f"expected 't filename', got {line!r}", line=lineno)
        try:
            t = float(parts[0])
        except ValueError:
            raise ParseError(f"malformed timestamp {parts[0]!r}", line=lineno) from None
        if not math.isfinite(t):
            raise ParseError(f"timestamp must be finite, got {parts[0]}", line=lineno)
        if frames and t <= frames[-1].t:
            raise DatasetError(
                f"line {lineno}: frame timestamp {t!r} is not after previous {frames[-1].t!r}"
            )
        pixels = loader(root / parts[1])
        frame = Frame(t, pixels)
        if frames and frame.shape != frames[0].shape:
            raise DimensionError(
                f"line {lineno}: {parts[1]} is {frame.width}x{frame.height}, "
                f"expected {frames[0].width}x{frames[0].height}"
            )
        frames.append(frame)

    log.debug(f"Read {len(frames)} frames from index")
    return frames


def write_frames(
    frames: Iterable[Union[Frame, LogImage]],
    out_dir: Path,
    offset: Optional[float] = None,
    index_name: str = INDEX_NAME,
) -> Path:
    """Write images as frame_%08d.pgm plus an index that read_frames accepts."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    for i, img in enumerate(frames):
        name = IMAGE_PATTERN % i
        write_image(img, out_dir / name, offset=offset)
        lines.append(f"{img.t!r} {name}\n")
    index_path = out_dir / index_name
    _write_text(index_path, "".join(lines))
    return index_path


# ---------------------------------------------------------------------------
# datasets
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Dataset:
    events: EventArray
    frames: Sequence[Frame]
    width: int
    height: int

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        if self.width <= 0 or self.height <= 0:
            raise DatasetError(f"sensor size must be positive, got {self.width}x{self.height}")

        t = self.events.t
        if len(t) > 1:
            backwards = np.flatnonzero(np.diff(t) < 0)
            if backwards.size:
                i = int(backwards[0]) + 1
                raise DatasetError(
                    f"event {i} at t={t[i]!r} precedes event {i - 1} at t={t[i - 1]!r}"
                )
        if len(t):
            outside = np.flatnonzero((self.events.x >= self.width) | (self.events.y >= self.height))
            if outside.size:
                i = int(outside[0])
                raise DatasetError(
                    f"event {i} at ({self.events.x[i]}, {self.events.y[i]}) is outside the "
                    f"{self.width}x{self.height} sensor"
                )

        for prev, frame in zip(self.frames, self.frames[1:]):
            if frame.t <= prev.t:
                raise DatasetError(f"frame timestamps must increase: {prev.t!r} then {frame.t!r}")
        for frame in self.frames:
            if frame.shape != (self.height, self.width):
                raise DimensionError(
                    f"frame at t={frame.t!r} is {frame.width}x{frame.height}, "
                    f"sensor is {self.width}x{self.height}"
                )

    @property
    def span(self) -> tuple[float, float]:
        stamps = [f.t for f in self.frames[:1] + self.frames[-1:]]
        if len(self.events):
            stamps.extend(self.events.span)
        if not stamps:
            raise DatasetError("dataset has neither events nor frames")
        return min(stamps), max(stamps)


def load_dataset(
    events_path: Source,
    frames_index: Optional[Path] = None,
    width: Optional[int] = None,
    height: Optional[int] = None,
) -> Dataset:
    events = read_events(events_path)
    frames = read_frames(frames_index) if frames_index is not None else []

    if frames:
        f_height, f_width = frames[0].shape
        if (width, height) != (None, None) and (width, height) != (f_width, f_height):
            raise DimensionError(
                f"sensor size {width}x{height} disagrees with frames ({f_width}x{f_height})"
            )
        width, height = f_width, f_height
    elif width is None or height is None:
        if not len(events):
            raise DatasetError("cannot infer the sensor size from an empty event stream")
        width = width or int(events.x.max()) + 1
        height = height or int(events.y.max()) + 1
        log.warning(f"No frames or sensor size given; inferred {width}x{height} from events")

    log.info(f"Loaded {len(events)} events and {len(frames)} frames ({width}x{height})")
    return Dataset(events=events, frames=frames, width=width, height=height)


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

def read_config(source: Source) -> dict:
    """Parse `key = value` lines; values stay strings for pydantic to coerce."""
    values = {}
    for lineno, line in enumerate(_read_text(source).splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ParseError(f"expected 'key = value', got {line!r}", line=lineno)
        values[key] = value.strip()
    return values


def _format_value(value) -> str:
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_config(values: Mapping, sink: Source, header: Optional[str] = None):
    """Render a config file through the package template; None values are omitted."""
    template_env = Environment(
        loader=PackageLoader("event_fusion", "templates"),
        trim_blocks=True,
        lstrip_blocks=True
    )
    template = template_env.get_template("config.cfg.j2")
    output = template.render(
        header=header,
        entries=[(k, _format_value(v)) for k, v in values.items() if v is not None],
    )
    _write_text(sink, output)
