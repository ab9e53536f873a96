# core/errors.py
from typing import Optional


class EventFusionError(ValueError):
    """Base class for validation failures raised by event_fusion."""


class ConfigError(EventFusionError):
    pass


class ParseError(EventFusionError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DatasetError(EventFusionError):
    pass


class DimensionError(EventFusionError):
    pass


class ModeError(EventFusionError):
    pass


class OutOfOrderError(EventFusionError):
    def __init__(self, x: int, y: int, t_last: float, t: float):
        self.x = x
        self.y = y
        self.t_last = t_last
        self.t = t
        super().__init__(
            f"Out-of-order update at pixel ({x}, {y}): t={t!r} precedes last update t={t_last!r}"
        )


class CalibrationError(EventFusionError):
    def __init__(self, message: str, parameter: Optional[str] = None, partial: Optional[dict] = None):
        self.parameter = parameter
        self.partial = partial or {}
        super().__init__(message)
