# models/mixins.py
import math
from enum import Enum
from pathlib import Path
from typing import List, Optional
from pydantic import BaseModel, Field, model_validator


class FilterMode(str, Enum):
    FUSION = "fusion"
    EVENTS_ONLY = "events_only"
    DIRECT_INTEGRATION = "direct_integration"


class OutputMixin(BaseModel):
    verbose: bool = Field(
        default=False,
        description="Enable verbose logging"
    )
    quiet: bool = Field(
        default=False,
        description="Suppress progress output"
    )


class ConfigPathMixin(BaseModel):
    config_path: Optional[Path] = Field(
        default=None,
        description="Path to a key = value (or YAML) config file"
    )
    sequence: Optional[str] = Field(
        default=None,
        description="Named per-sequence override block in a YAML config"
    )


class ThresholdMixin(BaseModel):
    c_on: float = Field(
        gt=0,
        description="ON contrast threshold in natural-log units"
    )
    c_off: float = Field(
        gt=0,
        description="OFF contrast threshold in natural-log units"
    )


class LogOffsetMixin(BaseModel):
    log_offset: float = Field(
        default=0.01,
        gt=0,
        description="Additive offset b in L = ln(I/255 + b)"
    )


class GainRangeMixin(LogOffsetMixin):
    kappa_fraction: float = Field(
        default=0.05,
        ge=0,
        lt=0.5,
        description="Width of the reduced-gain bands as a fraction of the log range"
    )
    l_min: Optional[float] = Field(
        default=None,
        description="Lowest log intensity the sensor reports (default: black pixel)"
    )
    l_max: Optional[float] = Field(
        default=None,
        description="Highest log intensity the sensor reports (default: white pixel)"
    )

    @model_validator(mode="after")
    def check_log_range(self):
        if self.l_min is not None and self.l_max is not None and self.l_min >= self.l_max:
            raise ValueError(f"l_min ({self.l_min}) must be below l_max ({self.l_max})")
        return self


class FilterMixin(ThresholdMixin, GainRangeMixin):
    alpha1: float = Field(
        default=2 * math.pi,
        gt=0,
        description="Crossover frequency in rad/s"
    )
    lambda_: float = Field(
        default=0.1,
        ge=0,
        le=1,
        alias="lambda",
        description="Fraction of alpha1 kept at the saturation limits"
    )
    mode: FilterMode = Field(
        default=FilterMode.FUSION,
        description="fusion | events_only | direct_integration"
    )
    init_from_frame: bool = Field(
        default=True,
        description="Seed the estimate with the first frame"
    )


class SimulationMixin(LogOffsetMixin):
    c_on: float = Field(
        default=0.15,
        gt=0,
        description="ON contrast threshold of the simulated sensor"
    )
    c_off: float = Field(
        default=0.15,
        gt=0,
        description="OFF contrast threshold of the simulated sensor"
    )
    noise_fraction: float = Field(
        default=0.05,
        ge=0,
        lt=1,
        description="Spurious events added, as a fraction of generated events"
    )
    subsample_rate: float = Field(
        default=20.0,
        gt=0,
        description="Rate of the degraded frames in Hz"
    )
    frame_delay: float = Field(
        default=0.05,
        ge=0,
        description="Latency added to degraded frame timestamps in seconds"
    )
    truncation_fraction: float = Field(
        default=0.25,
        ge=0,
        lt=0.5,
        description="Fraction of the 8-bit range clipped at each end"
    )
    rng_seed: int = Field(
        default=0,
        ge=0,
        lt=2**64,
        description="Seed for noise generation"
    )


class SensorSizeMixin(BaseModel):
    width: Optional[int] = Field(
        default=None,
        gt=0,
        description="Sensor width when no frames are given"
    )
    height: Optional[int] = Field(
        default=None,
        gt=0,
        description="Sensor height when no frames are given"
    )


class ReconstructMixin(SensorSizeMixin, ConfigPathMixin, OutputMixin):
    events: Path = Field(
        description="Events file (t x y p per line)"
    )
    frames: Optional[Path] = Field(
        default=None,
        description="Frames index file (t filename per line)"
    )
    out: Path = Field(
        default=Path("reconstruction"),
        description="Output directory"
    )
    export_rate: Optional[float] = Field(
        default=None,
        gt=0,
        description="Export rate in Hz"
    )
    export_times: Optional[List[float]] = Field(
        default=None,
        description="Explicit export timestamps"
    )

    @model_validator(mode="after")
    def check_schedule(self):
        if (self.export_rate is None) == (self.export_times is None):
            raise ValueError("exactly one of export_rate or export_times is required")
        if self.export_times is not None and not self.export_times:
            raise ValueError("export_times must not be empty")
        if self.export_times is not None and any(b <= a for a, b in zip(self.export_times, self.export_times[1:])):
            raise ValueError("export_times must be strictly increasing")
        return self


class SimulateMixin(ConfigPathMixin, OutputMixin):
    frames: Path = Field(
        description="Ground-truth frames index"
    )
    out: Path = Field(
        default=Path("simulation"),
        description="Output directory"
    )


class CalibrateMixin(ConfigPathMixin, OutputMixin):
    events: Path = Field(
        description="Events file"
    )
    frames: Path = Field(
        description="Frames index"
    )
    frame_delay: float = Field(
        default=0.0,
        ge=0,
        description="Known frame latency subtracted before forming intervals"
    )
    write: Optional[Path] = Field(
        default=None,
        description="Write the calibrated thresholds into this config file"
    )


class EvaluateMixin(OutputMixin):
    ground_truth: Path = Field(
        description="Ground-truth frames index"
    )
    reconstruction: Path = Field(
        description="Reconstruction frames index"
    )
    out: Optional[Path] = Field(
        default=None,
        description="Report file (standard output when omitted)"
    )
