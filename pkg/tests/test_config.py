import math
from pathlib import Path

import pytest
from pydantic import ValidationError

from event_fusion.core.errors import ConfigError
from event_fusion.core.utils import export_schedule, parse_times
from event_fusion.models.args import FilterConfig, ReconstructArgs, SimulationConfig
from event_fusion.models.config import merge_config, parse_config
from event_fusion.models.mixins import FilterMode


def test_filter_defaults():
    config = FilterConfig(c_on=0.2, c_off=0.3)
    assert config.alpha1 == 2 * math.pi
    assert config.lambda_ == 0.1
    assert config.kappa_fraction == 0.05
    assert config.log_offset == 0.01
    assert config.mode is FilterMode.FUSION
    assert config.init_from_frame is True


def test_simulation_defaults():
    config = SimulationConfig()
    assert (config.c_on, config.c_off) == (0.15, 0.15)
    assert config.noise_fraction == 0.05
    assert config.subsample_rate == 20.0
    assert config.frame_delay == 0.05
    assert config.truncation_fraction == 0.25


@pytest.mark.parametrize("values", [
    {"c_on": 0.0, "c_off": 0.1},
    {"c_on": 0.1},
    {"c_on": 0.1, "c_off": 0.1, "log_offset": 0.0},
    {"c_on": 0.1, "c_off": 0.1, "lambda": 1.5},
    {"c_on": 0.1, "c_off": 0.1, "mode": "kalman"},
    {"c_on": 0.1, "c_off": 0.1, "l_min": -1.0, "l_max": -2.0},
])
def test_invalid_filter_config(values):
    with pytest.raises(ValidationError):
        FilterConfig(**values)


def test_flat_file_then_cli(tmp_path):
    path = tmp_path / "fusion.cfg"
    path.write_text("c_on = 0.2\nc_off = 0.25\nalpha1 = 3.0\nmode = direct_integration\n")
    file_config = parse_config(ReconstructArgs, path)
    args = merge_config(
        {"events": Path("e.txt"), "export_rate": 10.0, "alpha1": 5.0, "c_off": None},
        file_config,
        ReconstructArgs,
    )
    assert args.c_on == 0.2
    assert args.c_off == 0.25
    assert args.alpha1 == 5.0
    assert args.mode is FilterMode.DIRECT_INTEGRATION


def test_yaml_sequences(tmp_path):
    path = tmp_path / "fusion.yml"
    path.write_text(
        "c_on: 0.2\nc_off: 0.2\nlambda: 0.3\n"
        "sequences:\n  boxes:\n    c_on: 0.11\n    kappa-fraction: 0.1\n"
    )
    config = parse_config(FilterConfig, path, sequence="boxes")
    args = merge_config({}, config, FilterConfig)
    assert (args.c_on, args.c_off, args.lambda_, args.kappa_fraction) == (0.11, 0.2, 0.3, 0.1)


def test_unknown_sequence(tmp_path):
    path = tmp_path / "fusion.yml"
    path.write_text("c_on: 0.2\n")
    with pytest.raises(ConfigError, match="not found"):
        parse_config(FilterConfig, path, sequence="boxes")


def test_sequence_without_file():
    with pytest.raises(ConfigError):
        parse_config(FilterConfig, None, sequence="boxes")


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        parse_config(FilterConfig, tmp_path / "nope.cfg")


def test_export_schedule_is_exclusive():
    with pytest.raises(ValidationError):
        ReconstructArgs(events="e.txt", c_on=0.1, c_off=0.1)
    with pytest.raises(ValidationError):
        ReconstructArgs(events="e.txt", c_on=0.1, c_off=0.1, export_rate=10, export_times=[0.1])
    with pytest.raises(ValidationError):
        ReconstructArgs(events="e.txt", c_on=0.1, c_off=0.1, export_times=[0.2, 0.1])


def test_export_schedule_arithmetic():
    times = export_schedule(0.0, 1.0, 100.0)
    assert len(times) == 100
    assert times[1] == pytest.approx(0.01)
    assert len(export_schedule(0.5, 0.5, 30.0)) == 1
    assert len(export_schedule(0.0, 1.001, 100.0)) == 101
    with pytest.raises(ConfigError):
        export_schedule(0.0, 1.0, 0.0)


def test_parse_times():
    assert parse_times("0.1, 0.2,0.35") == [0.1, 0.2, 0.35]
    assert parse_times(None) is None
    with pytest.raises(ConfigError):
        parse_times("0.1,abc")


def test_bundled_example():
    import event_fusion

    path = Path(event_fusion.__file__).parent / "examples" / "fusion.yml"
    night = merge_config({}, parse_config(FilterConfig, path, sequence="night_drive"), FilterConfig)
    assert (night.c_on, night.c_off, night.l_min, night.l_max) == (0.2, 0.22, -3.5, -0.3)
    truck = merge_config({"c_off": 0.16}, parse_config(FilterConfig, path, sequence="truck"), FilterConfig)
    assert (truck.c_on, truck.c_off, truck.alpha1) == (0.12, 0.16, 2 * math.pi)
