import math

import numpy as np
import pytest

from event_fusion.core.errors import ConfigError, DimensionError, EventFusionError
from event_fusion.core.event_model import (
    Event,
    EventArray,
    Frame,
    LogImage,
    from_log,
    log_bounds,
    to_log,
)


def single(value):
    return Frame(0.0, np.array([[value]], dtype=np.uint8))


class TestLogConversion:
    def test_black_and_white(self):
        assert to_log(single(0), 0.01).values[0, 0] == pytest.approx(-4.60517, abs=1e-5)
        assert to_log(single(255), 0.01).values[0, 0] == pytest.approx(0.00995, abs=1e-5)

    def test_from_log_examples(self):
        assert from_log(np.array([[math.log(0.01)]]), 0.01).pixels[0, 0] == 0
        assert from_log(np.array([[math.log(1.01)]]), 0.01).pixels[0, 0] == 255
        assert from_log(np.array([[math.log(0.51)]]), 0.01).pixels[0, 0] == 128

    @pytest.mark.parametrize("offset", [1e-4, 0.01, 0.5, 3.0])
    def test_identity_on_every_8bit_value(self, offset):
        frame = Frame(1.5, np.arange(256, dtype=np.uint8).reshape(16, 16))
        back = from_log(to_log(frame, offset), offset)
        assert back == frame

    def test_strictly_monotone_and_finite(self):
        values = to_log(Frame(0.0, np.arange(256, dtype=np.uint8).reshape(1, 256)), 0.01).values[0]
        assert np.all(np.isfinite(values))
        assert np.all(np.diff(values) > 0)

    def test_out_of_range_logs_clamp(self):
        frame = from_log(np.array([[-50.0, 10.0]]), 0.01)
        assert frame.pixels.tolist() == [[0, 255]]

    @pytest.mark.parametrize("offset", [0.0, -0.01, float("nan"), float("inf")])
    def test_bad_offset(self, offset):
        with pytest.raises(ConfigError):
            to_log(single(10), offset)
        with pytest.raises(ConfigError):
            log_bounds(offset)


class TestEvents:
    def test_polarity_domain(self):
        with pytest.raises(EventFusionError):
            Event(0.1, 1, 1, 0)
        with pytest.raises(EventFusionError):
            EventArray([0.1], [1], [1], [2])

    def test_negative_inputs(self):
        with pytest.raises(EventFusionError):
            Event(-0.1, 1, 1, 1)
        with pytest.raises(EventFusionError):
            EventArray([0.1], [-1], [1], [1])

    def test_oversized_coordinates(self):
        with pytest.raises(EventFusionError, match="exceeds"):
            EventArray([0.1], np.array([2**32 + 5], dtype=np.int64), [0], [1])
        with pytest.raises(EventFusionError):
            EventArray([0.1], [0], np.array([-(2**33)], dtype=np.int64), [1])

    def test_column_lengths(self):
        with pytest.raises(DimensionError):
            EventArray([0.1, 0.2], [1], [1], [1])

    def test_iteration_and_indexing(self):
        events = [Event(0.1, 1, 2, 1), Event(0.2, 3, 4, -1)]
        array = EventArray.from_events(events)
        assert len(array) == 2
        assert array.to_list() == events
        assert array[1] == events[1]
        assert array[1:] == EventArray.from_events(events[1:])
        assert array.span == (0.1, 0.2)

    def test_columns_are_read_only(self):
        array = EventArray([0.1], [1], [1], [1])
        with pytest.raises(ValueError):
            array.t[0] = 5.0

    def test_empty(self):
        assert len(EventArray.empty()) == 0
        assert EventArray.from_events([]) == EventArray.empty()
        with pytest.raises(EventFusionError):
            EventArray.empty().span


class TestImages:
    def test_color_frames_rejected(self):
        with pytest.raises(DimensionError):
            Frame(0.0, np.zeros((4, 4, 3), dtype=np.uint8))

    def test_frame_values_checked(self):
        with pytest.raises(EventFusionError):
            Frame(0.0, np.array([[300]]))
        with pytest.raises(EventFusionError):
            Frame(0.0, np.array([[1.5]]))

    def test_log_image_must_be_finite(self):
        with pytest.raises(EventFusionError):
            LogImage(0.0, np.array([[np.nan]]))

    def test_frame_shape(self):
        frame = Frame(0.0, np.zeros((3, 5), dtype=np.uint8))
        assert (frame.width, frame.height, frame.shape) == (5, 3, (3, 5))
