import numpy as np
import pytest
from typer.testing import CliRunner

from event_fusion.app import app
from event_fusion.core.event_model import Frame
from event_fusion.core.stream_io import read_config, read_events, read_frames, write_frames
from event_fusion.models.args import FilterConfig

from scenes import constant_frames, log_ramp_scene, wobble_scene

runner = CliRunner()


def invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


def printed(output: str, key: str) -> float:
    for line in output.splitlines():
        if line.startswith(f"{key} = "):
            return float(line.split("=", 1)[1])
    raise AssertionError(f"{key} not printed:\n{output}")


@pytest.fixture
def events_file(tmp_path):
    path = tmp_path / "events.txt"
    path.write_text("0.0 0 0 1\n0.25 1 1 0\n0.5 2 3 1\n1.0 3 3 1\n")
    return path


@pytest.fixture
def gt_index(tmp_path):
    return write_frames(wobble_scene(0, rate=168.0, n=168), tmp_path / "gt")


class TestReconstruct:
    def test_rate_schedule(self, tmp_path, events_file):
        out = tmp_path / "recon"
        result = invoke(
            "reconstruct", "--events", events_file, "--width", 4, "--height", 4,
            "--c-on", 0.1, "--c-off", 0.1, "--mode", "events_only",
            "--export-rate", 100, "--out", out,
        )
        assert result.exit_code == 0, result.output
        frames = read_frames(out / "index.txt")
        assert len(frames) == 100
        assert len(list(out.glob("frame_*.pgm"))) == 100
        assert frames[0].t == 0.0 and frames[1].t == pytest.approx(0.01)

    def test_explicit_times(self, tmp_path, events_file):
        out = tmp_path / "recon"
        result = invoke(
            "reconstruct", "--events", events_file, "--width", 4, "--height", 4,
            "--c-on", 0.1, "--c-off", 0.1, "--export-times", "0.25,0.75", "--out", out,
        )
        assert result.exit_code == 0, result.output
        assert [f.t for f in read_frames(out / "index.txt")] == [0.25, 0.75]

    def test_config_file(self, tmp_path, events_file):
        config = tmp_path / "fusion.cfg"
        config.write_text("c_on = 0.1\nc_off = 0.1\nmode = direct_integration\n")
        result = invoke(
            "reconstruct", "--events", events_file, "--width", 4, "--height", 4,
            "--config", config, "--export-times", "1.0", "--out", tmp_path / "recon",
        )
        assert result.exit_code == 0, result.output

    def test_no_frames_runs_events_only(self, tmp_path, events_file):
        outputs = []
        for mode in ("fusion", "events_only"):
            out = tmp_path / mode
            result = invoke(
                "reconstruct", "--events", events_file, "--width", 4, "--height", 4,
                "--c-on", 0.1, "--c-off", 0.1, "--mode", mode, "--export-rate", 20, "--out", out,
            )
            assert result.exit_code == 0, result.output
            outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        assert outputs[0] == outputs[1]

    def test_malformed_event_line(self, tmp_path):
        path = tmp_path / "events.txt"
        path.write_text("0.1 1 1 1\n0.2 1 one 0\n")
        result = invoke(
            "reconstruct", "--events", path, "--width", 4, "--height", 4,
            "--c-on", 0.1, "--c-off", 0.1, "--export-rate", 10, "--out", tmp_path / "recon",
        )
        assert result.exit_code == 1
        assert "line 2" in result.output

    def test_missing_thresholds(self, tmp_path, events_file):
        result = invoke("reconstruct", "--events", events_file, "--export-rate", 10, "--out", tmp_path / "r")
        assert result.exit_code == 1

    @pytest.mark.parametrize("option, value", [("--mode", "bogus"), ("--export-rate", "abc"), ("--width", "4.5")])
    def test_bad_option_value(self, tmp_path, events_file, option, value):
        args = {"--width": 4, "--height": 4, "--export-rate": 10, option: value}
        flat = [str(a) for pair in args.items() for a in pair]
        result = invoke(
            "reconstruct", "--events", events_file, "--c-on", 0.1, "--c-off", 0.1,
            *flat, "--out", tmp_path / "recon",
        )
        assert result.exit_code == 1

    def test_missing_events_file(self, tmp_path):
        result = invoke(
            "reconstruct", "--events", tmp_path / "nope.txt", "--width", 4, "--height", 4,
            "--c-on", 0.1, "--c-off", 0.1, "--export-rate", 10, "--out", tmp_path / "recon",
        )
        assert result.exit_code == 2

    def test_deterministic(self, tmp_path, events_file):
        outputs = []
        for name in ("a", "b"):
            out = tmp_path / name
            result = invoke(
                "reconstruct", "--events", events_file, "--width", 4, "--height", 4,
                "--c-on", 0.1, "--c-off", 0.1, "--export-rate", 20, "--out", out,
            )
            assert result.exit_code == 0, result.output
            outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        assert outputs[0] == outputs[1]


class TestSimulate:
    def test_default_config(self, tmp_path, gt_index):
        out = tmp_path / "sim"
        result = invoke("simulate", "--frames", gt_index, "--out", out)
        assert result.exit_code == 0, result.output
        frames = read_frames(out / "index.txt")
        assert len(frames) == 20
        assert frames[0].t == pytest.approx(0.05)
        assert frames[0].pixels.min() >= 64 and frames[0].pixels.max() <= 191
        assert len(read_events(out / "events.txt")) > 0

    def test_deterministic(self, tmp_path, gt_index):
        for name in ("a", "b"):
            result = invoke("simulate", "--frames", gt_index, "--out", tmp_path / name, "--seed", 3)
            assert result.exit_code == 0, result.output
        assert (tmp_path / "a" / "events.txt").read_bytes() == (tmp_path / "b" / "events.txt").read_bytes()
        assert (tmp_path / "a" / "index.txt").read_bytes() == (tmp_path / "b" / "index.txt").read_bytes()

    def test_bad_seed(self, tmp_path, gt_index):
        result = invoke("simulate", "--frames", gt_index, "--out", tmp_path / "sim", "--seed", "abc")
        assert result.exit_code == 1

    def test_single_frame(self, tmp_path):
        index = write_frames(constant_frames(100, [0.0]), tmp_path / "gt")
        result = invoke("simulate", "--frames", index, "--out", tmp_path / "sim")
        assert result.exit_code == 1
        assert "need >= 2 frames" in result.output


class TestCalibrate:
    @pytest.fixture
    def simulated(self, tmp_path):
        gt = write_frames(log_ramp_scene(), tmp_path / "gt")
        out = tmp_path / "sim"
        result = invoke(
            "simulate", "--frames", gt, "--out", out,
            "--noise-fraction", 0, "--truncation-fraction", 0, "--frame-delay", 0.05,
        )
        assert result.exit_code == 0, result.output
        return out

    def test_recovers_thresholds(self, tmp_path, simulated):
        config = tmp_path / "fusion.cfg"
        config.write_text("alpha1 = 5.0\n")
        result = invoke(
            "calibrate", "--events", simulated / "events.txt", "--frames", simulated / "index.txt",
            "--frame-delay", 0.05, "--write", config,
        )
        assert result.exit_code == 0, result.output
        c_on = printed(result.output, "c_on")
        c_off = printed(result.output, "c_off")
        assert c_on == pytest.approx(0.15, rel=0.05)
        assert c_off == pytest.approx(0.15, rel=0.05)

        written = FilterConfig(**read_config(config))
        assert (written.c_on, written.c_off, written.alpha1) == (c_on, c_off, 5.0)

    def test_no_events(self, tmp_path):
        frames = write_frames(constant_frames(100, [0.0, 0.05]), tmp_path / "gt")
        events = tmp_path / "events.txt"
        events.write_text("")
        result = invoke("calibrate", "--events", events, "--frames", frames)
        assert result.exit_code == 1


class TestEvaluate:
    def test_against_itself(self, tmp_path, gt_index):
        report = tmp_path / "report.csv"
        result = invoke("evaluate", "--ground-truth", gt_index, "--reconstruction", gt_index, "--out", report)
        assert result.exit_code == 0, result.output
        lines = report.read_text().splitlines()
        assert lines[0] == "t,photometric,ssim"
        assert len(lines) == 1 + 168 + 2
        assert all(line.split(",")[1:] == ["0.000000", "1.000000"] for line in lines[1:-1])

    def test_size_mismatch(self, tmp_path, gt_index):
        other = write_frames([Frame(0.0, np.zeros((12, 12)))], tmp_path / "other")
        result = invoke("evaluate", "--ground-truth", gt_index, "--reconstruction", other)
        assert result.exit_code == 1


def test_pipeline_formats_interlock(tmp_path, gt_index):
    sim = tmp_path / "sim"
    recon = tmp_path / "recon"
    assert invoke("simulate", "--frames", gt_index, "--out", sim).exit_code == 0
    result = invoke(
        "reconstruct", "--events", sim / "events.txt", "--frames", sim / "index.txt",
        "--c-on", 0.15, "--c-off", 0.15, "--export-rate", 84, "--out", recon,
    )
    assert result.exit_code == 0, result.output
    result = invoke(
        "evaluate", "--ground-truth", gt_index, "--reconstruction", recon / "index.txt",
        "--out", tmp_path / "report.csv",
    )
    assert result.exit_code == 0, result.output
    assert len((tmp_path / "report.csv").read_text().splitlines()) == 1 + 168 + 2
