import numpy as np
import pytest

from ltcf import synth
from ltcf.synth import SynthScript


def test_static_frames_identical(tmp_path):
    seq = synth.generate(SynthScript.static(10), tmp_path / "s")
    assert len(seq) == 10
    assert np.all(seq.boxes == seq.boxes[0])
    data = [p.read_bytes() for p in seq.frames]
    assert all(d == data[0] for d in data)


def test_constant_motion():
    boxes = SynthScript.constant(5, 8, 0, start=(10, 20)).boxes()
    assert [b[0] for b in boxes] == [10, 18, 26, 34, 42]
    assert all(b[1] == 20 for b in boxes)


def test_round_trip(tmp_path):
    script = synth.script_from_options(frames=30, seed=4, occlusion=[(5, 9)], out_of_view=[(15, 18)])
    seq = synth.generate(script, tmp_path / "s")
    expected = np.array(script.boxes(), dtype=float)
    np.testing.assert_array_equal(seq.boxes, expected)


def test_same_seed_is_byte_identical(tmp_path):
    script = synth.script_from_options(frames=12, seed=9, background="clutter", occlusion=[(3, 6)])
    a = synth.generate(script, tmp_path / "a")
    b = synth.generate(script, tmp_path / "b")
    for fa, fb in zip(a.frames, b.frames):
        assert fa.read_bytes() == fb.read_bytes()
    assert (tmp_path / "a" / "groundtruth_rect.txt").read_text() == (tmp_path / "b" / "groundtruth_rect.txt").read_text()


@pytest.mark.parametrize("seed", range(5))
def test_boxes_stay_in_frame(seed):
    script = synth.script_from_options(frames=150, seed=seed, max_speed=8, out_of_view=[(50, 60)])
    W, H = script.frame_size
    for i, (x, y, w, h) in enumerate(script.boxes()):
        if 50 <= i < 60:
            assert x >= W
        else:
            assert 0 <= x and x + w <= W and 0 <= y and y + h <= H


def test_occlusion_covers_target():
    script = synth.script_from_options(frames=6, seed=1, motion="static", occlusion=[(2, 4)])
    frames = [f for f, _ in synth.render(script)]
    x, y, w, h = script.boxes()[0]
    assert not np.array_equal(frames[1][y : y + h, x : x + w], frames[2][y : y + h, x : x + w])
    np.testing.assert_array_equal(frames[1], frames[4])


def test_scale_rate():
    boxes = synth.script_from_options(frames=3, motion="static", scale_rate=1.1).boxes()
    assert [b[2] for b in boxes] == [40, 44, 48]


def test_script_validation():
    with pytest.raises(ValueError):
        SynthScript(motion=((0, 0),) * 5, occlusions=((3, 8),))
    with pytest.raises(ValueError):
        SynthScript(motion=((0, 0),) * 2, scale=(1.0, 0.0))
    with pytest.raises(ValueError):
        SynthScript(motion=((0, 0),), background="sky")
    with pytest.raises(ValueError):
        synth.parse_interval("5:5")
    with pytest.raises(ValueError):
        synth.script_from_options(motion="teleport")


def test_load_script(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("frames = 40\nseed = 2\nocclusion = 5:10, 20:25\nframe_size = 160x120\nbackground = textured\n")
    script = synth.load_script(path)
    assert script.num_frames == 40
    assert script.occlusions == ((5, 10), (20, 25))
    assert script.frame_size == (160, 120)
    path.write_text("speed = 3\n")
    with pytest.raises(ValueError, match="unknown key"):
        synth.load_script(path)


def test_unwritable_directory(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        synth.generate(SynthScript.static(2), blocker / "out")
