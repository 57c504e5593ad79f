import cv2
import numpy as np
import pytest

from ltcf.bench.sequence import GT_FILE, SequenceError, load_sequence, parse_groundtruth, read_image


def make_seq(root, n=3, gt=None, size=(12, 10)):
    img = root / "img"
    img.mkdir(parents=True)
    for i in range(n):
        pixels = np.zeros((size[1], size[0], 3), np.uint8)
        pixels[..., 2] = 200  # red in BGR order
        pixels[0, 0] = i
        cv2.imwrite(str(img / f"{i + 1:04d}.png"), pixels)
    lines = gt if gt is not None else ["1,1,4,4"] * n
    (root / GT_FILE).write_text("\n".join(lines) + "\n")
    return root


def test_parse_groundtruth_delimiters_and_base():
    boxes = parse_groundtruth("1,2,3,4\n5\t6\t7\t8\n9 10 11 12\n")
    np.testing.assert_array_equal(boxes, [[0, 1, 3, 4], [4, 5, 7, 8], [8, 9, 11, 12]])


def test_parse_groundtruth_absent_rows():
    boxes = parse_groundtruth("1,1,4,4\n0,0,0,0\nNaN,NaN,NaN,NaN\n")
    assert np.all(np.isnan(boxes[1:]))


@pytest.mark.parametrize("text", ["1,2,3\n", "a,b,c,d\n", "1,2,3,4,5\n"])
def test_parse_groundtruth_errors_name_the_line(text):
    with pytest.raises(SequenceError, match=":1:"):
        parse_groundtruth(text)


def test_load_sequence(tmp_path):
    seq = load_sequence(make_seq(tmp_path / "demo"))
    assert seq.name == "demo" and len(seq) == 3
    frame = seq.read_frame(1)
    assert frame.shape == (10, 12, 3)
    # stored BGR comes back as RGB in [0, 1]
    assert frame[5, 5, 0] == pytest.approx(200 / 255)
    assert frame[0, 0, 2] == pytest.approx(1 / 255)
    assert seq.present(0)


def test_frames_sort_numerically(tmp_path):
    root = tmp_path / "s"
    (root / "img").mkdir(parents=True)
    for name in ("10.png", "2.png", "1.png"):
        cv2.imwrite(str(root / "img" / name), np.zeros((4, 4), np.uint8))
    (root / GT_FILE).write_text("1,1,2,2\n" * 3)
    assert [p.name for p in load_sequence(root).frames] == ["1.png", "2.png", "10.png"]


def test_count_mismatch(tmp_path):
    with pytest.raises(SequenceError, match="3 frames but 2"):
        load_sequence(make_seq(tmp_path / "s", gt=["1,1,4,4"] * 2))


def test_first_box_must_be_valid(tmp_path):
    with pytest.raises(SequenceError, match="first"):
        load_sequence(make_seq(tmp_path / "s", gt=["0,0,0,0", "1,1,4,4", "1,1,4,4"]))


def test_missing_pieces(tmp_path):
    with pytest.raises(SequenceError, match="img"):
        load_sequence(tmp_path)
    (tmp_path / "img").mkdir()
    with pytest.raises(SequenceError, match=GT_FILE):
        load_sequence(tmp_path)


def test_attributes(tmp_path):
    root = make_seq(tmp_path / "s")
    (root / "attributes.txt").write_text("OCC, SV\nIV\n")
    assert load_sequence(root).attributes == ["OCC", "SV", "IV"]


def test_unreadable_image(tmp_path):
    bad = tmp_path / "x.png"
    bad.write_bytes(b"not an image")
    with pytest.raises(SequenceError):
        read_image(bad)
