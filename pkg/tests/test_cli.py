import json

import pytest

from ltcf.bench.cli import main


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    for name, seed in (("one", 1), ("two", 2)):
        assert main([
            "synth", str(root / name), "--frames", "6", "--seed", str(seed), "--max-speed", "2"
        ]) == 0
    return root


def test_synth_writes_layout(dataset):
    assert len(list((dataset / "one" / "img").glob("*.png"))) == 6
    assert len((dataset / "one" / "groundtruth_rect.txt").read_text().splitlines()) == 6


def test_synth_with_intervals(tmp_path):
    assert main(["synth", str(tmp_path / "s"), "--frames", "10", "--occlusion", "2:4", "--out-of-view", "6:8"]) == 0
    with pytest.raises(SystemExit):
        main(["synth", str(tmp_path / "t"), "--occlusion", "4"])


def test_track_and_eval(dataset, tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["track", str(dataset / "one"), "--out", str(out), "--no-timing"]) == 0
    doc = json.loads(out.read_text())
    assert doc["per_sequence"][0]["name"] == "one"
    assert doc["per_sequence"][0]["fps"] is None
    capsys.readouterr()
    assert main(["eval", str(out)]) == 0
    stored = capsys.readouterr().out
    assert main(["eval", str(out), "--data", str(dataset)]) == 0
    assert capsys.readouterr().out == stored


def test_track_twice_is_byte_identical(dataset, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["track", str(dataset / "two"), "--out", str(a), "--no-timing"])
    main(["track", str(dataset / "two"), "--out", str(b), "--no-timing"])
    assert a.read_bytes() == b.read_bytes()


def test_config_file(dataset, tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("no_such_key = 1\n")
    assert main(["track", str(dataset / "one"), "--config", str(cfg), "--out", str(tmp_path / "x.json")]) == 1
    assert "no_such_key" in capsys.readouterr().err


def test_bench_ope(dataset, tmp_path):
    out = tmp_path / "bench"
    assert main(["bench", str(dataset), "--ope", "--out", str(out), "--no-timing"]) == 0
    doc = json.loads((out / "results.json").read_text())
    assert [s["name"] for s in doc["per_sequence"]] == ["one", "two"]
    assert (out / "results_summary.csv").is_file()


def test_bench_shift_robustness(dataset, tmp_path):
    out = tmp_path / "rob"
    assert main(["bench", str(dataset), "--shift-robustness", "--out", str(out), "--no-timing"]) == 0
    names = sorted(p.stem for p in out.glob("*.json"))
    assert len(names) == 12
    assert "shift_ne" in names and "scale_0.8" in names
    rows = (out / "robustness_summary.csv").read_text().splitlines()
    assert len(rows) == 13


def test_bench_errors(tmp_path, capsys):
    assert main(["bench", str(tmp_path)]) == 1
    assert "no sequence" in capsys.readouterr().err
    assert main(["bench", str(tmp_path), "--workers", "0"]) == 2


def test_track_missing_sequence(tmp_path, capsys):
    assert main(["track", str(tmp_path / "nope")]) == 1
    assert "error" in capsys.readouterr().err
