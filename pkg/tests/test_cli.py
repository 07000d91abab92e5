import json
from pathlib import Path

import pytest

from dronedet import load_detections, write_annotations
from dronedet.cli import main, parse_scale_list
from conftest import make_scene

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def write_scene_annotations(rng, directory: Path, count: int, base: int = 256) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for i in range(count):
        scene = make_scene(rng, input_w=base, input_h=base, max_objects=8, max_size=base // 8)
        (directory / f"img{i}.txt").write_text(write_annotations(scene))


class TestParseScaleList:
    def test_enumeration(self):
        assert parse_scale_list("0.5,0.75,1") == (0.5, 0.75, 1.0)

    def test_range(self):
        assert parse_scale_list("0.5:1.5") == (0.5, 0.75, 1.0, 1.25, 1.5)

    def test_range_with_step(self):
        assert parse_scale_list("1:2:0.5") == (1.0, 1.5, 2.0)

    def test_json_list_passthrough(self):
        assert parse_scale_list([0.5, 1]) == (0.5, 1.0)


class TestEncodeDecodeEval:
    def test_full_pipeline(self, rng, tmp_path, capsys):
        anns = tmp_path / "anns"
        maps = tmp_path / "maps"
        results = tmp_path / "results"
        write_scene_annotations(rng, anns, 2)

        assert main([
            "encode", str(anns), "--out", str(maps),
            "--resolution", "256", "--scales", "1",
        ]) == 0
        produced = sorted(p.name for p in maps.glob("*.cnhm"))
        assert produced == ["img0_s1_n.cnhm", "img1_s1_n.cnhm"]

        assert main([
            "decode", str(maps), "--out", str(results), "--score-floor", "0.5",
        ]) == 0
        assert sorted(p.name for p in results.glob("*.txt")) == ["img0_s1_n.txt", "img1_s1_n.txt"]
        for f in results.glob("*.txt"):
            f.rename(f.with_name(f.name.replace("_s1_n", "")))

        out_json = tmp_path / "metrics.json"
        assert main([
            "eval", "--results", str(results), "--annotations", str(anns),
            "--out", str(out_json),
        ]) == 0
        metrics = json.loads(out_json.read_text())
        assert metrics["ap"] == pytest.approx(1.0, abs=1e-9)
        assert metrics["ar"]["500"] == pytest.approx(1.0, abs=1e-9)

    def test_decoded_files_parse(self, rng, tmp_path):
        anns = tmp_path / "anns"
        maps = tmp_path / "maps"
        results = tmp_path / "results"
        write_scene_annotations(rng, anns, 1)
        main(["encode", str(anns), "--out", str(maps), "--resolution", "256", "--scales", "1"])
        main(["decode", str(maps), "--out", str(results), "--score-floor", "0.5"])
        dets = load_detections(next(results.glob("*.txt")).read_text())
        assert dets and all(d.score == 1.0 for d in dets)


class TestTtaEval:
    def test_multiscale_pipeline(self, rng, tmp_path):
        anns = tmp_path / "anns"
        maps = tmp_path / "maps"
        write_scene_annotations(rng, anns, 2)
        assert main([
            "encode", str(anns), "--out", str(maps),
            "--resolution", "256", "--scales", "0.5,1", "--no-flip", "--jobs", "2",
        ]) == 0
        assert len(list(maps.glob("*.cnhm"))) == 2 * 2

        out_json = tmp_path / "metrics.json"
        assert main([
            "tta-eval", "--maps", str(maps), "--annotations", str(anns),
            "--resolution", "256", "--scales", "0.5,1", "--no-flip",
            "--score-floor", "0.5", "--out", str(out_json), "--jobs", "2",
        ]) == 0
        metrics = json.loads(out_json.read_text())
        assert metrics["ap"] == pytest.approx(1.0, abs=1e-9)

    def test_flip_pipeline_with_subcell_centers(self, tmp_path):
        # centers chosen == 2 (mod 8) so no scale puts them exactly on the
        # cell grid; flip fusion is then lossless end to end
        anns = tmp_path / "anns"
        maps = tmp_path / "maps"
        anns.mkdir()
        anns.joinpath("img0.txt").write_text(
            "4,4,12,12,1,4,0,0\n"     # center (10, 10)
            "20,20,12,12,1,1,0,0\n"   # center (26, 26)
            "80,36,20,12,1,2,0,0\n"   # center (90, 42)
            "150,130,40,24,1,4,0,0\n" # center (170, 142)
        )
        assert main([
            "encode", str(anns), "--out", str(maps),
            "--resolution", "256", "--scales", "0.5,1", "--flip",
        ]) == 0
        assert len(list(maps.glob("*.cnhm"))) == 4

        out_json = tmp_path / "metrics.json"
        assert main([
            "tta-eval", "--maps", str(maps), "--annotations", str(anns),
            "--resolution", "256", "--scales", "0.5,1", "--flip",
            "--score-floor", "0.5", "--out", str(out_json),
        ]) == 0
        metrics = json.loads(out_json.read_text())
        assert metrics["ap"] == pytest.approx(1.0, abs=1e-9)
        assert metrics["ar"]["500"] == pytest.approx(1.0, abs=1e-9)

    def test_missing_map_file_fails_validation(self, rng, tmp_path, capsys):
        anns = tmp_path / "anns"
        maps = tmp_path / "maps"
        write_scene_annotations(rng, anns, 1)
        main(["encode", str(anns), "--out", str(maps), "--resolution", "256", "--scales", "1"])
        code = main([
            "tta-eval", "--maps", str(maps), "--annotations", str(anns),
            "--resolution", "256", "--scales", "0.5,1", "--no-flip",
        ])
        assert code == 1
        assert "missing map file" in capsys.readouterr().err


class TestConfigMerging:
    def test_config_supplies_defaults_and_flags_override(self, rng, tmp_path):
        anns = tmp_path / "anns"
        write_scene_annotations(rng, anns, 1)
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"resolution": 256, "scales": "0.5,1", "flip": True}))

        maps_a = tmp_path / "maps_a"
        assert main(["encode", str(anns), "--out", str(maps_a), "--config", str(config)]) == 0
        assert len(list(maps_a.glob("*.cnhm"))) == 4  # two scales x flip pair

        maps_b = tmp_path / "maps_b"
        assert main([
            "encode", str(anns), "--out", str(maps_b), "--config", str(config),
            "--scales", "1", "--no-flip",
        ]) == 0
        assert sorted(p.name for p in maps_b.glob("*.cnhm")) == ["img0_s1_n.cnhm"]


class TestReportCommand:
    def test_markdown_to_stdout(self, capsys):
        assert main(["report", str(FIXTURES / "track1_results.json")]) == 0
        out = capsys.readouterr().out
        assert "| CN-DhVaSa | 27.83 | 50.73 | 26.77 | 0.00 | 0.18 | 7.78 | 46.81 |" in out

    def test_svg_to_file(self, tmp_path):
        out = tmp_path / "chart.svg"
        rows = json.loads((FIXTURES / "track1_results.json").read_text())
        rows_file = tmp_path / "rows.json"
        rows_file.write_text(json.dumps([rows[1]]))
        assert main(["report", str(rows_file), "--format", "svg", "--out", str(out)]) == 0
        assert out.read_text().startswith("<svg ")

    def test_unknown_format_is_validation_error(self, tmp_path, capsys):
        rows_file = tmp_path / "rows.json"
        rows_file.write_text((FIXTURES / "track1_results.json").read_text())
        # argparse rejects the flag value before our code runs: usage error
        with pytest.raises(SystemExit):
            main(["report", str(rows_file), "--format", "html"])


class TestExitCodes:
    def test_validation_error(self, tmp_path, capsys):
        bad = tmp_path / "anns"
        bad.mkdir()
        (bad / "img0.txt").write_text("not,a,line\n")
        code = main(["encode", str(bad), "--out", str(tmp_path / "maps")])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_io_error(self, tmp_path, capsys):
        code = main([
            "encode", str(tmp_path / "missing"), "--out", str(tmp_path / "maps"),
        ])
        assert code == 2
