import csv
import hashlib
import json

import pytest

from gamescape import cli


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def rps_file(tmp_path):
    assert cli.main(["gen", "--family", "rps", "--out", str(tmp_path / "gen")]) == 0
    return tmp_path / "gen" / "rps.json"


class TestGen:
    def test_writes_game_and_manifest(self, rps_file):
        manifest = json.loads((rps_file.parent / "manifest.json").read_text())
        assert manifest["command"] == "gen"
        digest = hashlib.sha256(rps_file.read_bytes()).hexdigest()
        assert manifest["outputs"]["rps.json"] == digest

    def test_params_and_csv(self, tmp_path):
        code = cli.main(["gen", "--family", "blotto", "--param", "tokens=5", "--param", "regions=3",
                         "--format", "csv", "--out", str(tmp_path)])
        assert code == 0
        assert list(tmp_path.glob("*.csv"))

    def test_unknown_parameter(self, tmp_path):
        assert cli.main(["gen", "--family", "blotto", "--param", "coins=5",
                         "--out", str(tmp_path)]) == 1

    def test_unknown_family(self, tmp_path):
        assert cli.main(["gen", "--family", "chess", "--out", str(tmp_path)]) == 1


class TestAnalyze:
    def test_rps(self, rps_file, tmp_path):
        out = tmp_path / "an"
        assert cli.main(["analyze", "--game", str(rps_file), "--out", str(out)]) == 0
        embedding = rows(out / "rps.embedding.csv")
        assert len(embedding) == 3
        assert len({r["cluster"] for r in embedding}) == 3
        dot = (out / "rps.contracted.dot").read_text()
        strong = [line for line in dot.splitlines()
                  if "->" in line and float(line.split("weight=")[1].rstrip("];")) > 0.1]
        assert len(strong) == 3
        ranking = rows(out / "rps.ranking.csv")
        assert all(abs(float(r["pi"]) - 1 / 3) <= 1e-8 for r in ranking)
        manifest = json.loads((out / "manifest.json").read_text())
        assert str(rps_file) in manifest["inputs"]

    def test_rerun_is_bit_identical(self, rps_file, tmp_path):
        for name in ("a", "b"):
            cli.main(["analyze", "--game", str(rps_file), "--out", str(tmp_path / name)])
        for path in (tmp_path / "a").iterdir():
            if path.name == "manifest.json":
                continue
            assert path.read_bytes() == (tmp_path / "b" / path.name).read_bytes()
        outputs = [json.loads((tmp_path / n / "manifest.json").read_text())["outputs"]
                   for n in ("a", "b")]
        assert outputs[0] == outputs[1]


class TestExitCodes:
    def test_bad_flag(self, tmp_path):
        assert cli.main(["analyze", "--bogus", "--out", str(tmp_path)]) == 1

    def test_missing_file(self, tmp_path):
        assert cli.main(["analyze", "--game", str(tmp_path / "nope.json"),
                         "--out", str(tmp_path)]) == 1

    def test_malformed_game(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"payoffs": "oops"}')
        assert cli.main(["analyze", "--game", str(bad), "--out", str(tmp_path / "o")]) == 1

    def test_numerical_failure(self, rps_file, tmp_path, monkeypatch):
        def broken(*args, **kwargs):
            raise FloatingPointError("overflow")
        monkeypatch.setattr(cli, "complexity_experiment", broken)
        assert cli.main(["solve", "--game", str(rps_file), "--out", str(tmp_path)]) == 2


class TestPipeline:
    def test_solve(self, rps_file, tmp_path):
        assert cli.main(["solve", "--game", str(rps_file), "--trials", "3",
                         "--out", str(tmp_path)]) == 0
        iterations = rows(tmp_path / "iterations.csv")
        assert len(iterations) == 3

    def test_landscape_and_synth(self, tmp_path):
        land = tmp_path / "land"
        assert cli.main(["landscape", "--suite", "motivating", "--svg", "--out", str(land)]) == 0
        coords = rows(land / "coords.csv")
        assert list(coords[0]) == ["name", "pc1", "pc2"]
        assert (land / "landscape.svg").read_text().startswith("<svg")
        out = tmp_path / "synth"
        code = cli.main(["synth", "--size", "4", "--targets", "rps", "--landscape", str(land),
                         "--iters", "3", "--out", str(out)])
        assert code == 0
        trajectory = rows(out / "trajectory.csv")
        assert len(trajectory) == 4
        assert json.loads((out / "manifest.json").read_text())["seeds"] == [0]

    def test_synth_rejects_unknown_target(self, tmp_path):
        land = tmp_path / "land"
        cli.main(["landscape", "--suite", "motivating", "--out", str(land)])
        assert cli.main(["synth", "--size", "4", "--targets", "chess", "--landscape", str(land),
                         "--out", str(tmp_path / "s")]) == 1

    def test_taxonomy(self, tmp_path):
        assert cli.main(["taxonomy2x2", "--alpha", "0.01", "--out", str(tmp_path)]) == 0
        labels = {r["name"]: r["label"] for r in rows(tmp_path / "labels_alpha0.01.csv")}
        assert len(labels) == 144
        assert len({labels[f"Pdx{c}"] for c in ("Co", "As", "Sh", "Pd")}) == 1
