import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from parodist.cli import main

from .conftest import WEIRD_SCIENCE_PROMPT, WEIRD_SCIENCE_SCHEME


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def scheme_file(tmp_path):
    path = tmp_path / "ws.scheme"
    path.write_text(WEIRD_SCIENCE_SCHEME)
    return path


class TestGenerate:
    def test_deterministic_output(self, runner, scheme_file):
        args = [
            "generate",
            "--prompt", WEIRD_SCIENCE_PROMPT,
            "--scheme", str(scheme_file),
            "--seed", "42",
        ]
        first = runner.invoke(main, args)
        second = runner.invoke(main, args)
        assert first.exit_code == 0, first.output
        assert first.output == second.output
        assert len(first.output.strip().splitlines()) == 3

    def test_out_and_meta_files(self, runner, scheme_file, tmp_path):
        out = tmp_path / "lyrics.txt"
        meta = tmp_path / "meta.json"
        result = runner.invoke(
            main,
            [
                "generate",
                "--prompt", WEIRD_SCIENCE_PROMPT,
                "--scheme", str(scheme_file),
                "--seed", "1",
                "--out", str(out),
                "--meta", str(meta),
            ],
        )
        assert result.exit_code == 0, result.output
        assert len(out.read_text().strip().splitlines()) == 3
        record = json.loads(meta.read_text())
        assert record["config"]["seed"] == 1
        assert record["lines"] == out.read_text().strip().splitlines()

    def test_config_file(self, runner, scheme_file, tmp_path):
        config = tmp_path / "gen.cfg"
        config.write_text("seed=5\nn=6\ntemperature=0.8\n")
        result = runner.invoke(
            main,
            [
                "generate",
                "--prompt", WEIRD_SCIENCE_PROMPT,
                "--scheme", str(scheme_file),
                "--config", str(config),
                "--meta", str(tmp_path / "m.json"),
            ],
        )
        assert result.exit_code == 0, result.output
        record = json.loads((tmp_path / "m.json").read_text())
        assert record["config"]["n"] == 6
        assert record["config"]["seed"] == 5

    def test_seed_overrides_config_file(self, runner, scheme_file, tmp_path):
        config = tmp_path / "gen.cfg"
        config.write_text("seed=5\n")
        meta = tmp_path / "m.json"
        result = runner.invoke(
            main,
            [
                "generate",
                "--prompt", "x",
                "--scheme", str(scheme_file),
                "--config", str(config),
                "--seed", "77",
                "--meta", str(meta),
            ],
        )
        assert result.exit_code == 0, result.output
        assert json.loads(meta.read_text())["config"]["seed"] == 77

    def test_invalid_scheme_fails_cleanly(self, runner, tmp_path):
        bad = tmp_path / "bad.scheme"
        bad.write_text("line: (0, 1)\n")
        result = runner.invoke(
            main, ["generate", "--prompt", "x", "--scheme", str(bad)]
        )
        assert result.exit_code != 0
        assert "bad scheme" in result.output


class TestInteractive:
    def test_accepting_defaults_reproduces_batch(self, runner, scheme_file):
        batch = runner.invoke(
            main,
            [
                "generate",
                "--prompt", WEIRD_SCIENCE_PROMPT,
                "--scheme", str(scheme_file),
                "--seed", "42",
            ],
        )
        interactive = runner.invoke(
            main,
            [
                "interactive",
                "--prompt", WEIRD_SCIENCE_PROMPT,
                "--scheme", str(scheme_file),
                "--seed", "42",
            ],
            input="\n" * 10,
        )
        assert interactive.exit_code == 0, interactive.output
        final_lines = interactive.output.strip().splitlines()[-3:]
        assert final_lines == batch.output.strip().splitlines()


class TestQueries:
    def test_rhymes(self, runner):
        result = runner.invoke(main, ["rhymes", "man"])
        assert result.exit_code == 0
        assert "japan" in result.output.split()

    def test_rhymes_unpronounceable(self, runner):
        result = runner.invoke(main, ["rhymes", "zzkrwq"])
        assert result.exit_code != 0

    def test_syllables(self, runner):
        result = runner.invoke(main, ["syllables", "hello", "darkness"])
        assert result.output.strip() == "4"


class TestKaraoke:
    def test_writes_lrc(self, runner, tmp_path):
        lyrics = tmp_path / "lyrics.txt"
        lyrics.write_text("first line\nsecond line\n")
        timing = tmp_path / "timing.tsv"
        timing.write_text("0.0\t2.0\ta\n62.5\t64.0\tb\n")
        out = tmp_path / "out.lrc"
        result = runner.invoke(
            main,
            [
                "karaoke",
                "--lyrics", str(lyrics),
                "--timing", str(timing),
                "--out", str(out),
            ],
        )
        assert result.exit_code == 0, result.output
        assert out.read_text() == "[00:00.00]first line\n[01:02.50]second line\n"

    def test_mismatch_fails(self, runner, tmp_path):
        lyrics = tmp_path / "lyrics.txt"
        lyrics.write_text("only one\n")
        timing = tmp_path / "timing.tsv"
        timing.write_text("0.0\t2.0\ta\n3.0\t4.0\tb\n")
        result = runner.invoke(
            main,
            [
                "karaoke",
                "--lyrics", str(lyrics),
                "--timing", str(timing),
                "--out", str(tmp_path / "x.lrc"),
            ],
        )
        assert result.exit_code != 0
