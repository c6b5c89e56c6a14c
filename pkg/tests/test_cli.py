import json

import numpy as np
from click.testing import CliRunner

from rhythmtutor.cli import main
from rhythmtutor.core import AudioBuffer, TimingConfig, parse_pattern
from rhythmtutor.synthesis import render
from rhythmtutor.wav_io import read_wav, write_wav

CLAVE = "1001001000101000"


def run(*args):
    return CliRunner().invoke(main, list(args))


# --- generate ---


def test_generate_writes_wav(tmp_path):
    out = str(tmp_path / "clave.wav")
    result = run("generate", "--pattern", CLAVE, "--out", out)
    assert result.exit_code == 0
    assert "16537.5" in result.output
    assert "fractional" in result.output
    assert "total samples: 1058400" in result.output
    assert len(read_wav(out)) == 1058400


def test_generate_matches_library(tmp_path):
    out = str(tmp_path / "p.wav")
    run("generate", "--pattern", "1010", "--out", out)
    direct = render(parse_pattern("1010"), TimingConfig())
    via_cli = read_wav(out)
    quantized = np.round(np.clip(direct.samples, -1, 1) * 32767) / 32767
    assert np.array_equal(via_cli.samples, quantized)


def test_generate_json_output(tmp_path):
    out = str(tmp_path / "p.wav")
    result = run("generate", "--pattern", CLAVE, "--out", out, "--json")
    info = json.loads(result.output)
    assert info["ipi_samples"] == 16537.5
    assert info["total_samples"] == 1058400
    assert len(info["onset_positions"]) == 20


def test_generate_silent_pattern_fails(tmp_path):
    result = run("generate", "--pattern", "0000", "--out", str(tmp_path / "x.wav"))
    assert result.exit_code == 1
    assert "error:" in result.output


def test_generate_missing_option_is_usage_error():
    assert run("generate", "--pattern", "1010").exit_code == 2


# --- complexity ---


def test_complexity_reference_values():
    result = run("complexity", "--pattern", "1100", "--json")
    info = json.loads(result.output)
    assert info["h_code"] == 5.0
    assert info["complement_h_code"] == 5.0
    assert not info["off_beat_adjusted"]


def test_complexity_prints_table_and_complement():
    result = run("complexity", "--pattern", "1100")
    assert result.exit_code == 0
    assert "h_code = 5.0000" in result.output
    assert "complement 0011" in result.output and "equal" in result.output


def test_complexity_offbeat_adjustment_shown():
    result = run("complexity", "--pattern", "0110")
    assert "adjusted (off-beat)" in result.output


def test_complexity_bad_pattern():
    assert run("complexity", "--pattern", "12x").exit_code == 1


# --- curriculum ---


def test_curriculum_row_counts():
    for cycle, rows in [("3", 7), ("4", 15)]:
        result = run("curriculum", "--cycle", cycle, "--json")
        assert len(json.loads(result.output)) == rows


def test_curriculum_sorted():
    rows = json.loads(run("curriculum", "--cycle", "4", "--json").output)
    values = [r["adjusted_value"] for r in rows]
    assert values == sorted(values)
    assert [r["rank"] for r in rows] == list(range(15))


def test_curriculum_bound_enforced():
    result = run("curriculum", "--cycle", "13")
    assert result.exit_code == 1
    assert "bound" in result.output


# --- assess ---


def test_assess_loopback_passes(tmp_path):
    wav = str(tmp_path / "take.wav")
    write_wav(wav, render(parse_pattern(CLAVE), TimingConfig()))
    result = run("assess", "--pattern", CLAVE, "--in", wav)
    assert result.exit_code == 0
    assert "PASS" in result.output
    assert "rushing" in result.output and "dragging" in result.output


def test_assess_json_matches_schema(tmp_path):
    wav = str(tmp_path / "take.wav")
    write_wav(wav, render(parse_pattern(CLAVE), TimingConfig()))
    info = json.loads(run("assess", "--pattern", CLAVE, "--in", wav, "--json").output)
    assert set(info) == {"matrix", "per_onset_avg", "per_cycle_avg", "passed", "bounds_used"}
    assert info["passed"] is True
    assert len(info["matrix"]) == 4 and len(info["matrix"][0]) == 5


def test_assess_silence_errors(tmp_path):
    wav = str(tmp_path / "quiet.wav")
    write_wav(wav, AudioBuffer(np.zeros(44100) + 1e-9, 44100))
    result = run("assess", "--pattern", "1010", "--in", wav)
    assert result.exit_code == 1
    assert "silent" in result.output


def test_assess_missing_file_is_usage_error():
    assert run("assess", "--pattern", "1010", "--in", "/no/such.wav").exit_code == 2


# --- serve ---


def test_serve_rejects_bad_bind(tmp_path):
    result = run("serve", "--store", str(tmp_path / "s.json"), "--bind", "nonsense")
    assert result.exit_code == 2


def test_serve_rejects_bad_store(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"schema_version\": 99, \"learners\": {}}")
    result = run("serve", "--store", str(bad))
    assert result.exit_code == 1
