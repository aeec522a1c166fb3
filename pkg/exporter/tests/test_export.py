import shutil
import subprocess
import sys

import numpy as np
import pytest

from alsp_exporter.cli import main as export_main
from alsp_exporter.export import (
    HookAttachmentError,
    ModelLoadError,
    export_trace,
    load_model,
    read_timestamps,
    read_wav,
)
from alsp_exporter.traceformat import FormatWriteError, write_trace_file


@pytest.fixture(scope="module")
def loaded(tiny_model_dir):
    return load_model(tiny_model_dir)


@pytest.fixture()
def exported(tiny_model_dir, wav_path, timestamps_path, loaded, tmp_path):
    out = tmp_path / "utt.trc"
    summary = export_trace(
        tiny_model_dir, wav_path, "the quick fox", timestamps_path,
        layers=(0, 1, 2), out_path=out, loaded=loaded,
    )
    return out, summary


class TestInputs:
    def test_read_wav(self, wav_path):
        samples, rate = read_wav(wav_path)
        assert rate == 16000
        assert samples.dtype == np.float32
        assert len(samples) == 32000
        assert np.abs(samples).max() <= 1.0

    def test_read_timestamps(self, timestamps_path):
        words = read_timestamps(timestamps_path)
        assert words == [("the", 0.10, 0.40), ("quick", 0.40, 0.90), ("fox", 1.00, 1.60)]


class TestExportContract:
    def test_loads_through_primary_reader(self, exported):
        from alsp.traceio import read_trace

        out, summary = exported
        trace = read_trace(out)
        assert trace.layer_indices == [0, 1, 2]
        for l in (0, 1, 2):
            seq = trace.layers[l]
            # uncompressed dump: rows == audio token count at every layer
            assert seq.rows == summary["audio_tokens"]
            assert seq.dim == 32
        assert trace.text_len == summary["text_tokens"]
        assert trace.transcript == "the quick fox"
        assert [w.label for w in trace.words] == ["the", "quick", "fox"]
        # alignment must satisfy the primary invariants end to end
        align = trace.alignment(0)
        assert 0 < align.aligned_token_count <= seq.rows

    def test_frame_rate_measured(self, exported):
        _, summary = exported
        # 2 s of audio through the tower's 2x pooling: 25 tokens/s
        assert summary["frame_rate"] == pytest.approx(25.0, abs=0.5)

    def test_primary_cli_consumes_export(self, exported, tmp_path):
        out, _ = exported
        alsp = shutil.which("alsp")
        assert alsp, "primary CLI must be installed"
        runs = [
            ["compress", "--trace", str(out), "--layer", "0", "--tau", "0.7",
             "--omega", "3"],
            ["intervene", "--trace", str(out), "--op", "uniform-merge",
             "--budget", "2"],
            ["dynamics", "--trace", str(out), "--k", "1,3"],
        ]
        for argv in runs:
            proc = subprocess.run([alsp] + argv, capture_output=True, text=True)
            assert proc.returncode == 0, (argv, proc.stderr)

    def test_reexport_byte_identical(self, tiny_model_dir, wav_path,
                                     timestamps_path, loaded, tmp_path):
        a, b = tmp_path / "a.trc", tmp_path / "b.trc"
        for out in (a, b):
            export_trace(
                tiny_model_dir, wav_path, "the quick fox", timestamps_path,
                layers=(0, 2), out_path=out, loaded=loaded,
            )
        assert a.read_bytes() == b.read_bytes()

    def test_hidden_state_choice_recorded(self, exported):
        out, _ = exported
        assert b"post_block_residual_stream" in out.read_bytes()[:4096]


class TestErrors:
    def test_model_load_failure(self, tmp_path, wav_path):
        with pytest.raises(ModelLoadError):
            export_trace(tmp_path / "nope", wav_path, "x", None, (0,),
                         tmp_path / "o.trc")

    def test_hook_attachment_failure(self, tiny_model_dir, wav_path, loaded, tmp_path):
        with pytest.raises(HookAttachmentError):
            export_trace(tiny_model_dir, wav_path, "x", None, (99,),
                         tmp_path / "o.trc", loaded=loaded)

    def test_format_write_failure(self, tiny_model_dir, wav_path, loaded, tmp_path):
        with pytest.raises(FormatWriteError):
            export_trace(tiny_model_dir, wav_path, "x", None, (0,),
                         tmp_path / "no_dir" / "o.trc", loaded=loaded)

    def test_sample_rate_mismatch(self, tiny_model_dir, loaded, tmp_path):
        import wave

        bad = tmp_path / "bad.wav"
        with wave.open(str(bad), "wb") as wf:
            wf.setnchannels(1)
            wf.setsampwidth(2)
            wf.setframerate(8000)
            wf.writeframes(b"\x00\x00" * 8000)
        with pytest.raises(ModelLoadError):
            export_trace(tiny_model_dir, bad, "x", None, (0,),
                         tmp_path / "o.trc", loaded=loaded)

    def test_writer_rejects_mixed_dims(self, tmp_path):
        with pytest.raises(FormatWriteError):
            write_trace_file(
                tmp_path / "x.trc", model="m", frame_rate=25.0, text_len=0,
                words=[], transcript="",
                layers={0: np.zeros((2, 3), np.float32),
                        1: np.zeros((2, 4), np.float32)},
            )


class TestCli:
    def test_cli_end_to_end(self, tiny_model_dir, wav_path, timestamps_path, tmp_path):
        out = tmp_path / "cli.trc"
        code = export_main([
            "--model", str(tiny_model_dir),
            "--audio", str(wav_path),
            "--transcript", "the quick fox",
            "--timestamps", str(timestamps_path),
            "--layers", "0,2",
            "-o", str(out),
        ])
        assert code == 0
        from alsp.traceio import read_trace

        assert read_trace(out).layer_indices == [0, 2]

    def test_cli_model_load_exit_code(self, wav_path, tmp_path):
        code = export_main([
            "--model", str(tmp_path / "missing"),
            "--audio", str(wav_path),
            "--transcript", "x",
            "--layers", "0",
            "-o", str(tmp_path / "x.trc"),
        ])
        assert code == 3

    def test_cli_hook_exit_code(self, tiny_model_dir, wav_path, tmp_path):
        code = export_main([
            "--model", str(tiny_model_dir),
            "--audio", str(wav_path),
            "--transcript", "x",
            "--layers", "42",
            "-o", str(tmp_path / "x.trc"),
        ])
        assert code == 4
