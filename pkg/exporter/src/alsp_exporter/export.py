"""Hook a speech language model's decoder blocks and dump audio states.

Supports Qwen2-Audio-style checkpoints (audio placeholders in input_ids,
audio tower features merged into the embedding stream).  The dumped
tensor for "layer l" is the residual stream ENTERING decoder block l,
i.e. the post-block residual of block l-1 (l=0 is the embedding output);
the choice is recorded in the trace header under ``hidden_state``.

States are dumped UNCOMPRESSED: applying merging live inside the model
is out of scope, the analysis toolkit replays compression over these
dumps instead.
"""

from __future__ import annotations

import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .traceformat import FormatWriteError, write_trace_file

HIDDEN_STATE_CHOICE = "post_block_residual_stream"


class ModelLoadError(Exception):
    """Checkpoint, tokenizer or feature extractor failed to load."""


class HookAttachmentError(Exception):
    """Requested decoder blocks do not exist or refuse hooks."""


def read_wav(path) -> tuple:
    """Mono float32 samples in [-1, 1] plus sample rate (PCM16/PCM8 WAV)."""
    with wave.open(str(path), "rb") as wf:
        n_channels = wf.getnchannels()
        width = wf.getsampwidth()
        rate = wf.getframerate()
        frames = wf.readframes(wf.getnframes())
    if width == 2:
        data = np.frombuffer(frames, dtype="<i2").astype(np.float32) / 32768.0
    elif width == 1:
        data = (np.frombuffer(frames, dtype=np.uint8).astype(np.float32) - 128.0) / 128.0
    else:
        raise ModelLoadError(f"unsupported WAV sample width {width}")
    if n_channels > 1:
        data = data.reshape(-1, n_channels).mean(axis=1)
    return data, rate


def read_timestamps(path):
    """(label, start_s, end_s) rows from a simple tabular text file.

    Accepts tab-, comma- or whitespace-separated columns; blank lines and
    #-comments are skipped.  This is the shape MFA alignments are easily
    converted to; producing alignments is out of scope here.
    """
    words = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        for sep in ("\t", ","):
            if sep in line:
                parts = [p.strip() for p in line.split(sep)]
                break
        else:
            parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"timestamp row needs 3 columns: {raw!r}")
        words.append((parts[0], float(parts[1]), float(parts[2])))
    return words


@dataclass
class LoadedModel:
    model: object
    tokenizer: object
    feature_extractor: object
    blocks: list
    audio_token_id: int

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)


def _walk(model, path):
    obj = model
    for attr in path.split("."):
        obj = getattr(obj, attr)
    return obj


def _find_decoder_blocks(model):
    for path in ("model.language_model.layers", "language_model.layers",
                 "model.layers"):
        try:
            blocks = _walk(model, path)
        except AttributeError:
            continue
        if len(blocks) > 0:
            return list(blocks)
    raise HookAttachmentError("cannot locate the decoder block list on this model")


def _find_audio_tower(model):
    for path in ("model.audio_tower", "audio_tower"):
        try:
            return _walk(model, path)
        except AttributeError:
            continue
    raise ModelLoadError("cannot locate the audio tower on this model")


def load_model(model_dir, device: str = "cpu") -> LoadedModel:
    try:
        from transformers import (
            AutoTokenizer,
            Qwen2AudioForConditionalGeneration,
            WhisperFeatureExtractor,
        )

        model = Qwen2AudioForConditionalGeneration.from_pretrained(
            model_dir, dtype=torch.float32
        )
        model.to(device).eval()
        tokenizer = AutoTokenizer.from_pretrained(model_dir)
        feature_extractor = WhisperFeatureExtractor.from_pretrained(model_dir)
    except Exception as exc:
        raise ModelLoadError(f"cannot load model from {model_dir}: {exc}") from exc
    blocks = _find_decoder_blocks(model)
    audio_token_id = getattr(model.config, "audio_token_index", None)
    if audio_token_id is None:
        raise ModelLoadError("model config carries no audio_token_index")
    return LoadedModel(model, tokenizer, feature_extractor, blocks, audio_token_id)


def _capture_streams(loaded: LoadedModel, layers, inputs) -> dict:
    captured = {}

    def make_hook(layer):
        def hook(module, args, kwargs):
            hidden = args[0] if args else kwargs.get("hidden_states")
            captured[layer] = hidden.detach().to(torch.float32).cpu()

        return hook

    handles = []
    try:
        for l in layers:
            if not (0 <= l < loaded.num_blocks):
                raise HookAttachmentError(
                    f"layer {l} outside [0, {loaded.num_blocks}) for this model"
                )
            try:
                handles.append(
                    loaded.blocks[l].register_forward_pre_hook(
                        make_hook(l), with_kwargs=True
                    )
                )
            except Exception as exc:
                raise HookAttachmentError(f"cannot hook block {l}: {exc}") from exc
        with torch.no_grad():
            loaded.model(**inputs)
    finally:
        for h in handles:
            h.remove()
    missing = [l for l in layers if l not in captured]
    if missing:
        raise HookAttachmentError(f"blocks {missing} never ran during prefill")
    return captured


def export_trace(
    model_dir,
    audio_path,
    transcript: str,
    timestamps_path,
    layers,
    out_path,
    frame_rate: float | None = None,
    device: str = "cpu",
    loaded: LoadedModel | None = None,
) -> dict:
    """One utterance -> one trace file; returns a small summary dict.

    The audio token span is located via the model's audio placeholder
    token id; per-layer rows are the UNCOMPRESSED states of that span.
    """
    layers = sorted(set(int(l) for l in layers))
    if loaded is None:
        loaded = load_model(model_dir, device=device)
    words = read_timestamps(timestamps_path) if timestamps_path else []

    samples, rate = read_wav(audio_path)
    expected = loaded.feature_extractor.sampling_rate
    if rate != expected:
        raise ModelLoadError(
            f"audio is {rate} Hz but the feature extractor expects {expected} Hz"
        )
    duration_s = len(samples) / rate
    feats = loaded.feature_extractor(
        samples, sampling_rate=rate, return_tensors="pt", return_attention_mask=True
    )
    tower = _find_audio_tower(loaded.model)
    _, out_lens = tower._get_feat_extract_output_lengths(feats.attention_mask.sum(-1))
    n_audio = int(out_lens)

    text_ids = loaded.tokenizer(transcript, return_tensors="pt").input_ids
    input_ids = torch.cat(
        [torch.full((1, n_audio), loaded.audio_token_id, dtype=torch.long), text_ids],
        dim=1,
    ).to(device)
    inputs = {
        "input_ids": input_ids,
        "input_features": feats.input_features.to(device),
        "feature_attention_mask": feats.attention_mask.to(device),
    }
    captured = _capture_streams(loaded, layers, inputs)

    span = (input_ids[0] == loaded.audio_token_id).nonzero().flatten()
    start, stop = int(span[0]), int(span[-1]) + 1
    if stop - start != n_audio:
        raise HookAttachmentError("audio placeholder span is not contiguous")

    fr = frame_rate if frame_rate is not None else n_audio / duration_s
    layer_mats = {
        l: captured[l][0, start:stop].numpy().astype("<f4") for l in layers
    }
    write_trace_file(
        out_path,
        model=str(model_dir),
        frame_rate=float(fr),
        text_len=int(input_ids.shape[1] - n_audio),
        words=words,
        transcript=transcript,
        layers=layer_mats,
        extra_header={"hidden_state": HIDDEN_STATE_CHOICE},
    )
    return {
        "audio_tokens": n_audio,
        "text_tokens": int(input_ids.shape[1] - n_audio),
        "frame_rate": float(fr),
        "layers": layers,
        "out": str(out_path),
    }
