import wave

import numpy as np
import pytest


@pytest.fixture(scope="session")
def tiny_model_dir(tmp_path_factory):
    """A small random-weight Qwen2-Audio-style checkpoint, built offline."""
    import torch
    from tokenizers import Tokenizer, models, pre_tokenizers, trainers
    from transformers import (
        PreTrainedTokenizerFast,
        Qwen2AudioConfig,
        Qwen2AudioForConditionalGeneration,
        Qwen2Config,
        WhisperFeatureExtractor,
    )
    from transformers.models.qwen2_audio.configuration_qwen2_audio import (
        Qwen2AudioEncoderConfig,
    )

    d = tmp_path_factory.mktemp("tiny_qwen2audio")

    tok = Tokenizer(models.BPE(unk_token="<unk>"))
    tok.pre_tokenizer = pre_tokenizers.Whitespace()
    trainer = trainers.BpeTrainer(vocab_size=200, special_tokens=["<unk>", "<pad>"])
    corpus = [
        "the quick brown fox jumps over the lazy dog",
        "hello world this is a tiny corpus for testing",
        "a b c d e f g h i j k l m n o p q r s t u v w x y z",
    ] * 4
    tok.train_from_iterator(corpus, trainer)
    fast = PreTrainedTokenizerFast(
        tokenizer_object=tok, unk_token="<unk>", pad_token="<pad>"
    )
    fast.save_pretrained(d)

    enc = Qwen2AudioEncoderConfig(
        num_mel_bins=80, encoder_layers=2, encoder_attention_heads=2,
        encoder_ffn_dim=32, d_model=16, max_source_positions=1500,
    )
    txt = Qwen2Config(
        hidden_size=32, intermediate_size=64, num_hidden_layers=3,
        num_attention_heads=4, num_key_value_heads=2, vocab_size=256,
        max_position_embeddings=2048,
    )
    cfg = Qwen2AudioConfig(audio_config=enc, text_config=txt, audio_token_index=250)
    torch.manual_seed(1234)
    model = Qwen2AudioForConditionalGeneration(cfg)
    model.save_pretrained(d)

    fe = WhisperFeatureExtractor(feature_size=80, sampling_rate=16000)
    fe.save_pretrained(d)
    return d


@pytest.fixture(scope="session")
def wav_path(tmp_path_factory):
    """Two seconds of 16 kHz PCM16 chirp-ish audio."""
    d = tmp_path_factory.mktemp("audio")
    path = d / "utt.wav"
    t = np.arange(16000 * 2) / 16000.0
    signal = 0.5 * np.sin(2 * np.pi * (220 + 110 * t) * t)
    pcm = (signal * 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(16000)
        wf.writeframes(pcm.tobytes())
    return path


@pytest.fixture(scope="session")
def timestamps_path(tmp_path_factory):
    d = tmp_path_factory.mktemp("stamps")
    path = d / "utt.tsv"
    path.write_text(
        "# label\tstart\tend\n"
        "the\t0.10\t0.40\n"
        "quick\t0.40\t0.90\n"
        "fox\t1.00\t1.60\n"
    )
    return path
