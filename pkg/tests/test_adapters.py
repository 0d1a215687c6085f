from __future__ import annotations

import numpy as np
import pytest

from voiceforge.adapters import (
    AdapterDescriptor,
    AdapterRegistry,
    AdapterRole,
    AsrAdapter,
    CodecAdapter,
    DecoderAdapter,
    DiarizationAdapter,
    DownloaderAdapter,
    SemanticEncoderAdapter,
    TokenQuantizerAdapter,
    TranscodeAdapter,
    TtsAdapter,
    VcAdapter,
    default_registry,
)
from voiceforge.adapters.builtin import WavTranscodeAdapter
from voiceforge.adapters.mocks import (
    MockAsrAdapter,
    MockCodecAdapter,
    MockDecoder,
    MockDiarizationAdapter,
    MockDownloader,
    MockSpeakerEmbeddingAdapter,
    MockTranscodeAdapter,
    MockTtsAdapter,
    MockVcAdapter,
    speechlike_waveform,
)
from voiceforge.config import DEFAULT_ADAPTERS
from voiceforge.conversion import default_conversion_params
from voiceforge.errors import (
    AdapterLookupError,
    ConfigurationError,
    FormatError,
    RegistryError,
)
from voiceforge.synthesis import default_generation_params
from voiceforge.transcribe import AsrConfig


class TestRegistry:
    def test_resolve_returns_registered_instance(self):
        registry = AdapterRegistry()
        codec = MockCodecAdapter()
        registry.register(
            AdapterDescriptor(
                role=AdapterRole.CODEC,
                id="mock",
                metadata={"codebook_count": 8, "frame_rate": 75.0, "codebook_size": 1024},
            ),
            codec,
        )
        assert registry.resolve(AdapterRole.CODEC, "mock") is codec
        assert registry.resolve("codec", "mock") is codec

    def test_duplicate_registration_is_an_error(self):
        registry = AdapterRegistry()
        descriptor = AdapterDescriptor(role=AdapterRole.TTS, id="mock")
        registry.register(descriptor, MockTtsAdapter())
        with pytest.raises(RegistryError, match="already registered"):
            registry.register(descriptor, MockTtsAdapter())

    def test_unknown_id_lists_available(self):
        registry = AdapterRegistry()
        registry.register(AdapterDescriptor(role=AdapterRole.TTS, id="mock"), MockTtsAdapter())
        with pytest.raises(AdapterLookupError, match="mock"):
            registry.resolve(AdapterRole.TTS, "bark")

    def test_descriptor_lookup(self):
        registry = AdapterRegistry()
        descriptor = AdapterDescriptor(role=AdapterRole.TTS, id="mock", native_rate_hz=24000)
        registry.register(descriptor, MockTtsAdapter())
        assert registry.descriptor(AdapterRole.TTS, "mock") == descriptor

    def test_codec_descriptor_requires_metadata(self):
        with pytest.raises(RegistryError, match="metadata"):
            AdapterDescriptor(role=AdapterRole.CODEC, id="bad")

    def test_descriptor_requires_id(self):
        with pytest.raises(RegistryError):
            AdapterDescriptor(role=AdapterRole.TTS, id="")


def test_default_registry_covers_every_configured_adapter():
    registry = default_registry()
    for role, adapter_id in DEFAULT_ADAPTERS.items():
        assert registry.resolve(role, adapter_id) is not None


def test_default_registry_mocks_satisfy_protocols():
    registry = default_registry()
    checks = [
        (AdapterRole.DOWNLOADER, "mock", DownloaderAdapter),
        (AdapterRole.DECODER, "mock", DecoderAdapter),
        (AdapterRole.CODEC, "mock", CodecAdapter),
        (AdapterRole.SEMANTIC_ENCODER, "mock", SemanticEncoderAdapter),
        (AdapterRole.TOKEN_QUANTIZER, "mock", TokenQuantizerAdapter),
        (AdapterRole.TTS, "mock", TtsAdapter),
        (AdapterRole.VC, "mock", VcAdapter),
        (AdapterRole.ASR, "mock", AsrAdapter),
        (AdapterRole.DIARIZATION, "mock", DiarizationAdapter),
        (AdapterRole.TRANSCODE, "mock", TranscodeAdapter),
    ]
    for role, adapter_id, protocol in checks:
        assert isinstance(registry.resolve(role, adapter_id), protocol)


class TestMockMedia:
    def test_downloader_honors_query_params(self, tmp_path):
        dest = tmp_path / "media.bin"
        result = MockDownloader().download(
            "mock://talk?duration=2&rate=16000&seed=5", str(dest)
        )
        assert dest.stat().st_size == 28
        assert result.duration_s == pytest.approx(2.0)
        assert result.container_format == "mockav"

    def test_decoder_synthesizes_requested_length(self, tmp_path):
        dest = tmp_path / "media.bin"
        MockDownloader().download("mock://talk?duration=2&rate=16000&seed=5", str(dest))
        decoder = MockDecoder()
        samples, rate = decoder.decode(str(dest))
        assert rate == 16000
        assert samples.size == 32000
        again, _ = decoder.decode(str(dest))
        assert np.array_equal(samples, again)
        info = decoder.probe(str(dest))
        assert info.duration_s == pytest.approx(2.0)

    def test_decoder_rejects_unknown_container(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"not audio at all")
        with pytest.raises(FormatError):
            MockDecoder().decode(str(path))

    def test_waveform_has_speech_and_silence(self):
        wave = speechlike_waveform(16000 * 10, 16000, seed=1)
        silent = np.abs(wave) < 1e-4
        assert 0.0 < float(silent.mean()) < 0.5


class TestMockModels:
    def test_codec_shape_and_range(self):
        codec = MockCodecAdapter()
        samples = speechlike_waveform(24000, 24000, seed=2)
        codes = codec.encode(samples, 24000)
        assert codes.shape == (8, 75)
        assert codes.min() >= 0 and codes.max() < 1024
        assert np.array_equal(codes, codec.encode(samples, 24000))

    def test_tts_is_deterministic(self):
        tts = MockTtsAdapter()
        params = default_generation_params()
        semantic = np.arange(10, dtype=np.int64)
        codes = np.zeros((8, 20), dtype=np.int64)
        a = tts.synthesize("hello world", semantic, codes[:2], codes, params)
        b = tts.synthesize("hello world", semantic, codes[:2], codes, params)
        assert np.array_equal(a, b)
        c = tts.synthesize("different text", semantic, codes[:2], codes, params)
        assert not np.array_equal(a, c)

    def test_tts_duration_tracks_text_length(self):
        tts = MockTtsAdapter()
        params = default_generation_params()
        semantic = np.arange(4, dtype=np.int64)
        codes = np.zeros((8, 8), dtype=np.int64)
        out = tts.synthesize("x" * 20, semantic, codes[:2], codes, params)
        assert out.size == round((1.0 + 0.055 * 20) * 24000)

    def test_vc_rejects_unknown_model(self):
        vc = MockVcAdapter(known_models={"good.pth"})
        with pytest.raises(ConfigurationError, match="model_ref"):
            vc.convert(
                np.zeros(100, np.float32), 32000, "bad.pth", "good.pth",
                default_conversion_params(),
            )

    def test_vc_preserves_duration(self):
        vc = MockVcAdapter(known_models={"m", "i"})
        samples = speechlike_waveform(48000, 24000, seed=4)
        out, rate = vc.convert(samples, 24000, "m", "i", default_conversion_params())
        assert rate == 32000
        assert out.size / rate == pytest.approx(samples.size / 24000, rel=0.02)

    def test_asr_skips_silence(self):
        assert MockAsrAdapter().transcribe(np.zeros(16000, np.float32), 16000, AsrConfig()) == []

    def test_asr_emits_devanagari_for_hindi(self):
        samples = speechlike_waveform(16000 * 8, 16000, seed=9)
        segments = MockAsrAdapter().transcribe(samples, 16000, AsrConfig(language="hi"))
        assert segments
        assert any("ऀ" <= ch <= "ॿ" for seg in segments for ch in seg.text)

    def test_diarization_single_speaker(self):
        turns = MockDiarizationAdapter().diarize(np.zeros(16000, np.float32), 16000)
        assert len(turns) == 1
        assert turns[0].speaker_label == "S0"
        assert turns[0].end_s == pytest.approx(1.0)

    def test_diarization_round_robin(self):
        samples = speechlike_waveform(16000 * 10, 16000, seed=6)
        turns = MockDiarizationAdapter(n_speakers=2).diarize(samples, 16000)
        assert len(turns) >= 2
        assert {t.speaker_label for t in turns} == {"S0", "S1"}

    def test_speaker_embedding_is_unit_norm(self):
        emb = MockSpeakerEmbeddingAdapter().embed(
            speechlike_waveform(16000, 16000, seed=7), 16000
        )
        assert emb.shape == (16,)
        assert float(np.linalg.norm(emb)) == pytest.approx(1.0, abs=1e-5)


class TestTranscoders:
    def test_mock_mp3_round_trip_is_lossless(self):
        codec = MockTranscodeAdapter()
        samples = speechlike_waveform(8000, 8000, seed=8)
        from voiceforge.audio import dequantize_pcm16, quantize_pcm16

        payload = codec.encode(samples, 8000, "mp3")
        assert payload.startswith(b"ID3")
        out, rate = codec.decode(payload, "mp3")
        assert rate == 8000
        assert np.array_equal(out, dequantize_pcm16(quantize_pcm16(samples)))

    def test_mock_rejects_foreign_mp3(self):
        with pytest.raises(FormatError):
            MockTranscodeAdapter().decode(b"\xff\xfbgarbage frame", "mp3")

    def test_mock_rejects_unknown_format(self):
        with pytest.raises(ConfigurationError):
            MockTranscodeAdapter().encode(np.zeros(10, np.float32), 8000, "flac")

    def test_wav_transcoder_is_wav_only(self):
        codec = WavTranscodeAdapter()
        payload = codec.encode(np.zeros(100, np.float32), 8000, "wav_pcm16")
        out, rate = codec.decode(payload, "wav_pcm16")
        assert rate == 8000 and out.size == 100
        with pytest.raises(ConfigurationError):
            codec.encode(np.zeros(10, np.float32), 8000, "mp3")
        with pytest.raises(ConfigurationError):
            codec.decode(payload, "mp3")
