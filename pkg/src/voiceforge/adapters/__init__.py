"""Adapter layer: role protocols, registry, and the stock implementations.

`default_registry()` wires every role with its deterministic mock plus the
handful of real, dependency-free adapters (urllib download, WAV I/O), so a
fresh install can run the full pipeline end to end before any heavyweight
backend is registered.
"""

from __future__ import annotations

from . import builtin, mocks
from .base import (
    AdapterDescriptor,
    AdapterRole,
    AsrAdapter,
    CodecAdapter,
    DecoderAdapter,
    DenoiseAdapter,
    DiarizationAdapter,
    DownloaderAdapter,
    DownloadResult,
    MediaInfo,
    SemanticEncoderAdapter,
    SpeakerEmbeddingAdapter,
    StemAdapter,
    TokenQuantizerAdapter,
    TranscodeAdapter,
    TtsAdapter,
    VcAdapter,
)
from .registry import AdapterRegistry

__all__ = [
    "AdapterDescriptor",
    "AdapterRegistry",
    "AdapterRole",
    "AsrAdapter",
    "CodecAdapter",
    "DecoderAdapter",
    "DenoiseAdapter",
    "DiarizationAdapter",
    "DownloadResult",
    "DownloaderAdapter",
    "MediaInfo",
    "SemanticEncoderAdapter",
    "SpeakerEmbeddingAdapter",
    "StemAdapter",
    "TokenQuantizerAdapter",
    "TranscodeAdapter",
    "TtsAdapter",
    "VcAdapter",
    "default_registry",
]


def default_registry() -> AdapterRegistry:
    registry = AdapterRegistry()

    def add(role: AdapterRole, id: str, impl, **kwargs) -> None:
        registry.register(AdapterDescriptor(role=role, id=id, **kwargs), impl)

    add(AdapterRole.DOWNLOADER, "urllib", builtin.UrllibDownloader())
    add(AdapterRole.DOWNLOADER, "mock", mocks.MockDownloader())
    add(AdapterRole.DECODER, "wav", builtin.WavFileDecoder())
    add(AdapterRole.DECODER, "mock", mocks.MockDecoder())
    add(AdapterRole.DENOISE, "mock", mocks.MockDenoiseAdapter())
    add(AdapterRole.STEMS, "mock", mocks.MockStemAdapter())

    codec = mocks.MockCodecAdapter()
    add(
        AdapterRole.CODEC,
        "mock",
        codec,
        native_rate_hz=codec.native_rate_hz,
        metadata={
            "codebook_count": codec.codebook_count,
            "frame_rate": codec.frame_rate_hz,
            "codebook_size": codec.codebook_size,
        },
    )

    semantic = mocks.MockSemanticEncoderAdapter()
    add(AdapterRole.SEMANTIC_ENCODER, "mock", semantic)
    add(AdapterRole.TOKEN_QUANTIZER, "mock", mocks.MockTokenQuantizerAdapter())

    tts = mocks.MockTtsAdapter()
    add(AdapterRole.TTS, "mock", tts, native_rate_hz=tts.native_rate_hz)
    vc = mocks.MockVcAdapter()
    add(AdapterRole.VC, "mock", vc, native_rate_hz=vc.native_rate_hz)

    add(AdapterRole.ASR, "mock", mocks.MockAsrAdapter())
    add(AdapterRole.DIARIZATION, "mock", mocks.MockDiarizationAdapter())
    add(AdapterRole.SPEAKER_EMBEDDING, "mock", mocks.MockSpeakerEmbeddingAdapter())
    add(AdapterRole.TRANSCODE, "wav", builtin.WavTranscodeAdapter())
    add(AdapterRole.TRANSCODE, "mock", mocks.MockTranscodeAdapter())
    return registry
