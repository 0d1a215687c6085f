"""Denoise/stem passes, fixed-length segmentation, and audio transcoding."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .adapters.base import DenoiseAdapter, StemAdapter, TranscodeAdapter
from .audio import AudioClip
from .errors import ConfigurationError, FormatError, StageError, ValidationError


class TailPolicy(str, Enum):
    DROP_LAST = "drop_last"
    KEEP_LAST = "keep_last"


class StemModel(str, Enum):
    TWO_STEMS = "two_stems"
    FOUR_STEMS = "four_stems"
    FIVE_STEMS = "five_stems"


class AudioFormat(str, Enum):
    WAV_PCM16 = "wav_pcm16"
    MP3 = "mp3"


# magic prefixes per format; mp3 may open with an ID3 tag or a bare frame sync
_FORMAT_MAGIC = {
    AudioFormat.WAV_PCM16: (b"RIFF",),
    AudioFormat.MP3: (b"ID3", b"\xff\xfb", b"\xff\xf3", b"\xff\xf2"),
}


@dataclass(frozen=True)
class SegmentationPolicy:
    """How to cut a long clip into fixed-length pieces.

    Boundaries are computed as round(k * target_len_s * rate) in sample
    indices, so repeated float addition can never drift.
    """

    target_len_s: float = 10.0
    tail: TailPolicy = TailPolicy.DROP_LAST
    min_tail_s: float = 0.0

    def __post_init__(self) -> None:
        if self.target_len_s <= 0:
            raise ValidationError("target_len_s must be positive")
        if self.min_tail_s < 0:
            raise ValidationError("min_tail_s must be non-negative")
        if self.tail is TailPolicy.KEEP_LAST and self.min_tail_s >= self.target_len_s:
            raise ValidationError("min_tail_s must be smaller than target_len_s")


@dataclass(frozen=True)
class EncodedAudio:
    """A serialized audio payload plus enough metadata to reason about it."""

    payload: bytes
    format: AudioFormat
    sample_rate_hz: int
    duration_s: float

    def __post_init__(self) -> None:
        if not self.payload:
            raise ValidationError("encoded payload must be non-empty")
        if self.sample_rate_hz <= 0:
            raise ValidationError("sample_rate_hz must be positive")
        if self.duration_s <= 0:
            raise ValidationError("duration_s must be positive")
        if not self.payload.startswith(_FORMAT_MAGIC[self.format]):
            raise FormatError(f"payload does not look like {self.format.value}")


def denoise(clip: AudioClip, strength: float, adapter: DenoiseAdapter) -> AudioClip:
    """Noise-reduction pass; optional in the pipeline and skippable by config."""
    clip.require_non_empty("denoise input")
    if not 0.0 <= strength <= 1.0:
        raise ConfigurationError(f"denoise strength must be in [0, 1], got {strength}")
    try:
        out = adapter.denoise(clip.samples, clip.sample_rate_hz, strength)
    except (ConfigurationError, ValidationError):
        raise
    except Exception as exc:
        raise StageError(
            f"denoise adapter failed: {exc}", stage="denoise", source_id=clip.source_id
        ) from exc
    out = np.asarray(out, dtype=np.float32)
    if out.size != clip.n_samples:
        raise StageError(
            f"denoise adapter changed length {clip.n_samples} -> {out.size}",
            stage="denoise",
            source_id=clip.source_id,
        )
    return AudioClip(
        samples=out,
        sample_rate_hz=clip.sample_rate_hz,
        source_id=clip.source_id,
        offset_s=clip.offset_s,
    )


def separate_vocals(clip: AudioClip, stem_model: StemModel, adapter: StemAdapter) -> AudioClip:
    """Vocal-isolation pass; the adapter decides the output length."""
    clip.require_non_empty("stem separation input")
    try:
        out = adapter.separate_vocals(clip.samples, clip.sample_rate_hz, stem_model.value)
    except (ConfigurationError, ValidationError):
        raise
    except Exception as exc:
        raise StageError(
            f"stem adapter failed: {exc}", stage="stems", source_id=clip.source_id
        ) from exc
    return AudioClip(
        samples=np.asarray(out, dtype=np.float32),
        sample_rate_hz=clip.sample_rate_hz,
        source_id=clip.source_id,
        offset_s=clip.offset_s,
    )


def segment(clip: AudioClip, policy: SegmentationPolicy) -> list[AudioClip]:
    """Split into contiguous fixed-length clips; see SegmentationPolicy for tails."""
    n = clip.n_samples
    rate = clip.sample_rate_hz
    step = policy.target_len_s * rate
    segments: list[AudioClip] = []
    k = 0
    while True:
        lo = round(k * step)
        hi = round((k + 1) * step)
        if hi > n:
            break
        segments.append(
            AudioClip(
                samples=clip.samples[lo:hi],
                sample_rate_hz=rate,
                source_id=clip.source_id,
                offset_s=clip.offset_s + k * policy.target_len_s,
            )
        )
        k += 1
    if policy.tail is TailPolicy.KEEP_LAST:
        lo = round(k * step)
        remainder = n - lo
        if remainder > 0 and remainder / rate >= policy.min_tail_s:
            segments.append(
                AudioClip(
                    samples=clip.samples[lo:n],
                    sample_rate_hz=rate,
                    source_id=clip.source_id,
                    offset_s=clip.offset_s + k * policy.target_len_s,
                )
            )
    return segments


def transcode(clip: AudioClip, format: AudioFormat, codec: TranscodeAdapter) -> EncodedAudio:
    """Serialize a clip through the given codec adapter."""
    clip.require_non_empty("transcode input")
    try:
        payload = codec.encode(clip.samples, clip.sample_rate_hz, format.value)
    except (ConfigurationError, ValidationError):
        raise
    except Exception as exc:
        raise StageError(
            f"transcode to {format.value} failed: {exc}",
            stage="transcode",
            source_id=clip.source_id,
        ) from exc
    return EncodedAudio(
        payload=payload,
        format=format,
        sample_rate_hz=clip.sample_rate_hz,
        duration_s=clip.duration_s,
    )


def transcode_decode(encoded: EncodedAudio, codec: TranscodeAdapter) -> AudioClip:
    """Inverse of transcode; used by read-back verification."""
    try:
        samples, rate = codec.decode(encoded.payload, encoded.format.value)
    except (ConfigurationError, ValidationError, FormatError):
        raise
    except Exception as exc:
        raise StageError(f"decode of {encoded.format.value} failed: {exc}", stage="transcode") from exc
    return AudioClip(samples=np.asarray(samples, dtype=np.float32), sample_rate_hz=rate)
