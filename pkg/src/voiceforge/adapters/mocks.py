"""Deterministic mock adapters for every role.

These stand in for the real model backends in tests and dry runs: identical
inputs (and seeds) produce bit-identical outputs, and nothing here downloads
weights or requires a GPU. The mock media container ("MOCKAV") is a 28-byte
header from which the decoder synthesizes a speech-like waveform, so an
entire acquisition-to-dataset run is reproducible from a URI string alone.
"""

from __future__ import annotations

import hashlib
import os
import struct
from urllib.parse import parse_qs, urlsplit

import numpy as np

from ..audio import AudioClip, decode_wav_pcm16, dequantize_pcm16, encode_wav_pcm16, quantize_pcm16
from ..errors import ConfigurationError, FormatError
from .base import DownloadResult, MediaInfo

MOCKAV_MAGIC = b"MOCKAV00"
SILENCE_EPS = 1e-4

_HINDI_SENTENCES = [
    "नमस्ते, आप कैसे हैं",
    "आज मौसम बहुत सुहावना है",
    "मुझे संगीत सुनना पसंद है",
    "यह एक परीक्षण वाक्य है",
    "भारत एक विशाल देश है",
    "कल हम बाजार जाएंगे",
    "पानी जीवन के लिए आवश्यक है",
    "बच्चे बगीचे में खेल रहे हैं",
    "किताबें ज्ञान का भंडार हैं",
    "सुबह की सैर सेहत के लिए अच्छी है",
]

_ENGLISH_SENTENCES = [
    "hello there how are you",
    "the weather is pleasant today",
    "i like listening to music",
    "this is a test sentence",
    "water is essential for life",
    "the children are playing outside",
    "books are a store of knowledge",
    "a morning walk is good for health",
]


def _hash64(*parts: bytes) -> int:
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(part)
    return int.from_bytes(h.digest(), "big")


def speechlike_waveform(n_samples: int, rate: int, seed: int) -> np.ndarray:
    """Deterministic pseudo-speech: harmonic utterances separated by silence."""
    rng = np.random.default_rng(seed)
    out = np.zeros(n_samples, dtype=np.float32)
    pos = 0
    while pos < n_samples:
        utter = int(rng.uniform(2.0, 6.0) * rate)
        gap = int(rng.uniform(0.4, 0.8) * rate)
        f0 = rng.uniform(90.0, 220.0)
        seg = min(utter, n_samples - pos)
        if seg > 0:
            t = np.arange(seg, dtype=np.float64) / rate
            wave = np.zeros(seg, dtype=np.float64)
            for k, amp in ((1, 0.5), (2, 0.25), (3, 0.12)):
                wave += amp * np.sin(2.0 * np.pi * f0 * k * t + rng.uniform(0, 2 * np.pi))
            vibrato = 1.0 + 0.15 * np.sin(2.0 * np.pi * rng.uniform(3.0, 6.0) * t)
            edge = max(1, int(0.02 * rate))
            env = np.ones(seg, dtype=np.float64)
            ramp = np.linspace(0.0, 1.0, min(edge, seg))
            env[: ramp.size] = ramp
            env[seg - ramp.size :] = ramp[::-1]
            out[pos : pos + seg] = (0.45 * wave * vibrato * env).astype(np.float32)
        pos += utter + gap
    return np.clip(out, -1.0, 1.0)


def _voiced_spans(samples: np.ndarray, rate: int) -> list[tuple[int, int]]:
    """Sample-index spans of non-silent audio, merged over gaps < 0.3 s."""
    active = np.abs(samples) >= SILENCE_EPS
    if not active.any():
        return []
    idx = np.flatnonzero(active)
    gap = int(0.3 * rate)
    spans: list[tuple[int, int]] = []
    start = prev = int(idx[0])
    for i in idx[1:]:
        i = int(i)
        if i - prev > gap:
            spans.append((start, prev + 1))
            start = i
        prev = i
    spans.append((start, prev + 1))
    return spans


class MockDownloader:
    """Writes a MOCKAV stub for any URI; duration/rate/seed via query params.

    Example: ``mock://lecture?duration=3600&rate=32000&seed=7``. Unknown URIs
    fall back to the constructor defaults with a seed hashed from the URI.
    """

    def __init__(self, duration_s: float = 60.0, rate_hz: int = 24000):
        self.duration_s = duration_s
        self.rate_hz = rate_hz

    def download(self, uri: str, dest_path: str) -> DownloadResult:
        parts = urlsplit(uri)
        query = parse_qs(parts.query)
        duration = float(query.get("duration", [self.duration_s])[0])
        rate = int(query.get("rate", [self.rate_hz])[0])
        seed = int(query.get("seed", [_hash64(uri.encode()) % 2**31])[0])
        n_samples = int(round(duration * rate))
        with open(dest_path, "wb") as fh:
            fh.write(MOCKAV_MAGIC + struct.pack("<IQQ", rate, n_samples, seed))
        return DownloadResult(container_format="mockav", duration_s=n_samples / rate)


class MockDecoder:
    """Decodes MOCKAV stubs (synthesized waveform) and real PCM16 WAV files."""

    def _read(self, path: str) -> bytes:
        with open(path, "rb") as fh:
            return fh.read()

    def _parse_mockav(self, payload: bytes) -> tuple[int, int, int]:
        if len(payload) < 28:
            raise FormatError("truncated MOCKAV payload")
        rate, n_samples, seed = struct.unpack_from("<IQQ", payload, 8)
        return rate, n_samples, seed

    def probe(self, path: str) -> MediaInfo:
        payload = self._read(path)
        if payload[:8] == MOCKAV_MAGIC:
            rate, n_samples, _ = self._parse_mockav(payload)
            return MediaInfo(container_format="mockav", duration_s=n_samples / rate)
        if payload[:4] == b"RIFF":
            samples, rate = decode_wav_pcm16(payload)
            return MediaInfo(container_format="wav", duration_s=samples.size / rate)
        raise FormatError(f"mock decoder cannot probe {path}")

    def decode(self, path: str) -> tuple[np.ndarray, int]:
        payload = self._read(path)
        if payload[:8] == MOCKAV_MAGIC:
            rate, n_samples, seed = self._parse_mockav(payload)
            return speechlike_waveform(n_samples, rate, seed), rate
        if payload[:4] == b"RIFF":
            return decode_wav_pcm16(payload)
        raise FormatError(f"mock decoder cannot decode {path}")


class MockDenoiseAdapter:
    """Strength-weighted moving-average smoothing; strength 0 is the identity."""

    def __init__(self, window: int = 5):
        self.window = window

    def denoise(self, samples: np.ndarray, rate: int, strength: float) -> np.ndarray:
        if strength == 0.0 or samples.size == 0:
            return samples
        kernel = np.ones(self.window, dtype=np.float64) / self.window
        smoothed = np.convolve(samples.astype(np.float64), kernel, mode="same")
        out = (1.0 - strength) * samples.astype(np.float64) + strength * smoothed
        return np.clip(out, -1.0, 1.0).astype(np.float32)


class MockStemAdapter:
    """Fake vocal isolation: removes the slow-moving (accompaniment-ish) trend."""

    def __init__(self, supported: tuple[str, ...] = ("two_stems", "four_stems", "five_stems")):
        self.supported = supported

    def separate_vocals(self, samples: np.ndarray, rate: int, stem_model: str) -> np.ndarray:
        if stem_model not in self.supported:
            raise ConfigurationError(
                f"stem model {stem_model!r} not supported; choose from {sorted(self.supported)}"
            )
        if samples.size == 0:
            return samples
        window = max(3, int(0.01 * rate) | 1)
        kernel = np.ones(window, dtype=np.float64) / window
        trend = np.convolve(samples.astype(np.float64), kernel, mode="same")
        return np.clip(samples - trend, -1.0, 1.0).astype(np.float32)


class MockCodecAdapter:
    """Structurally faithful codec: per-frame block hashes as codebook entries.

    8 codebooks at 75 frames/s over a 24 kHz native rate, matching the shape
    of the real neural codec without any model weights.
    """

    def __init__(
        self,
        native_rate_hz: int = 24000,
        frame_rate_hz: float = 75.0,
        codebook_count: int = 8,
        codebook_size: int = 1024,
    ):
        self.native_rate_hz = native_rate_hz
        self.frame_rate_hz = frame_rate_hz
        self.codebook_count = codebook_count
        self.codebook_size = codebook_size

    def encode(self, samples: np.ndarray, rate: int) -> np.ndarray:
        n = samples.size
        n_frames = int(round(n / rate * self.frame_rate_hz))
        step = rate / self.frame_rate_hz
        pcm = quantize_pcm16(samples)
        codes = np.zeros((self.codebook_count, n_frames), dtype=np.int64)
        for k in range(n_frames):
            lo, hi = int(round(k * step)), int(round((k + 1) * step))
            block = pcm[lo : max(hi, lo + 1)].tobytes()
            for row in range(self.codebook_count):
                codes[row, k] = _hash64(block, bytes([row])) % self.codebook_size
        return codes


class MockSemanticEncoderAdapter:
    """Frame statistics as stand-in self-supervised features (50 frames/s)."""

    def __init__(self, token_rate_hz: float = 50.0, embedding_dim: int = 16):
        self.token_rate_hz = token_rate_hz
        self.embedding_dim = embedding_dim

    def encode(self, samples: np.ndarray, rate: int) -> np.ndarray:
        n = samples.size
        n_frames = int(round(n / rate * self.token_rate_hz))
        step = rate / self.token_rate_hz
        feats = np.zeros((n_frames, self.embedding_dim), dtype=np.float32)
        x = samples.astype(np.float64)
        for k in range(n_frames):
            lo, hi = int(round(k * step)), int(round((k + 1) * step))
            block = x[lo : max(hi, lo + 1)]
            if not np.any(np.abs(block) >= SILENCE_EPS):
                continue  # silence stays an all-zero feature row
            stats = [
                block.mean(),
                block.std(),
                np.sqrt(np.mean(block**2)),
                np.abs(block).max(),
                float(np.mean(np.abs(np.diff(np.signbit(block).astype(np.int8))))),
            ]
            row = np.zeros(self.embedding_dim)
            row[: len(stats)] = stats
            for j in range(len(stats), self.embedding_dim):
                row[j] = (_hash64(block.astype(np.float32).tobytes(), bytes([j])) % 1000) / 1000.0
            feats[k] = row.astype(np.float32)
        return feats


class MockTokenQuantizerAdapter:
    """Hashes feature rows into a fixed vocabulary; all-zero rows map to token 0."""

    def __init__(self, vocab_size: int = 10000, embedding_dim: int = 16):
        self.vocab_size = vocab_size
        self.embedding_dim = embedding_dim

    def quantize(self, features: np.ndarray) -> np.ndarray:
        features = np.asarray(features, dtype=np.float32)
        tokens = np.zeros(features.shape[0], dtype=np.int64)
        for i, row in enumerate(features):
            if row.any():
                tokens[i] = _hash64(row.tobytes()) % self.vocab_size
        return tokens


class MockTtsAdapter:
    """Seeded pseudo-speech generator standing in for the prompted TTS backend.

    The waveform is a pure function of (text, prompt tokens, params), so fixed
    seeds reproduce bit-identical audio. Setting the environment variable
    ``VOICEFORGE_MOCK_TTS_ABORT_AFTER=N`` makes the process die (exit 137)
    at the start of synthesis call N+1 — a harness for kill/resume tests.
    """

    def __init__(self, native_rate_hz: int = 24000, seconds_per_char: float = 0.055):
        self.native_rate_hz = native_rate_hz
        self.seconds_per_char = seconds_per_char
        abort = os.environ.get("VOICEFORGE_MOCK_TTS_ABORT_AFTER")
        self._abort_after = int(abort) if abort else None
        self._calls = 0

    def synthesize(self, text, semantic_tokens, coarse_codes, fine_codes, params) -> np.ndarray:
        if self._abort_after is not None and self._calls >= self._abort_after:
            os._exit(137)
        self._calls += 1
        seed = _hash64(
            text.encode("utf-8"),
            np.asarray(semantic_tokens, dtype=np.int64).tobytes(),
            np.asarray(fine_codes, dtype=np.int64).tobytes(),
            struct.pack("<ddq", params.text_temp, params.waveform_temp, params.seed or 0),
        )
        duration = min(14.0, 1.0 + self.seconds_per_char * len(text))
        n = int(round(duration * self.native_rate_hz))
        rng = np.random.default_rng(seed)
        t = np.arange(n, dtype=np.float64) / self.native_rate_hz
        f0 = rng.uniform(100.0, 200.0)
        wave = np.zeros(n, dtype=np.float64)
        for k, amp in ((1, 0.5), (2, 0.22), (3, 0.1)):
            wave += amp * np.sin(2.0 * np.pi * f0 * k * t + rng.uniform(0, 2 * np.pi))
        # temperature knobs perturb the modulation so params audibly matter
        mod_rate = 2.0 + 3.0 * params.text_temp
        depth = 0.2 + 0.3 * params.waveform_temp
        wave *= 1.0 - depth * 0.5 * (1.0 + np.sin(2.0 * np.pi * mod_rate * t))
        edge = max(1, int(0.02 * self.native_rate_hz))
        ramp = np.linspace(0.0, 1.0, edge)
        wave[:edge] *= ramp
        wave[-edge:] *= ramp[::-1]
        return np.clip(0.6 * wave, -1.0, 1.0).astype(np.float32)


class MockVcAdapter:
    """Duration-preserving fake re-voicing keyed by the model reference.

    model_ref/index_ref resolve against `known_models` when given, otherwise
    they must be existing filesystem paths (mirroring .pth/.index handling).
    """

    def __init__(self, native_rate_hz: int = 32000, known_models: set[str] | None = None):
        self.native_rate_hz = native_rate_hz
        self.known_models = known_models

    def _check_ref(self, kind: str, ref: str) -> None:
        if self.known_models is not None:
            if ref not in self.known_models:
                raise ConfigurationError(f"unknown {kind} {ref!r}")
        elif not ref or not os.path.exists(ref):
            raise ConfigurationError(f"{kind} {ref!r} does not resolve to a file")

    def convert(self, samples, rate, model_ref, index_ref, params):
        self._check_ref("model_ref", model_ref)
        self._check_ref("index_ref", index_ref)
        clip = AudioClip(samples=np.asarray(samples, dtype=np.float32), sample_rate_hz=rate)
        if rate != self.native_rate_hz:
            from ..audio import resample

            clip = resample(clip, self.native_rate_hz)
        x = clip.samples.astype(np.float64)
        t = np.arange(x.size, dtype=np.float64) / self.native_rate_hz
        carrier_hz = 30.0 + (_hash64(model_ref.encode()) % 400) / 10.0
        depth = 0.5 * params.index_ratio
        shifted = x * (1.0 - depth + depth * np.sin(2.0 * np.pi * carrier_hz * t))
        out = (1.0 - params.envelope_mix) * x + params.envelope_mix * shifted
        peak = np.abs(out).max()
        if peak > 0:
            out *= min(1.0, np.abs(x).max() / peak)
        return np.clip(out, -1.0, 1.0).astype(np.float32), self.native_rate_hz


class MockAsrAdapter:
    """Span-detecting fake transcriber; text drawn deterministically per span."""

    def transcribe(self, samples: np.ndarray, rate: int, config) -> list:
        from ..transcribe import TranscriptSegment

        sentences = _HINDI_SENTENCES if config.language.startswith("hi") else _ENGLISH_SENTENCES
        segments = []
        for lo, hi in _voiced_spans(samples, rate):
            if (hi - lo) / rate < 0.25:
                continue
            text = sentences[_hash64(quantize_pcm16(samples[lo:hi]).tobytes()) % len(sentences)]
            segments.append(TranscriptSegment(start_s=lo / rate, end_s=hi / rate, text=text))
        return segments


class MockDiarizationAdapter:
    """Single-speaker by default; optional round-robin multi-speaker labelling."""

    def __init__(self, n_speakers: int = 1):
        self.n_speakers = n_speakers

    def diarize(self, samples: np.ndarray, rate: int) -> list:
        from ..transcribe import SpeakerTurn

        duration = samples.size / rate
        if self.n_speakers <= 1:
            return [SpeakerTurn(start_s=0.0, end_s=duration, speaker_label="S0")]
        turns = []
        for i, (lo, hi) in enumerate(_voiced_spans(samples, rate)):
            label = f"S{i % self.n_speakers}"
            turns.append(SpeakerTurn(start_s=lo / rate, end_s=hi / rate, speaker_label=label))
        return turns


class MockSpeakerEmbeddingAdapter:
    """Windowed RMS profile as a voice embedding (L2-normalized)."""

    def __init__(self, embedding_dim: int = 16):
        self.embedding_dim = embedding_dim

    def embed(self, samples: np.ndarray, rate: int) -> np.ndarray:
        n = samples.size
        if n == 0:
            return np.zeros(self.embedding_dim, dtype=np.float32)
        edges = np.linspace(0, n, self.embedding_dim + 1).astype(int)
        out = np.zeros(self.embedding_dim, dtype=np.float64)
        for i in range(self.embedding_dim):
            block = samples[edges[i] : max(edges[i + 1], edges[i] + 1)]
            out[i] = np.sqrt(np.mean(block.astype(np.float64) ** 2))
        norm = np.linalg.norm(out)
        if norm > 0:
            out /= norm
        return out.astype(np.float32)


class MockTranscodeAdapter:
    """WAV via the real PCM16 codec; MP3 as a deterministic ID3-prefixed stub.

    The stub keeps the exact PCM payload behind an ``ID3`` magic so format
    checks, duration probes, and decode round-trips behave like a lossless
    MP3 codec would at mock scale.
    """

    MP3_TAG = b"ID3VFMK1"

    def encode(self, samples: np.ndarray, rate: int, format: str) -> bytes:
        clip = AudioClip(samples=np.asarray(samples, dtype=np.float32), sample_rate_hz=rate)
        if format == "wav_pcm16":
            return encode_wav_pcm16(clip)
        if format == "mp3":
            pcm = quantize_pcm16(clip.samples).astype("<i2").tobytes()
            return self.MP3_TAG + struct.pack("<IQ", rate, clip.n_samples) + pcm
        raise ConfigurationError(f"unsupported transcode format {format!r}")

    def decode(self, payload: bytes, format: str) -> tuple[np.ndarray, int]:
        if format == "wav_pcm16":
            return decode_wav_pcm16(payload)
        if format == "mp3":
            if payload[:8] != self.MP3_TAG:
                raise FormatError("not a mock MP3 payload")
            rate, n_samples = struct.unpack_from("<IQ", payload, 8)
            start = 8 + struct.calcsize("<IQ")
            q = np.frombuffer(payload[start : start + 2 * n_samples], dtype="<i2")
            return dequantize_pcm16(q), rate
        raise ConfigurationError(f"unsupported transcode format {format!r}")
