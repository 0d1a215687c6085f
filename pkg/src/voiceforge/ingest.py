"""Source acquisition and decoding to the canonical mono float representation.

Remote media lands in a content cache keyed by the SHA-256 of the URI, so
repeated runs are idempotent and concurrent workers can share one cache
directory (writes go to a temp file, then an atomic rename).
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .adapters.base import DecoderAdapter, DownloaderAdapter
from .audio import (
    MAX_SAMPLE_RATE_HZ,
    MIN_SAMPLE_RATE_HZ,
    AudioClip,
    downmix_mean,
    resample,
)
from .errors import (
    AcquisitionError,
    ConfigurationError,
    DecodeError,
    EmptyAudioError,
    IntegrityError,
    ValidationError,
)

CACHE_DIR_ENV = "VOICEFORGE_CACHE_DIR"
DEFAULT_CACHE_DIR = "cache"
DURATION_TOLERANCE_S = 0.1


class SourceKind(str, Enum):
    LOCAL = "local"
    REMOTE = "remote"


@dataclass(frozen=True)
class SourceSpec:
    """Where a piece of source media lives."""

    uri: str
    kind: SourceKind
    expected_duration_s: float | None = None

    def __post_init__(self) -> None:
        if not self.uri:
            raise ValidationError("source uri must be non-empty")
        if self.kind is SourceKind.REMOTE and "://" not in self.uri:
            raise ValidationError(f"remote uri {self.uri!r} needs a scheme prefix")
        if self.expected_duration_s is not None and self.expected_duration_s <= 0:
            raise ValidationError("expected_duration_s must be positive when given")


@dataclass(frozen=True)
class RawMediaHandle:
    """A local media file ready for decoding.

    duration_s is None until something has probed the container; plain local
    acquisition has no decoder in hand, so it cannot promise a duration.
    """

    path: Path
    container_format: str | None = None
    duration_s: float | None = None

    def __post_init__(self) -> None:
        if not self.path.is_file():
            raise IntegrityError(f"media file {self.path} does not exist", stage="acquire")
        if self.path.stat().st_size == 0:
            raise IntegrityError(f"media file {self.path} is empty", stage="acquire")
        if self.duration_s is not None and self.duration_s <= 0:
            raise ValidationError("duration_s must be positive when known")


def _cache_dir(cache_dir: str | Path | None) -> Path:
    if cache_dir is not None:
        return Path(cache_dir)
    return Path(os.environ.get(CACHE_DIR_ENV, DEFAULT_CACHE_DIR))


def _extension_for(uri: str, container_format: str | None) -> str:
    if container_format:
        return container_format.lstrip(".").lower()
    suffix = Path(uri.split("?", 1)[0]).suffix.lstrip(".").lower()
    return suffix or "bin"


def acquire_source(
    spec: SourceSpec,
    downloader: DownloaderAdapter | None = None,
    cache_dir: str | Path | None = None,
) -> RawMediaHandle:
    """Resolve a SourceSpec to a local file, downloading through the cache if remote."""
    if spec.kind is SourceKind.LOCAL:
        path = Path(spec.uri)
        if not path.is_file():
            raise AcquisitionError(f"local source {spec.uri} not found", source_id=spec.uri)
        return RawMediaHandle(path=path, container_format=_extension_for(spec.uri, None))

    if downloader is None:
        raise ConfigurationError("remote sources need a downloader adapter")

    digest = hashlib.sha256(spec.uri.encode("utf-8")).hexdigest()
    root = _cache_dir(cache_dir)
    bucket = root / digest[:2]
    bucket.mkdir(parents=True, exist_ok=True)

    existing = sorted(bucket.glob(f"{digest}.*"))
    if existing:
        return RawMediaHandle(
            path=existing[0], container_format=existing[0].suffix.lstrip(".") or None
        )

    fd, tmp_name = tempfile.mkstemp(prefix=f".{digest}.", dir=bucket)
    os.close(fd)
    try:
        result = downloader.download(spec.uri, tmp_name)
        if os.path.getsize(tmp_name) == 0:
            raise IntegrityError(f"download of {spec.uri} produced zero bytes", source_id=spec.uri)
        ext = _extension_for(spec.uri, result.container_format)
        final = bucket / f"{digest}.{ext}"
        os.replace(tmp_name, final)
    except AcquisitionError:
        raise
    except IntegrityError:
        raise
    except Exception as exc:
        raise AcquisitionError(f"download of {spec.uri} failed: {exc}", source_id=spec.uri) from exc
    finally:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
    return RawMediaHandle(
        path=final,
        container_format=result.container_format or ext,
        duration_s=result.duration_s,
    )


def source_id_for(path: str | Path) -> str:
    """Stable 16-hex identifier for a media file: hash of absolute path + mtime."""
    resolved = Path(path).resolve()
    mtime_ns = resolved.stat().st_mtime_ns
    return hashlib.sha256(f"{resolved}|{mtime_ns}".encode("utf-8")).hexdigest()[:16]


def decode_to_audio(
    media: RawMediaHandle, target_rate_hz: int, decoder: DecoderAdapter
) -> AudioClip:
    """Decode a media file to a mono AudioClip at exactly target_rate_hz."""
    if not MIN_SAMPLE_RATE_HZ <= target_rate_hz <= MAX_SAMPLE_RATE_HZ:
        raise ConfigurationError(
            f"target_rate_hz must be within [{MIN_SAMPLE_RATE_HZ}, {MAX_SAMPLE_RATE_HZ}], "
            f"got {target_rate_hz}"
        )
    try:
        samples, native_rate = decoder.decode(str(media.path))
    except (ConfigurationError, ValidationError):
        raise
    except Exception as exc:
        raise DecodeError(
            f"cannot decode {media.path}: {exc}", stage="decode", source_id=str(media.path)
        ) from exc

    samples = np.asarray(samples, dtype=np.float32)
    if samples.ndim == 2:
        samples = downmix_mean(samples)
    if samples.size == 0:
        raise EmptyAudioError(f"{media.path} has no audio samples", source_id=str(media.path))

    native_duration = samples.size / native_rate
    if media.duration_s is not None and abs(native_duration - media.duration_s) > DURATION_TOLERANCE_S:
        raise DecodeError(
            f"decoded duration {native_duration:.3f}s disagrees with container "
            f"duration {media.duration_s:.3f}s for {media.path}",
            stage="decode",
            source_id=str(media.path),
        )

    clip = AudioClip(
        samples=samples,
        sample_rate_hz=native_rate,
        source_id=source_id_for(media.path),
        offset_s=0.0,
    )
    return resample(clip, target_rate_hz)
