"""Prompted text-to-speech generation, single-shot and journaled batches.

Batch runs persist every finished clip as `<sentence sha256>.wav` and append
one JSON line per outcome to a journal, so an interrupted run resumes by
replaying the journal instead of regenerating audio. Because clips are
PCM16-quantized before hitting disk both times, a resumed run is
byte-identical to an uninterrupted one.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from threading import Lock

import numpy as np

from .adapters.base import TtsAdapter
from .audio import AudioClip, load_wav, save_wav
from .errors import BatchError, ConfigurationError, GenerationError, ValidationError
from .voiceprompt import SpeakerPrompt

JOURNAL_NAME = "journal.jsonl"
CLIP_DIR_NAME = "clips"
DEFAULT_RETRIES = 2


@dataclass(frozen=True)
class GenerationParams:
    """Sampling knobs passed through to the TTS backend."""

    text_temp: float
    waveform_temp: float
    seed: int | None = None

    def __post_init__(self) -> None:
        for name, temp in (("text_temp", self.text_temp), ("waveform_temp", self.waveform_temp)):
            if not 0.0 < temp <= 2.0:
                raise ValidationError(f"{name} must be in (0, 2], got {temp}")
        if self.seed is not None and not -(2**63) <= self.seed < 2**63:
            raise ValidationError("seed must fit in 64 bits")


def default_generation_params() -> GenerationParams:
    """The sampling defaults the corpus experiments settled on."""
    return GenerationParams(text_temp=0.85, waveform_temp=0.7)


@dataclass(frozen=True)
class GenerationRecord:
    """One synthesized sentence and the context it was generated under."""

    sentence: str
    clip: AudioClip
    params: GenerationParams
    prompt_id: str
    created_at: float

    def __post_init__(self) -> None:
        if not self.sentence.strip():
            raise ValidationError("sentence must be non-empty")
        self.clip.require_non_empty("generated clip")


@dataclass
class BatchResult:
    """Outcome of batch_synthesize: ordered successes plus per-sentence failures."""

    records: list[GenerationRecord]
    failures: dict[str, str] = field(default_factory=dict)

    @property
    def complete(self) -> bool:
        return not self.failures


def prompt_digest(prompt: SpeakerPrompt) -> str:
    """Stable 16-hex identifier for a speaker prompt's content."""
    h = hashlib.sha256()
    h.update(prompt.semantic_tokens.tobytes())
    h.update(prompt.coarse.codes.tobytes())
    h.update(prompt.fine.codes.tobytes())
    h.update(prompt.source_id.encode("utf-8"))
    return h.hexdigest()[:16]


def sentence_digest(sentence: str) -> str:
    return hashlib.sha256(sentence.encode("utf-8")).hexdigest()


def synthesize(
    text: str, prompt: SpeakerPrompt, params: GenerationParams, backend: TtsAdapter
) -> AudioClip:
    """Generate one clip in the prompt's voice at the backend's native rate."""
    if not text.strip():
        raise ValidationError("text must be non-empty")
    try:
        samples = backend.synthesize(
            text,
            prompt.semantic_tokens,
            prompt.coarse.codes,
            prompt.fine.codes,
            params,
        )
    except (ConfigurationError, ValidationError):
        raise
    except Exception as exc:
        raise GenerationError(
            f"TTS backend failed on {text[:40]!r}: {exc}",
            stage="synthesize",
            source_id=prompt.source_id,
        ) from exc
    samples = np.asarray(samples, dtype=np.float32)
    if samples.size == 0:
        raise GenerationError(
            f"TTS backend returned empty audio for {text[:40]!r}",
            stage="synthesize",
            source_id=prompt.source_id,
        )
    return AudioClip(
        samples=samples,
        sample_rate_hz=backend.native_rate_hz,
        source_id=f"{prompt_digest(prompt)}:{sentence_digest(text)[:8]}",
    )


def _read_journal(path: Path) -> dict[str, dict]:
    """Last-wins map of sentence_sha256 -> journal entry."""
    entries: dict[str, dict] = {}
    if not path.is_file():
        return entries
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                entry = json.loads(line)
            except json.JSONDecodeError:
                continue  # torn write from a killed process; rerun will redo it
            entries[entry["sentence_sha256"]] = entry
    return entries


def _append_journal(path: Path, entry: dict) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(entry, sort_keys=True) + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def batch_synthesize(
    sentences: list[str],
    prompt: SpeakerPrompt,
    params: GenerationParams,
    backend: TtsAdapter,
    work_dir: str | Path,
    retries: int = DEFAULT_RETRIES,
    workers: int = 1,
) -> BatchResult:
    """Generate one clip per sentence with fault isolation and resumption.

    Clips land in `<work_dir>/clips/<sentence sha256>.wav` and the journal at
    `<work_dir>/journal.jsonl` records one {sentence_sha256, output_path,
    status} object per attempt outcome. Reruns skip sentences whose journal
    status is "ok" and whose clip file still exists.
    """
    if not sentences:
        return BatchResult(records=[])
    for sentence in sentences:
        if not sentence.strip():
            raise ValidationError("sentences must all be non-empty")
    if workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {workers}")

    work_dir = Path(work_dir)
    clip_dir = work_dir / CLIP_DIR_NAME
    clip_dir.mkdir(parents=True, exist_ok=True)
    journal_path = work_dir / JOURNAL_NAME
    journal = _read_journal(journal_path)
    pid = prompt_digest(prompt)

    backend_lock = Lock()

    def generate(sentence: str) -> AudioClip:
        last_error: Exception | None = None
        for _ in range(1 + retries):
            try:
                with backend_lock:
                    return synthesize(sentence, prompt, params, backend)
            except GenerationError as exc:
                last_error = exc
        assert last_error is not None
        raise last_error

    def restore(sentence: str) -> AudioClip | None:
        """Clip from a previous run, if the journal says it finished."""
        entry = journal.get(sentence_digest(sentence))
        if not entry or entry.get("status") != "ok":
            return None
        clip_path = Path(entry["output_path"])
        if not clip_path.is_file():
            return None
        return load_wav(clip_path)

    records: list[GenerationRecord] = []
    failures: dict[str, str] = {}

    def handle(sentence: str, outcome: AudioClip | Exception, from_cache: bool) -> None:
        sha = sentence_digest(sentence)
        if isinstance(outcome, Exception):
            failures[sentence] = str(outcome)
            _append_journal(
                journal_path, {"sentence_sha256": sha, "output_path": "", "status": "failed"}
            )
            return
        clip_path = clip_dir / f"{sha}.wav"
        if not from_cache:
            save_wav(outcome, clip_path)
            outcome = load_wav(clip_path)  # requantized samples, as any rerun would see them
            _append_journal(
                journal_path,
                {"sentence_sha256": sha, "output_path": str(clip_path), "status": "ok"},
            )
        records.append(
            GenerationRecord(
                sentence=sentence,
                clip=outcome,
                params=params,
                prompt_id=pid,
                created_at=time.time(),
            )
        )

    pending: list[tuple[str, Future[AudioClip] | None, AudioClip | None]] = []
    if workers == 1:
        for sentence in sentences:
            cached = restore(sentence)
            if cached is not None:
                handle(sentence, cached, from_cache=True)
                continue
            try:
                handle(sentence, generate(sentence), from_cache=False)
            except GenerationError as exc:
                handle(sentence, exc, from_cache=False)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for sentence in sentences:
                cached = restore(sentence)
                if cached is not None:
                    pending.append((sentence, None, cached))
                else:
                    pending.append((sentence, pool.submit(generate, sentence), None))
            for sentence, future, cached in pending:
                if future is None:
                    handle(sentence, cached, from_cache=True)
                    continue
                try:
                    handle(sentence, future.result(), from_cache=False)
                except GenerationError as exc:
                    handle(sentence, exc, from_cache=False)

    if failures and not records:
        raise BatchError("every sentence in the batch failed", causes=failures)
    return BatchResult(records=records, failures=failures)
