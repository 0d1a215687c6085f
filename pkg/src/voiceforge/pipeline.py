"""Orchestration of the two corpus-building methodologies plus per-stage entry points.

Methodology 1 (bark_prompt): acquire -> decode -> optional passes -> segment
-> build speaker prompt -> batch-synthesize sentences -> quality gate ->
package as a dataset.

Methodology 2 (rvc_convert): without a trained model, prepare an LJ training
corpus (transcribe, diarize, slice) and emit the trainer config; with
model_ref/index_ref set, convert an existing corpus into the cloned voice
and package it as Common Voice.

All intermediate artifacts live in a `<output root>.work/` sibling so the
dataset tree contains exactly the deliverable files.
"""

from __future__ import annotations

import os
import shutil
from dataclasses import dataclass, field
from pathlib import Path

from .adapters import AdapterRegistry, AdapterRole, default_registry
from .audio import AudioClip, decode_wav_pcm16, save_wav
from .config import Methodology, OutputFormat, PipelineConfig
from .conversion import convert_voice, validate_training_data, write_training_config
from .corpus import (
    CorpusEntry,
    client_id_for,
    make_clip_id,
    read_common_voice,
    read_lj,
    write_common_voice,
    write_lj,
)
from .errors import ConfigurationError, StageError
from .ingest import CACHE_DIR_ENV, SourceKind, acquire_source, decode_to_audio
from .preprocess import (
    AudioFormat,
    EncodedAudio,
    denoise,
    segment,
    separate_vocals,
    transcode,
)
from .quality import ClipConstraints, Issue, QualityReport, Severity, validate_clip
from .synthesis import BatchResult, batch_synthesize, prompt_digest
from .transcribe import diarize, minority_speaker_fraction, slice_by_segments, transcribe
from .voiceprompt import build_prompt, extract_codebooks, extract_semantic_tokens, save_prompt

PROMPT_N_COARSE = 2
TRAINING_CONFIG_NAME = "training_config.txt"
QUALITY_REPORT_NAME = "quality_report.json"
MULTI_SPEAKER_WARN_FRACTION = 0.1


@dataclass
class RunSummary:
    """What a pipeline run did, for logging and exit-code decisions."""

    methodology: str
    output_root: str
    clips_in: int = 0
    prompts_built: int = 0
    sentences_generated: int = 0
    entries_written: int = 0
    quality: QualityReport = field(default_factory=QualityReport)
    partial: bool = False
    messages: list[str] = field(default_factory=list)


def work_dir_for(root: str | Path) -> Path:
    root = Path(root)
    return root.parent / (root.name + ".work")


def _cache_dir(work: Path) -> Path:
    return Path(os.environ.get(CACHE_DIR_ENV) or work / "cache")


def _required_roles(config: PipelineConfig) -> list[AdapterRole]:
    roles: list[AdapterRole] = [AdapterRole.TRANSCODE]
    if config.methodology is Methodology.BARK_PROMPT:
        roles += [
            AdapterRole.DECODER,
            AdapterRole.CODEC,
            AdapterRole.SEMANTIC_ENCODER,
            AdapterRole.TOKEN_QUANTIZER,
            AdapterRole.TTS,
        ]
    elif config.conversion.model_ref is None:
        roles += [AdapterRole.DECODER, AdapterRole.ASR, AdapterRole.DIARIZATION]
    else:
        roles += [AdapterRole.VC]
    needs_source = not (
        config.methodology is Methodology.RVC_CONVERT and config.conversion.model_ref
    )
    if needs_source:
        if config.source.kind is SourceKind.REMOTE:
            roles.append(AdapterRole.DOWNLOADER)
        if config.preprocessing.denoise_strength is not None:
            roles.append(AdapterRole.DENOISE)
        if config.preprocessing.stems is not None:
            roles.append(AdapterRole.STEMS)
    return roles


def resolve_adapters(config: PipelineConfig, registry: AdapterRegistry) -> dict[AdapterRole, object]:
    """Fail-fast lookup of every adapter the configured run will touch."""
    return {role: registry.resolve(role, config.adapters[role]) for role in _required_roles(config)}


def plan(config: PipelineConfig) -> list[str]:
    """Human-readable stage list for --dry-run output."""
    steps: list[str] = [f"source: {config.source.uri} ({config.source.kind.value})"]
    pp = config.preprocessing
    if config.methodology is Methodology.BARK_PROMPT:
        steps.append("decode to codec native rate")
        if pp.denoise_strength is not None:
            steps.append(f"denoise at strength {pp.denoise_strength}")
        if pp.stems is not None:
            steps.append(f"isolate vocals ({pp.stems.value})")
        steps.append(
            f"segment into {pp.segmentation.target_len_s} s clips ({pp.segmentation.tail.value})"
        )
        steps.append(f"build speaker prompt ({PROMPT_N_COARSE} coarse codebooks)")
        steps.append(f"synthesize {len(config.generation.sentences)} sentences")
    elif config.conversion.model_ref is None:
        steps.append(f"decode to {config.training.target_sample_rate_hz} Hz")
        if pp.denoise_strength is not None:
            steps.append(f"denoise at strength {pp.denoise_strength}")
        if pp.stems is not None:
            steps.append(f"isolate vocals ({pp.stems.value})")
        steps.append(f"diarize and transcribe ({config.asr.language}, {config.asr.task.value})")
        steps.append("slice into per-sentence clips and package as LJ")
        steps.append(f"emit trainer config ({TRAINING_CONFIG_NAME})")
    else:
        steps.append(f"read input corpus {config.conversion.input_corpus}")
        steps.append(f"convert every clip with model {config.conversion.model_ref}")
    steps.append("quality-gate clips and write the quality report")
    steps.append(
        f"package as {config.output.format.value} at {config.output.root} "
        f"(valid fraction {config.output.split.valid_fraction})"
    )
    return steps


def _acquire_decoded(
    config: PipelineConfig, adapters: dict[AdapterRole, object], work: Path, target_rate_hz: int
) -> AudioClip:
    downloader = adapters.get(AdapterRole.DOWNLOADER)
    handle = acquire_source(config.source, downloader, cache_dir=_cache_dir(work))
    clip = decode_to_audio(handle, target_rate_hz, adapters[AdapterRole.DECODER])
    pp = config.preprocessing
    if pp.denoise_strength is not None:
        clip = denoise(clip, pp.denoise_strength, adapters[AdapterRole.DENOISE])
    if pp.stems is not None:
        clip = separate_vocals(clip, pp.stems, adapters[AdapterRole.STEMS])
    return clip


def _gate(
    clips: list[tuple[str, AudioClip]], constraints: ClipConstraints, report: QualityReport
) -> list[str]:
    """Record issues for every clip; returns ids that passed."""
    kept: list[str] = []
    for clip_id, clip in clips:
        issues = validate_clip(clip, constraints)
        report.add(clip_id, issues)
        if not any(issue.severity.value == "fail" for issue in issues):
            kept.append(clip_id)
    return kept


def _verify_readback(
    root: Path, fmt: OutputFormat, written: list[CorpusEntry], full_equality: bool
) -> None:
    found = read_common_voice(root) if fmt is OutputFormat.COMMON_VOICE else read_lj(root)
    left = sorted(written, key=lambda e: e.clip_id)
    right = sorted(found, key=lambda e: e.clip_id)
    if full_equality:
        mismatch = left != right
    else:
        key = lambda e: (e.clip_id, e.relative_audio_path, e.sentence)
        mismatch = [key(e) for e in left] != [key(e) for e in right]
    if mismatch:
        raise StageError(
            f"read-back of {root} does not match the written manifest", stage="package"
        )


def _write_dataset(
    config: PipelineConfig,
    entries: list[CorpusEntry],
    audio: dict[str, EncodedAudio],
    fmt: OutputFormat,
    full_equality: bool,
) -> None:
    root = Path(config.output.root)
    root.mkdir(parents=True, exist_ok=True)
    if fmt is OutputFormat.COMMON_VOICE:
        write_common_voice(entries, audio, root, config.output.split)
    else:
        write_lj(entries, audio, root, config.output.split)
    _verify_readback(root, fmt, entries, full_equality)


def _m1_generate(
    config: PipelineConfig,
    adapters: dict[AdapterRole, object],
    summary: RunSummary,
    resume: bool,
    workers: int | None,
) -> tuple[AudioClip, str, BatchResult]:
    """Shared front half of methodology 1: acquire through batch synthesis."""
    work = work_dir_for(config.output.root)
    synth_dir = work / "synth"
    if not resume and synth_dir.exists():
        shutil.rmtree(synth_dir)
    work.mkdir(parents=True, exist_ok=True)

    codec = adapters[AdapterRole.CODEC]
    source_clip = _acquire_decoded(config, adapters, work, codec.native_rate_hz)
    segments = segment(source_clip, config.preprocessing.segmentation)
    summary.clips_in = len(segments)
    if not segments:
        raise StageError(
            f"source ({source_clip.duration_s:.1f} s) yields no full "
            f"{config.preprocessing.segmentation.target_len_s} s segment",
            stage="segment",
            source_id=source_clip.source_id,
        )

    fine, _ = extract_codebooks(segments[0], codec, PROMPT_N_COARSE)
    semantic = extract_semantic_tokens(
        segments[0],
        adapters[AdapterRole.SEMANTIC_ENCODER],
        adapters[AdapterRole.TOKEN_QUANTIZER],
    )
    prompt = build_prompt(semantic, fine, PROMPT_N_COARSE, source_clip.source_id)
    pid = prompt_digest(prompt)
    assets = work / "assets"
    assets.mkdir(parents=True, exist_ok=True)
    save_prompt(prompt, assets / f"prompt_{pid}.npz")
    summary.prompts_built = 1

    batch = batch_synthesize(
        list(config.generation.sentences),
        prompt,
        config.generation.params,
        adapters[AdapterRole.TTS],
        work_dir=synth_dir,
        retries=config.generation.retries,
        workers=workers or config.workers,
    )
    summary.sentences_generated = len(batch.records)
    summary.partial = not batch.complete
    for sentence, cause in batch.failures.items():
        summary.messages.append(f"failed sentence {sentence[:40]!r}: {cause}")
    return source_clip, pid, batch


def synth_stage(
    config: PipelineConfig,
    registry: AdapterRegistry | None = None,
    resume: bool = False,
    workers: int | None = None,
) -> RunSummary:
    """Generate (or resume generating) the batch clips without packaging them."""
    if config.methodology is not Methodology.BARK_PROMPT:
        raise ConfigurationError("the synth stage applies to methodology: bark_prompt")
    registry = registry or default_registry()
    adapters = resolve_adapters(config, registry)
    summary = RunSummary(methodology=config.methodology.value, output_root=config.output.root)
    _m1_generate(config, adapters, summary, resume, workers)
    return summary


def run_methodology_1(
    config: PipelineConfig,
    registry: AdapterRegistry | None = None,
    resume: bool = False,
    workers: int | None = None,
) -> RunSummary:
    """Prompted-TTS corpus generation; resumable through the synthesis journal."""
    if config.methodology is not Methodology.BARK_PROMPT:
        raise ConfigurationError("run_methodology_1 requires methodology: bark_prompt")
    registry = registry or default_registry()
    adapters = resolve_adapters(config, registry)
    summary = RunSummary(methodology=config.methodology.value, output_root=config.output.root)
    source_clip, pid, batch = _m1_generate(config, adapters, summary, resume, workers)
    tts = adapters[AdapterRole.TTS]

    constraints = ClipConstraints(required_rate_hz=tts.native_rate_hz)
    ids_and_clips = [
        (make_clip_id(source_clip.source_id, i), record.clip)
        for i, record in enumerate(batch.records)
    ]
    kept_ids = set(_gate(ids_and_clips, constraints, summary.quality))

    fmt = config.output.format
    audio_format = AudioFormat.MP3 if fmt is OutputFormat.COMMON_VOICE else AudioFormat.WAV_PCM16
    transcoder = adapters[AdapterRole.TRANSCODE]
    entries: list[CorpusEntry] = []
    audio: dict[str, EncodedAudio] = {}
    prefix = "clips" if fmt is OutputFormat.COMMON_VOICE else "wavs"
    extension = "mp3" if fmt is OutputFormat.COMMON_VOICE else "wav"
    kept_durations: list[float] = []
    for (clip_id, clip), record in zip(ids_and_clips, batch.records):
        if clip_id not in kept_ids:
            continue
        audio[clip_id] = transcode(clip, audio_format, transcoder)
        kept_durations.append(clip.duration_s)
        entries.append(
            CorpusEntry(
                clip_id=clip_id,
                relative_audio_path=f"{prefix}/{clip_id}.{extension}",
                sentence=record.sentence,
                client_id=client_id_for(pid),
                locale=config.output.locale,
            )
        )
    if not entries:
        raise StageError("no generated clip passed quality gating", stage="quality")

    summary.quality.metrics.update(
        {
            "clips_in": float(summary.clips_in),
            "sentences_requested": float(len(config.generation.sentences)),
            "sentences_generated": float(len(batch.records)),
            "entries_written": float(len(entries)),
            "mean_clip_duration_s": sum(kept_durations) / len(kept_durations),
        }
    )
    summary.entries_written = len(entries)
    _write_dataset(config, entries, audio, fmt, full_equality=fmt is OutputFormat.COMMON_VOICE)
    summary.quality.save(Path(config.output.root) / QUALITY_REPORT_NAME)
    return summary


def _prepare_lj_training_set(
    config: PipelineConfig,
    adapters: dict[AdapterRole, object],
    summary: RunSummary,
    work: Path,
) -> None:
    source_clip = _acquire_decoded(
        config, adapters, work, config.training.target_sample_rate_hz
    )
    turns = diarize(source_clip, adapters[AdapterRole.DIARIZATION])
    minority = minority_speaker_fraction(turns)
    if minority > MULTI_SPEAKER_WARN_FRACTION:
        summary.messages.append(
            f"diarization found {minority:.0%} of speech from non-dominant speakers; "
            "the training set assumes one voice"
        )
    segments = transcribe(source_clip, config.asr, adapters[AdapterRole.ASR])
    pairs = slice_by_segments(source_clip, segments)
    summary.clips_in = len(pairs)
    if not pairs:
        raise StageError(
            "transcription produced no speech segments",
            stage="transcribe",
            source_id=source_clip.source_id,
        )

    constraints = ClipConstraints(required_rate_hz=config.training.target_sample_rate_hz)
    ids_and_clips = [
        (make_clip_id(source_clip.source_id, i), clip) for i, (clip, _) in enumerate(pairs)
    ]
    kept_ids = set(_gate(ids_and_clips, constraints, summary.quality))
    for (clip_id, _), (_, text) in zip(ids_and_clips, pairs):
        if "|" in text and clip_id in kept_ids:
            kept_ids.discard(clip_id)
            summary.quality.per_clip[clip_id].append(
                Issue(
                    code="delimiter",
                    severity=Severity.FAIL,
                    message="transcript contains the LJ '|' delimiter",
                )
            )

    transcoder = adapters[AdapterRole.TRANSCODE]
    entries: list[CorpusEntry] = []
    audio: dict[str, EncodedAudio] = {}
    kept_clips: list[AudioClip] = []
    for (clip_id, clip), (_, text) in zip(ids_and_clips, pairs):
        if clip_id not in kept_ids:
            continue
        audio[clip_id] = transcode(clip, AudioFormat.WAV_PCM16, transcoder)
        kept_clips.append(clip)
        entries.append(
            CorpusEntry(
                clip_id=clip_id,
                relative_audio_path=f"wavs/{clip_id}.wav",
                sentence=text,
                client_id=client_id_for(source_clip.source_id),
                locale=config.output.locale,
            )
        )
    if not entries:
        raise StageError("no sliced clip passed quality gating", stage="quality")

    for warning in validate_training_data(kept_clips, config.training.target_sample_rate_hz):
        summary.messages.append(warning)

    summary.quality.metrics.update(
        {
            "clips_in": float(summary.clips_in),
            "entries_written": float(len(entries)),
            "total_speech_s": float(sum(c.duration_s for c in kept_clips)),
        }
    )
    summary.entries_written = len(entries)

    root = Path(config.output.root)
    root.mkdir(parents=True, exist_ok=True)
    write_lj(entries, audio, root, config.output.split)
    _verify_readback(root, OutputFormat.LJ, entries, full_equality=False)
    write_training_config(config.training, root / TRAINING_CONFIG_NAME)
    summary.quality.save(root / QUALITY_REPORT_NAME)
    summary.messages.append(
        f"training corpus and {TRAINING_CONFIG_NAME} written to {root}; train a model on it, "
        "then set conversion.model_ref and conversion.index_ref to run the conversion phase"
    )


def _convert_corpus(
    config: PipelineConfig, adapters: dict[AdapterRole, object], summary: RunSummary
) -> None:
    conv = config.conversion
    assert conv.model_ref and conv.index_ref and conv.input_corpus
    input_root = Path(conv.input_corpus)
    input_entries = read_common_voice(input_root)
    summary.clips_in = len(input_entries)
    if not input_entries:
        raise StageError(f"input corpus {input_root} has no entries", stage="convert")

    transcoder = adapters[AdapterRole.TRANSCODE]
    vc = adapters[AdapterRole.VC]

    converted: list[tuple[CorpusEntry, AudioClip]] = []
    for entry in input_entries:
        payload = (input_root / entry.relative_audio_path).read_bytes()
        try:
            samples, rate = transcoder.decode(payload, AudioFormat.MP3.value)
        except Exception as exc:
            raise StageError(
                f"cannot decode {entry.relative_audio_path}: {exc}",
                stage="convert",
                source_id=entry.clip_id,
            ) from exc
        clip = AudioClip(samples=samples, sample_rate_hz=rate, source_id=entry.clip_id)
        converted.append(
            (entry, convert_voice(clip, conv.model_ref, conv.index_ref, conv.params, vc))
        )

    constraints = ClipConstraints(required_rate_hz=vc.native_rate_hz)
    kept_ids = set(
        _gate([(entry.clip_id, clip) for entry, clip in converted], constraints, summary.quality)
    )

    entries: list[CorpusEntry] = []
    audio: dict[str, EncodedAudio] = {}
    for entry, clip in converted:
        if entry.clip_id not in kept_ids:
            continue
        audio[entry.clip_id] = transcode(clip, AudioFormat.MP3, transcoder)
        entries.append(
            CorpusEntry(
                clip_id=entry.clip_id,
                relative_audio_path=f"clips/{entry.clip_id}.mp3",
                sentence=entry.sentence,
                client_id=client_id_for(conv.model_ref),
                up_votes=entry.up_votes,
                down_votes=entry.down_votes,
                age=entry.age,
                gender=entry.gender,
                accents=entry.accents,
                locale=entry.locale or config.output.locale,
                segment=entry.segment,
                extra=dict(entry.extra),
            )
        )
    if not entries:
        raise StageError("no converted clip passed quality gating", stage="quality")

    summary.quality.metrics.update(
        {
            "clips_in": float(summary.clips_in),
            "entries_written": float(len(entries)),
        }
    )
    summary.entries_written = len(entries)
    _write_dataset(config, entries, audio, OutputFormat.COMMON_VOICE, full_equality=True)
    summary.quality.save(Path(config.output.root) / QUALITY_REPORT_NAME)


def run_methodology_2(
    config: PipelineConfig,
    registry: AdapterRegistry | None = None,
    resume: bool = False,
    workers: int | None = None,
) -> RunSummary:
    """Voice-conversion workflow: LJ training prep, or corpus conversion once trained."""
    if config.methodology is not Methodology.RVC_CONVERT:
        raise ConfigurationError("run_methodology_2 requires methodology: rvc_convert")
    registry = registry or default_registry()
    adapters = resolve_adapters(config, registry)
    summary = RunSummary(methodology=config.methodology.value, output_root=config.output.root)
    work = work_dir_for(config.output.root)
    work.mkdir(parents=True, exist_ok=True)

    if config.conversion.model_ref is None:
        _prepare_lj_training_set(config, adapters, summary, work)
    else:
        _convert_corpus(config, adapters, summary)
    return summary


def run(
    config: PipelineConfig,
    registry: AdapterRegistry | None = None,
    resume: bool = False,
    workers: int | None = None,
) -> RunSummary:
    """Dispatch to the configured methodology."""
    if config.methodology is Methodology.BARK_PROMPT:
        return run_methodology_1(config, registry, resume=resume, workers=workers)
    return run_methodology_2(config, registry, resume=resume, workers=workers)


def validate_dataset(
    config: PipelineConfig, registry: AdapterRegistry | None = None
) -> QualityReport:
    """Re-validate an already-written dataset at the configured output root."""
    registry = registry or default_registry()
    root = Path(config.output.root)
    fmt = config.output.format
    if config.methodology is Methodology.BARK_PROMPT:
        required_rate = registry.resolve(
            AdapterRole.TTS, config.adapters[AdapterRole.TTS]
        ).native_rate_hz
    else:
        required_rate = config.training.target_sample_rate_hz

    entries = read_common_voice(root) if fmt is OutputFormat.COMMON_VOICE else read_lj(root)
    transcoder = registry.resolve(AdapterRole.TRANSCODE, config.adapters[AdapterRole.TRANSCODE])
    report = QualityReport()
    constraints = ClipConstraints(required_rate_hz=required_rate)
    for entry in entries:
        payload = (root / entry.relative_audio_path).read_bytes()
        if fmt is OutputFormat.COMMON_VOICE:
            samples, rate = transcoder.decode(payload, AudioFormat.MP3.value)
        else:
            samples, rate = decode_wav_pcm16(payload)
        clip = AudioClip(samples=samples, sample_rate_hz=rate, source_id=entry.clip_id)
        report.add(entry.clip_id, validate_clip(clip, constraints))
    report.metrics["entries"] = float(len(entries))
    report.metrics["failing_entries"] = float(len(report.failing_clip_ids()))
    return report


def acquire_stage(config: PipelineConfig, registry: AdapterRegistry | None = None) -> Path:
    """Resolve and cache the configured source; returns the local media path."""
    registry = registry or default_registry()
    downloader = None
    if config.source.kind is SourceKind.REMOTE:
        downloader = registry.resolve(
            AdapterRole.DOWNLOADER, config.adapters[AdapterRole.DOWNLOADER]
        )
    work = work_dir_for(config.output.root)
    work.mkdir(parents=True, exist_ok=True)
    handle = acquire_source(config.source, downloader, cache_dir=_cache_dir(work))
    return handle.path


def prep_stage(config: PipelineConfig, registry: AdapterRegistry | None = None) -> list[Path]:
    """Acquire, decode, run optional passes, and segment; writes work-dir WAVs."""
    registry = registry or default_registry()
    adapters = resolve_adapters(config, registry)
    work = work_dir_for(config.output.root)
    work.mkdir(parents=True, exist_ok=True)
    if config.methodology is Methodology.BARK_PROMPT:
        target_rate = adapters[AdapterRole.CODEC].native_rate_hz
    else:
        target_rate = config.training.target_sample_rate_hz
    clip = _acquire_decoded(config, adapters, work, target_rate)
    segments = segment(clip, config.preprocessing.segmentation)
    seg_dir = work / "segments"
    seg_dir.mkdir(parents=True, exist_ok=True)
    paths: list[Path] = []
    for i, piece in enumerate(segments):
        path = seg_dir / f"{make_clip_id(clip.source_id, i)}.wav"
        save_wav(piece, path)
        paths.append(path)
    return paths


def prompt_stage(config: PipelineConfig, registry: AdapterRegistry | None = None) -> Path:
    """Build and save the speaker prompt; returns the npz path."""
    if config.methodology is not Methodology.BARK_PROMPT:
        raise ConfigurationError("the prompt stage applies to methodology: bark_prompt")
    registry = registry or default_registry()
    adapters = resolve_adapters(config, registry)
    work = work_dir_for(config.output.root)
    work.mkdir(parents=True, exist_ok=True)
    codec = adapters[AdapterRole.CODEC]
    clip = _acquire_decoded(config, adapters, work, codec.native_rate_hz)
    segments = segment(clip, config.preprocessing.segmentation)
    if not segments:
        raise StageError("source yields no full segment", stage="segment", source_id=clip.source_id)
    fine, _ = extract_codebooks(segments[0], codec, PROMPT_N_COARSE)
    semantic = extract_semantic_tokens(
        segments[0], adapters[AdapterRole.SEMANTIC_ENCODER], adapters[AdapterRole.TOKEN_QUANTIZER]
    )
    prompt = build_prompt(semantic, fine, PROMPT_N_COARSE, clip.source_id)
    assets = work / "assets"
    assets.mkdir(parents=True, exist_ok=True)
    path = assets / f"prompt_{prompt_digest(prompt)}.npz"
    save_prompt(prompt, path)
    return path


def train_config_stage(config: PipelineConfig) -> Path:
    """Emit the external trainer's config file under the output root."""
    root = Path(config.output.root)
    root.mkdir(parents=True, exist_ok=True)
    path = root / TRAINING_CONFIG_NAME
    write_training_config(config.training, path)
    return path
