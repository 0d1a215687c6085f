"""Dataset packaging: LJ and Common Voice 11 layouts, readers, and splitting.

Both writers are paired with readers that reproduce the entry list exactly,
and the train/valid split is a pure function of (seed, clip_id) via SHA-256
ranking, so every platform and run produces the same partition.
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .errors import IntegrityWarning, ParseError, ValidationError
from .preprocess import AudioFormat, EncodedAudio

CV_COLUMNS = (
    "client_id",
    "path",
    "sentence",
    "up_votes",
    "down_votes",
    "age",
    "gender",
    "accents",
    "locale",
    "segment",
)
CV_README = """# Custom Common Voice style dataset

Generated corpus in the Common Voice 11.0 directory layout. The up_votes and
down_votes columns are constant placeholders (2 and 0) so that standard
"validated" filters accept the rows; they do not reflect human review.
"""

_OPTIONAL_FIELDS = ("age", "gender", "accents", "locale", "segment")


@dataclass(frozen=True)
class CorpusEntry:
    """One labeled clip as it appears in a dataset manifest."""

    clip_id: str
    relative_audio_path: str
    sentence: str
    client_id: str = ""
    up_votes: int = 2
    down_votes: int = 0
    age: str | None = None
    gender: str | None = None
    accents: str | None = None
    locale: str | None = None
    segment: str | None = None
    extra: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.clip_id:
            raise ValidationError("clip_id must be non-empty")
        if not self.sentence.strip():
            raise ValidationError("sentence must be non-empty")
        if "\\" in self.relative_audio_path:
            raise ValidationError("relative_audio_path must use forward slashes")
        if self.up_votes < 0 or self.down_votes < 0:
            raise ValidationError("vote counts must be non-negative")
        for key, value in self.extra.items():
            if not key or not value:
                raise ValidationError("extra columns need non-empty names and values")


@dataclass(frozen=True)
class SplitSpec:
    """Deterministic train/valid split parameters."""

    valid_fraction: float
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 < self.valid_fraction < 1.0:
            raise ValidationError("valid_fraction must be in (0, 1)")
        if not -(2**63) <= self.seed < 2**64:
            raise ValidationError("seed must fit in 64 bits")


def make_clip_id(source_id: str, index: int) -> str:
    """Sortable, collision-free clip identifier: `<source_id>_<000000>`."""
    return f"{source_id}_{index:06d}"


def client_id_for(speaker_ref: str) -> str:
    """Anonymized speaker id: SHA-256 of the prompt or model identifier."""
    return hashlib.sha256(speaker_ref.encode("utf-8")).hexdigest()


def _rank_key(seed: int, clip_id: str) -> bytes:
    seed_bytes = (seed & (2**64 - 1)).to_bytes(8, "big")
    return hashlib.sha256(seed_bytes + clip_id.encode("utf-8")).digest()


def split_train_valid(
    entries: list[CorpusEntry], split: SplitSpec
) -> tuple[list[CorpusEntry], list[CorpusEntry]]:
    """Partition entries deterministically; |valid| = round(fraction * N).

    Entries are ranked by SHA-256(seed || clip_id); the lowest-ranked
    round(f*N) fall into valid. Rounding is half-up so every platform
    agrees at the .5 boundary. Input order is preserved inside each part.
    """
    if not entries:
        raise ValidationError("cannot split an empty entry list")
    n_valid = int(len(entries) * split.valid_fraction + 0.5)
    ranked = sorted(entries, key=lambda e: _rank_key(split.seed, e.clip_id))
    valid_ids = {e.clip_id for e in ranked[:n_valid]}
    train = [e for e in entries if e.clip_id not in valid_ids]
    valid = [e for e in entries if e.clip_id in valid_ids]
    return train, valid


def _check_unique(entries: list[CorpusEntry]) -> None:
    seen: set[str] = set()
    for entry in entries:
        if entry.clip_id in seen:
            raise ValidationError(f"duplicate clip_id {entry.clip_id!r}")
        seen.add(entry.clip_id)


def _check_audio(
    entries: list[CorpusEntry], audio: dict[str, EncodedAudio], required: AudioFormat
) -> None:
    for entry in entries:
        encoded = audio.get(entry.clip_id)
        if encoded is None:
            raise ValidationError(f"no audio supplied for clip {entry.clip_id!r}")
        if encoded.format is not required:
            raise ValidationError(
                f"clip {entry.clip_id!r} is {encoded.format.value}, writer needs {required.value}"
            )


def write_lj(
    entries: list[CorpusEntry],
    audio: dict[str, EncodedAudio],
    root: str | Path,
    split: SplitSpec,
) -> None:
    """Write `wavs/<clip_id>.wav` plus train.txt/valid.txt manifest lines."""
    _check_unique(entries)
    _check_audio(entries, audio, AudioFormat.WAV_PCM16)
    for entry in entries:
        if "|" in entry.sentence:
            raise ValidationError(
                f"clip {entry.clip_id!r}: sentence contains the '|' delimiter"
            )
        if "\n" in entry.sentence or "\r" in entry.sentence:
            raise ValidationError(f"clip {entry.clip_id!r}: sentence contains a newline")

    root = Path(root)
    wav_dir = root / "wavs"
    wav_dir.mkdir(parents=True, exist_ok=True)
    for stale in wav_dir.glob("*.wav"):
        stale.unlink()  # single-writer per root: keep the directory exactly in sync
    for entry in entries:
        (wav_dir / f"{entry.clip_id}.wav").write_bytes(audio[entry.clip_id].payload)

    if entries:
        train, valid = split_train_valid(entries, split)
    else:
        train, valid = [], []
    for name, part in (("train.txt", train), ("valid.txt", valid)):
        lines = [f"wavs/{entry.clip_id}.wav|{entry.sentence}\n" for entry in part]
        (root / name).write_text("".join(lines), encoding="utf-8")


def _read_lj_manifest(path: Path) -> list[CorpusEntry]:
    if not path.is_file():
        raise ParseError(f"manifest {path} is missing", path=str(path))
    entries: list[CorpusEntry] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("|")
            if len(parts) != 2:
                raise ParseError(
                    f"expected exactly one '|' delimiter, found {len(parts) - 1}",
                    path=str(path),
                    line=line_no,
                )
            rel_path, sentence = parts
            if not sentence.strip():
                raise ParseError("empty sentence", path=str(path), line=line_no)
            entries.append(
                CorpusEntry(
                    clip_id=Path(rel_path).stem,
                    relative_audio_path=rel_path,
                    sentence=sentence,
                )
            )
    return entries


def _warn_audio_mismatch(root: Path, referenced: set[str], audio_dir: str, ext: str) -> None:
    present = {p.name for p in (root / audio_dir).glob(f"*{ext}")} if (root / audio_dir).is_dir() else set()
    for name in sorted(referenced - present):
        warnings.warn(f"{audio_dir}/{name} is referenced but missing", IntegrityWarning)
    for name in sorted(present - referenced):
        warnings.warn(f"{audio_dir}/{name} exists but is not referenced", IntegrityWarning)


def read_lj_split(root: str | Path) -> tuple[list[CorpusEntry], list[CorpusEntry]]:
    """Read back an LJ-layout dataset, keeping train/valid membership."""
    root = Path(root)
    train = _read_lj_manifest(root / "train.txt")
    valid = _read_lj_manifest(root / "valid.txt")
    _check_unique(train + valid)
    referenced = {Path(e.relative_audio_path).name for e in train + valid}
    _warn_audio_mismatch(root, referenced, "wavs", ".wav")
    return train, valid


def read_lj(root: str | Path) -> list[CorpusEntry]:
    train, valid = read_lj_split(root)
    return train + valid


def _cv_field(value: str | None) -> str:
    return value if value is not None else ""


def _cv_header(extra_columns: list[str]) -> str:
    return "\t".join(list(CV_COLUMNS) + extra_columns)


def write_common_voice(
    entries: list[CorpusEntry],
    audio: dict[str, EncodedAudio],
    root: str | Path,
    split: SplitSpec,
) -> None:
    """Write `clips/<clip_id>.mp3` plus train.tsv/dev.tsv manifests."""
    _check_unique(entries)
    _check_audio(entries, audio, AudioFormat.MP3)
    for entry in entries:
        fields = [entry.sentence, entry.client_id, *(getattr(entry, f) or "" for f in _OPTIONAL_FIELDS)]
        fields.extend(entry.extra.values())
        for value in fields:
            if "\t" in value or "\n" in value or "\r" in value:
                raise ValidationError(
                    f"clip {entry.clip_id!r}: field contains a tab or newline"
                )

    extra_columns = sorted({key for entry in entries for key in entry.extra})
    root = Path(root)
    clip_dir = root / "clips"
    clip_dir.mkdir(parents=True, exist_ok=True)
    for stale in clip_dir.glob("*.mp3"):
        stale.unlink()  # single-writer per root: keep the directory exactly in sync
    for entry in entries:
        (clip_dir / f"{entry.clip_id}.mp3").write_bytes(audio[entry.clip_id].payload)

    if entries:
        train, valid = split_train_valid(entries, split)
    else:
        train, valid = [], []
    for name, part in (("train.tsv", train), ("dev.tsv", valid)):
        lines = [_cv_header(extra_columns) + "\n"]
        for entry in part:
            row = [
                entry.client_id,
                f"{entry.clip_id}.mp3",
                entry.sentence,
                str(entry.up_votes),
                str(entry.down_votes),
                *(_cv_field(getattr(entry, f)) for f in _OPTIONAL_FIELDS),
                *(entry.extra.get(column, "") for column in extra_columns),
            ]
            lines.append("\t".join(row) + "\n")
        (root / name).write_text("".join(lines), encoding="utf-8")
    (root / "README.md").write_text(CV_README, encoding="utf-8")


def _read_cv_manifest(path: Path) -> list[CorpusEntry]:
    if not path.is_file():
        raise ParseError(f"manifest {path} is missing", path=str(path))
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if not lines or not lines[0]:
        raise ParseError("missing header row", path=str(path), line=1)
    header = lines[0].split("\t")
    if tuple(header[: len(CV_COLUMNS)]) != CV_COLUMNS:
        raise ParseError(
            f"header must start with the {len(CV_COLUMNS)} standard columns",
            path=str(path),
            line=1,
        )
    extra_columns = header[len(CV_COLUMNS) :]

    entries: list[CorpusEntry] = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != len(header):
            raise ParseError(
                f"expected {len(header)} columns, found {len(fields)}",
                path=str(path),
                line=line_no,
            )
        named = dict(zip(header, fields))
        try:
            up_votes = int(named["up_votes"])
            down_votes = int(named["down_votes"])
        except ValueError as exc:
            raise ParseError(
                f"vote counts must be integers: {exc}", path=str(path), line=line_no
            ) from exc
        extra = {
            column: named[column] for column in extra_columns if named[column]
        }
        entries.append(
            CorpusEntry(
                clip_id=Path(named["path"]).stem,
                relative_audio_path=f"clips/{named['path']}",
                sentence=named["sentence"],
                client_id=named["client_id"],
                up_votes=up_votes,
                down_votes=down_votes,
                age=named["age"] or None,
                gender=named["gender"] or None,
                accents=named["accents"] or None,
                locale=named["locale"] or None,
                segment=named["segment"] or None,
                extra=extra,
            )
        )
    return entries


def read_common_voice_split(
    root: str | Path,
) -> tuple[list[CorpusEntry], list[CorpusEntry]]:
    """Read back a Common Voice layout dataset with split membership."""
    root = Path(root)
    train = _read_cv_manifest(root / "train.tsv")
    valid = _read_cv_manifest(root / "dev.tsv")
    _check_unique(train + valid)
    referenced = {Path(e.relative_audio_path).name for e in train + valid}
    _warn_audio_mismatch(root, referenced, "clips", ".mp3")
    return train, valid


def read_common_voice(root: str | Path) -> list[CorpusEntry]:
    train, valid = read_common_voice_split(root)
    return train + valid
