"""The voice-conversion route: prep a training set, then convert a corpus.

Phase one takes a source recording and lays out an LJ-style training set
plus the trainer configuration file. Training itself happens outside this
package. Phase two takes the resulting model and re-voices every clip of an
existing dataset, keeping sentences and metadata.
"""

import shutil
from pathlib import Path

import numpy as np

from voiceforge import (
    AudioClip,
    AudioFormat,
    CorpusEntry,
    SplitSpec,
    parse_config,
    read_common_voice,
    run,
    transcode,
    write_common_voice,
)
from voiceforge.adapters.mocks import MockTranscodeAdapter, speechlike_waveform
from voiceforge.corpus import client_id_for

base = Path(__file__).parent / "_output" / "04_voice_conversion"
shutil.rmtree(base, ignore_errors=True)
base.mkdir(parents=True)

# ---- phase 1: training prep ------------------------------------------------
prep_config = parse_config(
    {
        "methodology": "rvc_convert",
        "source": {"uri": "mock://narration?duration=780&rate=32000&seed=2"},
        "output": {
            "root": str(base / "training_set"),
            "format": "lj",
            "split": {"valid_fraction": 0.1, "seed": 1},
        },
        "adapters": {"downloader": "mock", "decoder": "mock"},
    }
)
prep = run(prep_config)
print(f"training prep: {prep.entries_written} clips at {prep.output_root}")
for note in prep.messages:
    print(f"  {note}")
print((base / "training_set" / "training_config.txt").read_text(encoding="utf-8"))

# ---- phase 2: conversion ---------------------------------------------------
# Build a small existing corpus to convert. In practice this is a dataset
# someone already published; here three synthetic clips stand in for it.
source_corpus = base / "existing_corpus"
transcoder = MockTranscodeAdapter()
entries = []
audio = {}
for i, sentence in enumerate(["एक वाक्य।", "दो वाक्य।", "तीन वाक्य।"]):
    clip = AudioClip(
        samples=speechlike_waveform(2 * 32000, 32000, seed=30 + i),
        sample_rate_hz=32000,
    )
    clip_id = f"orig_{i:06d}"
    audio[clip_id] = transcode(clip, AudioFormat.MP3, transcoder)
    entries.append(
        CorpusEntry(
            clip_id=clip_id,
            relative_audio_path=f"clips/{clip_id}.mp3",
            sentence=sentence,
            client_id=client_id_for("original-speaker"),
            locale="hi",
        )
    )
write_common_voice(entries, audio, source_corpus, SplitSpec(valid_fraction=0.34, seed=6))

# The mock VC adapter accepts any model/index pair that exists on disk.
model = base / "target_voice.pth"
index = base / "target_voice.index"
model.touch()
index.touch()

convert_config = parse_config(
    {
        "methodology": "rvc_convert",
        "source": {"uri": "mock://unused?duration=1"},  # conversion reads the corpus instead
        "conversion": {
            "model_ref": str(model),
            "index_ref": str(index),
            "input_corpus": str(source_corpus),
        },
        "output": {"root": str(base / "converted_corpus")},
        "adapters": {"downloader": "mock", "decoder": "mock"},
    }
)
converted = run(convert_config)
print(f"conversion: {converted.entries_written} entries at {converted.output_root}")

before = read_common_voice(source_corpus)
after = read_common_voice(base / "converted_corpus")
print("sentences preserved:", [e.sentence for e in after] == [e.sentence for e in before])
print("speaker re-attributed:", np.unique([e.client_id for e in after]).tolist())
