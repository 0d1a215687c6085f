"""Chop a long recording into fixed-length windows and clean each one.

Everything here runs on synthetic audio, so the script works offline.
"""

import shutil
from pathlib import Path

import numpy as np

from voiceforge import (
    AudioClip,
    AudioFormat,
    SegmentationPolicy,
    TailPolicy,
    denoise,
    load_wav,
    save_wav,
    segment,
    transcode,
)
from voiceforge.adapters.mocks import (
    MockDenoiseAdapter,
    MockTranscodeAdapter,
    speechlike_waveform,
)

out_dir = Path(__file__).parent / "_output" / "01_segment_and_clean"
shutil.rmtree(out_dir, ignore_errors=True)
out_dir.mkdir(parents=True)

# Pretend this came off a one-hour interview download. 95 seconds is enough
# to show the tail handling.
rate = 24000
source = AudioClip(
    samples=speechlike_waveform(95 * rate, rate, seed=4),
    sample_rate_hz=rate,
    source_id="interview_raw",
)
print(f"source: {source.duration_s:.1f} s at {source.sample_rate_hz} Hz")

# Default policy drops the short tail; KEEP_LAST keeps it when it is long
# enough to be useful as a training clip.
for policy in (
    SegmentationPolicy(),
    SegmentationPolicy(tail=TailPolicy.KEEP_LAST, min_tail_s=3.0),
):
    parts = segment(source, policy)
    durations = [f"{p.duration_s:g}" for p in parts]
    print(f"{policy.tail.value}: {len(parts)} segments -> {durations}")

parts = segment(source, SegmentationPolicy(tail=TailPolicy.KEEP_LAST, min_tail_s=3.0))

denoiser = MockDenoiseAdapter()
transcoder = MockTranscodeAdapter()
for i, part in enumerate(parts):
    cleaned = denoise(part, strength=0.4, adapter=denoiser)
    wav_path = out_dir / f"segment_{i:03d}.wav"
    save_wav(cleaned, wav_path)

    # The same clip as a compressed payload, the way a dataset would ship it.
    encoded = transcode(cleaned, AudioFormat.MP3, transcoder)
    (out_dir / f"segment_{i:03d}.mp3").write_bytes(encoded.payload)

print(f"wrote {len(parts)} cleaned segments to {out_dir}")

# Each segment remembers where it came from: source_id is inherited and
# offset_s steps along the original timeline.
print("offsets:", [p.offset_s for p in parts])

first = load_wav(out_dir / "segment_000.wav")
print(f"first segment: {first.duration_s:g} s, max amplitude {np.abs(first.samples).max():.3f}")
