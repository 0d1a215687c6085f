"""Quality metrics: error rates, silence detection, and clip validation."""

import numpy as np

from voiceforge import AudioClip, ClipConstraints, character_error_rate, validate_clip, word_error_rate
from voiceforge.quality import QualityReport, silence_fraction

# Error rates against a reference transcript. Character-level is the usual
# metric for scripts without word boundaries; word-level for everything else.
reference = "आज मौसम बहुत अच्छा है"
hypothesis = "आज मौसम बहुत अछा है"
print(f"CER: {character_error_rate(reference, hypothesis):.4f}")
print(f"WER: {word_error_rate(reference, hypothesis):.4f}")

rng = np.random.default_rng(3)

good = AudioClip(samples=rng.uniform(-0.5, 0.5, 48000).astype(np.float32), sample_rate_hz=24000)
print(f"\ngood clip silence fraction: {silence_fraction(good):.3f}")

# Half the samples silent: still below the default 0.9 ceiling.
half = good.samples.copy()
half[:24000] = 0.0
print(f"half-silent fraction: {silence_fraction(AudioClip(samples=half, sample_rate_hz=24000)):.3f}")

constraints = ClipConstraints(required_rate_hz=24000)
report = QualityReport()

report.add("clip_good", validate_clip(good, constraints))

too_short = AudioClip(samples=good.samples[:12000], sample_rate_hz=24000)
report.add("clip_short", validate_clip(too_short, constraints))

wrong_rate = AudioClip(samples=good.samples, sample_rate_hz=16000)
report.add("clip_wrong_rate", validate_clip(wrong_rate, constraints))

silent = AudioClip(samples=np.zeros(48000, np.float32), sample_rate_hz=24000)
report.add("clip_silent", validate_clip(silent, constraints))

print("\nper-clip issues:")
for clip_id, issues in report.per_clip.items():
    codes = [issue.code for issue in issues] or ["(clean)"]
    print(f"  {clip_id}: {', '.join(codes)}")
print(f"failing: {report.failing_clip_ids()}")
