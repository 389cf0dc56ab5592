"""Generate the bundled synthetic test utterances in tests/data.

Formant-filtered glottal pulses with aspiration above ~4.5 kHz, fricative
bursts and a low noise floor between words. Fully deterministic.
"""

import argparse
import pathlib
import wave

import numpy as np
from scipy import signal

SR = 16000
BLOCK = 80  # formant update interval, samples

# (F1, F2, F3) in Hz
VOWELS = {
    "a": (730, 1090, 2440),
    "i": (270, 2290, 3010),
    "u": (300, 870, 2240),
    "e": (530, 1840, 2480),
    "o": (570, 840, 2410),
}
BANDWIDTHS = (80, 110, 160)


def rosenberg_pulse(n_open, n_close):
    t1 = np.arange(n_open) / n_open
    t2 = np.arange(n_close) / n_close
    return np.concatenate([0.5 * (1 - np.cos(np.pi * t1)), np.cos(0.5 * np.pi * t2)])


def glottal_source(f0, rng):
    out = np.zeros(len(f0))
    pos = 0.0
    while pos < len(f0):
        i = int(pos)
        period = SR / f0[i] * (1 + 0.005 * rng.standard_normal())
        n_open = max(2, int(0.4 * period))
        n_close = max(2, int(0.16 * period))
        p = rosenberg_pulse(n_open, n_close)
        end = min(len(out), i + len(p))
        out[i:end] += p[: end - i]
        pos += period
    # differentiated flow (lip radiation)
    return np.diff(out, prepend=0.0)


def resonator(freq, bw):
    r = np.exp(-np.pi * bw / SR)
    theta = 2 * np.pi * freq / SR
    a = np.array([1.0, -2 * r * np.cos(theta), r * r])
    return np.array([a.sum()]), a


def formant_filter(x, tracks):
    y = x.copy()
    for k, bw in enumerate(BANDWIDTHS):
        zi = np.zeros(2)
        out = np.zeros_like(y)
        for start in range(0, len(y), BLOCK):
            b, a = resonator(tracks[start, k], bw)
            seg, zi = signal.lfilter(b, a, y[start:start + BLOCK], zi=zi)
            out[start:start + BLOCK] = seg
        y = out
    return y


def utterance(f0_lo, f0_hi, seed, duration=2.6):
    rng = np.random.default_rng(seed)
    n = int(duration * SR)
    t = np.arange(n) / SR

    f0 = f0_lo + (f0_hi - f0_lo) * (0.5 + 0.35 * np.sin(2 * np.pi * 0.7 * t + 0.4)
                                     + 0.15 * np.sin(2 * np.pi * 2.3 * t))
    # word layout: (start s, end s, vowel sequence); fricatives fill some gaps
    words = [(0.12, 0.70, "aie"), (0.86, 1.45, "oua"), (1.62, 2.42, "eiao")]
    fricatives = [(0.72, 0.84), (1.47, 1.60)]

    voicing = np.zeros(n)
    formants = np.zeros((n, 3))
    formants[:] = VOWELS["e"]
    for start, end, seq in words:
        i0, i1 = int(start * SR), int(end * SR)
        knots = np.linspace(i0, i1, len(seq))
        for k in range(3):
            formants[i0:i1, k] = np.interp(np.arange(i0, i1), knots,
                                           [VOWELS[v][k] for v in seq])
        ramp = int(0.03 * SR)
        env = np.ones(i1 - i0)
        env[:ramp] = np.linspace(0, 1, ramp)
        env[-ramp:] = np.linspace(1, 0, ramp)
        voicing[i0:i1] = env

    src = glottal_source(f0, rng) * voicing
    sos = signal.butter(6, 4500, "highpass", fs=SR, output="sos")
    aspiration = signal.sosfilt(sos, rng.standard_normal(n)) * 0.02 * voicing
    voiced = formant_filter(src + aspiration, formants)

    noise = np.zeros(n)
    sos_f = signal.butter(4, [3000, 7200], "bandpass", fs=SR, output="sos")
    for start, end in fricatives:
        i0, i1 = int(start * SR), int(end * SR)
        burst = signal.sosfilt(sos_f, rng.standard_normal(i1 - i0))
        noise[i0:i1] = burst * np.hanning(i1 - i0)

    x = voiced / np.max(np.abs(voiced)) * 0.5
    x += noise / np.max(np.abs(noise)) * 0.12
    x += 3e-4 * rng.standard_normal(n)
    return np.clip(x, -1, 1), f0


def write_wav(path, x):
    pcm = np.round(np.clip(x, -1, 1) * 32767).astype("<i2")
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(SR)
        w.writeframes(pcm.tobytes())


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", type=pathlib.Path, nargs="?",
                    default=pathlib.Path(__file__).resolve().parent.parent / "tests" / "data")
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    for name, lo, hi, seed in [("male", 90, 140, 11), ("female", 180, 260, 23)]:
        x, _ = utterance(lo, hi, seed)
        write_wav(args.outdir / f"{name}.wav", x)
        print(f"{name}.wav: {len(x) / SR:.2f} s")


if __name__ == "__main__":
    main()
