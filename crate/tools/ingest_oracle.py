#!/usr/bin/env python3
"""Reference ingestion: SMF bytes to the golden track and feature JSON.

Written from the file format alone so the Rust reader can be checked
against it. Usage: ingest_oracle.py SONG.mid MAPPING.toml OUT_PREFIX [FPS]
"""

import json
import math
import re
import sys
from collections import Counter, defaultdict

DRUMS = {"hihat": 0, "snare": 1, "tom1": 2, "tom2": 3, "cymbal1": 4, "cymbal2": 5}


def read_vlq(data, pos):
    value = 0
    while True:
        b = data[pos]
        pos += 1
        value = (value << 7) | (b & 0x7F)
        if not b & 0x80:
            return value, pos


def parse(data):
    assert data[:4] == b"MThd"
    hlen = int.from_bytes(data[4:8], "big")
    fmt, ntrks, division = (int.from_bytes(data[8 + 2 * i : 10 + 2 * i], "big") for i in range(3))
    assert fmt in (0, 1) and not division & 0x8000
    pos = 8 + hlen
    notes, tempos, sigs = [], [], []
    end_tick = 0
    order = 0
    for _ in range(ntrks):
        assert data[pos : pos + 4] == b"MTrk"
        length = int.from_bytes(data[pos + 4 : pos + 8], "big")
        p, stop = pos + 8, pos + 8 + length
        pos = stop
        tick, status = 0, None
        while p < stop:
            delta, p = read_vlq(data, p)
            tick += delta
            b = data[p]
            if b == 0xFF:
                kind = data[p + 1]
                n, q = read_vlq(data, p + 2)
                payload = data[q : q + n]
                p = q + n
                if kind == 0x51:
                    tempos.append((tick, order, int.from_bytes(payload, "big")))
                elif kind == 0x58:
                    sigs.append((tick, order, payload[0], 2 ** payload[1]))
                order += 1
                status = None
                if kind == 0x2F:
                    break
                continue
            if b in (0xF0, 0xF7):
                n, q = read_vlq(data, p + 1)
                p = q + n
                status = None
                continue
            if b & 0x80:
                status = b
                p += 1
            hi = status & 0xF0
            width = 1 if hi in (0xC0, 0xD0) else 2
            args = data[p : p + width]
            p += width
            if hi == 0x90 and args[1] > 0:
                notes.append((tick, status & 0x0F, args[0], args[1]))
        end_tick = max(end_tick, tick)
    tempos.sort()
    sigs.sort()
    return division, notes, [(t, us) for t, _, us in tempos], [(t, n, d) for t, _, n, d in sigs], end_tick


def tempo_at_each_tick(tempos, end_tick):
    """Tempo in force over [tick, tick + 1) for every tick, the last event at a tick winning."""
    current = 500000
    by_tick = {}
    for t, us in tempos:
        by_tick[t] = us
    out = []
    for tick in range(end_tick + 1):
        current = by_tick.get(tick, current)
        out.append(current)
    return out


def main(midi, mapping_path, prefix, fps=50):
    tpq, notes, tempos, sigs, end_tick = parse(open(midi, "rb").read())
    raw = dict(re.findall(r'^\s*"?(\d+)"?\s*=\s*"([^"]+)"', open(mapping_path).read(), re.M))
    mapping = {int(k): DRUMS[v.replace(" ", "").replace("-", "").lower()] for k, v in raw.items()}

    per_tick = tempo_at_each_tick(tempos, max(end_tick, max((n[0] for n in notes), default=0)))
    seconds = [0.0]
    for us in per_tick:
        seconds.append(seconds[-1] + us / 1e6 / tpq)

    drum_notes = [(seconds[t], note) for t, ch, note, _ in notes if ch == 9 and note in mapping]
    counts = Counter(note for _, note in drum_notes)
    keep = {}
    for note in sorted(counts):
        d = mapping[note]
        if d not in keep or counts[note] > counts[keep[d]]:
            keep[d] = note

    frames = defaultdict(set)
    for onset, note in drum_notes:
        if keep[mapping[note]] != note:
            continue
        x = onset * fps
        if abs(x - math.floor(x) - 0.5) < 1e-6:
            sys.exit(f"onset {onset} lies on a half-frame boundary")
        frames[math.floor(x + 0.5)].add(mapping[note])

    ordered = sorted(frames.items())
    n_frames = ordered[-1][0] + 1 if ordered else 0
    track = {
        "schema_version": 1,
        "fps": fps,
        "n_frames": n_frames,
        "frames": [[f, sorted(ds)] for f, ds in ordered],
    }
    with open(prefix + ".track.json", "w") as f:
        f.write(json.dumps(track, separators=(",", ":")) + "\n")

    # Features by direct definition.
    hit_frames = [f for f, _ in ordered]
    iois = [(b - a) / fps for a, b in zip(hit_frames, hit_frames[1:])]
    npvi = None
    if len(iois) >= 2:
        npvi = 100 * sum(abs(a - b) / ((a + b) / 2) for a, b in zip(iois, iois[1:])) / (len(iois) - 1)
    per_drum = Counter(d for _, ds in ordered for d in ds)
    total = sum(per_drum.values())
    k = len(per_drum)
    entropy = 0.0 if k == 1 else -sum(c / total * math.log2(c / total) for c in per_drum.values()) / math.log2(k)
    polyphony = 100 * sum(1 for _, ds in ordered if len(ds) >= 3) / len(ordered)

    time_in = defaultdict(float)
    first_seen = {}
    for tick in range(end_tick):
        us = per_tick[tick]
        time_in[us] += us / 1e6 / tpq
        first_seen.setdefault(us, tick)
    dominant = max(time_in, key=lambda us: (time_in[us], -first_seen[us]))
    changes = sum(1 for a, b in zip(sigs, sigs[1:]) if a[1:] != b[1:])

    features = {
        "bpm": 60e6 / dominant,
        "n_drums": k,
        "time_sig_changes": changes,
        "npvi": npvi,
        "entropy": entropy,
        "polyphony_pct": polyphony,
    }
    with open(prefix + ".features.json", "w") as f:
        f.write(json.dumps(features, indent=2) + "\n")


if __name__ == "__main__":
    args = sys.argv[1:]
    main(args[0], args[1], args[2], int(args[3]) if len(args) > 3 else 50)
