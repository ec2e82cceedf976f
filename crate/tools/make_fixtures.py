#!/usr/bin/env python3
"""Write the hand-built SMF fixture used by the ingestion golden tests.

Format 1, 480 ticks per quarter, three tracks:
  0  conductor: tempo and time-signature changes
  1  drums on channel 10 (index 9), written with running status
  2  a piano part on channel 1 that ingestion must ignore
"""

import struct
import sys
from pathlib import Path

TPQ = 480
DRUM_OFFSET = 16  # keeps every onset clear of half-frame boundaries


def vlq(n):
    out = [n & 0x7F]
    n >>= 7
    while n:
        out.append((n & 0x7F) | 0x80)
        n >>= 7
    return bytes(reversed(out))


def chunk(tag, body):
    return tag + struct.pack(">I", len(body)) + body


def track_bytes(events, running_status=True):
    """events: (tick, bytes) sorted by tick; channel messages may drop a repeated status."""
    out = bytearray()
    now = 0
    last_status = None
    for tick, data in events:
        out += vlq(tick - now)
        now = tick
        status = data[0]
        if running_status and status < 0xF0 and status == last_status:
            out += data[1:]
        else:
            out += data
        last_status = status if status < 0xF0 else None
    return bytes(out)


def meta(kind, payload):
    return bytes([0xFF, kind]) + vlq(len(payload)) + payload


def tempo(us):
    return meta(0x51, us.to_bytes(3, "big"))


def time_sig(num, den):
    return meta(0x58, bytes([num, den.bit_length() - 1, 24, 8]))


def drum_events():
    hits = []  # (tick, note, velocity)
    bar4 = 4 * TPQ
    bar3 = 3 * TPQ
    section2 = 4 * bar4  # 4 bars of 4/4, then 3 bars of 3/4

    # Closed hi-hat on every eighth: 32 in 4/4, 18 in 3/4 -> 50 events.
    for k in range(50):
        hits.append((k * TPQ // 2, 42, 70 + (k % 4) * 10))
    # Open hi-hat three times, on sixteenth offbeats.
    for tick in (7 * 240 + 120, 15 * 240 + 120, 37 * 240 + 120):
        hits.append((tick, 46, 100))
    # Snare backbeats in 4/4, beats 2 and 3 in 3/4.
    for bar in range(4):
        for beat in (1, 3):
            hits.append((bar * bar4 + beat * TPQ, 38, 110))
    for bar in range(3):
        for beat in (1, 2):
            hits.append((section2 + bar * bar3 + beat * TPQ, 38, 105))
    # Snare downbeat on the meter change makes a three-drum frame.
    hits.append((section2, 38, 120))
    # A flam: two snare hits 4 ticks apart merge into one frame.
    hits.append((2 * bar4 + 2 * TPQ + 120, 38, 60))
    hits.append((2 * bar4 + 2 * TPQ + 124, 38, 90))
    # Side-stick on the snare, a minority articulation.
    hits.append((bar4 + 3 * TPQ + 360, 40, 50))
    hits.append((3 * bar4 + 360, 40, 50))
    # Tom fill in bar 4.
    fill = 3 * bar4 + 2 * TPQ
    for i, note in enumerate((48, 48, 45, 45, 48, 45)):
        hits.append((fill + i * 120 + 60, note, 95))
    hits.append((fill + 6 * 120 + 60, 50, 95))
    # Crashes and rides.
    hits.append((0, 49, 120))
    hits.append((section2, 49, 120))
    for k in range(6):
        hits.append((section2 + bar3 + k * TPQ // 2 + 60, 51, 85))
    hits.append((section2 + 2 * bar3 + 2 * TPQ + 180, 57, 85))
    # Pedal hi-hat, left unmapped by the fixture mapping.
    for k in range(4):
        hits.append((k * bar4 + 3 * TPQ + 200, 44, 64))

    events = []
    for i, (tick, note, vel) in enumerate(hits):
        tick += DRUM_OFFSET
        events.append((tick, bytes([0x99, note, vel])))
        if i % 2:
            events.append((tick + 60, bytes([0x89, note, 64])))
        else:
            events.append((tick + 60, bytes([0x99, note, 0])))
    events.sort(key=lambda e: (e[0], e[1][0] == 0x99 and e[1][2] > 0))
    events.insert(0, (0, meta(0x03, b"Drums")))
    events.insert(1, (0, bytes([0xF0]) + vlq(3) + b"\x7e\x7f\xf7"))
    end = max(t for t, _ in events)
    events.append((end, meta(0x2F, b"")))
    return events


def conductor():
    bar4 = 4 * TPQ
    section2 = 4 * bar4
    events = [
        (0, time_sig(4, 4)),
        (0, tempo(500000)),
        (section2, tempo(600000)),
        (section2, time_sig(3, 4)),
        (section2 + 3 * TPQ, time_sig(3, 4)),
        (section2 + 9 * TPQ, time_sig(4, 4)),
        (section2 + 9 * TPQ, tempo(500000)),
        (section2 + 9 * TPQ + 4 * TPQ, meta(0x2F, b"")),
    ]
    return events


def piano():
    events = []
    for k in range(8):
        tick = k * TPQ
        events.append((tick, bytes([0x90, 60 + k, 80])))
        events.append((tick + 400, bytes([0x80, 60 + k, 0])))
    events.sort(key=lambda e: e[0])
    events.append((8 * TPQ, meta(0x2F, b"")))
    return events


def main(out_dir):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    header = chunk(b"MThd", struct.pack(">HHH", 1, 3, TPQ))
    body = (
        header
        + chunk(b"MTrk", track_bytes(conductor()))
        + chunk(b"MTrk", track_bytes(drum_events()))
        + chunk(b"MTrk", track_bytes(piano(), running_status=False))
    )
    (out_dir / "groove.mid").write_bytes(body)
    (out_dir / "groove-mapping.toml").write_text(
        "[mapping]\n"
        '38 = "snare"\n'
        '40 = "snare"\n'
        '42 = "hi-hat"\n'
        '46 = "hi-hat"\n'
        '45 = "tom 2"\n'
        '48 = "tom 1"\n'
        '50 = "tom 1"\n'
        '49 = "cymbal 1"\n'
        '51 = "cymbal 2"\n'
        '57 = "cymbal 2"\n'
    )


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures")
