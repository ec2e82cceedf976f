#!/usr/bin/env python3
"""Brute-force reference values for the complexity metrics and Spearman's rho.

Writes a JSON list of cases. Each case holds a tempo/meter description, a
frame-quantized track and a pair of samples, with expected values computed
by direct enumeration. Usage: metrics_oracle.py OUT.json
"""

import json
import math
import random
import sys

FPS = 50


def bpm_by_ticks(tpq, tempos, end_tick):
    current = 500000
    at = {}
    for t, us in tempos:
        at[t] = us
    spent, first = {}, {}
    for tick in range(end_tick):
        current = at.get(tick, current)
        spent[current] = spent.get(current, 0.0) + current / 1e6 / tpq
        first.setdefault(current, tick)
    if not spent:
        return 60e6 / at.get(0, 500000)
    best = max(spent, key=lambda us: (spent[us], -first[us]))
    return 60e6 / best


def npvi(frames):
    iois = [(b - a) / FPS for a, b in zip(frames, frames[1:])]
    if len(iois) < 2:
        return None
    terms = [abs(a - b) / ((a + b) / 2) for a, b in zip(iois, iois[1:])]
    return 100 * sum(terms) / len(terms)


def entropy(hits):
    counts = {}
    for _, drums in hits:
        for d in drums:
            counts[d] = counts.get(d, 0) + 1
    total = sum(counts.values())
    if total == 0:
        return None
    if len(counts) == 1:
        return 0.0
    h = 0.0
    for c in counts.values():
        h -= c / total * math.log2(c / total)
    return h / math.log2(len(counts))


def polyphony(hits):
    if not hits:
        return None
    return 100 * sum(1 for _, d in hits if len(d) >= 3) / len(hits)


def ranks(xs):
    return [1 + sum(y < x for y in xs) + (sum(y == x for y in xs) - 1) / 2 for x in xs]


def spearman(xs, ys):
    if len(xs) < 2:
        return None
    rx, ry = ranks(xs), ranks(ys)
    mx, my = sum(rx) / len(rx), sum(ry) / len(ry)
    sxy = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    sxx = sum((a - mx) ** 2 for a in rx)
    syy = sum((b - my) ** 2 for b in ry)
    if sxx == 0 or syy == 0:
        return None
    return sxy / math.sqrt(sxx * syy)


def random_hits(rng, n_steps, n_drums, max_poly):
    frame = rng.randint(0, 20)
    used = rng.sample(range(6), n_drums)
    hits = []
    for _ in range(n_steps):
        k = rng.randint(1, min(max_poly, n_drums))
        hits.append([frame, sorted(rng.sample(used, k))])
        frame += rng.choice([3, 5, 6, 8, 12, 13, 25])
    return hits


def case(name, tpq, tempos, sigs, end_tick, hits, xs, ys):
    frames = [f for f, _ in hits]
    return {
        "name": name,
        "ticks_per_quarter": tpq,
        "tempos": tempos,
        "time_sigs": sigs,
        "end_tick": end_tick,
        "fps": FPS,
        "hits": hits,
        "xs": xs,
        "ys": ys,
        "expected": {
            "bpm": bpm_by_ticks(tpq, tempos, end_tick),
            "npvi": npvi(frames),
            "entropy": entropy(hits),
            "polyphony_pct": polyphony(hits),
            "time_sig_changes": sum(1 for a, b in zip(sigs, sigs[1:]) if a[1:] != b[1:]),
            "spearman": spearman(xs, ys),
        },
    }


def main(out):
    rng = random.Random(20240611)
    cases = []
    # Extremes with exact answers.
    iso = [[10 + 12 * i, [i % 2]] for i in range(16)]
    cases.append(case("isochronous", 480, [[0, 500000]], [[0, 4, 4]], 480 * 32, iso,
                      [1, 2, 3, 4], [2, 4, 6, 8]))
    single = [[5 + sum(7 * (1 + j % 3) for j in range(i)), [3]] for i in range(12)]
    cases.append(case("single-drum", 96, [], [], 96 * 8, single,
                      [3, 1, 2], [-1, -3, -2]))
    pairs = [[4 * i, [0, 1] if i % 2 else [2]] for i in range(10)]
    cases.append(case("at-most-two", 480, [[0, 400000], [960, 600000]], [[0, 3, 4], [960, 3, 4]], 3000,
                      pairs, [1, 1, 2, 2, 3], [5, 5, 5, 1, 0]))
    all_dense = [[3 * i, [0, 1, 2]] for i in range(6)]
    cases.append(case("all-dense", 480, [[0, 500000], [480, 500000]], [[0, 4, 4], [100, 7, 8], [200, 4, 4]], 960,
                      all_dense, [1, 2, 3], [3, 2, 1]))

    for i in range(22):
        tpq = rng.choice([96, 192, 480, 960])
        end_tick = rng.randint(4, 40) * tpq
        n_tempo = rng.randint(0, 5)
        ticks = sorted(rng.sample(range(0, end_tick), n_tempo))
        tempos = [[t, rng.choice([400000, 428571, 500000, 545455, 600000, 750000])] for t in ticks]
        n_sig = rng.randint(0, 6)
        sig_ticks = sorted(rng.choices(range(0, end_tick), k=n_sig))
        sigs = [[t, *rng.choice([(4, 4), (3, 4), (6, 8), (7, 8), (5, 4)])] for t in sig_ticks]
        hits = random_hits(rng, rng.randint(3, 60), rng.randint(1, 6), rng.randint(1, 4))
        n = rng.randint(3, 25)
        xs = [rng.choice([rng.randint(0, 5), round(rng.uniform(-3, 3), 3)]) for _ in range(n)]
        ys = [rng.randint(0, 4) + (0.5 if rng.random() < 0.3 else 0.0) for _ in range(n)]
        if len(set(xs)) == 1 or len(set(ys)) == 1:
            ys[0], ys[-1] = -1.0, 10.0
        cases.append(case(f"random-{i:02}", tpq, tempos, sigs, end_tick, hits, xs, ys))

    with open(out, "w") as f:
        json.dump(cases, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures/metrics_cases.json")
