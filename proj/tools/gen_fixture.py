#!/usr/bin/env python3
"""Writes the bundled test fixture into tests/data/.

corpus.jsonl     500 labeled tweets, most inside two event windows with
                 tight spatial hotspots, the rest scattered.
events.jsonl     the two event windows.
counties.geojson a 4x4 grid of square counties over the first event area.

Output is a pure function of SEED.
"""

import argparse
import json
import math
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

SEED = 20140809
N_TWEETS = 500
EARTH_R = 6_371_000.0

PHRASES = {
    "collective_force": ["tear gas", "riot police", "rubber bullets", "crowd clashes", "looting", "smoke bombs"],
    "collective_peace": ["peaceful march", "hands up", "candle vigil", "sit in", "rally downtown", "chanting together"],
    "singular_force": ["threw a bottle", "punched", "smashed window", "kicked", "fought back", "swung at"],
    "singular_peace": ["praying alone", "holding my sign", "quietly standing", "wrote letter", "my own prayer",
                       "reading names"],
}
FILLER = ["the", "at", "now", "today", "lol", "so", "this", "is", "here", "just", "coffee", "traffic", "weather",
          "watching", "news", "omg", "wow", "people", "street", "night", "#Ferguson", "@reporter", "#HongKong",
          "http://t.co/abc", "!", ",", "..."]

EVENTS = [
    {"label": "ferguson", "lat": 38.7442, "lon": -90.3054, "radius_m": 3000.0,
     "start": "2014-08-10T00:00:00Z", "end": "2014-08-12T00:00:00Z"},
    {"label": "hongkong", "lat": 22.2800, "lon": 114.1600, "radius_m": 3000.0,
     "start": "2014-09-28T00:00:00Z", "end": "2014-09-30T00:00:00Z"},
]


def parse_ts(s):
    return datetime.strptime(s, "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)


def fmt_ts(t):
    return t.strftime("%Y-%m-%dT%H:%M:%SZ")


def offset(lat, lon, north_m, east_m):
    dlat = north_m / EARTH_R * 180.0 / math.pi
    dlon = east_m / (EARTH_R * math.cos(math.radians(lat))) * 180.0 / math.pi
    return round(lat + dlat, 6), round(lon + dlon, 6)


def draw_labels(rng):
    r = rng.random()
    if r < 0.36:
        return []
    modes = list(PHRASES)
    labels = [rng.choice(modes)]
    if rng.random() < 0.12:
        other = rng.choice(modes)
        if other not in labels:
            labels.append(other)
    return labels


def draw_text(rng, labels):
    words = []
    for mode in labels:
        words += rng.sample(PHRASES[mode], rng.randint(1, 3))
    words += rng.sample(FILLER, rng.randint(3, 7))
    rng.shuffle(words)
    text = " ".join(words)
    if rng.random() < 0.3:
        text = text.upper()
    return text


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "data"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)

    # Hotspots: a few per event, each active during one hour, spread ~40 m.
    hotspots = []
    for ev in EVENTS:
        start = parse_ts(ev["start"])
        for h in range(4):
            lat, lon = offset(ev["lat"], ev["lon"], rng.uniform(-1500, 1500), rng.uniform(-1500, 1500))
            hour = start + timedelta(hours=2 + 6 * h)
            hotspots.append((lat, lon, hour))

    tweets = []
    for i in range(N_TWEETS):
        labels = draw_labels(rng)
        kind = rng.random()
        if kind < 0.55:
            lat0, lon0, hour = rng.choice(hotspots)
            lat, lon = offset(lat0, lon0, rng.gauss(0, 40), rng.gauss(0, 40))
            ts = hour + timedelta(seconds=rng.randrange(3600))
        elif kind < 0.8:
            ev = rng.choice(EVENTS)
            lat, lon = offset(ev["lat"], ev["lon"], rng.uniform(-2000, 2000), rng.uniform(-2000, 2000))
            ts = parse_ts(ev["start"]) + timedelta(seconds=rng.randrange(48 * 3600))
        else:
            lat, lon = round(rng.uniform(25.0, 48.0), 6), round(rng.uniform(-124.0, -70.0), 6)
            ts = parse_ts("2014-08-09T00:00:00Z") + timedelta(seconds=rng.randrange(60 * 86400))
        tweets.append({"id": f"fx{i:04d}", "ts": fmt_ts(ts), "lat": lat, "lon": lon,
                       "text": draw_text(rng, labels), "labels": labels})

    with open(out / "corpus.jsonl", "w") as f:
        for t in tweets:
            f.write(json.dumps(t, ensure_ascii=False) + "\n")
    with open(out / "events.jsonl", "w") as f:
        for ev in EVENTS:
            f.write(json.dumps(ev) + "\n")

    # 4x4 grid of 0.02-degree squares centered on the first event.
    ev = EVENTS[0]
    size = 0.02
    lat0, lon0 = ev["lat"] - 2 * size, ev["lon"] - 2 * size
    features = []
    for r in range(4):
        for c in range(4):
            a, b = round(lat0 + r * size, 6), round(lon0 + c * size, 6)
            a2, b2 = round(a + size, 6), round(b + size, 6)
            ring = [[b, a], [b2, a], [b2, a2], [b, a2], [b, a]]
            features.append({"type": "Feature", "properties": {"county_id": f"grid-{r}-{c}"},
                             "geometry": {"type": "Polygon", "coordinates": [ring]}})
    with open(out / "counties.geojson", "w") as f:
        json.dump({"type": "FeatureCollection", "features": features}, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
