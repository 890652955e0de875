# Copyright 2026 The brightkit Authors
#
# SPDX-License-Identifier: Apache-2.0

"""Writes a small long-tailed HOI pool and its vocabulary."""

import argparse
import json
import random
from pathlib import Path

VERBS = ["ride", "feed", "hold", "wash", "hug", "carry"]
OBJECTS = ["horse", "bicycle", "dog", "person"]


def box(x, y, w, h):
    return [float(x), float(y), float(x + w), float(y + h)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="work")
    ap.add_argument("--images", type=int, default=300)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    vocab = []
    for o, obj in enumerate(OBJECTS, 1):
        for v, verb in enumerate(VERBS, 1):
            vocab.append({"class_id": len(vocab) + 1, "verb_id": v, "object_id": o,
                          "verb": verb, "object": obj})
    (out / "vocab.json").write_text(json.dumps(vocab, indent=1) + "\n")

    # Long tail over a shuffled class order, so frequent classes mix verbs and objects.
    weights = [1.0 / (1 + i) for i in range(len(vocab))]
    rng.shuffle(weights)
    images = []
    for i in range(args.images):
        classes = set(rng.choices(range(1, len(vocab) + 1), weights, k=rng.randint(1, 3)))
        inst = []
        for k, c in enumerate(sorted(classes)):
            x = 20 + 150 * k
            inst.append({"class_id": c, "human_box": box(x, 40, 60, 160),
                         "object_box": box(x + 50, 120, 70, 60), "provenance": "real"})
        images.append({"image_id": f"img{i:04d}", "file_name": f"img{i:04d}.jpg",
                       "width": 640, "height": 480, "instances": inst})
    (out / "pool.json").write_text(json.dumps({"vocabulary_ref": "vocab.json", "images": images}) + "\n")


if __name__ == "__main__":
    main()
