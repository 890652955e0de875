# Copyright 2026 The brightkit Authors
#
# SPDX-License-Identifier: Apache-2.0

"""Jittered copies of a split's ground truth; --quality sets the hit rate."""

import argparse
import json
import random
from pathlib import Path


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("split")
    ap.add_argument("out")
    ap.add_argument("--quality", type=float, default=0.8)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    lines = []
    for img in json.loads(Path(args.split).read_text())["images"]:
        for h in img["instances"]:
            shift = 0.0 if rng.random() < args.quality else 40.0
            hb = [h["human_box"][0] + shift, h["human_box"][1], h["human_box"][2] + shift, h["human_box"][3]]
            lines.append(json.dumps({"image_id": img["image_id"], "human_box": hb,
                                     "object_box": h["object_box"], "class_id": h["class_id"],
                                     "score": round(rng.random(), 3)}))
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
