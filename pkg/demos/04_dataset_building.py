"""
Dataset construction: bbox doubling, downsampling, splits, stats
================================================================

Person crops keep the subject plus its surroundings by doubling the
detector bbox about its center before cropping. Video frames are thinned
to a target rate, and the train/test split holds out whole sources and
cameras so scenes never leak across sides.
"""

import numpy as np

from ctxaug.builder import (
    DEFAULT_SPLIT_RULES,
    build_split,
    double_bbox,
    group_split_validation,
    split_train_test,
    stats,
    temporal_downsample,
)
from ctxaug.coco import CATEGORY_IDS, Category, Dataset, ImageRecord
from ctxaug.masks import Rect

# Doubling a centered box grows it in place; edges clamp to the image.
print("double_bbox(10,10,20,20 @ 100x100):",
      double_bbox(Rect(10, 10, 20, 20), (100, 100)))
print("double_bbox(0,0,60,60  @ 100x100):",
      double_bbox(Rect(0, 0, 60, 60), (100, 100)))

# 60 seconds of 30 fps video thinned to one frame every two seconds.
frames = [(i, i / 30.0) for i in range(1800)]
kept = temporal_downsample(frames, target_fps=0.5, source_fps=30.0)
print(f"\ntemporal downsample: {len(frames)} frames -> {len(kept)} "
      f"(first ticks: {[t for _, t in kept[:4]]})")


def make_images():
    composition = [
        ("CAUCAFall", None, 40, 50),
        ("KULeuven", 1, 8, 20), ("KULeuven", 2, 8, 20),
        ("KULeuven", 3, 10, 30), ("KULeuven", 4, 10, 30),
        ("KULeuven", 5, 10, 30),
        ("URFall", None, 4, 12),
    ]
    images = []
    next_id = 1
    for source, camera, falls, non_falls in composition:
        for label, count in (("fall", falls), ("non-fall", non_falls)):
            for frame in range(count):
                images.append(ImageRecord(
                    id=next_id, file_name=f"{next_id}.png", width=320,
                    height=240, label=label, source=source, camera=camera,
                    sequence=f"{source}-{camera}-{label}", frame=frame,
                ))
                next_id += 1
    return images


dataset = Dataset(
    images=make_images(),
    categories=[Category(CATEGORY_IDS[n], n) for n in CATEGORY_IDS],
)

print("\ncomposition report:")
report = stats(dataset)
for source, counts in report["per_source"].items():
    print(f"  {source:10s} fall={counts['fall']:4d} "
          f"non-fall={counts['non-fall']:4d}")
print("  total:", report["total"])

# URFall and KULeuven cameras 1-2 are held out for test.
train, test = split_train_test(dataset, DEFAULT_SPLIT_RULES)
print(f"\ntrain={len(train.images)} test={len(test.images)}")

# Validation takes whole groups of five consecutive frames.
manifest = group_split_validation(train, group_size=5, val_fraction=0.10,
                                  seed=42)
print(f"grouped validation: {len(manifest.val)} of {len(train.images)} "
      "train frames")

full = build_split(dataset, DEFAULT_SPLIT_RULES, seed=42)
sizes = (len(full.train), len(full.val), len(full.test))
print("full manifest train/val/test:", sizes)
assert sum(sizes) == len(dataset.images)
