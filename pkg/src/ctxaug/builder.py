"""Dataset construction: bbox doubling, cropping, temporal downsampling,
source/camera train-test split, grouped validation split, composition stats.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import coco, masks
from .errors import DatasetValidationError
from .masks import Rect


@dataclass(frozen=True)
class SourceRule:
    """One test-set membership rule: a source, optionally limited to cameras."""

    source: str
    cameras: frozenset[int] | None = None

    def matches(self, img: coco.ImageRecord) -> bool:
        if img.source != self.source:
            return False
        return self.cameras is None or img.camera in self.cameras


@dataclass(frozen=True)
class SplitRules:
    test: tuple[SourceRule, ...] = ()

    def __post_init__(self):
        seen: dict[str, list[frozenset[int] | None]] = {}
        for rule in self.test:
            if rule.source not in coco.SOURCES:
                raise ValueError(f"unknown source in split rules: {rule.source!r}")
            for other in seen.get(rule.source, []):
                if other is None or rule.cameras is None or other & rule.cameras:
                    raise ValueError(
                        f"overlapping split rules for source {rule.source!r}"
                    )
            seen.setdefault(rule.source, []).append(rule.cameras)

    def to_json_obj(self) -> dict:
        return {
            "test": [
                {"source": rule.source,
                 **({"cameras": sorted(rule.cameras)} if rule.cameras is not None else {})}
                for rule in self.test
            ]
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SplitRules":
        entries = obj.get("test")
        if not isinstance(entries, list):
            raise ValueError("split rules JSON must contain a 'test' array")
        rules = []
        for entry in entries:
            cameras = entry.get("cameras")
            rules.append(SourceRule(
                source=entry["source"],
                cameras=frozenset(cameras) if cameras is not None else None,
            ))
        return cls(tuple(rules))


# Standard hold-out: all of URFall plus KULeuven cameras 1 and 2 go to test.
DEFAULT_SPLIT_RULES = SplitRules((
    SourceRule("URFall"),
    SourceRule("KULeuven", frozenset({1, 2})),
))


@dataclass
class SplitManifest:
    train: list[int] = field(default_factory=list)
    val: list[int] = field(default_factory=list)
    test: list[int] = field(default_factory=list)
    seed: int | None = None
    rules: dict | None = None

    def check_partition(self, all_ids: Iterable[int]) -> None:
        parts = [set(self.train), set(self.val), set(self.test)]
        if sum(len(p) for p in parts) != len(set().union(*parts)):
            raise ValueError("split manifest sides are not pairwise disjoint")
        if set().union(*parts) != set(all_ids):
            raise ValueError("split manifest does not cover all image ids exactly")

    def to_json_obj(self) -> dict:
        return {"train": list(self.train), "val": list(self.val),
                "test": list(self.test), "seed": self.seed, "rules": self.rules}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SplitManifest":
        return cls(train=list(obj["train"]), val=list(obj["val"]),
                   test=list(obj["test"]), seed=obj.get("seed"),
                   rules=obj.get("rules"))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_obj(), indent=2) + "\n",
                              encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SplitManifest":
        return cls.from_json_obj(json.loads(Path(path).read_text(encoding="utf-8")))


def double_bbox(r: Rect, image_hw: tuple[int, int]) -> Rect:
    """Double a rect about its center, then clamp each side to the image.

    Expansion is symmetric (ceil(w/2) per side), so the center is preserved
    whenever no clamping occurs and the output always contains the input.
    """
    h, w = image_hw
    pad_x = (r.w + 1) // 2
    pad_y = (r.h + 1) // 2
    x0 = max(0, r.x - pad_x)
    y0 = max(0, r.y - pad_y)
    x1 = min(w, r.x + r.w + pad_x)
    y1 = min(h, r.y + r.h + pad_y)
    return Rect(x0, y0, x1 - x0, y1 - y0)


def crop_record(rec: coco.ImageRecord, annotations: Sequence[coco.Annotation],
                r: Rect) -> tuple[coco.ImageRecord, list[coco.Annotation]]:
    """Crop an image record and its annotations to a window.

    Masks are cropped densely and re-encoded; bboxes are translated and
    clipped; annotations whose cropped mask is empty are dropped. Pixel data
    on disk is not touched.
    """
    if r.x < 0 or r.y < 0 or r.x + r.w > rec.width or r.y + r.h > rec.height:
        raise ValueError(f"crop rect {r} outside image {rec.id} bounds")
    new_rec = replace(rec, width=r.w, height=r.h)
    kept: list[coco.Annotation] = []
    for ann in annotations:
        cropped = masks.crop(coco.rle_decode(ann.mask), r)
        if not cropped.any():
            continue
        x, y, w, h = ann.bbox
        x0 = max(0, x - r.x)
        y0 = max(0, y - r.y)
        x1 = min(r.w, x - r.x + w)
        y1 = min(r.h, y - r.y + h)
        kept.append(replace(
            ann,
            bbox=(x0, y0, max(0, x1 - x0), max(0, y1 - y0)),
            mask=coco.rle_encode(cropped),
        ))
    return new_rec, kept


def temporal_downsample(frames: Sequence[tuple[int, float]], target_fps: float,
                        source_fps: float) -> list[tuple[int, float]]:
    """Keep the frames nearest to multiples of 1/target_fps (ties go earlier)."""
    if target_fps <= 0 or source_fps <= 0:
        raise ValueError("frame rates must be positive")
    if target_fps > source_fps:
        raise ValueError(
            f"target fps {target_fps} exceeds source fps {source_fps}"
        )
    if not frames:
        return []
    stamps = [ts for _, ts in frames]
    if any(b <= a for a, b in zip(stamps, stamps[1:])):
        raise ValueError("timestamps must be strictly increasing")

    interval = 1.0 / target_fps
    selected_positions: list[int] = []
    k = 0
    last = stamps[-1]
    while True:
        tick = k * interval
        if tick > last + 1e-9:
            break
        i = bisect.bisect_left(stamps, tick)
        if i == 0:
            best = 0
        elif i == len(stamps):
            best = len(stamps) - 1
        else:
            # tie between neighbors resolves toward the earlier frame
            best = i - 1 if tick - stamps[i - 1] <= stamps[i] - tick else i
        if not selected_positions or selected_positions[-1] != best:
            selected_positions.append(best)
        k += 1
    seen: set[int] = set()
    out = []
    for pos in selected_positions:
        if pos not in seen:
            seen.add(pos)
            out.append(frames[pos])
    return out


def split_train_test(d: coco.Dataset,
                     rules: SplitRules) -> tuple[coco.Dataset, coco.Dataset]:
    """Partition by test rules; unmatched images stay in train."""
    test_ids = set()
    for img in d.images:
        if img.source == "KULeuven" and img.camera is None:
            raise DatasetValidationError(
                f"image {img.id}: KULeuven image lacks a camera id"
            )
        if any(rule.matches(img) for rule in rules.test):
            test_ids.add(img.id)
    train_ids = [img.id for img in d.images if img.id not in test_ids]
    return coco.subset(d, train_ids), coco.subset(d, test_ids)


def group_split_validation(train: coco.Dataset, group_size: int = 5,
                           val_fraction: float = 0.10,
                           seed: int = 0) -> SplitManifest:
    """Chunk each sequence into groups of consecutive frames, shuffle the
    groups with a seeded RNG, and move whole groups to validation until the
    frame target round(val_fraction * len(train)) is met or exceeded.
    """
    if group_size < 1:
        raise ValueError(f"group size must be >= 1, got {group_size}")
    by_sequence: dict[tuple[str, str], list[coco.ImageRecord]] = {}
    for img in train.images:
        by_sequence.setdefault((img.source, img.sequence), []).append(img)

    groups: list[list[int]] = []
    for key in sorted(by_sequence):
        members = sorted(by_sequence[key], key=lambda r: r.frame)
        for i in range(0, len(members), group_size):
            groups.append([r.id for r in members[i:i + group_size]])

    target = int(round(val_fraction * len(train.images)))
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(groups))
    val_ids: set[int] = set()
    for gi in order:
        if len(val_ids) >= target:
            break
        val_ids.update(groups[gi])

    return SplitManifest(
        train=sorted(img.id for img in train.images if img.id not in val_ids),
        val=sorted(val_ids),
        test=[],
        seed=seed,
    )


def build_split(d: coco.Dataset, rules: SplitRules, seed: int,
                group_size: int = 5, val_fraction: float = 0.10) -> SplitManifest:
    """Full train/val/test manifest: rule split, then grouped validation."""
    train, test = split_train_test(d, rules)
    manifest = group_split_validation(train, group_size=group_size,
                                      val_fraction=val_fraction, seed=seed)
    manifest.test = sorted(img.id for img in test.images)
    manifest.rules = rules.to_json_obj()
    manifest.check_partition(img.id for img in d.images)
    return manifest


def stats(d: coco.Dataset) -> dict:
    """Composition report: per-source and total fall/non-fall image counts,
    plus per-category annotation counts."""
    per_source: dict[str, dict[str, int]] = {}
    total = {label: 0 for label in coco.LABELS}
    for img in d.images:
        bucket = per_source.setdefault(img.source,
                                       {label: 0 for label in coco.LABELS})
        bucket[img.label] += 1
        total[img.label] += 1
    per_category = {name: 0 for name in coco.VOCABULARY}
    for ann in d.annotations:
        per_category[d.category_name(ann.category_id)] += 1
    return {
        "per_source": per_source,
        "total": {**total, "images": len(d.images)},
        "per_category": per_category,
    }


__all__ = [
    "SourceRule", "SplitRules", "DEFAULT_SPLIT_RULES", "SplitManifest",
    "double_bbox", "crop_record", "temporal_downsample", "split_train_test",
    "group_split_validation", "build_split", "stats",
]
