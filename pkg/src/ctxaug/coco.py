"""COCO-JSON dataset store with uncompressed RLE segmentation masks.

The on-disk format is a subset of COCO JSON extended with a namespaced
``ctx`` block per image carrying provenance:

    {
      "images": [{"id", "file_name", "width", "height",
                  "ctx": {"label", "source", "camera", "sequence", "frame"}}],
      "annotations": [{"id", "image_id", "category_id", "bbox": [x, y, w, h],
                       "segmentation": {"size": [h, w], "counts": [...]}}],
      "categories": [{"id", "name"}]
    }

Masks are stored in uncompressed run-length encoding over the column-major
(top-to-bottom, then left-to-right) pixel order, starting with a zero run;
the compressed string form is rejected. Category ids are fixed to 1..7 in
vocabulary order so files are byte-comparable across runs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DatasetValidationError

VOCABULARY = ("person", "chair", "table", "bed", "wheelchair", "floor", "walker")
CATEGORY_IDS = {name: i + 1 for i, name in enumerate(VOCABULARY)}
SOURCES = ("CAUCAFall", "KULeuven", "URFall")
LABELS = ("fall", "non-fall")

# Bitmask values are plain 2-D numpy bool arrays of shape (height, width).
Bitmask = np.ndarray


@dataclass(frozen=True)
class Category:
    id: int
    name: str


@dataclass(frozen=True)
class RleMask:
    """Uncompressed RLE: alternating zero/one run lengths, zero run first."""

    size: tuple[int, int]  # (height, width)
    counts: tuple[int, ...]


@dataclass(frozen=True)
class ImageRecord:
    id: int
    file_name: str
    width: int
    height: int
    label: str
    source: str
    camera: int | None
    sequence: str
    frame: int


@dataclass(frozen=True)
class Annotation:
    id: int
    image_id: int
    category_id: int
    bbox: tuple[int, int, int, int]  # x, y, w, h in pixels
    mask: RleMask


@dataclass
class Dataset:
    images: list[ImageRecord] = field(default_factory=list)
    annotations: list[Annotation] = field(default_factory=list)
    categories: list[Category] = field(default_factory=list)

    @cached_property
    def images_by_id(self) -> dict[int, ImageRecord]:
        return {img.id: img for img in self.images}

    @cached_property
    def categories_by_id(self) -> dict[int, Category]:
        return {cat.id: cat for cat in self.categories}

    @cached_property
    def annotations_by_image(self) -> dict[int, list[Annotation]]:
        grouped: dict[int, list[Annotation]] = {img.id: [] for img in self.images}
        for ann in self.annotations:
            grouped.setdefault(ann.image_id, []).append(ann)
        return grouped

    def category_name(self, category_id: int) -> str:
        return self.categories_by_id[category_id].name


def rle_decode(mask: RleMask) -> Bitmask:
    """Expand an RLE mask into a dense (height, width) bool array."""
    h, w = mask.size
    counts = np.asarray(mask.counts, dtype=np.int64)
    if counts.size and counts.min() < 0:
        raise ValueError(f"negative run length in RLE counts: {mask.counts}")
    if counts.sum() != h * w:
        raise ValueError(
            f"RLE counts sum to {int(counts.sum())}, expected {h}x{w}={h * w}"
        )
    values = np.zeros(counts.size, dtype=bool)
    values[1::2] = True
    flat = np.repeat(values, counts)
    return flat.reshape((h, w), order="F")


def rle_encode(bits: Bitmask) -> RleMask:
    """Encode a dense bool mask into canonical uncompressed RLE.

    The output never contains interior zero runs; a leading 0 appears only
    when the first column-major pixel is set.
    """
    b = np.asarray(bits)
    if b.ndim != 2:
        raise ValueError(f"expected a 2-D mask, got shape {b.shape}")
    b = b.astype(bool)
    h, w = b.shape
    flat = b.ravel(order="F")
    if flat.size == 0:
        return RleMask((h, w), ())
    boundaries = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    starts = np.concatenate(([0], boundaries, [flat.size]))
    counts = np.diff(starts).tolist()
    if flat[0]:
        counts = [0] + counts
    return RleMask((h, w), tuple(int(c) for c in counts))


def _require(condition: bool, message: str, problems: list[str]) -> bool:
    if not condition:
        problems.append(message)
    return condition


def validate_dataset(d: Dataset) -> list[str]:
    """Return a list of invariant violations, empty when the dataset is valid."""
    problems: list[str] = []

    seen_names: set[str] = set()
    for cat in d.categories:
        if cat.name not in CATEGORY_IDS:
            problems.append(
                f"category {cat.id}: unknown name {cat.name!r}; "
                f"expected one of {', '.join(VOCABULARY)}"
            )
            continue
        if cat.name in seen_names:
            problems.append(f"category {cat.id}: duplicate name {cat.name!r}")
        seen_names.add(cat.name)
        expected = CATEGORY_IDS[cat.name]
        _require(
            cat.id == expected,
            f"category {cat.name!r}: id {cat.id} does not match the fixed "
            f"vocabulary id {expected}",
            problems,
        )

    image_ids: set[int] = set()
    seq_keys: set[tuple[str, str, int]] = set()
    for img in d.images:
        if img.id in image_ids:
            problems.append(f"image {img.id}: duplicate id")
        image_ids.add(img.id)
        _require(img.width > 0 and img.height > 0,
                 f"image {img.id}: non-positive dimensions "
                 f"{img.width}x{img.height}", problems)
        _require(img.label in LABELS,
                 f"image {img.id}: unknown label {img.label!r}", problems)
        if not _require(img.source in SOURCES,
                        f"image {img.id}: unknown source {img.source!r}",
                        problems):
            continue
        if img.source == "KULeuven":
            _require(img.camera is not None,
                     f"image {img.id}: KULeuven image lacks a camera id",
                     problems)
        else:
            _require(img.camera is None,
                     f"image {img.id}: camera id set for non-KULeuven source "
                     f"{img.source!r}", problems)
        key = (img.source, img.sequence, img.frame)
        if key in seq_keys:
            problems.append(
                f"image {img.id}: duplicate (sequence, frame) "
                f"({img.sequence!r}, {img.frame}) within source {img.source!r}"
            )
        seq_keys.add(key)

    images = {img.id: img for img in d.images}
    category_ids = {cat.id for cat in d.categories}
    ann_ids: set[int] = set()
    for ann in d.annotations:
        if ann.id in ann_ids:
            problems.append(f"annotation {ann.id}: duplicate id")
        ann_ids.add(ann.id)
        _require(ann.category_id in category_ids,
                 f"annotation {ann.id}: unknown category id {ann.category_id}",
                 problems)
        if not _require(ann.image_id in images,
                        f"annotation {ann.id}: unknown image id {ann.image_id}",
                        problems):
            continue
        img = images[ann.image_id]
        if any(c < 0 for c in ann.mask.counts):
            problems.append(f"annotation {ann.id}: negative RLE run length")
            continue
        total = sum(ann.mask.counts)
        mh, mw = ann.mask.size
        _require(total == mh * mw,
                 f"annotation {ann.id}: RLE counts sum to {total}, expected "
                 f"{mh}x{mw}={mh * mw}", problems)
        _require((mh, mw) == (img.height, img.width),
                 f"annotation {ann.id}: mask size {mh}x{mw} does not match "
                 f"image {img.id} size {img.height}x{img.width}", problems)
        x, y, w, h = ann.bbox
        _require(
            x >= 0 and y >= 0 and w >= 0 and h >= 0
            and x + w <= img.width and y + h <= img.height,
            f"annotation {ann.id}: bbox {ann.bbox} outside image {img.id} "
            f"bounds {img.width}x{img.height}", problems)

    return problems


def _parse_int(obj, key: str, where: str) -> int:
    value = obj.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise DatasetValidationError(f"{where}: field {key!r} must be an integer, got {value!r}")
    return value


def _parse_str(obj, key: str, where: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str):
        raise DatasetValidationError(f"{where}: field {key!r} must be a string, got {value!r}")
    return value


def _parse_image(obj) -> ImageRecord:
    where = f"image {obj.get('id', '?')}"
    if not isinstance(obj, dict):
        raise DatasetValidationError(f"{where}: image entry must be an object")
    ctx = obj.get("ctx")
    if not isinstance(ctx, dict):
        raise DatasetValidationError(f"{where}: missing 'ctx' provenance block")
    camera = ctx.get("camera")
    if camera is not None and (isinstance(camera, bool) or not isinstance(camera, int)):
        raise DatasetValidationError(f"{where}: ctx.camera must be an integer or null")
    return ImageRecord(
        id=_parse_int(obj, "id", where),
        file_name=_parse_str(obj, "file_name", where),
        width=_parse_int(obj, "width", where),
        height=_parse_int(obj, "height", where),
        label=_parse_str(ctx, "label", where),
        source=_parse_str(ctx, "source", where),
        camera=camera,
        sequence=_parse_str(ctx, "sequence", where),
        frame=_parse_int(ctx, "frame", where),
    )


def _parse_annotation(obj) -> Annotation:
    where = f"annotation {obj.get('id', '?')}"
    if not isinstance(obj, dict):
        raise DatasetValidationError(f"{where}: annotation entry must be an object")
    bbox = obj.get("bbox")
    if (not isinstance(bbox, list) or len(bbox) != 4
            or any(isinstance(v, bool) or not isinstance(v, int) for v in bbox)):
        raise DatasetValidationError(
            f"{where}: bbox must be a list of 4 integers [x, y, w, h], got {bbox!r}"
        )
    seg = obj.get("segmentation")
    if not isinstance(seg, dict):
        raise DatasetValidationError(f"{where}: segmentation must be an object with size/counts")
    counts = seg.get("counts")
    if isinstance(counts, str):
        raise DatasetValidationError(
            f"{where}: compressed RLE (string counts) is not supported; "
            "use the uncompressed integer counts array"
        )
    if not isinstance(counts, list) or any(
            isinstance(c, bool) or not isinstance(c, int) for c in counts):
        raise DatasetValidationError(f"{where}: RLE counts must be a list of integers")
    size = seg.get("size")
    if (not isinstance(size, list) or len(size) != 2
            or any(isinstance(v, bool) or not isinstance(v, int) for v in size)):
        raise DatasetValidationError(f"{where}: segmentation size must be [height, width]")
    return Annotation(
        id=_parse_int(obj, "id", where),
        image_id=_parse_int(obj, "image_id", where),
        category_id=_parse_int(obj, "category_id", where),
        bbox=tuple(bbox),
        mask=RleMask(size=(size[0], size[1]), counts=tuple(counts)),
    )


def load_dataset(path: str | Path) -> Dataset:
    """Load and validate a dataset file; raise DatasetValidationError on any violation."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DatasetValidationError(f"{path}: malformed JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise DatasetValidationError(f"{path}: top level must be a JSON object")
    for key in ("images", "annotations", "categories"):
        if not isinstance(raw.get(key), list):
            raise DatasetValidationError(f"{path}: missing or non-array {key!r} field")

    categories = []
    for obj in raw["categories"]:
        where = f"category {obj.get('id', '?') if isinstance(obj, dict) else '?'}"
        if not isinstance(obj, dict):
            raise DatasetValidationError(f"{where}: category entry must be an object")
        categories.append(Category(id=_parse_int(obj, "id", where),
                                   name=_parse_str(obj, "name", where)))
    dataset = Dataset(
        images=[_parse_image(obj) for obj in raw["images"]],
        annotations=[_parse_annotation(obj) for obj in raw["annotations"]],
        categories=categories,
    )
    problems = validate_dataset(dataset)
    if problems:
        raise DatasetValidationError(problems)
    return dataset


def save_dataset(d: Dataset, path: str | Path) -> None:
    """Serialize a dataset; load_dataset(save_dataset(d)) is semantically d."""
    doc = {
        "images": [
            {
                "id": img.id,
                "file_name": img.file_name,
                "width": img.width,
                "height": img.height,
                "ctx": {
                    "label": img.label,
                    "source": img.source,
                    **({"camera": img.camera} if img.camera is not None else {}),
                    "sequence": img.sequence,
                    "frame": img.frame,
                },
            }
            for img in d.images
        ],
        "annotations": [
            {
                "id": ann.id,
                "image_id": ann.image_id,
                "category_id": ann.category_id,
                "bbox": list(ann.bbox),
                "segmentation": {
                    "size": list(ann.mask.size),
                    "counts": list(ann.mask.counts),
                },
            }
            for ann in d.annotations
        ],
        "categories": [{"id": cat.id, "name": cat.name} for cat in d.categories],
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def category_masks(d: Dataset, image_id: int) -> dict[str, list[Bitmask]]:
    """Decode all masks of one image, grouped by category name."""
    grouped: dict[str, list[Bitmask]] = {}
    for ann in d.annotations_by_image.get(image_id, []):
        name = d.category_name(ann.category_id)
        grouped.setdefault(name, []).append(rle_decode(ann.mask))
    return grouped


def subset(d: Dataset, image_ids) -> Dataset:
    """New dataset restricted to the given image ids (categories kept)."""
    keep = set(image_ids)
    return Dataset(
        images=[img for img in d.images if img.id in keep],
        annotations=[ann for ann in d.annotations if ann.image_id in keep],
        categories=list(d.categories),
    )


def with_images(d: Dataset, images: list[ImageRecord],
                annotations: list[Annotation]) -> Dataset:
    """New dataset with replaced image/annotation lists, same category table."""
    return Dataset(images=images, annotations=annotations,
                   categories=list(d.categories))


__all__ = [
    "VOCABULARY", "CATEGORY_IDS", "SOURCES", "LABELS",
    "Bitmask", "Category", "RleMask", "ImageRecord", "Annotation", "Dataset",
    "rle_decode", "rle_encode", "validate_dataset", "load_dataset",
    "save_dataset", "category_masks", "subset", "with_images",
]
