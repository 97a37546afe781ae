"""Shared fixture builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from ctxaug.coco import (
    CATEGORY_IDS,
    VOCABULARY,
    Annotation,
    Category,
    Dataset,
    ImageRecord,
    rle_encode,
)


def full_category_table() -> list[Category]:
    return [Category(id=CATEGORY_IDS[name], name=name) for name in VOCABULARY]


def make_image(image_id: int, *, width: int = 64, height: int = 48,
               label: str = "fall", source: str = "CAUCAFall",
               camera: int | None = None, sequence: str = "seq-0",
               frame: int = 0) -> ImageRecord:
    return ImageRecord(
        id=image_id, file_name=f"img_{image_id:06d}.png", width=width,
        height=height, label=label, source=source, camera=camera,
        sequence=sequence, frame=frame,
    )


def make_annotation(ann_id: int, image_id: int, category: str,
                    bits: np.ndarray,
                    bbox: tuple[int, int, int, int] | None = None) -> Annotation:
    if bbox is None:
        ys, xs = np.nonzero(bits)
        if len(ys):
            bbox = (int(xs.min()), int(ys.min()),
                    int(xs.max() - xs.min() + 1), int(ys.max() - ys.min() + 1))
        else:
            bbox = (0, 0, 0, 0)
    return Annotation(id=ann_id, image_id=image_id,
                      category_id=CATEGORY_IDS[category], bbox=bbox,
                      mask=rle_encode(bits))


def random_mask(rng: np.random.Generator, height: int, width: int,
                density: float | None = None) -> np.ndarray:
    if density is None:
        density = float(rng.choice([0.0, 0.1, 0.5, 0.9, 1.0]))
    return rng.random((height, width)) < density


def random_image(rng: np.random.Generator, height: int, width: int) -> np.ndarray:
    return rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8)


# Source composition of the merged corpus: (source, camera, falls, non_falls).
COMPOSITION = (
    ("CAUCAFall", None, 1538, 1575),
    ("KULeuven", 1, 142, 388),
    ("KULeuven", 2, 142, 388),
    ("KULeuven", 3, 143, 391),
    ("KULeuven", 4, 143, 391),
    ("KULeuven", 5, 143, 392),
    ("URFall", None, 42, 275),
)


def composition_dataset() -> Dataset:
    """Manifest-only dataset replicating the published corpus composition."""
    images = []
    next_id = 1
    for source, camera, falls, non_falls in COMPOSITION:
        for label, count in (("fall", falls), ("non-fall", non_falls)):
            sequence = f"{source.lower()}-c{camera or 0}-{label}"
            for frame in range(count):
                images.append(make_image(
                    next_id, label=label, source=source, camera=camera,
                    sequence=sequence, frame=frame,
                ))
                next_id += 1
    return Dataset(images=images, annotations=[],
                   categories=full_category_table())


@pytest.fixture(scope="session")
def corpus_dataset() -> Dataset:
    return composition_dataset()


def png_dataset(root, n_images: int = 4, width: int = 32, height: int = 24,
                rng_seed: int = 99):
    """Write a small dataset with real PNG pixels; returns the JSON path."""
    from PIL import Image

    from ctxaug.coco import save_dataset

    rng = np.random.default_rng(rng_seed)
    images, annotations = [], []
    ann_id = 1
    for i in range(1, n_images + 1):
        arr = random_image(rng, height, width)
        Image.fromarray(arr, mode="RGB").save(root / f"img_{i:06d}.png")
        images.append(make_image(i, width=width, height=height,
                                 sequence="s", frame=i))
        person = np.zeros((height, width), dtype=bool)
        y0 = int(rng.integers(0, height // 2))
        x0 = int(rng.integers(0, width // 2))
        person[y0:y0 + height // 2, x0:x0 + width // 2] = True
        annotations.append(make_annotation(ann_id, i, "person", person))
        ann_id += 1
        if i % 2 == 0:
            bed = np.zeros((height, width), dtype=bool)
            bed[:height // 3, :width // 3] = True
            annotations.append(make_annotation(ann_id, i, "bed", bed))
            ann_id += 1
    dataset = Dataset(images=images, annotations=annotations,
                      categories=full_category_table())
    path = root / "dataset.json"
    save_dataset(dataset, path)
    return path


def tree_bytes(root) -> dict[str, bytes]:
    """Map of relative path -> file bytes for a whole directory tree."""
    return {
        p.relative_to(root).as_posix(): p.read_bytes()
        for p in sorted(root.rglob("*")) if p.is_file()
    }
