"""
Run-length encoded masks and the COCO store
===========================================

Masks are stored as uncompressed RLE over column-major pixel order,
always starting with a zero run. This script builds a mask by hand,
round-trips it through the codec, and saves/loads a one-image dataset.
"""

import tempfile
from pathlib import Path

import numpy as np

from ctxaug.coco import (
    CATEGORY_IDS,
    Annotation,
    Category,
    Dataset,
    ImageRecord,
    load_dataset,
    rle_decode,
    rle_encode,
    save_dataset,
)

# A 4x6 scene with a small "person" blob.
bits = np.zeros((4, 6), dtype=bool)
bits[1:3, 2:4] = True
print("dense mask:")
print(bits.astype(int))

# Encode: runs are counted down each column, left to right.
mask = rle_encode(bits)
print("\nRLE size:", mask.size)
print("RLE counts:", mask.counts)

# Decode restores the exact same grid.
assert (rle_decode(mask) == bits).all()
print("round-trip OK")

# Wrap it into a dataset with provenance and save to disk.
image = ImageRecord(
    id=1, file_name="frame_000.png", width=6, height=4,
    label="fall", source="CAUCAFall", camera=None,
    sequence="demo-seq", frame=0,
)
annotation = Annotation(
    id=1, image_id=1, category_id=CATEGORY_IDS["person"],
    bbox=(2, 1, 2, 2), mask=mask,
)
dataset = Dataset(
    images=[image],
    annotations=[annotation],
    categories=[Category(id=CATEGORY_IDS["person"], name="person")],
)

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "demo.json"
    save_dataset(dataset, path)
    print("\nsaved dataset:")
    print(path.read_text())
    reloaded = load_dataset(path)
    assert reloaded == dataset
    print("load(save(d)) == d")
