"""
Scoring predictions: F1, key-object subsets, sweep tables
=========================================================

"fall" is the positive class. Scores are computed overall and on subsets
of images containing a given key object, which is how object-specific
failure modes (beds, wheelchairs) become visible.
"""

import numpy as np

from ctxaug.coco import CATEGORY_IDS, Category, Dataset, ImageRecord, rle_encode
from ctxaug.coco import Annotation
from ctxaug.evaluation import (
    PredictionRecord,
    evaluate,
    subset_eval,
    sweep_report,
)

rng = np.random.default_rng(7)

images = []
annotations = []
ann_id = 1
for i in range(1, 41):
    images.append(ImageRecord(
        id=i, file_name=f"{i}.png", width=8, height=8,
        label="fall" if i % 3 == 0 else "non-fall",
        source="CAUCAFall", camera=None, sequence="s", frame=i,
    ))
    if i % 4 == 0:  # every fourth image has a bed
        bits = rng.random((8, 8)) < 0.5
        annotations.append(Annotation(
            id=ann_id, image_id=i, category_id=CATEGORY_IDS["bed"],
            bbox=(0, 0, 8, 8), mask=rle_encode(bits)))
        ann_id += 1

dataset = Dataset(
    images=images, annotations=annotations,
    categories=[Category(CATEGORY_IDS[n], n) for n in CATEGORY_IDS],
)

# A noisy classifier: correct 80% of the time.
preds = [
    PredictionRecord(
        img.id,
        img.label if rng.random() < 0.8
        else ("fall" if img.label == "non-fall" else "non-fall"),
    )
    for img in dataset.images
]

report = evaluate(preds, dataset)
print("overall:", report.to_json_obj())

bed_report = subset_eval(preds, dataset, "bed")
print("bed subset:", bed_report.to_json_obj())

walker_report = subset_eval(preds, dataset, "walker")
print("walker subset (none present):", walker_report.to_json_obj())

# Sweep tables collect (scenario, F1) rows; the optional second score is
# the evaluation on a test set carrying the same transforms.
table = sweep_report([
    ("F+B", 0.825),
    ("F+B:Blur11", 0.87, 0.919),
    ("F:SolidBlack+B", 0.638, 0.867),
])
print("\nsweep CSV:")
print(table.to_csv_text())
