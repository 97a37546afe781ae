"""Score classifier predictions: confusion counts, F1, key-object subsets,
and kernel-sweep report tables.

"fall" is the positive class throughout; F1 is asymmetric in the class
choice, so this is part of the metric contract.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import coco
from .errors import PredictionError
from .scenario import parse_scenario

POSITIVE_LABEL = "fall"


@dataclass(frozen=True)
class PredictionRecord:
    image_id: int
    label: str
    score: float | None = None


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class EvalReport:
    counts: ConfusionCounts
    f1: float | None
    degenerate: bool
    n: int
    category: str | None = None
    empty_subset: bool = False

    def to_json_obj(self) -> dict:
        return {
            "n": self.n,
            "counts": {"tp": self.counts.tp, "fp": self.counts.fp,
                       "tn": self.counts.tn, "fn": self.counts.fn},
            "f1": self.f1,
            "degenerate": self.degenerate,
            "positive_class": POSITIVE_LABEL,
            **({"category": self.category} if self.category is not None else {}),
            **({"empty_subset": True} if self.empty_subset else {}),
        }


def confusion(preds: Sequence[PredictionRecord],
              d: coco.Dataset) -> ConfusionCounts:
    """Tally tp/fp/tn/fn over the dataset; one prediction per image required."""
    by_id: dict[int, PredictionRecord] = {}
    for p in preds:
        if p.image_id in by_id:
            raise PredictionError(f"duplicate prediction for image {p.image_id}")
        if p.image_id not in d.images_by_id:
            raise PredictionError(f"prediction for unknown image {p.image_id}")
        if p.label not in coco.LABELS:
            raise PredictionError(
                f"prediction for image {p.image_id}: unknown label {p.label!r}"
            )
        by_id[p.image_id] = p
    missing = [img.id for img in d.images if img.id not in by_id]
    if missing:
        raise PredictionError(
            f"missing predictions for {len(missing)} image(s), "
            f"first ids: {missing[:5]}"
        )
    tp = fp = tn = fn = 0
    for img in d.images:
        actual_pos = img.label == POSITIVE_LABEL
        predicted_pos = by_id[img.id].label == POSITIVE_LABEL
        if actual_pos and predicted_pos:
            tp += 1
        elif actual_pos:
            fn += 1
        elif predicted_pos:
            fp += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def f1(c: ConfusionCounts) -> float:
    """F1 = 2tp / (2tp + fp + fn); 0.0 by convention when the denominator is 0."""
    denominator = 2 * c.tp + c.fp + c.fn
    if denominator == 0:
        return 0.0
    return 2 * c.tp / denominator


def evaluate(preds: Sequence[PredictionRecord], d: coco.Dataset) -> EvalReport:
    counts = confusion(preds, d)
    degenerate = (2 * counts.tp + counts.fp + counts.fn) == 0
    return EvalReport(counts=counts, f1=f1(counts), degenerate=degenerate,
                      n=counts.total)


def subset_eval(preds: Sequence[PredictionRecord], d: coco.Dataset,
                category: str) -> EvalReport:
    """Evaluate only images containing at least one annotation of a category.

    An empty subset is reported distinctly (f1 None, empty_subset flag), not
    as a zero score.
    """
    if category not in coco.CATEGORY_IDS:
        raise ValueError(f"unknown category {category!r}")
    category_id = coco.CATEGORY_IDS[category]
    keep = {ann.image_id for ann in d.annotations
            if ann.category_id == category_id}
    if not keep:
        return EvalReport(counts=ConfusionCounts(0, 0, 0, 0), f1=None,
                          degenerate=False, n=0, category=category,
                          empty_subset=True)
    sub = coco.subset(d, keep)
    sub_preds = [p for p in preds if p.image_id in keep]
    report = evaluate(sub_preds, sub)
    return EvalReport(counts=report.counts, f1=report.f1,
                      degenerate=report.degenerate, n=report.n,
                      category=category)


# -- prediction CSV -------------------------------------------------------

def load_predictions_csv(path: str | Path) -> list[PredictionRecord]:
    """Read `image_id,pred_label[,score]` CSV (UTF-8, header required)."""
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["image_id", "pred_label"]:
            raise PredictionError(
                f"{path}: expected header 'image_id,pred_label[,score]', "
                f"got {header!r}"
            )
        has_score = len(header) >= 3
        records = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < 2:
                raise PredictionError(f"{path}:{lineno}: expected at least 2 fields")
            score = None
            if has_score and len(row) >= 3 and row[2].strip():
                score = float(row[2])
                if not 0.0 <= score <= 1.0:
                    raise PredictionError(
                        f"{path}:{lineno}: score {score} outside [0, 1]"
                    )
            records.append(PredictionRecord(image_id=int(row[0]),
                                            label=row[1].strip(), score=score))
    return records


def save_predictions_csv(preds: Sequence[PredictionRecord],
                         path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["image_id", "pred_label", "score"])
        for p in preds:
            writer.writerow([p.image_id, p.label,
                             "" if p.score is None else repr(p.score)])


# -- sweep report ---------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    scenario: str
    f1: float
    matched_f1: float | None = None


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]

    def to_csv_text(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["scenario", "f1", "matched_f1"])
        for row in self.rows:
            writer.writerow([
                row.scenario,
                repr(row.f1),
                "" if row.matched_f1 is None else repr(row.matched_f1),
            ])
        return out.getvalue()

    @classmethod
    def from_csv_text(cls, text: str) -> "SweepReport":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header != ["scenario", "f1", "matched_f1"]:
            raise ValueError(f"unexpected sweep CSV header: {header!r}")
        rows = []
        for row in reader:
            if not row:
                continue
            rows.append(SweepRow(
                scenario=row[0],
                f1=float(row[1]),
                matched_f1=float(row[2]) if len(row) > 2 and row[2] else None,
            ))
        return cls(tuple(rows))

    def to_json_obj(self) -> dict:
        return {"rows": [
            {"scenario": r.scenario, "f1": r.f1, "matched_f1": r.matched_f1}
            for r in self.rows
        ]}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "SweepReport":
        return cls(tuple(
            SweepRow(scenario=r["scenario"], f1=r["f1"],
                     matched_f1=r.get("matched_f1"))
            for r in obj["rows"]
        ))

    def save(self, csv_path: str | Path | None = None,
             json_path: str | Path | None = None) -> None:
        if csv_path is not None:
            Path(csv_path).write_text(self.to_csv_text(), encoding="utf-8")
        if json_path is not None:
            Path(json_path).write_text(
                json.dumps(self.to_json_obj(), indent=2) + "\n",
                encoding="utf-8")


def sweep_report(rows: Sequence[tuple]) -> SweepReport:
    """Build a report from (scenario, f1[, matched_f1]) tuples.

    Every scenario string must parse; unparsable ones are rejected here so
    report files never carry malformed headers.
    """
    built = []
    for row in rows:
        scenario_text, score, *rest = row
        parse_scenario(scenario_text)
        matched = rest[0] if rest else None
        built.append(SweepRow(scenario=scenario_text, f1=float(score),
                              matched_f1=None if matched is None else float(matched)))
    return SweepReport(tuple(built))


__all__ = [
    "POSITIVE_LABEL", "PredictionRecord", "ConfusionCounts", "EvalReport",
    "confusion", "f1", "evaluate", "subset_eval",
    "load_predictions_csv", "save_predictions_csv",
    "SweepRow", "SweepReport", "sweep_report",
]
