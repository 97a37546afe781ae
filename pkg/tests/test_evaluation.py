import numpy as np
import pytest

from ctxaug import coco
from ctxaug.errors import PredictionError
from ctxaug.evaluation import (
    ConfusionCounts,
    PredictionRecord,
    SweepReport,
    SweepRow,
    confusion,
    evaluate,
    f1,
    load_predictions_csv,
    save_predictions_csv,
    subset_eval,
    sweep_report,
)

from conftest import full_category_table, make_annotation, make_image, random_mask


def brute_force_tally(preds, dataset):
    """Independent one-pass scorer used as the oracle."""
    actual = {img.id: img.label for img in dataset.images}
    tp = fp = tn = fn = 0
    for p in preds:
        if actual[p.image_id] == "fall":
            if p.label == "fall":
                tp += 1
            else:
                fn += 1
        else:
            if p.label == "fall":
                fp += 1
            else:
                tn += 1
    return tp, fp, tn, fn


def random_fixture(rng, n_images=None):
    n = n_images or int(rng.integers(1, 30))
    images = []
    annotations = []
    ann_id = 1
    for i in range(1, n + 1):
        images.append(make_image(
            i, width=8, height=8,
            label="fall" if rng.random() < 0.5 else "non-fall",
            sequence="s", frame=i,
        ))
        for name in ("person", "bed", "wheelchair"):
            if rng.random() < 0.4:
                annotations.append(make_annotation(
                    ann_id, i, name, random_mask(rng, 8, 8, density=0.5)))
                ann_id += 1
    d = coco.Dataset(images=images, annotations=annotations,
                     categories=full_category_table())
    preds = [
        PredictionRecord(i, "fall" if rng.random() < 0.5 else "non-fall")
        for i in range(1, n + 1)
    ]
    return d, preds


def ten_image_fixture():
    images = [
        make_image(i, label="fall" if i <= 4 else "non-fall",
                   sequence="s", frame=i)
        for i in range(1, 11)
    ]
    return coco.Dataset(images=images, categories=full_category_table())


class TestConfusion:
    def test_all_correct(self):
        d = ten_image_fixture()
        preds = [PredictionRecord(img.id, img.label) for img in d.images]
        counts = confusion(preds, d)
        assert counts == ConfusionCounts(tp=4, fp=0, tn=6, fn=0)

    def test_all_inverted(self):
        d = ten_image_fixture()
        flip = {"fall": "non-fall", "non-fall": "fall"}
        preds = [PredictionRecord(img.id, flip[img.label]) for img in d.images]
        counts = confusion(preds, d)
        assert counts.tp == 0 and counts.tn == 0
        assert counts.fp == 6 and counts.fn == 4

    def test_matches_brute_force_on_random_fixtures(self):
        rng = np.random.default_rng(42)
        for _ in range(300):
            d, preds = random_fixture(rng)
            counts = confusion(preds, d)
            assert (counts.tp, counts.fp, counts.tn, counts.fn) == \
                brute_force_tally(preds, d)
            assert counts.total == len(d.images)

    def test_missing_prediction_raises(self):
        d = ten_image_fixture()
        preds = [PredictionRecord(img.id, img.label) for img in d.images[:-1]]
        with pytest.raises(PredictionError, match="missing"):
            confusion(preds, d)

    def test_duplicate_prediction_raises(self):
        d = ten_image_fixture()
        preds = [PredictionRecord(img.id, img.label) for img in d.images]
        preds.append(PredictionRecord(1, "fall"))
        with pytest.raises(PredictionError, match="duplicate"):
            confusion(preds, d)

    def test_unknown_image_raises(self):
        d = ten_image_fixture()
        preds = [PredictionRecord(img.id, img.label) for img in d.images]
        preds[0] = PredictionRecord(99, "fall")
        with pytest.raises(PredictionError, match="unknown image"):
            confusion(preds, d)

    def test_unknown_label_raises(self):
        d = ten_image_fixture()
        preds = [PredictionRecord(img.id, "maybe") for img in d.images]
        with pytest.raises(PredictionError, match="label"):
            confusion(preds, d)


class TestF1:
    def test_perfect(self):
        assert f1(ConfusionCounts(tp=5, fp=0, tn=0, fn=0)) == 1.0

    def test_degenerate_zero(self):
        assert f1(ConfusionCounts(tp=0, fp=0, tn=0, fn=0)) == 0.0
        assert f1(ConfusionCounts(tp=0, fp=0, tn=9, fn=0)) == 0.0

    def test_two_thirds(self):
        assert f1(ConfusionCounts(tp=2, fp=1, tn=0, fn=1)) == pytest.approx(2 / 3)

    def test_symmetric_in_fp_fn(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            tp, a, b, tn = (int(v) for v in rng.integers(0, 20, size=4))
            assert f1(ConfusionCounts(tp, a, tn, b)) == \
                f1(ConfusionCounts(tp, b, tn, a))

    def test_monotone_non_increasing_in_errors(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            tp = int(rng.integers(1, 20))
            fp = int(rng.integers(0, 20))
            fn = int(rng.integers(0, 20))
            base = f1(ConfusionCounts(tp, fp, 0, fn))
            assert f1(ConfusionCounts(tp, fp + 1, 0, fn)) <= base
            assert f1(ConfusionCounts(tp, fp, 0, fn + 1)) <= base

    def test_degenerate_flag_in_report(self):
        images = [make_image(1, label="non-fall")]
        d = coco.Dataset(images=images, categories=full_category_table())
        report = evaluate([PredictionRecord(1, "non-fall")], d)
        assert report.f1 == 0.0
        assert report.degenerate
        assert report.to_json_obj()["degenerate"] is True


class TestSubsetEval:
    def test_absent_category_reports_empty_subset(self):
        d = ten_image_fixture()
        preds = [PredictionRecord(img.id, img.label) for img in d.images]
        report = subset_eval(preds, d, "walker")
        assert report.empty_subset
        assert report.f1 is None
        assert report.n == 0
        assert report.to_json_obj()["empty_subset"] is True

    def test_category_everywhere_equals_global(self):
        rng = np.random.default_rng(3)
        d, preds = random_fixture(rng, n_images=12)
        anns = list(d.annotations)
        next_id = max((a.id for a in anns), default=0) + 1
        for img in d.images:
            anns.append(make_annotation(next_id, img.id, "floor",
                                        random_mask(rng, 8, 8, density=0.5)))
            next_id += 1
        d = coco.Dataset(images=d.images, annotations=anns,
                         categories=d.categories)
        report = subset_eval(preds, d, "floor")
        global_report = evaluate(preds, d)
        assert report.counts == global_report.counts
        assert report.f1 == global_report.f1

    def test_matches_filtered_brute_force(self):
        rng = np.random.default_rng(4)
        for _ in range(100):
            d, preds = random_fixture(rng)
            bed_id = coco.CATEGORY_IDS["bed"]
            keep = {a.image_id for a in d.annotations if a.category_id == bed_id}
            report = subset_eval(preds, d, "bed")
            if not keep:
                assert report.empty_subset
                continue
            sub_preds = [p for p in preds if p.image_id in keep]
            sub = coco.subset(d, keep)
            assert (report.counts.tp, report.counts.fp,
                    report.counts.tn, report.counts.fn) == \
                brute_force_tally(sub_preds, sub)

    def test_partitions_reconstruct_global_counts(self):
        rng = np.random.default_rng(5)
        d, preds = random_fixture(rng, n_images=25)
        bed_id = coco.CATEGORY_IDS["bed"]
        keep = {a.image_id for a in d.annotations if a.category_id == bed_id}
        rest = {img.id for img in d.images} - keep
        total = confusion(preds, d)
        parts = []
        for ids in (keep, rest):
            if ids:
                parts.append(confusion([p for p in preds if p.image_id in ids],
                                       coco.subset(d, ids)))
        assert sum(c.tp for c in parts) == total.tp
        assert sum(c.fp for c in parts) == total.fp
        assert sum(c.tn for c in parts) == total.tn
        assert sum(c.fn for c in parts) == total.fn

    def test_unknown_category_raises(self):
        d = ten_image_fixture()
        with pytest.raises(ValueError, match="unknown category"):
            subset_eval([], d, "sofa")


class TestPredictionCsv:
    def test_roundtrip(self, tmp_path):
        preds = [
            PredictionRecord(1, "fall", 0.9),
            PredictionRecord(2, "non-fall", None),
            PredictionRecord(3, "non-fall", 0.25),
        ]
        path = tmp_path / "preds.csv"
        save_predictions_csv(preds, path)
        assert load_predictions_csv(path) == preds

    def test_score_column_optional(self, tmp_path):
        path = tmp_path / "preds.csv"
        path.write_text("image_id,pred_label\n1,fall\n2,non-fall\n")
        assert load_predictions_csv(path) == [
            PredictionRecord(1, "fall"), PredictionRecord(2, "non-fall")]

    def test_header_required(self, tmp_path):
        path = tmp_path / "preds.csv"
        path.write_text("1,fall\n")
        with pytest.raises(PredictionError, match="header"):
            load_predictions_csv(path)

    def test_score_out_of_range(self, tmp_path):
        path = tmp_path / "preds.csv"
        path.write_text("image_id,pred_label,score\n1,fall,1.5\n")
        with pytest.raises(PredictionError, match="score"):
            load_predictions_csv(path)


GRID_ROWS = [
    ("F+B", 0.825, None),
    ("F+B:Blur11", 0.87, 0.919),
    ("F+B:SolidBlack", 0.551, 0.912),
    ("F+B:Grayscale", 0.724, 0.871),
    ("F:Blur11+B", 0.807, 0.898),
    ("F:SolidBlack+B", 0.638, 0.867),
    ("F:Grayscale+B", 0.722, 0.854),
]


class TestSweepReport:
    def test_grid_row_csv_layout(self):
        report = sweep_report(GRID_ROWS)
        assert report.to_csv_text() == (
            "scenario,f1,matched_f1\n"
            "F+B,0.825,\n"
            "F+B:Blur11,0.87,0.919\n"
            "F+B:SolidBlack,0.551,0.912\n"
            "F+B:Grayscale,0.724,0.871\n"
            "F:Blur11+B,0.807,0.898\n"
            "F:SolidBlack+B,0.638,0.867\n"
            "F:Grayscale+B,0.722,0.854\n"
        )

    def test_single_row(self):
        text = sweep_report([("F+B", 0.5)]).to_csv_text()
        assert text == "scenario,f1,matched_f1\nF+B,0.5,\n"

    def test_csv_roundtrip(self):
        report = sweep_report(GRID_ROWS)
        assert SweepReport.from_csv_text(report.to_csv_text()) == report

    def test_json_roundtrip(self, tmp_path):
        report = sweep_report(GRID_ROWS)
        assert SweepReport.from_json_obj(report.to_json_obj()) == report
        report.save(csv_path=tmp_path / "r.csv", json_path=tmp_path / "r.json")
        assert SweepReport.from_csv_text(
            (tmp_path / "r.csv").read_text()) == report

    def test_unparsable_scenario_rejected(self):
        from ctxaug.errors import ScenarioParseError

        with pytest.raises(ScenarioParseError):
            sweep_report([("F+B:Blur4", 0.5)])

    def test_rows_are_records(self):
        report = sweep_report([("F+B", 0.5, 0.6)])
        assert report.rows == (SweepRow("F+B", 0.5, 0.6),)
