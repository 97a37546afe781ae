"""Acceptance suite: one test per release criterion, each printing a
[PASS]/[FAIL] line (run with -s to see them live)."""

import json
import subprocess
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest
from numpy.lib.stride_tricks import sliding_window_view

from ctxaug import coco
from ctxaug.builder import (
    DEFAULT_SPLIT_RULES,
    group_split_validation,
    split_train_test,
)
from ctxaug.coco import VOCABULARY, RleMask, rle_decode, rle_encode
from ctxaug.evaluation import (
    ConfusionCounts,
    PredictionRecord,
    confusion,
    evaluate,
    f1,
    subset_eval,
)
from ctxaug.masks import resize_mask
from ctxaug.pipeline import BlurPlacement, PipelineConfig, run_pipeline_u8
from ctxaug.scenario import (
    Background,
    Clause,
    Foreground,
    GaussianBlur,
    Grayscale,
    InverseKeyObject,
    KeyObject,
    Scenario,
    SolidColor,
    format_scenario,
    kernel_sweep,
    parse_scenario,
)
from ctxaug.transforms import apply_masked, blur, gaussian_kernel

from conftest import (
    full_category_table,
    make_annotation,
    make_image,
    png_dataset,
    random_image,
    random_mask,
    tree_bytes,
)


@contextmanager
def criterion(name):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name} ({time.perf_counter() - start:.1f}s)")


def test_rle_codec():
    with criterion("RLE codec: decode/encode identity, 1000 masks <= 64x64, < 5 s"):
        start = time.perf_counter()
        assert not rle_decode(RleMask((2, 2), (4,))).any()
        single = rle_decode(RleMask((2, 2), (0, 1, 3)))
        assert single[0, 0] and single.sum() == 1
        assert rle_decode(RleMask((2, 2), (0, 4))).all()
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            h = int(rng.integers(1, 65))
            w = int(rng.integers(1, 65))
            bits = random_mask(rng, h, w)
            assert (rle_decode(rle_encode(bits)) == bits).all()
        assert time.perf_counter() - start < 5.0


def _random_transform(rng):
    choice = int(rng.integers(0, 3))
    if choice == 0:
        return SolidColor(*(int(v) for v in rng.integers(0, 256, size=3)))
    if choice == 1:
        return GaussianBlur(int(rng.choice([3, 5, 11, 21, 31])))
    return Grayscale()


def test_masked_transform_exactness():
    with criterion("Masked transforms: complement byte-identical, 200 triples, < 30 s"):
        start = time.perf_counter()
        rng = np.random.default_rng(7)
        img = random_image(rng, 12, 12)
        ones = np.ones((12, 12), dtype=bool)
        zeros = np.zeros((12, 12), dtype=bool)
        assert (apply_masked(img, ones, SolidColor(0, 0, 0)) == 0).all()
        for t in (SolidColor(9, 9, 9), GaussianBlur(3), Grayscale()):
            assert (apply_masked(img, zeros, t) == img).all()
        for _ in range(200):
            h = int(rng.integers(4, 48))
            w = int(rng.integers(4, 48))
            image = random_image(rng, h, w)
            region = random_mask(rng, h, w)
            out = apply_masked(image, region, _random_transform(rng))
            assert (out[~region] == image[~region]).all()
        assert time.perf_counter() - start < 30.0


def _dense_blur(img, k):
    weights = gaussian_kernel(k)
    kernel_2d = np.outer(weights, weights)
    r = k // 2
    a = img.astype(np.float64)
    out = np.empty_like(a)
    for c in range(3):
        padded = np.pad(a[:, :, c], r, mode="reflect")
        windows = sliding_window_view(padded, (k, k))
        out[:, :, c] = np.einsum("ijkl,kl->ij", windows, kernel_2d)
    return np.clip(np.floor(out + 0.5), 0, 255).astype(np.uint8)


def test_blur_correctness():
    with criterion("Blur: separable == dense oracle +/-1, kernels normalized, < 30 s"):
        start = time.perf_counter()
        kernels = kernel_sweep(3, 31)
        assert len(kernels) == 15
        assert kernels == list(range(3, 32, 2))
        for k in kernels:
            assert abs(gaussian_kernel(k).sum() - 1.0) < 1e-6
        rng = np.random.default_rng(11)
        images = [random_image(rng, 64, 64) for _ in range(50)]
        for k in (3, 11, 31):
            for img in images:
                got = blur(img, k).astype(np.int16)
                want = _dense_blur(img, k).astype(np.int16)
                assert np.abs(got - want).max() <= 1
        assert time.perf_counter() - start < 30.0


def test_blur_placement_distinction():
    with criterion("Blur placement: before != after at k=11, byte-reproducible"):
        rng = np.random.default_rng(42)
        img = random_image(rng, 512, 512)
        person = np.zeros((512, 512), dtype=bool)
        person[128:384, 128:384] = True
        masks = {"person": [person]}
        sc = parse_scenario("F+B:Blur11")
        results = {}
        for placement in (BlurPlacement.BEFORE_RESIZE, BlurPlacement.AFTER_RESIZE):
            cfg = PipelineConfig(blur_placement=placement, seed=42)
            first = run_pipeline_u8(img, masks, sc, cfg, 1)
            second = run_pipeline_u8(img, masks, sc, cfg, 1)
            assert (first == second).all()
            results[placement] = first
        before = results[BlurPlacement.BEFORE_RESIZE]
        after = results[BlurPlacement.AFTER_RESIZE]
        assert not (before == after).all()


GRID_HEADERS = [
    "F+B", "F+B:Blur11", "F+B:SolidBlack", "F+B:Grayscale",
    "F:Blur11+B", "F:SolidBlack+B", "F:Grayscale+B",
]


def _random_scenario(rng) -> Scenario:
    pool = ([Foreground(), Background()]
            + [KeyObject(c) for c in VOCABULARY]
            + [InverseKeyObject(c) for c in VOCABULARY])
    count = int(rng.integers(2, 7))
    picks = rng.choice(len(pool), size=count, replace=False)
    clauses = []
    for index in picks:
        clauses.append(Clause(pool[int(index)], _transform_or_none(rng)))
    return Scenario(tuple(clauses))


def _transform_or_none(rng):
    choice = int(rng.integers(0, 4))
    if choice == 0:
        return None
    if choice == 1:
        return Grayscale()
    if choice == 2:
        return GaussianBlur(int(rng.choice(range(3, 32, 2))))
    return SolidColor(*(int(v) for v in rng.integers(0, 256, size=3)))


def test_scenario_dsl():
    with criterion("Scenario DSL: grid headers + 500-case parse/format round-trip"):
        for header in GRID_HEADERS:
            assert format_scenario(parse_scenario(header)) == header
        rng = np.random.default_rng(99)
        for _ in range(500):
            sc = _random_scenario(rng)
            assert parse_scenario(format_scenario(sc)) == sc


def test_split_fidelity(corpus_dataset):
    with criterion("Split fidelity: composition reproduced; grouped val split exact"):
        train, test = split_train_test(corpus_dataset, DEFAULT_SPLIT_RULES)

        def count(d, source, label, cameras=None):
            return sum(
                1 for img in d.images
                if img.source == source and img.label == label
                and (cameras is None or img.camera in cameras)
            )

        assert count(train, "CAUCAFall", "fall") == 1538
        assert count(train, "CAUCAFall", "non-fall") == 1575
        assert count(train, "KULeuven", "fall", {3, 4, 5}) == 429
        assert count(train, "KULeuven", "non-fall", {3, 4, 5}) == 1174
        assert count(test, "KULeuven", "fall", {1, 2}) == 284
        assert count(test, "KULeuven", "non-fall", {1, 2}) == 776
        assert count(test, "URFall", "fall") == 42
        assert count(test, "URFall", "non-fall") == 275

        images = [make_image(i + 1, sequence="seq", frame=i) for i in range(100)]
        d = coco.Dataset(images=images, categories=full_category_table())
        groups = [set(range(i + 1, i + 6)) for i in range(0, 100, 5)]
        manifest = group_split_validation(d, seed=42)
        assert len(manifest.val) == 10
        val_groups = [g for g in groups if g <= set(manifest.val)]
        assert len(val_groups) == 2
        for seed in range(100):
            val = set(group_split_validation(d, seed=seed).val)
            assert len(val) == 10
            for group in groups:
                assert len(group & val) in (0, len(group))


def _brute_force(preds, labels):
    tp = fp = tn = fn = 0
    for p in preds:
        if labels[p.image_id] == "fall":
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


def test_eval_oracle_equivalence():
    with criterion("Eval: confusion/F1/subset match brute force on 1000 fixtures"):
        rng = np.random.default_rng(1234)
        categories = full_category_table()
        for _ in range(1000):
            n = int(rng.integers(1, 25))
            images = []
            annotations = []
            ann_id = 1
            for i in range(1, n + 1):
                images.append(make_image(
                    i, width=4, height=4,
                    label="fall" if rng.random() < 0.5 else "non-fall",
                    sequence="s", frame=i))
                if rng.random() < 0.5:
                    annotations.append(make_annotation(
                        ann_id, i, "bed", random_mask(rng, 4, 4, density=0.5)))
                    ann_id += 1
            d = coco.Dataset(images=images, annotations=annotations,
                             categories=categories)
            preds = [
                PredictionRecord(i, "fall" if rng.random() < 0.5 else "non-fall")
                for i in range(1, n + 1)
            ]
            labels = {img.id: img.label for img in d.images}
            counts = confusion(preds, d)
            tp, fp, tn, fn = _brute_force(preds, labels)
            assert (counts.tp, counts.fp, counts.tn, counts.fn) == (tp, fp, tn, fn)
            denominator = 2 * tp + fp + fn
            expected_f1 = 0.0 if denominator == 0 else 2 * tp / denominator
            assert f1(counts) == pytest.approx(expected_f1)

            bed_ids = {a.image_id for a in annotations}
            report = subset_eval(preds, d, "bed")
            if not bed_ids:
                assert report.empty_subset and report.f1 is None
            else:
                sub_preds = [p for p in preds if p.image_id in bed_ids]
                expected = _brute_force(sub_preds, labels)
                got = (report.counts.tp, report.counts.fp,
                       report.counts.tn, report.counts.fn)
                assert got == expected

        # degenerate conventions
        assert f1(ConfusionCounts(0, 0, 0, 0)) == 0.0
        images = [make_image(1, label="non-fall")]
        d = coco.Dataset(images=images, categories=categories)
        report = evaluate([PredictionRecord(1, "non-fall")], d)
        assert report.f1 == 0.0 and report.degenerate


def test_end_to_end_determinism(tmp_path):
    with criterion("CLI transform: byte-identical trees across reruns and workers 1/8"):
        dataset = png_dataset(tmp_path, n_images=20, width=40, height=30)
        outputs = []
        for name, workers in (("run_a", 1), ("run_b", 1), ("run_c", 8)):
            out_dir = tmp_path / name
            cmd = [
                sys.executable, "-m", "ctxaug", "transform",
                "--dataset", str(dataset),
                "--scenario", "F+B:Blur11",
                "--placement", "before-resize",
                "--out-dir", str(out_dir),
                "--seed", "42",
                "--train-mode",
                "--workers", str(workers),
            ]
            proc = subprocess.run(cmd, capture_output=True, text=True)
            assert proc.returncode == 0, proc.stderr
            outputs.append(tree_bytes(out_dir))
        assert outputs[0] == outputs[1]
        assert outputs[0] == outputs[2]
        manifest = json.loads((tmp_path / "run_a" / "manifest.json").read_text())
        assert len(manifest["images"]) == 20
