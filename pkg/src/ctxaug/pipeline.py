"""Augmentation pipeline: contextual transforms, resize, train-time warps.

Stage order for one image:

  1. non-blur contextual transforms at the original resolution,
  2. masked blur, when placement is "before_resize" (seeded kernel: the
     effective smoothing after the later downscale varies with each source
     image's native resolution),
  3. bilinear resize of the image (masks tracked by nearest neighbor),
  4. masked blur, when placement is "after_resize" (fixed kernel),
  5. training mode only: random perspective then horizontal flip,
  6. per-channel float normalization.

Every random draw comes from a per-image generator derived by hashing
(global seed, image id), so outputs are reproducible regardless of batch
order or worker count.
"""

from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import coco, masks, scenario as sdsl
from .errors import CtxaugError, RegionResolutionError
from .scenario import (
    Background,
    Clause,
    Foreground,
    GaussianBlur,
    InverseKeyObject,
    KeyObject,
    Scenario,
)
from .transforms import _as_image, _round_u8, apply_masked, apply_transform

logger = logging.getLogger(__name__)

DEFAULT_MEAN = (0.485, 0.456, 0.406)
DEFAULT_STD = (0.229, 0.224, 0.225)


class BlurPlacement(str, Enum):
    BEFORE_RESIZE = "before_resize"
    AFTER_RESIZE = "after_resize"


@dataclass(frozen=True)
class PipelineConfig:
    resize_to: tuple[int, int] = (256, 256)
    distortion_scale: float = 0.4
    hflip_probability: float = 0.5
    blur_placement: BlurPlacement | None = None
    mean: tuple[float, float, float] = DEFAULT_MEAN
    std: tuple[float, float, float] = DEFAULT_STD
    seed: int = 0
    train_mode: bool = False

    def __post_init__(self):
        if not 0.0 <= self.distortion_scale < 1.0:
            raise ValueError(
                f"distortion scale must be in [0, 1), got {self.distortion_scale}"
            )
        if self.resize_to[0] <= 0 or self.resize_to[1] <= 0:
            raise ValueError(f"resize target must be positive, got {self.resize_to}")


def derive_image_rng(seed: int, image_id: int) -> np.random.Generator:
    """Per-image RNG stream, stable across platforms and schedulers."""
    digest = hashlib.sha256(f"{seed}|{image_id}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "big"))


def resize_image(img, out_hw: tuple[int, int]) -> np.ndarray:
    """Bilinear resize with pixel-center alignment, rounded half-up."""
    a = _as_image(img).astype(np.float64)
    h, w = a.shape[:2]
    oh, ow = out_hw
    if oh <= 0 or ow <= 0:
        raise ValueError(f"output dimensions must be positive, got {out_hw}")
    sy = np.clip((np.arange(oh) + 0.5) * (h / oh) - 0.5, 0, h - 1)
    sx = np.clip((np.arange(ow) + 0.5) * (w / ow) - 0.5, 0, w - 1)
    y0 = np.floor(sy).astype(np.int64)
    x0 = np.floor(sx).astype(np.int64)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (sy - y0)[:, None, None]
    fx = (sx - x0)[None, :, None]
    out = ((1 - fy) * (1 - fx) * a[np.ix_(y0, x0)]
           + (1 - fy) * fx * a[np.ix_(y0, x1)]
           + fy * (1 - fx) * a[np.ix_(y1, x0)]
           + fy * fx * a[np.ix_(y1, x1)])
    return _round_u8(out)


def _solve_homography(src_pts, dst_pts) -> np.ndarray:
    """3x3 matrix H with H @ [x, y, 1] ~ dst for each src->dst pair."""
    rows = []
    rhs = []
    for (x, y), (u, v) in zip(src_pts, dst_pts):
        rows.append([x, y, 1, 0, 0, 0, -u * x, -u * y])
        rhs.append(u)
        rows.append([0, 0, 0, x, y, 1, -v * x, -v * y])
        rhs.append(v)
    params = np.linalg.solve(np.asarray(rows, dtype=np.float64),
                             np.asarray(rhs, dtype=np.float64))
    return np.append(params, 1.0).reshape(3, 3)


def _bilinear_sample(a: np.ndarray, sx: np.ndarray, sy: np.ndarray) -> np.ndarray:
    """Sample float image a at (sx, sy); out-of-bounds neighbors read as 0."""
    h, w = a.shape[:2]
    x0 = np.floor(sx).astype(np.int64)
    y0 = np.floor(sy).astype(np.int64)
    fx = (sx - x0)[..., None]
    fy = (sy - y0)[..., None]

    def fetch(xi, yi):
        valid = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
        xi_c = np.clip(xi, 0, w - 1)
        yi_c = np.clip(yi, 0, h - 1)
        return a[yi_c, xi_c] * valid[..., None]

    return ((1 - fy) * (1 - fx) * fetch(x0, y0)
            + (1 - fy) * fx * fetch(x0 + 1, y0)
            + fy * (1 - fx) * fetch(x0, y0 + 1)
            + fy * fx * fetch(x0 + 1, y0 + 1))


def random_perspective(img, rng: np.random.Generator,
                       distortion_scale: float) -> np.ndarray:
    """Displace each corner inward by uniform [0, scale * dim / 2]; black fill.

    Draw order is fixed (corners clockwise from top-left, dx before dy) so a
    given generator state always produces the same warp.
    """
    a = _as_image(img).astype(np.float64)
    h, w = a.shape[:2]
    max_dx = distortion_scale * w / 2.0
    max_dy = distortion_scale * h / 2.0
    corners = np.array(
        [[0, 0], [w - 1, 0], [w - 1, h - 1], [0, h - 1]], dtype=np.float64
    )
    inward = np.array([[1, 1], [-1, 1], [-1, -1], [1, -1]], dtype=np.float64)
    displaced = corners.copy()
    for i in range(4):
        dx = rng.uniform(0.0, max_dx)
        dy = rng.uniform(0.0, max_dy)
        displaced[i] += inward[i] * (dx, dy)

    # Map output coords back to source coords: inverse = displaced -> corners.
    back = _solve_homography(displaced, corners)
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    denom = back[2, 0] * xs + back[2, 1] * ys + back[2, 2]
    sx = (back[0, 0] * xs + back[0, 1] * ys + back[0, 2]) / denom
    sy = (back[1, 0] * xs + back[1, 1] * ys + back[1, 2]) / denom
    return _round_u8(_bilinear_sample(a, sx, sy))


def normalize(img, mean=DEFAULT_MEAN, std=DEFAULT_STD) -> np.ndarray:
    """uint8 image -> float32 planes via (v / 255 - mean) / std."""
    a = _as_image(img).astype(np.float32)
    mean = np.asarray(mean, dtype=np.float32)
    std = np.asarray(std, dtype=np.float32)
    return (a / np.float32(255.0) - mean) / std


def denormalize(arr, mean=DEFAULT_MEAN, std=DEFAULT_STD) -> np.ndarray:
    mean = np.asarray(mean, dtype=np.float32)
    std = np.asarray(std, dtype=np.float32)
    return _round_u8((np.asarray(arr) * std + mean) * 255.0)


def resolve_region(region, masks_by_category: Mapping[str, Sequence[coco.Bitmask]],
                   ) -> coco.Bitmask | None:
    """Build the dense region mask, or None when a named category is absent.

    Foreground/Background require at least one person mask; named key
    objects resolve to the union of that category's masks.
    """
    if isinstance(region, (Foreground, Background)):
        person = masks_by_category.get("person", [])
        if not person:
            raise RegionResolutionError(
                f"region {sdsl.format_region(region)!r} requires a person "
                "annotation, but the image has none"
            )
        fg = masks.union(person)
        return masks.invert(fg) if isinstance(region, Background) else fg
    assert isinstance(region, (KeyObject, InverseKeyObject))
    found = masks_by_category.get(region.category, [])
    if not found:
        return None
    joined = masks.union(found)
    return masks.invert(joined) if isinstance(region, InverseKeyObject) else joined


def _clause_masks(img_hw, clauses: Sequence[Clause], masks_by_category):
    """Pair each transform-bearing clause with its resolved region mask."""
    resolved = []
    for clause in clauses:
        if clause.transform is None:
            continue
        region = resolve_region(clause.region, masks_by_category)
        if region is None:
            logger.warning(
                "skipping clause %r: category %r absent from image",
                sdsl.format_region(clause.region) + ":"
                + sdsl.format_transform(clause.transform),
                clause.region.category,
            )
            continue
        if region.shape != img_hw:
            raise ValueError(
                f"region mask size {region.shape} does not match image {img_hw}"
            )
        resolved.append((clause, region))
    return resolved


def run_pipeline_u8(img, masks_by_category: Mapping[str, Sequence[coco.Bitmask]],
                    sc: Scenario, cfg: PipelineConfig, image_id: int) -> np.ndarray:
    """All pipeline stages except the final normalization; returns uint8."""
    a = _as_image(img)
    img_hw = a.shape[:2]
    resolved = _clause_masks(img_hw, sc.clauses, masks_by_category)
    needs_blur = any(isinstance(c.transform, GaussianBlur) for c, _ in resolved)
    if needs_blur and cfg.blur_placement is None:
        raise CtxaugError(
            "scenario contains a blur transform but no blur placement is set"
        )

    for clause, region in resolved:
        if not isinstance(clause.transform, GaussianBlur):
            a = apply_masked(a, region, clause.transform)

    if needs_blur and cfg.blur_placement is BlurPlacement.BEFORE_RESIZE:
        for clause, region in resolved:
            if isinstance(clause.transform, GaussianBlur):
                a = apply_masked(a, region, clause.transform)

    a = resize_image(a, cfg.resize_to)

    if needs_blur and cfg.blur_placement is BlurPlacement.AFTER_RESIZE:
        for clause, region in resolved:
            if isinstance(clause.transform, GaussianBlur):
                resized_region = masks.resize_mask(region, cfg.resize_to)
                a = apply_masked(a, resized_region, clause.transform)

    if cfg.train_mode:
        rng = derive_image_rng(cfg.seed, image_id)
        a = random_perspective(a, rng, cfg.distortion_scale)
        if rng.uniform() < cfg.hflip_probability:
            a = a[:, ::-1, :].copy()

    return a


def run_pipeline(img, masks_by_category: Mapping[str, Sequence[coco.Bitmask]],
                 sc: Scenario, cfg: PipelineConfig, image_id: int) -> np.ndarray:
    """Full pipeline; returns the normalized float32 (h, w, 3) array."""
    return normalize(
        run_pipeline_u8(img, masks_by_category, sc, cfg, image_id),
        cfg.mean, cfg.std,
    )


# -- batch runner ---------------------------------------------------------

def _load_rgb(path: Path) -> np.ndarray:
    from PIL import Image

    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"))


def _save_png(a: np.ndarray, path: Path) -> None:
    from PIL import Image

    Image.fromarray(a, mode="RGB").save(path, format="PNG")


def _transform_one(task) -> tuple[int, str]:
    record, anns, scenario_text, cfg, images_root, out_dir = task
    sc = sdsl.parse_scenario(scenario_text)
    img = _load_rgb(Path(images_root) / record.file_name)
    if img.shape[:2] != (record.height, record.width):
        raise CtxaugError(
            f"image {record.id}: file {record.file_name} is "
            f"{img.shape[1]}x{img.shape[0]}, dataset says "
            f"{record.width}x{record.height}"
        )
    grouped: dict[str, list[coco.Bitmask]] = {}
    for name, mask in anns:
        grouped.setdefault(name, []).append(coco.rle_decode(mask))
    out = run_pipeline_u8(img, grouped, sc, cfg, record.id)
    out_name = f"{record.id:06d}.png"
    _save_png(out, Path(out_dir) / out_name)
    return record.id, out_name


def transform_dataset(dataset: coco.Dataset, images_root: str | Path,
                      scenario_text: str, cfg: PipelineConfig,
                      out_dir: str | Path, workers: int = 1) -> dict:
    """Run the pipeline over every dataset image and write PNGs + manifest.

    Output bytes are independent of the worker count because all randomness
    is keyed on (cfg.seed, image id).
    """
    sc = sdsl.parse_scenario(scenario_text)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = []
    for record in sorted(dataset.images, key=lambda r: r.id):
        anns = [
            (dataset.category_name(ann.category_id), ann.mask)
            for ann in dataset.annotations_by_image.get(record.id, [])
        ]
        tasks.append((record, anns, scenario_text, cfg, images_root, out_dir))

    if workers <= 1:
        results = [_transform_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_transform_one, tasks))

    images_by_id = dataset.images_by_id
    manifest = {
        "scenario": sdsl.format_scenario(sc),
        "seed": cfg.seed,
        "placement": cfg.blur_placement.value if cfg.blur_placement else None,
        "train_mode": cfg.train_mode,
        "images": [
            {
                "id": image_id,
                "source": images_by_id[image_id].file_name,
                "file": out_name,
            }
            for image_id, out_name in sorted(results)
        ],
    }
    manifest_path = out_dir / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n",
                             encoding="utf-8")
    return manifest


__all__ = [
    "DEFAULT_MEAN", "DEFAULT_STD", "BlurPlacement", "PipelineConfig",
    "derive_image_rng", "resize_image", "random_perspective", "normalize",
    "denormalize", "resolve_region", "run_pipeline_u8", "run_pipeline",
    "transform_dataset",
]
