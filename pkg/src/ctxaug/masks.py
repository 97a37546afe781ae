"""Dense-mask algebra: inversion, union, cropping, nearest-neighbor resize."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .coco import Bitmask


@dataclass(frozen=True)
class Rect:
    """Axis-aligned pixel rectangle, top-left anchored."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 0 or self.h < 0:
            raise ValueError(f"rect dimensions must be non-negative, got {self}")


def invert(bits: Bitmask) -> Bitmask:
    return ~np.asarray(bits, dtype=bool)


def union(masks: Sequence[Bitmask]) -> Bitmask:
    if len(masks) == 0:
        raise ValueError("union of an empty mask list is undefined")
    first = np.asarray(masks[0], dtype=bool)
    for m in masks[1:]:
        if np.shape(m) != first.shape:
            raise ValueError(
                f"mask size mismatch in union: {np.shape(m)} vs {first.shape}"
            )
    return np.logical_or.reduce([np.asarray(m, dtype=bool) for m in masks])


def crop(bits: Bitmask, r: Rect) -> Bitmask:
    b = np.asarray(bits, dtype=bool)
    h, w = b.shape
    if r.x < 0 or r.y < 0 or r.x + r.w > w or r.y + r.h > h:
        raise ValueError(f"crop rect {r} outside mask bounds {h}x{w}")
    return b[r.y:r.y + r.h, r.x:r.x + r.w].copy()


def resize_mask(bits: Bitmask, out_hw: tuple[int, int]) -> Bitmask:
    """Nearest-neighbor resize; source index = floor((dst + 0.5) * in / out)."""
    oh, ow = out_hw
    if oh <= 0 or ow <= 0:
        raise ValueError(f"output dimensions must be positive, got {out_hw}")
    b = np.asarray(bits, dtype=bool)
    h, w = b.shape
    rows = np.floor((np.arange(oh) + 0.5) * (h / oh)).astype(np.int64)
    cols = np.floor((np.arange(ow) + 0.5) * (w / ow)).astype(np.int64)
    np.clip(rows, 0, h - 1, out=rows)
    np.clip(cols, 0, w - 1, out=cols)
    return b[np.ix_(rows, cols)]


__all__ = ["Rect", "invert", "union", "crop", "resize_mask"]
