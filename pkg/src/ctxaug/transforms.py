"""Pixel-based contextual transformations and masked compositing.

All functions take and return uint8 RGB images of shape (height, width, 3).
Arithmetic runs in float64 and is rounded half-up exactly once, so results
are deterministic across runs and worker processes.
"""

from __future__ import annotations

import numpy as np

from .coco import Bitmask
from .scenario import (
    KERNEL_MAX,
    KERNEL_MIN,
    GaussianBlur,
    Grayscale,
    SolidColor,
    TransformKind,
)

# ITU-R BT.601 luma coefficients.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def _as_image(img) -> np.ndarray:
    a = np.asarray(img)
    if a.ndim != 3 or a.shape[2] != 3 or a.dtype != np.uint8:
        raise ValueError(
            f"expected a uint8 RGB image of shape (h, w, 3), got "
            f"shape {a.shape} dtype {a.dtype}"
        )
    return a


def _round_u8(a: np.ndarray) -> np.ndarray:
    return np.clip(np.floor(a + 0.5), 0, 255).astype(np.uint8)


def kernel_sigma(k: int) -> float:
    # Conventional size-to-sigma rule; callers configure only the size.
    return 0.3 * ((k - 1) * 0.5 - 1) + 0.8


def gaussian_kernel(k: int) -> np.ndarray:
    """1-D Gaussian weights of length k, symmetric, summing to 1."""
    if k % 2 == 0 or not KERNEL_MIN <= k <= KERNEL_MAX:
        raise ValueError(
            f"kernel size must be odd and within [{KERNEL_MIN}, "
            f"{KERNEL_MAX}], got {k}"
        )
    sigma = kernel_sigma(k)
    offsets = np.arange(k, dtype=np.float64) - (k - 1) / 2
    weights = np.exp(-(offsets ** 2) / (2.0 * sigma ** 2))
    return weights / weights.sum()


def blur(img, k: int) -> np.ndarray:
    """Separable Gaussian blur with mirror (edge-excluding) border reflection."""
    a = _as_image(img).astype(np.float64)
    weights = gaussian_kernel(k)
    r = k // 2
    h, w = a.shape[:2]

    padded = np.pad(a, ((0, 0), (r, r), (0, 0)), mode="reflect")
    horiz = np.zeros_like(a)
    for t in range(k):
        horiz += weights[t] * padded[:, t:t + w, :]

    padded = np.pad(horiz, ((r, r), (0, 0), (0, 0)), mode="reflect")
    out = np.zeros_like(a)
    for t in range(k):
        out += weights[t] * padded[t:t + h, :, :]

    return _round_u8(out)


def solid_fill(img, color: tuple[int, int, int]) -> np.ndarray:
    a = _as_image(img)
    out = np.empty_like(a)
    out[:] = np.asarray(color, dtype=np.uint8)
    return out


def grayscale(img) -> np.ndarray:
    """BT.601 luma, rounded half-up, replicated to all three channels."""
    a = _as_image(img).astype(np.float64)
    luma = (LUMA_WEIGHTS[0] * a[:, :, 0]
            + LUMA_WEIGHTS[1] * a[:, :, 1]
            + LUMA_WEIGHTS[2] * a[:, :, 2])
    y = _round_u8(luma)
    return np.repeat(y[:, :, None], 3, axis=2)


def apply_transform(img, t: TransformKind) -> np.ndarray:
    """Apply a transform to the entire image."""
    if isinstance(t, SolidColor):
        return solid_fill(img, (t.r, t.g, t.b))
    if isinstance(t, GaussianBlur):
        return blur(img, t.kernel)
    if isinstance(t, Grayscale):
        return grayscale(img)
    raise TypeError(f"unknown transform kind: {t!r}")


def apply_masked(img, region: Bitmask, t: TransformKind) -> np.ndarray:
    """Transform the whole image, then composite it over the masked region.

    Pixels where region is set come from the transformed image; the rest are
    bit-exactly the originals. The whole-image pass means blurred values near
    the region boundary may draw on original out-of-region pixels.
    """
    a = _as_image(img)
    mask = np.asarray(region, dtype=bool)
    if mask.shape != a.shape[:2]:
        raise ValueError(
            f"region size {mask.shape} does not match image size {a.shape[:2]}"
        )
    transformed = apply_transform(a, t)
    out = a.copy()
    out[mask] = transformed[mask]
    return out


__all__ = [
    "LUMA_WEIGHTS", "kernel_sigma", "gaussian_kernel", "blur", "solid_fill",
    "grayscale", "apply_transform", "apply_masked",
]
