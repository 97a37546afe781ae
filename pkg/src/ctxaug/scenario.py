"""Scenario nomenclature: parse and render region/transform specifications.

Grammar (case-insensitive keywords, canonical rendering shown in quotes):

    scenario  := clause ("+" clause)+
    clause    := region [":" transform]
    region    := "F" | "B" | category | "!" category
    category  := "person" | "chair" | "table" | "bed" | "wheelchair"
               | "floor" | "walker"
    transform := "Blur" INT | "SolidBlack" | "SolidColor(r,g,b)" | "Grayscale"

"F" is the foreground (union of person masks), "B" its pixel-wise inverse.
A named category targets the union of that category's masks; a "!" prefix
targets the inverse of that union. "SolidBlack" is a literal alias of
SolidColor(0,0,0) and is the canonical rendering for black fills.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .coco import VOCABULARY
from .errors import ScenarioParseError

KERNEL_MIN = 3
KERNEL_MAX = 31


@dataclass(frozen=True)
class SolidColor:
    r: int
    g: int
    b: int

    def __post_init__(self):
        for v in (self.r, self.g, self.b):
            if not 0 <= v <= 255:
                raise ValueError(f"color channel out of range [0, 255]: {v}")


@dataclass(frozen=True)
class GaussianBlur:
    kernel: int

    def __post_init__(self):
        if self.kernel % 2 == 0 or not KERNEL_MIN <= self.kernel <= KERNEL_MAX:
            raise ValueError(
                f"blur kernel must be odd and within "
                f"[{KERNEL_MIN}, {KERNEL_MAX}], got {self.kernel}"
            )


@dataclass(frozen=True)
class Grayscale:
    pass


TransformKind = SolidColor | GaussianBlur | Grayscale


@dataclass(frozen=True)
class Foreground:
    pass


@dataclass(frozen=True)
class Background:
    pass


@dataclass(frozen=True)
class KeyObject:
    category: str


@dataclass(frozen=True)
class InverseKeyObject:
    category: str


RegionRef = Foreground | Background | KeyObject | InverseKeyObject


@dataclass(frozen=True)
class Clause:
    region: RegionRef
    transform: TransformKind | None = None


@dataclass(frozen=True)
class Scenario:
    clauses: tuple[Clause, ...]


_SOLID_COLOR_RE = re.compile(
    r"solidcolor\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)", re.IGNORECASE
)
_BLUR_RE = re.compile(r"blur(\d+)", re.IGNORECASE)


def _parse_region(text: str) -> RegionRef:
    lowered = text.lower()
    if lowered == "f":
        return Foreground()
    if lowered == "b":
        return Background()
    inverse = lowered.startswith("!")
    name = lowered[1:].strip() if inverse else lowered
    if name not in VOCABULARY:
        raise ScenarioParseError(
            f"unknown region {text!r}; expected F, B, a key-object category "
            f"({', '.join(VOCABULARY)}) or !category"
        )
    return InverseKeyObject(name) if inverse else KeyObject(name)


def _parse_transform(text: str) -> TransformKind:
    lowered = text.lower()
    if lowered == "grayscale":
        return Grayscale()
    if lowered == "solidblack":
        return SolidColor(0, 0, 0)
    m = _SOLID_COLOR_RE.fullmatch(text)
    if m:
        r, g, b = (int(v) for v in m.groups())
        for v in (r, g, b):
            if v > 255:
                raise ScenarioParseError(
                    f"color channel out of range [0, 255] in {text!r}"
                )
        return SolidColor(r, g, b)
    m = _BLUR_RE.fullmatch(text)
    if m:
        kernel = int(m.group(1))
        if kernel % 2 == 0 or not KERNEL_MIN <= kernel <= KERNEL_MAX:
            raise ScenarioParseError(
                f"blur kernel must be odd and within [{KERNEL_MIN}, "
                f"{KERNEL_MAX}], got {kernel}"
            )
        return GaussianBlur(kernel)
    raise ScenarioParseError(
        f"unknown transform {text!r}; expected Blur<k>, SolidBlack, "
        "SolidColor(r,g,b) or Grayscale"
    )


def parse_scenario(text: str) -> Scenario:
    """Parse a scenario string such as "F+B:Blur11" or "F:SolidBlack+B"."""
    if not text or not text.strip():
        raise ScenarioParseError("scenario string is empty")
    parts = text.split("+")
    if len(parts) < 2:
        raise ScenarioParseError(
            f"scenario {text!r} must contain at least two '+'-joined clauses"
        )
    clauses = []
    seen_regions = set()
    for part in parts:
        part = part.strip()
        if not part:
            raise ScenarioParseError(f"empty clause in scenario {text!r}")
        region_text, sep, transform_text = part.partition(":")
        region = _parse_region(region_text.strip())
        if region in seen_regions:
            raise ScenarioParseError(
                f"duplicate region {format_region(region)!r} in scenario {text!r}"
            )
        seen_regions.add(region)
        transform = None
        if sep:
            transform_text = transform_text.strip()
            if not transform_text:
                raise ScenarioParseError(f"missing transform after ':' in {part!r}")
            transform = _parse_transform(transform_text)
        clauses.append(Clause(region, transform))
    return Scenario(tuple(clauses))


def format_region(region: RegionRef) -> str:
    if isinstance(region, Foreground):
        return "F"
    if isinstance(region, Background):
        return "B"
    if isinstance(region, KeyObject):
        return region.category
    return f"!{region.category}"


def format_transform(transform: TransformKind) -> str:
    if isinstance(transform, Grayscale):
        return "Grayscale"
    if isinstance(transform, GaussianBlur):
        return f"Blur{transform.kernel}"
    if (transform.r, transform.g, transform.b) == (0, 0, 0):
        return "SolidBlack"
    return f"SolidColor({transform.r},{transform.g},{transform.b})"


def format_scenario(sc: Scenario) -> str:
    """Render the canonical string; parse_scenario(format_scenario(sc)) == sc."""
    parts = []
    for clause in sc.clauses:
        text = format_region(clause.region)
        if clause.transform is not None:
            text += f":{format_transform(clause.transform)}"
        parts.append(text)
    return "+".join(parts)


def kernel_sweep(lo: int, hi: int) -> list[int]:
    """All odd kernel sizes in [lo, hi], ascending."""
    if not KERNEL_MIN <= lo <= hi <= KERNEL_MAX:
        raise ValueError(
            f"sweep bounds must satisfy {KERNEL_MIN} <= lo <= hi <= "
            f"{KERNEL_MAX}, got ({lo}, {hi})"
        )
    start = lo if lo % 2 == 1 else lo + 1
    return list(range(start, hi + 1, 2))


def blur_kernels(sc: Scenario) -> list[int]:
    """Kernel sizes of every blur clause, in scenario order."""
    return [c.transform.kernel for c in sc.clauses
            if isinstance(c.transform, GaussianBlur)]


__all__ = [
    "KERNEL_MIN", "KERNEL_MAX",
    "SolidColor", "GaussianBlur", "Grayscale", "TransformKind",
    "Foreground", "Background", "KeyObject", "InverseKeyObject", "RegionRef",
    "Clause", "Scenario",
    "parse_scenario", "format_scenario", "format_region", "format_transform",
    "kernel_sweep", "blur_kernels",
]
