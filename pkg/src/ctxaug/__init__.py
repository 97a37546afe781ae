"""Context-aware augmentation and dataset tooling for fall-detection imagery.

Submodules:

- ``coco``: COCO-JSON dataset store with uncompressed RLE masks.
- ``masks``: dense-mask algebra (invert, union, crop, resize).
- ``transforms``: pixel transforms and masked compositing.
- ``scenario``: the region/transform scenario nomenclature.
- ``pipeline``: the full augmentation pipeline and batch runner.
- ``builder``: dataset construction, splits, and composition stats.
- ``evaluation``: confusion counts, F1, subsets, sweep reports.
"""

from . import builder, coco, evaluation, masks, pipeline, scenario, transforms
from .coco import (
    Annotation,
    Category,
    Dataset,
    ImageRecord,
    RleMask,
    load_dataset,
    rle_decode,
    rle_encode,
    save_dataset,
)
from .errors import (
    CliConfigError,
    CtxaugError,
    DatasetValidationError,
    PredictionError,
    RegionResolutionError,
    ScenarioParseError,
)
from .masks import Rect
from .pipeline import BlurPlacement, PipelineConfig, run_pipeline, run_pipeline_u8
from .scenario import Scenario, format_scenario, kernel_sweep, parse_scenario

__version__ = "0.1.0"

__all__ = [
    "builder", "coco", "evaluation", "masks", "pipeline", "scenario",
    "transforms",
    "Annotation", "Category", "Dataset", "ImageRecord", "RleMask",
    "load_dataset", "rle_decode", "rle_encode", "save_dataset",
    "CtxaugError", "CliConfigError", "DatasetValidationError",
    "PredictionError", "RegionResolutionError", "ScenarioParseError",
    "Rect", "BlurPlacement", "PipelineConfig", "run_pipeline",
    "run_pipeline_u8",
    "Scenario", "format_scenario", "kernel_sweep", "parse_scenario",
    "__version__",
]
