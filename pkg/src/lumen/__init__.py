"""Contrast enhancement for capsule endoscopy frames.

Combines a half-unit weighted bilinear pass for dark regions with a
thresholded weighted bilinear pass for bright regions, blends the result
with the source frame, and ships the histogram-equalization baselines and
full-reference quality metrics used to evaluate it.
"""

from .core import (
    DARKER,
    EnhanceParams,
    HueMap,
    RegionMask,
    RgbImage,
    ValueMap,
    classify_regions,
    hue_of,
    to_value_map,
)
from .enhance import (
    CwbWeights,
    EnhancedImage,
    adaptive_hist_equalize,
    clahe,
    cwb_weights,
    enhance_hwb_only,
    enhance_pm,
    hist_equalize,
    hwb_value,
    lanczos3_resize,
    tw_weight,
    twb_value,
)
from .errors import ImageFormatError, LumenError, MismatchError, ParameterError
from .fsim import fsimc
from .harness import (
    MethodSpec,
    ReportTable,
    SpecularSpot,
    SyntheticSpec,
    emit_report,
    from_json,
    run_benchmark,
    score_metric,
    synth_vignette,
    synthetic_suite,
)
from .image_io import load_image, save_image
from .metrics import (
    MetricScore,
    contrast_enhancement,
    hue_deviation,
    intensity_enhancement,
    ssim,
)

__version__ = "0.1.0"

__all__ = [
    "DARKER",
    "CwbWeights",
    "EnhanceParams",
    "EnhancedImage",
    "HueMap",
    "ImageFormatError",
    "LumenError",
    "MethodSpec",
    "MetricScore",
    "MismatchError",
    "ParameterError",
    "RegionMask",
    "ReportTable",
    "RgbImage",
    "SpecularSpot",
    "SyntheticSpec",
    "ValueMap",
    "adaptive_hist_equalize",
    "clahe",
    "classify_regions",
    "contrast_enhancement",
    "cwb_weights",
    "emit_report",
    "enhance_hwb_only",
    "enhance_pm",
    "from_json",
    "fsimc",
    "hist_equalize",
    "hue_deviation",
    "hue_of",
    "hwb_value",
    "intensity_enhancement",
    "lanczos3_resize",
    "load_image",
    "run_benchmark",
    "save_image",
    "score_metric",
    "ssim",
    "synth_vignette",
    "synthetic_suite",
    "to_value_map",
    "tw_weight",
    "twb_value",
]
