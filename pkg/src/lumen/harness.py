"""Synthetic imagery, batch benchmarking, and report emission.

The synthetic generator produces vignettes shaped like capsule frames:
a bright warm center whose luminance decays radially, optional saturated
highlight disc, and seeded uniform noise.  run_benchmark fans the
(image x method) matrix out over a thread pool (capped by LUMEN_THREADS)
and folds the scores into a deterministic table whose CSV rendering is
byte-stable under any schedule.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Mapping, Sequence

import numpy as np

from .core import EnhanceParams, RgbImage
from .enhance import (
    adaptive_hist_equalize,
    clahe,
    enhance_hwb_only,
    enhance_pm,
    hist_equalize,
)
from .errors import ImageFormatError, LumenError, MismatchError, ParameterError
from .fsim import fsimc
from .metrics import (
    MetricScore,
    contrast_enhancement,
    hue_deviation,
    intensity_enhancement,
    ssim,
)

DEFAULT_CLIP = 0.01
_TILES_ACROSS = 8


@dataclass(frozen=True)
class SpecularSpot:
    """A saturated highlight disc: center (row, col), radius in pixels."""

    center: tuple
    radius: float
    level: float = 1.0

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ParameterError(f"spot radius must be positive, got {self.radius}")
        if not 0.0 < self.level <= 1.0:
            raise ParameterError(f"spot level must lie in (0, 1], got {self.level}")


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for one deterministic synthetic vignette."""

    width: int = 64
    height: int = 64
    base_hue: float = 25.0
    falloff: float = 2.0
    center_level: float = 0.85
    specular: SpecularSpot | None = None
    noise_amp: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.width < 2 or self.height < 2:
            raise ParameterError(
                f"vignette must be at least 2x2, got {self.width}x{self.height}")
        if self.falloff < 0.0:
            raise ParameterError(f"falloff must be nonnegative, got {self.falloff}")
        if not 0.0 < self.center_level <= 1.0:
            raise ParameterError(
                f"center_level must lie in (0, 1], got {self.center_level}")
        if self.noise_amp < 0.0:
            raise ParameterError(f"noise_amp must be nonnegative, got {self.noise_amp}")


def _hue_to_rgb(hue_deg: float, saturation: float, value: np.ndarray) -> np.ndarray:
    """HSV to RGB for a fixed hue/saturation and a per-pixel value plane."""
    h = (hue_deg % 360.0) / 60.0
    c = value * saturation
    x = c * (1.0 - abs(h % 2.0 - 1.0))
    zero = np.zeros_like(value)
    sector = [(c, x, zero), (x, c, zero), (zero, c, x),
              (zero, x, c), (x, zero, c), (c, zero, x)][int(h) % 6]
    m = value - c
    return np.stack([plane + m for plane in sector], axis=2)


def synth_vignette(spec: SyntheticSpec) -> RgbImage:
    """Radial vignette: luminance center_level * (1 - r)^falloff at hue
    base_hue (saturation 0.5), plus seeded uniform noise and an optional
    saturated disc.  Deterministic for a given spec."""
    yy, xx = np.mgrid[0:spec.height, 0:spec.width]
    cy, cx = (spec.height - 1) / 2.0, (spec.width - 1) / 2.0
    corner = math.hypot(cy, cx)
    r = np.clip(np.hypot(yy - cy, xx - cx) / corner, 0.0, 1.0)
    lum = spec.center_level * (1.0 - r) ** spec.falloff

    px = _hue_to_rgb(spec.base_hue, 0.5, lum)
    if spec.noise_amp > 0.0:
        rng = np.random.default_rng(spec.seed)
        px = px + rng.uniform(-spec.noise_amp, spec.noise_amp, px.shape)
    if spec.specular is not None:
        sy, sx = spec.specular.center
        inside = np.hypot(yy - sy, xx - sx) <= spec.specular.radius
        px[inside] = spec.specular.level
    return RgbImage(np.clip(px, 0.0, 1.0))


@dataclass(frozen=True)
class MethodSpec:
    """A method id plus its parameter overrides; label names the column."""

    name: str
    params: Mapping = field(default_factory=dict)
    label: str | None = None

    def column(self) -> str:
        return self.label if self.label is not None else self.name


def default_tile(img: RgbImage) -> int:
    """Tile size in pixels that splits the short side into 8 tiles."""
    return max(2, math.ceil(min(img.width, img.height) / _TILES_ACROSS))


def _run_pm(img: RgbImage, params: Mapping) -> RgbImage:
    return enhance_pm(img, EnhanceParams(**params)).image


def _run_hwb(img: RgbImage, params: Mapping) -> RgbImage:
    if params:
        raise ParameterError("hwb takes no parameters")
    return enhance_hwb_only(img).image


def _run_he(img: RgbImage, params: Mapping) -> RgbImage:
    if params:
        raise ParameterError("he takes no parameters")
    return hist_equalize(img).image


def _run_ahe(img: RgbImage, params: Mapping) -> RgbImage:
    tile = params.get("tile", default_tile(img))
    extra = set(params) - {"tile"}
    if extra:
        raise ParameterError(f"unknown ahe parameters: {sorted(extra)}")
    return adaptive_hist_equalize(img, tile).image


def _run_clahe(img: RgbImage, params: Mapping) -> RgbImage:
    tile = params.get("tile", default_tile(img))
    clip = params.get("clip", DEFAULT_CLIP)
    extra = set(params) - {"tile", "clip"}
    if extra:
        raise ParameterError(f"unknown clahe parameters: {sorted(extra)}")
    return clahe(img, tile, clip).image


def _run_identity(img: RgbImage, params: Mapping) -> RgbImage:
    if params:
        raise ParameterError("identity takes no parameters")
    return img


METHODS: Mapping[str, Callable[[RgbImage, Mapping], RgbImage]] = {
    "pm": _run_pm,
    "hwb": _run_hwb,
    "he": _run_he,
    "ahe": _run_ahe,
    "clahe": _run_clahe,
    "identity": _run_identity,
}

# metric id -> (scorer, MetricScore name, channel tag)
_METRIC_TABLE: Mapping[str, tuple] = {
    "ssim": (lambda ref, enh: ssim(ref, enh), "ssim", "all"),
    "fsimc": (lambda ref, enh: fsimc(ref, enh), "fsimc", "all"),
    "hue_dev": (lambda ref, enh: hue_deviation(ref, enh), "hue_dev", "all"),
    "contrast_r": (lambda ref, enh: contrast_enhancement(
        ref.channel(0), enh.channel(0), "R"), "contrast", "R"),
    "contrast_g": (lambda ref, enh: contrast_enhancement(
        ref.channel(1), enh.channel(1), "G"), "contrast", "G"),
    "contrast_b": (lambda ref, enh: contrast_enhancement(
        ref.channel(2), enh.channel(2), "B"), "contrast", "B"),
    "intensity_r": (lambda ref, enh: intensity_enhancement(
        ref.channel(0), enh.channel(0), "R"), "intensity", "R"),
    "intensity_g": (lambda ref, enh: intensity_enhancement(
        ref.channel(1), enh.channel(1), "G"), "intensity", "G"),
    "intensity_b": (lambda ref, enh: intensity_enhancement(
        ref.channel(2), enh.channel(2), "B"), "intensity", "B"),
}

METRIC_IDS = tuple(_METRIC_TABLE)


def score_metric(metric_id: str, ref: RgbImage, enh: RgbImage) -> MetricScore:
    """Evaluate one registered metric by id."""
    if metric_id not in _METRIC_TABLE:
        raise ParameterError(
            f"unknown metric {metric_id!r}; known: {sorted(_METRIC_TABLE)}")
    return _METRIC_TABLE[metric_id][0](ref, enh)


def synthetic_suite(count: int, side: int = 96) -> list:
    """Deterministic batch of varied vignettes, as (id, image) pairs.

    Falloff, brightness, hue, noise, and highlight placement cycle
    through fixed progressions so any count reproduces the same images.
    """
    if count < 1:
        raise ParameterError(f"need at least one synthetic image, got {count}")
    pairs = []
    for i in range(count):
        spot = None
        if i % 3 == 2:
            spot = SpecularSpot((side * 0.3, side * (0.25 + 0.05 * (i % 5))),
                                radius=side * 0.04)
        spec = SyntheticSpec(
            width=side,
            height=side,
            base_hue=(20.0 + 7.0 * i) % 360.0,
            falloff=1.5 + 0.5 * (i % 4),
            center_level=0.95 - 0.1 * (i % 3),
            specular=spot,
            noise_amp=0.02 + 0.01 * (i % 3),
            seed=i + 1,
        )
        pairs.append((f"synthetic{i:02d}", synth_vignette(spec)))
    return pairs


@dataclass(frozen=True)
class ReportTable:
    """Benchmark scores: one MetricScore per (image, method, metric)."""

    rows: tuple
    methods: tuple
    metrics: tuple
    cells: Mapping
    metadata: Mapping

    def cell(self, image: str, method: str, metric: str) -> MetricScore:
        return self.cells[(image, method, metric)]


def _error_score(metric_id: str, code: str) -> MetricScore:
    _, name, channel = _METRIC_TABLE[metric_id]
    return MetricScore(name, None, channel, code)


def _error_code(exc: LumenError) -> str:
    if isinstance(exc, MismatchError):
        return "mismatch"
    if isinstance(exc, ImageFormatError):
        return "io"
    if isinstance(exc, ParameterError):
        return "param"
    return "error"


def _score_cell(image: RgbImage | None, mspec: MethodSpec,
                metric_ids: Sequence[str]) -> dict:
    if image is None:
        return {mid: _error_score(mid, "io") for mid in metric_ids}
    try:
        enhanced = METHODS[mspec.name](image, mspec.params)
    except LumenError as exc:
        code = _error_code(exc)
        return {mid: _error_score(mid, code) for mid in metric_ids}
    scores = {}
    for mid in metric_ids:
        scorer = _METRIC_TABLE[mid][0]
        try:
            scores[mid] = scorer(image, enhanced)
        except LumenError as exc:
            scores[mid] = _error_score(mid, _error_code(exc))
    return scores


def _worker_cap() -> int:
    raw = os.environ.get("LUMEN_THREADS")
    if raw is None:
        return min(8, os.cpu_count() or 1)
    try:
        cap = int(raw)
    except ValueError:
        raise ParameterError(f"LUMEN_THREADS must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ParameterError(f"LUMEN_THREADS must be positive, got {cap}")
    return cap


def run_benchmark(images: Sequence, methods: Sequence,
                  metrics: Sequence[str]) -> ReportTable:
    """Score every method against every reference image.

    images: (id, RgbImage | None) pairs; a None image marks an input that
    could not be loaded and yields io error cells rather than aborting the
    run.  methods: method ids or MethodSpec entries.  Failures inside a
    cell become error-coded scores; the table is always fully populated.
    """
    if not images:
        raise ParameterError("no images to benchmark")
    if not methods:
        raise ParameterError("no methods to benchmark")

    pairs = list(images)
    ids = [img_id for img_id, _ in pairs]
    if len(set(ids)) != len(ids):
        raise ParameterError("image identifiers must be unique")

    mspecs = [m if isinstance(m, MethodSpec) else MethodSpec(m) for m in methods]
    for spec in mspecs:
        if spec.name not in METHODS:
            raise ParameterError(
                f"unknown method {spec.name!r}; known: {sorted(METHODS)}")
    columns = [spec.column() for spec in mspecs]
    if len(set(columns)) != len(columns):
        raise ParameterError("method labels must be unique; set label= on duplicates")

    metric_ids = list(metrics)
    for mid in metric_ids:
        if mid not in _METRIC_TABLE:
            raise ParameterError(
                f"unknown metric {mid!r}; known: {sorted(_METRIC_TABLE)}")

    jobs = [(img_id, image, spec) for img_id, image in pairs for spec in mspecs]
    cells = {}
    with ThreadPoolExecutor(max_workers=_worker_cap()) as pool:
        futures = [pool.submit(_score_cell, image, spec, metric_ids)
                   for _, image, spec in jobs]
        for (img_id, _, spec), fut in zip(jobs, futures):
            for mid, score in fut.result().items():
                cells[(img_id, spec.column(), mid)] = score

    metadata = {
        "methods": {spec.column(): dict(spec.params) for spec in mspecs},
        "metrics": metric_ids,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    return ReportTable(
        rows=tuple(sorted(ids)),
        methods=tuple(columns),
        metrics=tuple(metric_ids),
        cells=cells,
        metadata=metadata,
    )


def _csv_columns(table: ReportTable) -> list:
    if len(table.metrics) == 1:
        return [(m, table.metrics[0], m) for m in table.methods]
    return [(m, mid, f"{m}:{mid}") for m in table.methods for mid in table.metrics]


def _render_csv(table: ReportTable) -> str:
    columns = _csv_columns(table)
    lines = ["image," + ",".join(header for _, _, header in columns)
             if columns else "image"]
    if table.metrics:
        for img_id in table.rows:
            cells = []
            for method, metric_id, _ in columns:
                score = table.cell(img_id, method, metric_id)
                cells.append(f"ERR:{score.error}" if score.error is not None
                             else f"{score.value:.4f}")
            lines.append(img_id + "," + ",".join(cells))
    return "\n".join(lines) + "\n"


def _render_json(table: ReportTable) -> str:
    images = {}
    for img_id in table.rows:
        per_method = {}
        for method in table.methods:
            per_metric = {}
            for mid in table.metrics:
                score = table.cell(img_id, method, mid)
                per_metric[mid] = ({"error": score.error} if score.error is not None
                                   else score.value)
            per_method[method] = per_metric
        images[img_id] = per_method
    doc = {
        "metadata": dict(table.metadata),
        "methods": list(table.methods),
        "metrics": list(table.metrics),
        "images": images,
    }
    return json.dumps(doc, indent=2) + "\n"


def emit_report(table: ReportTable, format: str, destination) -> int:
    """Write the table as CSV (4 decimals) or JSON (full precision).

    Returns the number of bytes written.  CSV output is byte-deterministic
    for a given table; the run timestamp lives only in the JSON metadata.
    """
    if format == "csv":
        text = _render_csv(table)
    elif format == "json":
        text = _render_json(table)
    else:
        raise ParameterError(f"unknown report format {format!r}; use csv or json")
    data = text.encode("utf-8")
    with open(destination, "wb") as fh:
        fh.write(data)
    return len(data)


def from_json(text: str) -> ReportTable:
    """Rebuild a ReportTable from emit_report's JSON rendering."""
    doc = json.loads(text)
    methods = tuple(doc["methods"])
    metrics = tuple(doc["metrics"])
    for mid in metrics:
        if mid not in _METRIC_TABLE:
            raise ParameterError(f"unknown metric {mid!r} in report")
    cells = {}
    for img_id, per_method in doc["images"].items():
        for method in methods:
            for mid in metrics:
                raw = per_method[method][mid]
                if isinstance(raw, dict):
                    cells[(img_id, method, mid)] = _error_score(mid, raw["error"])
                else:
                    _, name, channel = _METRIC_TABLE[mid]
                    cells[(img_id, method, mid)] = MetricScore(name, raw, channel)
    return ReportTable(
        rows=tuple(sorted(doc["images"])),
        methods=methods,
        metrics=metrics,
        cells=cells,
        metadata=doc["metadata"],
    )
