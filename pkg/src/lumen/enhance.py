"""Enhancement algorithms.

The two-branch method works on overlapping 2x2 pixel groups: dark pixels
(V below the threshold) get the half-unit weighted bilinear gain of 2,
bright pixels get stepped weights (CW_n + 0.5)/H_k whose gain shrinks as
the value channel grows.  The enhanced intermediate is clamped to [0, 1]
and averaged with the source frame, which caps every output channel at
(1 + source)/2.

Also here: the per-channel histogram-equalization baselines (HE, AHE,
CLAHE) and a separable Lanczos-3 resampler.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .core import DARKER, EnhanceParams, RgbImage, classify_regions, to_value_map
from .errors import ParameterError

LEVELS = 256  # histogram baselines quantize channels to 8-bit levels


@dataclass(frozen=True)
class CwbWeights:
    """Conventional bilinear weights for fractional offsets (dr, dc).

    w = ((1-dr)(1-dc), dr(1-dc), (1-dr)dc, dr*dc) in the group order
    (r,c), (r,c+1), (r+1,c), (r+1,c+1); the four weights sum to 1.
    """

    dr: float
    dc: float
    w: tuple = field(init=False)

    def __post_init__(self):
        if not (0.0 <= self.dr <= 1.0 and 0.0 <= self.dc <= 1.0):
            raise ParameterError(f"offsets must lie in [0, 1], got ({self.dr}, {self.dc})")
        w = ((1.0 - self.dr) * (1.0 - self.dc),
             self.dr * (1.0 - self.dc),
             (1.0 - self.dr) * self.dc,
             self.dr * self.dc)
        object.__setattr__(self, "w", w)


# The enhancer runs at source resolution, so there is no sub-pixel offset;
# the group centroid (0.5, 0.5) makes all four CW_n equal to 0.25.
CENTERED_WEIGHTS = CwbWeights(0.5, 0.5)


@dataclass(frozen=True, eq=False)
class EnhancedImage:
    """An output image together with the method and parameters that made it."""

    image: RgbImage
    method: str
    params: Mapping[str, object]


def cwb_weights(dr: float, dc: float) -> CwbWeights:
    """Bilinear weights for a four-pixel group at fractional offsets (dr, dc)."""
    return CwbWeights(dr, dc)


def _check_group(group) -> np.ndarray:
    g = np.asarray(group, dtype=np.float64)
    if g.shape != (4,):
        raise ParameterError(f"pixel group must have exactly 4 entries, got shape {g.shape}")
    if g.min() < 0.0 or g.max() > 1.0:
        raise ParameterError("group values must lie in [0, 1]")
    return g


def hwb_value(group: Sequence[float]) -> float:
    """Half-unit weighted bilinear value of a 2x2 group: sum / 2, unclamped."""
    return float(_check_group(group).sum() / 2.0)


def tw_weight(n: int, k: int, w: CwbWeights, params: EnhanceParams) -> float:
    """Thresholded weight for group member n (1..4) in brighter bin k (1..m)."""
    if not 1 <= n <= 4:
        raise ParameterError(f"group index must be 1..4, got {n}")
    if not 1 <= k <= params.m:
        raise ParameterError(f"bin must be 1..{params.m}, got {k}")
    return float((w.w[n - 1] + params.half_unit) / params.h[k - 1])


def twb_value(group: Sequence[float], k: int, w: CwbWeights, params: EnhanceParams) -> float:
    """Thresholded weighted bilinear value of a group in bin k, unclamped."""
    g = _check_group(group)
    return float(sum(g[n - 1] * tw_weight(n, k, w, params) for n in (1, 2, 3, 4)))


def _group_sums(px: np.ndarray) -> np.ndarray:
    """Sum of each pixel's 2x2 group, edge-replicated on the last row/column."""
    padded = np.pad(px, ((0, 1), (0, 1), (0, 0)), mode="edge")
    return (padded[:-1, :-1] + padded[:-1, 1:] + padded[1:, :-1] + padded[1:, 1:])


def _blend_with_source(px: np.ndarray, intermediate: np.ndarray) -> np.ndarray:
    return (np.clip(intermediate, 0.0, 1.0) + px) / 2.0


def enhance_pm(img: RgbImage, params: EnhanceParams | None = None) -> EnhancedImage:
    """Two-branch enhancement blended with the source frame.

    Per output pixel and channel: the 2x2 group anchored there is summed;
    pixels with V < delta take sum/2 (gain 2 on the group mean), the rest
    take sum * 0.75/H_k for their bin k (centered bilinear weights plus the
    half unit).  The intermediate is clamped to [0, 1] before averaging
    with the source, so no channel exceeds (1 + source)/2.
    """
    if params is None:
        params = EnhanceParams()
    px = img.pixels
    sums = _group_sums(px)
    mask = classify_regions(to_value_map(img), params)

    dark = mask.labels == DARKER
    gain = np.empty(mask.labels.shape, dtype=np.float64)
    gain[dark] = 0.5
    if not dark.all():
        h = np.asarray(params.h)
        gain[~dark] = 0.75 / h[mask.labels[~dark] - 1]

    out = _blend_with_source(px, sums * gain[:, :, None])
    return EnhancedImage(RgbImage(out), "pm", params.as_dict())


def enhance_hwb_only(img: RgbImage) -> EnhancedImage:
    """Darker-branch-only baseline: every pixel gets the half-unit gain."""
    px = img.pixels
    out = _blend_with_source(px, _group_sums(px) / 2.0)
    return EnhancedImage(RgbImage(out), "hwb", {})


def _quantize(px: np.ndarray) -> np.ndarray:
    """[0,1] floats to 8-bit levels, round half up."""
    return np.floor(px * (LEVELS - 1) + 0.5).astype(np.intp)


def _he_lut(hist: np.ndarray, total: float) -> np.ndarray:
    """Equalization lookup: level -> round(255 * cdf)/255, as [0,1] floats."""
    cdf = np.cumsum(hist) / total
    return np.floor((LEVELS - 1) * cdf + 0.5) / (LEVELS - 1)


def hist_equalize(img: RgbImage) -> EnhancedImage:
    """Global histogram equalization, each RGB channel independently."""
    q = _quantize(img.pixels)
    out = np.empty_like(img.pixels)
    for c in range(3):
        hist = np.bincount(q[:, :, c].ravel(), minlength=LEVELS)
        out[:, :, c] = _he_lut(hist, q[:, :, c].size)[q[:, :, c]]
    return EnhancedImage(RgbImage(out), "he", {})


def _tile_starts(extent: int, tile: int) -> np.ndarray:
    return np.arange(0, extent, tile)


def _tile_luts(q: np.ndarray, tile: int, clip: float | None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-tile equalization LUTs plus the tile center coordinates.

    Tiles are tile x tile starting at the top-left corner; the last row and
    column of tiles may be smaller.  With clip set, each tile histogram is
    capped at clip * tile_pixel_count and the excess is spread uniformly
    over all levels before the cdf is taken.
    """
    h, w = q.shape
    ys, xs = _tile_starts(h, tile), _tile_starts(w, tile)
    luts = np.empty((len(ys), len(xs), LEVELS))
    for i, y0 in enumerate(ys):
        y1 = min(y0 + tile, h)
        for j, x0 in enumerate(xs):
            x1 = min(x0 + tile, w)
            block = q[y0:y1, x0:x1]
            hist = np.bincount(block.ravel(), minlength=LEVELS).astype(np.float64)
            if clip is not None:
                limit = clip * block.size
                excess = np.maximum(hist - limit, 0.0).sum()
                hist = np.minimum(hist, limit) + excess / LEVELS
            luts[i, j] = _he_lut(hist, block.size)
    cy = (ys + np.minimum(ys + tile, h) - 1) / 2.0
    cx = (xs + np.minimum(xs + tile, w) - 1) / 2.0
    return luts, cy, cx


def _interp_axis(extent: int, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """For each coordinate: bracketing tile indices and the blend fraction."""
    pos = np.arange(extent, dtype=np.float64)
    if len(centers) == 1:
        zero = np.zeros(extent, dtype=np.intp)
        return zero, zero, np.zeros(extent)
    hi = np.clip(np.searchsorted(centers, pos, side="right"), 1, len(centers) - 1)
    lo = hi - 1
    t = np.clip((pos - centers[lo]) / (centers[hi] - centers[lo]), 0.0, 1.0)
    return lo, hi, t


def _tile_equalize_channel(q: np.ndarray, tile: int, clip: float | None) -> np.ndarray:
    luts, cy, cx = _tile_luts(q, tile, clip)
    r0, r1, ty = _interp_axis(q.shape[0], cy)
    c0, c1, tx = _interp_axis(q.shape[1], cx)
    ty, tx = ty[:, None], tx[None, :]
    r0g, r1g = r0[:, None], r1[:, None]
    c0g, c1g = c0[None, :], c1[None, :]
    r0g, r1g, c0g, c1g = np.broadcast_arrays(r0g, r1g, c0g, c1g)
    blended = ((1 - ty) * (1 - tx) * luts[r0g, c0g, q]
               + ty * (1 - tx) * luts[r1g, c0g, q]
               + (1 - ty) * tx * luts[r0g, c1g, q]
               + ty * tx * luts[r1g, c1g, q])
    # the four weights sum to 1 only up to rounding; keep values legal
    return np.clip(blended, 0.0, 1.0)


def _check_tile(img: RgbImage, tile: int) -> None:
    if tile < 2 or tile > min(img.width, img.height):
        raise ParameterError(
            f"tile must lie in [2, min(width, height)] = [2, {min(img.width, img.height)}], got {tile}")


def adaptive_hist_equalize(img: RgbImage, tile: int) -> EnhancedImage:
    """Per-tile histogram equalization with mappings blended between tile centers."""
    _check_tile(img, tile)
    q = _quantize(img.pixels)
    out = np.empty_like(img.pixels)
    for c in range(3):
        out[:, :, c] = _tile_equalize_channel(q[:, :, c], tile, clip=None)
    return EnhancedImage(RgbImage(out), "ahe", {"tile": tile})


def clahe(img: RgbImage, tile: int, clip: float) -> EnhancedImage:
    """Contrast-limited AHE: tile histograms capped at clip * tile area."""
    _check_tile(img, tile)
    if not 0.0 < clip <= 1.0:
        raise ParameterError(f"clip must lie in (0, 1], got {clip}")
    q = _quantize(img.pixels)
    out = np.empty_like(img.pixels)
    for c in range(3):
        out[:, :, c] = _tile_equalize_channel(q[:, :, c], tile, clip=clip)
    return EnhancedImage(RgbImage(out), "clahe", {"tile": tile, "clip": clip})


def _lanczos3(x: np.ndarray) -> np.ndarray:
    """sinc(x) * sinc(x/3) on |x| < 3, zero outside, 1 at the origin."""
    out = np.zeros_like(x)
    inside = np.abs(x) < 3.0
    xi = x[inside]
    with np.errstate(invalid="ignore", divide="ignore"):
        val = np.sinc(xi) * np.sinc(xi / 3.0)
    out[inside] = val
    return out


def _resample_axis(arr: np.ndarray, out_len: int, scale: float) -> np.ndarray:
    """Resample axis 0 of arr with a normalized, edge-clamped Lanczos-3 kernel."""
    n = arr.shape[0]
    dst = np.arange(out_len, dtype=np.float64)
    src = (dst + 0.5) / scale - 0.5
    base = np.floor(src).astype(np.intp)
    offsets = np.arange(-2, 4)                      # six taps cover support 3
    taps = base[:, None] + offsets[None, :]
    weights = _lanczos3(src[:, None] - taps)
    weights /= weights.sum(axis=1, keepdims=True)
    clamped = np.clip(taps, 0, n - 1)
    return np.einsum("ot,ot...->o...", weights, arr[clamped])


def lanczos3_resize(img: RgbImage, scale: float) -> RgbImage:
    """Separable Lanczos-3 resampling by a positive scale factor.

    Kernel support is fixed at 3 source pixels; sampling is edge-clamped
    and each output tap set is renormalized to sum 1, so constant images
    are fixed points.  The result is clamped to [0, 1].
    """
    if not scale > 0.0:
        raise ParameterError(f"scale must be positive, got {scale}")
    out_h = int(round(img.height * scale))
    out_w = int(round(img.width * scale))
    if out_h < 2 or out_w < 2:
        raise ParameterError(
            f"scale {scale} yields degenerate output size {out_w}x{out_h}")
    rows = _resample_axis(img.pixels, out_h, scale)
    cols = _resample_axis(np.swapaxes(rows, 0, 1), out_w, scale)
    return RgbImage(np.clip(np.swapaxes(cols, 0, 1), 0.0, 1.0))
