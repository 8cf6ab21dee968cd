"""Full-reference quality metrics and per-channel change statistics.

SSIM runs on the luma plane with the standard 11x11 Gaussian window.
The contrast and intensity statistics are relative changes of per-channel
stddev and mean; they are reported per channel because the enhancement
methods act on each RGB channel separately.  Degenerate inputs (constant
reference channel, no chromatic overlap) produce scores carrying an error
code instead of raising, so batch runs can record them as table cells.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d

from .core import RgbImage, hue_of
from .errors import MismatchError

LUMA_WEIGHTS = (0.299, 0.587, 0.114)

_WINDOW_SIDE = 11
_WINDOW_SIGMA = 1.5
_K1 = 0.01
_K2 = 0.03


@dataclass(frozen=True)
class MetricScore:
    """One metric evaluation; value is None iff error holds a code."""

    name: str
    value: float | None
    channel: str = "all"
    error: str | None = None

    def ok(self) -> bool:
        return self.error is None


def _require_matching(ref: RgbImage, test: RgbImage) -> None:
    if ref.pixels.shape != test.pixels.shape:
        raise MismatchError(
            f"image dimensions differ: {ref.width}x{ref.height} vs {test.width}x{test.height}")


def luma(img: RgbImage) -> np.ndarray:
    """Luminance plane 0.299 R + 0.587 G + 0.114 B."""
    wr, wg, wb = LUMA_WEIGHTS
    return wr * img.channel(0) + wg * img.channel(1) + wb * img.channel(2)


def _gaussian_window(side: int, sigma: float) -> np.ndarray:
    half = (side - 1) / 2.0
    g = np.exp(-((np.arange(side) - half) ** 2) / (2.0 * sigma ** 2))
    win = np.outer(g, g)
    return win / win.sum()


def ssim(ref: RgbImage, test: RgbImage) -> MetricScore:
    """Mean local structural similarity over the luma plane.

    11x11 Gaussian window (sigma 1.5) in valid mode, stabilizers
    C1 = (0.01 L)^2 and C2 = (0.03 L)^2 with dynamic range L = 1.
    """
    _require_matching(ref, test)
    if min(ref.width, ref.height) < _WINDOW_SIDE:
        raise MismatchError(
            f"images must be at least {_WINDOW_SIDE}px on each side for the "
            f"local window, got {ref.width}x{ref.height}")
    x, y = luma(ref), luma(test)
    win = _gaussian_window(_WINDOW_SIDE, _WINDOW_SIGMA)
    c1, c2 = _K1 ** 2, _K2 ** 2

    mu_x = convolve2d(x, win, mode="valid")
    mu_y = convolve2d(y, win, mode="valid")
    xx = convolve2d(x * x, win, mode="valid") - mu_x * mu_x
    yy = convolve2d(y * y, win, mode="valid") - mu_y * mu_y
    xy = convolve2d(x * y, win, mode="valid") - mu_x * mu_y

    score_map = ((2 * mu_x * mu_y + c1) * (2 * xy + c2)) / (
        (mu_x * mu_x + mu_y * mu_y + c1) * (xx + yy + c2))
    return MetricScore("ssim", float(score_map.mean()))


def _as_plane(channel) -> np.ndarray:
    arr = np.asarray(channel, dtype=np.float64)
    if arr.ndim != 2:
        raise MismatchError(f"expected a 2-D channel plane, got shape {arr.shape}")
    return arr


def contrast_enhancement(ref_channel, enh_channel, channel: str = "all") -> MetricScore:
    """Relative stddev change (sigma_enh - sigma_ref) / sigma_ref."""
    ref = _as_plane(ref_channel)
    enh = _as_plane(enh_channel)
    if ref.shape != enh.shape:
        raise MismatchError(f"channel shapes differ: {ref.shape} vs {enh.shape}")
    s_ref = float(ref.std())
    if s_ref == 0.0:
        return MetricScore("contrast", None, channel, "constant-reference")
    return MetricScore("contrast", (float(enh.std()) - s_ref) / s_ref, channel)


def intensity_enhancement(ref_channel, enh_channel, channel: str = "all") -> MetricScore:
    """Relative mean change (mu_enh - mu_ref) / mu_ref."""
    ref = _as_plane(ref_channel)
    enh = _as_plane(enh_channel)
    if ref.shape != enh.shape:
        raise MismatchError(f"channel shapes differ: {ref.shape} vs {enh.shape}")
    m_ref = float(ref.mean())
    if m_ref == 0.0:
        return MetricScore("intensity", None, channel, "zero-reference")
    return MetricScore("intensity", (float(enh.mean()) - m_ref) / m_ref, channel)


def hue_deviation(ref: RgbImage, test: RgbImage) -> MetricScore:
    """Mean circular hue distance in degrees over mutually chromatic pixels."""
    _require_matching(ref, test)
    h_ref, h_test = hue_of(ref), hue_of(test)
    both = h_ref.defined & h_test.defined
    if not both.any():
        return MetricScore("hue_dev", None, "all", "no-chromatic-overlap")
    diff = np.abs(h_ref.degrees[both] - h_test.degrees[both])
    diff = np.minimum(diff, 360.0 - diff)
    return MetricScore("hue_dev", float(diff.mean()))
