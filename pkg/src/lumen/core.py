"""Image representation and the value-map / region machinery.

Images are held as float64 arrays normalized to [0, 1]; 8-bit files are
divided by 255 on load and re-quantized on save.  All functions here are
pure: they never mutate their inputs and are safe to call concurrently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

DARKER = 0  # region label for V < delta; brighter bins are labeled 1..m

_M_EPS = 1e-9  # absorbs float noise in phi/delta before taking the ceiling


def _as_readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class RgbImage:
    """A three-channel raster, shape (height, width, 3), channels in [0, 1]."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ParameterError(f"expected (H, W, 3) pixel array, got shape {px.shape}")
        if px.shape[0] < 2 or px.shape[1] < 2:
            raise ParameterError(f"image must be at least 2x2, got {px.shape[1]}x{px.shape[0]}")
        if not np.all(np.isfinite(px)):
            raise ParameterError("pixel values must be finite")
        if px.min() < 0.0 or px.max() > 1.0:
            raise ParameterError("pixel values must lie in [0, 1]")
        object.__setattr__(self, "pixels", _as_readonly(px))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def channel(self, index: int) -> np.ndarray:
        """One color plane as a (H, W) array; 0=R, 1=G, 2=B."""
        return self.pixels[:, :, index]


@dataclass(frozen=True, eq=False)
class ValueMap:
    """Per-pixel HSV value channel V = max(R, G, B) of a source image."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 2:
            raise ParameterError(f"expected (H, W) value array, got shape {v.shape}")
        object.__setattr__(self, "values", _as_readonly(v))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class RegionMask:
    """Per-pixel region labels: DARKER (0) or brighter bin k in 1..m."""

    labels: np.ndarray
    m: int

    def __post_init__(self):
        lab = np.array(self.labels, dtype=np.int32, copy=True)
        if lab.ndim != 2:
            raise ParameterError(f"expected (H, W) label array, got shape {lab.shape}")
        if lab.min() < 0 or lab.max() > self.m:
            raise ParameterError("labels must lie in 0..m")
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]


@dataclass(frozen=True, eq=False)
class HueMap:
    """Per-pixel hue in degrees [0, 360); NaN where the pixel is achromatic."""

    degrees: np.ndarray
    defined: np.ndarray

    @property
    def width(self) -> int:
        return self.degrees.shape[1]

    @property
    def height(self) -> int:
        return self.degrees.shape[0]


@dataclass(frozen=True)
class EnhanceParams:
    """Tuning knobs of the two-branch enhancer plus their derived quantities.

    delta is the value-channel threshold splitting darker from brighter
    pixels; beta and omega set the stepped brighter-branch denominators
    H_k = beta + (k-1)*omega for k = 1..m with m = ceil(phi/delta).

    The documented operating range for delta is (0, 1); values >= phi are
    accepted and degenerate to "every pixel darker", which is how the
    darker-branch-only baseline can be expressed through the same
    parameter set.
    """

    delta: float = 0.4
    beta: float = 1.475
    omega: float = 0.025
    phi: float = 1.0
    half_unit: float = 0.5
    m: int = field(init=False)
    h: tuple = field(init=False)

    def __post_init__(self):
        if not (self.delta > 0.0 and math.isfinite(self.delta)):
            raise ParameterError(f"delta must be a positive real, got {self.delta}")
        if not (1.45 <= self.beta <= 1.50):
            raise ParameterError(f"beta must lie in [1.45, 1.50], got {self.beta}")
        if not (0.0 <= self.omega <= 0.025):
            raise ParameterError(f"omega must lie in [0, 0.025], got {self.omega}")
        if self.phi <= 0.0:
            raise ParameterError(f"phi must be positive, got {self.phi}")
        if self.half_unit < 0.0:
            raise ParameterError(f"half_unit must be nonnegative, got {self.half_unit}")
        m = max(1, math.ceil(self.phi / self.delta - _M_EPS))
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "h", tuple(self.beta + k * self.omega for k in range(m)))

    def bin_edges(self) -> np.ndarray:
        """The m+1 boundaries partitioning [delta, phi] into equal-width bins."""
        width = (self.phi - self.delta) / self.m
        return np.array([self.delta + k * width for k in range(self.m + 1)])

    def as_dict(self) -> dict:
        return {"delta": self.delta, "beta": self.beta, "omega": self.omega,
                "phi": self.phi, "half_unit": self.half_unit, "m": self.m}


def to_value_map(img: RgbImage) -> ValueMap:
    """HSV value channel of an image: per-pixel max over R, G, B."""
    return ValueMap(img.pixels.max(axis=2))


def classify_regions(vmap: ValueMap, params: EnhanceParams) -> RegionMask:
    """Label every pixel darker (V < delta) or with its brighter bin.

    Brighter bin k covers [delta + (k-1)*w, delta + k*w) for bin width
    w = (phi - delta)/m; the top bin is closed at phi so V = phi is
    always classified.
    """
    v = vmap.values
    labels = np.zeros(v.shape, dtype=np.int32)
    bright = v >= params.delta
    if params.delta < params.phi and bright.any():
        inner = params.bin_edges()[1:-1]
        labels[bright] = 1 + np.searchsorted(inner, v[bright], side="right")
    return RegionMask(labels, params.m)


def hue_of(img: RgbImage) -> HueMap:
    """Standard RGB -> HSV hue, NaN-marked where max(R,G,B) == min(R,G,B)."""
    r, g, b = img.channel(0), img.channel(1), img.channel(2)
    mx = np.max(img.pixels, axis=2)
    mn = np.min(img.pixels, axis=2)
    chroma = mx - mn
    defined = chroma > 0.0
    safe = np.where(defined, chroma, 1.0)
    hue = np.select(
        [defined & (r == mx), defined & (g == mx), defined & (b == mx)],
        [np.mod((g - b) / safe, 6.0) * 60.0,
         ((b - r) / safe + 2.0) * 60.0,
         ((r - g) / safe + 4.0) * 60.0],
        default=np.nan,
    )
    deg = np.where(defined, np.mod(hue, 360.0), np.nan)
    deg.setflags(write=False)
    mask = defined.copy()
    mask.setflags(write=False)
    return HueMap(deg, mask)
